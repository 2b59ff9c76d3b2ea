#include "salad/songcraft.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

namespace salad {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kSlotMarker = "{SLOT}";

std::vector<std::string> split_words(std::string_view text) {
  std::vector<std::string> out;
  std::istringstream in{std::string(text)};
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

MelodyNote parse_note(std::string_view token) {
  const auto colon = token.find(':');
  if (colon == std::string_view::npos) throw TemplateError("note '" + std::string(token) + "' is not midi:seconds");
  MelodyNote note;
  const std::string_view pitch = token.substr(0, colon);
  auto [p, ec] = std::from_chars(pitch.data(), pitch.data() + pitch.size(), note.midi_pitch);
  if (ec != std::errc{} || p != pitch.data() + pitch.size()) {
    throw TemplateError("bad MIDI pitch in '" + std::string(token) + "'");
  }
  const std::string seconds(token.substr(colon + 1));
  std::size_t used = 0;
  try {
    note.duration = std::stod(seconds, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != seconds.size()) throw TemplateError("bad duration in '" + std::string(token) + "'");
  try {
    validate(note);
  } catch (const Error& e) {
    throw TemplateError(e.what());
  }
  return note;
}

std::vector<LyricSegment> parse_lyric_line(std::string_view line) {
  std::vector<LyricSegment> segments;
  while (!line.empty()) {
    const auto pos = line.find(kSlotMarker);
    if (pos != 0) {
      segments.push_back({false, std::string(line.substr(0, pos))});
      if (pos == std::string_view::npos) break;
    }
    segments.push_back({true, {}});
    line.remove_prefix(pos + kSlotMarker.size());
  }
  return segments;
}

std::size_t reading_morae(const KanaTable& kana, std::string_view reading) {
  try {
    return mora_count(kana, reading);
  } catch (const Error&) {
    return 0;
  }
}

/// Learning words in display order, or learned words when there are none.
std::vector<const VocabEntry*> candidates(const VocabDatabase& db, bool& fallback) {
  if (db.entries.empty()) throw EmptyVocabulary();
  std::vector<const VocabEntry*> learning;
  std::vector<const VocabEntry*> learned;
  for (const VocabEntry* e : display_order(db)) (e->progress.learned() ? learned : learning).push_back(e);
  fallback = learning.empty();
  return fallback ? learned : learning;
}

}  // namespace

void validate(const MelodyNote& note) {
  if (note.midi_pitch < kMinMidiPitch || note.midi_pitch > kMaxMidiPitch) {
    throw InvalidArgument("MIDI pitch " + std::to_string(note.midi_pitch) + " outside [36, 96]");
  }
  if (!(note.duration > 0.0) || !std::isfinite(note.duration)) throw InvalidArgument("note duration must be > 0");
}

std::size_t LyricTemplate::slot_count() const {
  std::size_t n = 0;
  for (const auto& line : lines) {
    n += static_cast<std::size_t>(std::count_if(line.begin(), line.end(), [](const auto& s) { return s.slot; }));
  }
  return n;
}

std::size_t LyricTemplate::fixed_morae(const KanaTable& kana) const {
  std::size_t n = 0;
  for (const auto& line : lines) {
    for (const auto& seg : line) {
      if (!seg.slot) n += mora_count(kana, seg.kana);
    }
  }
  return n;
}

double LyricTemplate::total_duration() const {
  double total = 0.0;
  for (const auto& note : melody) total += note.duration;
  return total;
}

LyricTemplate parse_template(std::string_view text, const KanaTable& kana) {
  LyricTemplate tmpl;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  for (std::string raw; std::getline(in, raw);) {
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    if (raw.empty() || raw.front() == '#') continue;
    const std::string where = "template line " + std::to_string(line_no) + ": ";
    if (raw.front() == '@') {
      if (!tmpl.lines.empty()) throw TemplateError(where + "directive after lyric lines");
      const auto words = split_words(raw);
      if (words[0] == "@id") {
        if (words.size() != 2 || !tmpl.template_id.empty()) throw TemplateError(where + "expected a single @id");
        for (char c : words[1]) {
          const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' ||
                          c == '-';
          if (!ok) throw TemplateError(where + "template id may hold only [A-Za-z0-9_-]");
        }
        tmpl.template_id = words[1];
      } else if (words[0] == "@notes") {
        for (std::size_t i = 1; i < words.size(); ++i) tmpl.melody.push_back(parse_note(words[i]));
      } else {
        throw TemplateError(where + "unknown directive " + words[0]);
      }
      continue;
    }
    auto segments = parse_lyric_line(raw);
    for (const auto& seg : segments) {
      if (seg.slot) continue;
      try {
        validate_kana(seg.kana);
      } catch (const Error& e) {
        throw TemplateError(where + e.what());
      }
    }
    tmpl.lines.push_back(std::move(segments));
  }
  if (tmpl.template_id.empty()) throw TemplateError("template without @id");
  if (tmpl.melody.empty()) throw TemplateError("template '" + tmpl.template_id + "' has no notes");
  if (tmpl.slot_count() < 1) throw TemplateError("template '" + tmpl.template_id + "' has no {SLOT}");
  const std::size_t fixed = tmpl.fixed_morae(kana);
  if (fixed + tmpl.slot_count() > tmpl.melody.size()) {
    throw TemplateError("template '" + tmpl.template_id + "' leaves no room for slot words");
  }
  return tmpl;
}

LyricTemplate load_template(const fs::path& path, const KanaTable& kana) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure("cannot open template " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_template(buf.str(), kana);
}

std::vector<LyricTemplate> load_templates(const fs::path& dir, const KanaTable& kana) {
  std::vector<LyricTemplate> out;
  std::error_code ec;
  for (const auto& item : fs::directory_iterator(dir, ec)) {
    if (item.path().extension() == ".tmpl") out.push_back(load_template(item.path(), kana));
  }
  if (ec) throw IoFailure("cannot list templates in " + dir.string() + ": " + ec.message());
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.template_id < b.template_id; });
  for (std::size_t i = 1; i < out.size(); ++i) {
    if (out[i].template_id == out[i - 1].template_id) throw TemplateError("duplicate template id " + out[i].template_id);
  }
  return out;
}

SlotSelection select_slot_words(const VocabDatabase& db, std::size_t n) {
  if (n < 1) throw InvalidArgument("slot word count must be at least 1");
  SlotSelection sel;
  const auto pool = candidates(db, sel.used_fallback);
  for (std::size_t i = 0; i < n; ++i) {
    const VocabEntry* e = pool[i % pool.size()];
    sel.words.push_back({e->surface, e->reading});
  }
  return sel;
}

FilledLyric fill_template(const LyricTemplate& tmpl, std::span<const SlotWord> words, const KanaTable& kana) {
  if (words.size() != tmpl.slot_count()) throw SlotArityMismatch(tmpl.slot_count(), words.size());
  FilledLyric out;
  std::size_t next_word = 0;
  std::size_t morae = 0;
  for (const auto& line : tmpl.lines) {
    for (const auto& seg : line) {
      if (!seg.slot) {
        out.lyric += seg.kana;
        morae += mora_count(kana, seg.kana);
        continue;
      }
      const SlotWord& word = words[next_word];
      if (word.reading.empty()) throw InvalidArgument("slot word '" + word.surface + "' has no reading");
      const std::size_t n = mora_count(kana, word.reading);
      out.placements.push_back({next_word, word.surface, morae, n});
      out.lyric += word.reading;
      morae += n;
      ++next_word;
    }
  }
  if (morae != tmpl.melody.size()) throw MoraOverflow(morae, tmpl.melody.size());
  return out;
}

SongScore align_to_melody(std::string_view lyric, std::span<const MelodyNote> melody, const KanaTable& kana) {
  auto units = kana_to_phonemes(kana, lyric);
  if (units.size() != melody.size()) throw LengthMismatch(units.size(), melody.size());
  SongScore score;
  score.lyric_text = std::string(lyric);
  score.notes.reserve(units.size());
  for (std::size_t i = 0; i < units.size(); ++i) {
    validate(melody[i]);
    score.notes.emplace_back(melody[i], std::move(units[i]));
  }
  return score;
}

RenderedSong generate_song(const VocabDatabase& db, const LyricTemplate& tmpl, const ProviderSet& providers,
                           const KanaTable& kana, const AudioSink& sink) {
  bool fallback = false;
  const auto pool = candidates(db, fallback);
  const std::size_t slots = tmpl.slot_count();
  const std::size_t fixed = tmpl.fixed_morae(kana);
  std::size_t budget = tmpl.melody.size() - fixed;

  // Per slot, walk the candidate list (cyclically) from where the previous
  // slot stopped; a word fits when it leaves at least one mora for each
  // later slot, and the last slot must use the budget exactly.
  std::vector<SlotWord> words;
  std::size_t cursor = 0;
  for (std::size_t s = 0; s < slots; ++s) {
    const std::size_t later = slots - s - 1;
    std::optional<std::size_t> chosen_morae;
    for (int attempt = 0; attempt < kSlotAttempts; ++attempt) {
      const VocabEntry* e = pool[cursor % pool.size()];
      ++cursor;
      const std::size_t m = reading_morae(kana, e->reading);
      const bool fits = m >= 1 && (later == 0 ? m == budget : m + later <= budget);
      if (fits) {
        words.push_back({e->surface, e->reading});
        chosen_morae = m;
        break;
      }
    }
    if (!chosen_morae) {
      throw NoFittingWords("no vocabulary word fits slot " + std::to_string(s + 1) + " of template '" +
                           tmpl.template_id + "' after " + std::to_string(kSlotAttempts) + " attempts");
    }
    budget -= *chosen_morae;
  }

  const FilledLyric filled = fill_template(tmpl, words, kana);
  SongScore score = align_to_melody(filled.lyric, tmpl.melody, kana);
  for (const auto& w : words) score.slot_words.push_back(w.surface);
  score.used_fallback = fallback;

  const AudioClip clip = providers.singing_synth->render(score);
  RenderedSong song;
  song.audio_ref = sink(clip);
  song.song_id = song.audio_ref;
  song.duration = clip.duration_seconds();
  song.score = std::move(score);
  return song;
}

}  // namespace salad
