#include "salad/mock_providers.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "salad/error.hpp"

namespace salad {

namespace {

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    out.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

/// Data rows of a TSV file: comments and blank lines skipped, CR stripped.
template <typename Fn>
void for_each_row(std::string_view text, std::string_view file, std::size_t columns, Fn&& fn) {
  std::size_t line_no = 0;
  for (std::string_view line : split(text, '\n')) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    auto cols = split(line, '\t');
    if (cols.size() != columns) {
      throw InvalidArgument(std::string(file) + " line " + std::to_string(line_no) + ": expected " +
                            std::to_string(columns) + " columns");
    }
    for (auto col : cols) {
      if (col.empty()) throw InvalidArgument(std::string(file) + " line " + std::to_string(line_no) + ": empty column");
    }
    fn(cols, line_no);
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

}  // namespace

std::string normalize_english(std::string_view text) {
  std::string out;
  bool pending_space = false;
  for (char c : text) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back((c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c);
  }
  while (!out.empty() && (out.back() == '.' || out.back() == '!' || out.back() == '?' || out.back() == ' ')) {
    out.pop_back();
  }
  return out;
}

std::string romanize_tokens(const KanaTable& kana, std::span<const SegmentToken> tokens) {
  std::string out;
  for (const auto& token : tokens) {
    if (!out.empty()) out += ' ';
    if (token.surface == "は" && token.reading == "は") {
      out += "wa";
    } else if (token.surface == "へ" && token.reading == "へ") {
      out += "e";
    } else {
      out += kana_to_romaji(kana, token.reading);
    }
  }
  return out;
}

FixtureSet FixtureSet::parse(std::string_view corpus_tsv, std::string_view lexicon_tsv, std::string_view grammar_tsv) {
  FixtureSet set;
  for_each_row(corpus_tsv, "corpus.tsv", 5, [&](const auto& cols, std::size_t line_no) {
    TranslationTriple t;
    t.source_en = std::string(cols[0]);
    t.kanji = std::string(cols[1]);
    t.kana = std::string(cols[2]);
    t.romaji = std::string(cols[3]);
    for (auto pair : split(cols[4], ' ')) {
      const auto colon = pair.find(':');
      if (colon == std::string_view::npos || colon == 0 || colon + 1 == pair.size()) {
        throw InvalidArgument("corpus.tsv line " + std::to_string(line_no) + ": malformed segment '" +
                              std::string(pair) + "'");
      }
      t.segmentation.push_back({std::string(pair.substr(0, colon)), std::string(pair.substr(colon + 1))});
    }
    validate_triple(t);
    set.corpus.push_back(std::move(t));
  });
  for_each_row(lexicon_tsv, "lexicon.tsv", 3, [&](const auto& cols, std::size_t) {
    validate_kana(cols[1]);
    set.lexicon.push_back({std::string(cols[0]), std::string(cols[1]), std::string(cols[2])});
  });
  for_each_row(grammar_tsv, "grammar_rules.tsv", 2, [&](const auto& cols, std::size_t line_no) {
    GrammarRule rule;
    std::string_view pattern = cols[0];
    if (pattern.front() == '~') {
      rule.suffix = true;
      pattern.remove_prefix(1);
    }
    if (pattern.empty()) throw InvalidArgument("grammar_rules.tsv line " + std::to_string(line_no) + ": empty pattern");
    rule.pattern = std::string(pattern);
    rule.explanation = std::string(cols[1]);
    set.grammar.push_back(std::move(rule));
  });
  return set;
}

FixtureSet FixtureSet::load(const std::filesystem::path& fixture_dir) {
  return parse(read_file(fixture_dir / "corpus.tsv"), read_file(fixture_dir / "lexicon.tsv"),
               read_file(fixture_dir / "grammar_rules.tsv"));
}

MockTranslator::MockTranslator(std::shared_ptr<const FixtureSet> fixtures, std::shared_ptr<const KanaTable> kana)
    : fixtures_(std::move(fixtures)), kana_(std::move(kana)) {
  for (std::size_t i = 0; i < fixtures_->corpus.size(); ++i) {
    by_sentence_.emplace(normalize_english(fixtures_->corpus[i].source_en), i);
  }
  for (std::size_t i = 0; i < fixtures_->lexicon.size(); ++i) {
    by_gloss_.emplace(normalize_english(fixtures_->lexicon[i].meaning), i);  // first row wins
  }
}

TranslationTriple MockTranslator::translate(std::string_view source_en) const {
  const std::string key = normalize_english(source_en);
  if (key.empty()) throw UntranslatableInput("empty input");
  if (const auto it = by_sentence_.find(key); it != by_sentence_.end()) {
    TranslationTriple t = fixtures_->corpus[it->second];
    t.source_en = std::string(source_en);
    return t;
  }

  TranslationTriple t;
  t.source_en = std::string(source_en);
  std::istringstream words(key);
  for (std::string word; words >> word;) {
    const auto it = by_gloss_.find(word);
    if (it == by_gloss_.end()) throw UntranslatableInput("unknown word '" + word + "'");
    const LexiconRow& row = fixtures_->lexicon[it->second];
    t.kanji += row.surface;
    t.kana += row.reading;
    t.segmentation.push_back({row.surface, row.reading});
  }
  t.romaji = romanize_tokens(*kana_, t.segmentation);
  return t;
}

std::vector<GrammarNote> MockGrammarian::explain(const TranslationTriple& triple) const {
  std::vector<GrammarNote> notes;
  std::set<std::string> seen;
  for (const auto& token : triple.segmentation) {
    for (const auto& rule : fixtures_->grammar) {
      const bool hit = rule.suffix ? ends_with(token.surface, rule.pattern) : token.surface == rule.pattern;
      if (hit && seen.insert(rule.pattern).second) notes.push_back({rule.pattern, rule.explanation});
    }
  }
  return notes;
}

std::string MockRecognizer::transcribe(const AudioClip& audio) const {
  if (audio.samples.empty()) throw UnrecognizableAudio("empty audio");
  if (audio.sample_rate != kSampleRate) {
    throw UnrecognizableAudio("expected " + std::to_string(kSampleRate) + " Hz audio, got " +
                              std::to_string(audio.sample_rate));
  }
  if (!audio.transcript || audio.transcript->empty()) throw UnrecognizableAudio("clip carries no transcript chunk");
  return *audio.transcript;
}

std::size_t MockSpeechSynth::mora_boundary(std::size_t index, int sample_rate) {
  // round(index * 0.150 s * rate), half up, in exact integer arithmetic
  const std::size_t scaled = index * static_cast<std::size_t>(kMoraMillis) * static_cast<std::size_t>(sample_rate);
  return (scaled + 500) / 1000;
}

AudioClip MockSpeechSynth::speak(std::string_view kana) const {
  if (kana.empty()) throw InvalidArgument("empty kana");
  const auto units = kana_to_phonemes(*kana_, kana);
  std::vector<Tone> tones;
  tones.reserve(units.size());
  static constexpr std::string_view kVowels[] = {"a", "i", "u", "e", "o"};
  for (std::size_t i = 0; i < units.size(); ++i) {
    const std::string& last = units[i].symbols.back();
    double hz = 0.0;
    if (last == "N") {
      hz = kBaseHz + kStepHz * 5;
    } else {
      for (std::size_t v = 0; v < 5; ++v) {
        if (last == kVowels[v]) hz = kBaseHz + kStepHz * static_cast<double>(v);
      }
    }
    tones.push_back({hz, mora_boundary(i + 1, kSampleRate) - mora_boundary(i, kSampleRate)});
  }
  AudioClip clip;
  clip.samples = render_tones(tones, kSampleRate);
  return clip;
}

AudioClip MockSingingSynth::render(const SongScore& score) const {
  if (score.notes.empty()) throw EmptyScore();
  std::vector<Tone> tones;
  tones.reserve(score.notes.size());
  double elapsed = 0.0;
  std::size_t start = 0;
  for (const auto& [note, unit] : score.notes) {
    elapsed += note.duration;
    const std::size_t end = seconds_to_samples(elapsed, kSampleRate);
    tones.push_back({midi_to_hz(note.midi_pitch), end - start});
    start = end;
  }
  AudioClip clip;
  clip.samples = render_tones(tones, kSampleRate);
  return clip;
}

MockLexicon::MockLexicon(std::shared_ptr<const FixtureSet> fixtures) : fixtures_(std::move(fixtures)) {
  for (std::size_t i = 0; i < fixtures_->lexicon.size(); ++i) by_surface_.emplace(fixtures_->lexicon[i].surface, i);
}

std::string MockLexicon::get_meaning(std::string_view surface) const {
  const auto it = by_surface_.find(surface);
  if (it == by_surface_.end()) throw UnknownWord(std::string(surface));
  return fixtures_->lexicon[it->second].meaning;
}

ProviderSet make_mock_providers(std::shared_ptr<const FixtureSet> fixtures, std::shared_ptr<const KanaTable> kana) {
  ProviderSet set;
  set.translator = std::make_shared<MockTranslator>(fixtures, kana);
  set.grammarian = std::make_shared<MockGrammarian>(fixtures);
  set.recognizer = std::make_shared<MockRecognizer>();
  set.speech_synth = std::make_shared<MockSpeechSynth>(kana);
  set.singing_synth = std::make_shared<MockSingingSynth>();
  set.lexicon = std::make_shared<MockLexicon>(fixtures);
  return set;
}

}  // namespace salad
