#include "salad/vocab.hpp"

#include <algorithm>
#include <set>

namespace salad {

ProgressLevel::ProgressLevel(int value) : value_(value) {
  if (value < 1 || value > kMaxProgress) {
    throw InvalidArgument("progress " + std::to_string(value) + " outside [1, " + std::to_string(kMaxProgress) + "]");
  }
}

const VocabEntry* VocabDatabase::find(std::string_view surface) const {
  const auto it = entries.find(std::string(surface));
  return it == entries.end() ? nullptr : &it->second;
}

void validate(const VocabEntry& entry) {
  const auto fail = [&](const std::string& why) {
    throw InvalidArgument("vocabulary entry '" + entry.surface + "': " + why);
  };
  if (entry.surface.empty()) fail("empty surface");
  if (entry.meaning.empty()) fail("empty meaning");
  if (entry.progress.value() < 1 || entry.progress.value() > kMaxProgress) fail("progress out of range");
  if (entry.first_seen > entry.last_seen) fail("first_seen after last_seen");
  if (entry.exposure_count < static_cast<std::uint64_t>(entry.progress.value())) fail("exposure_count below progress");
  if (!entry.reading.empty()) validate_kana(entry.reading);
}

void validate(const VocabDatabase& db) {
  if (db.schema_version != kVocabSchemaVersion) {
    throw InvalidArgument("unsupported vocabulary schema_version " + std::to_string(db.schema_version));
  }
  for (const auto& [key, entry] : db.entries) {
    if (key != entry.surface) throw InvalidArgument("vocabulary key '" + key + "' differs from its surface");
    validate(entry);
  }
}

LexiconFailure::LexiconFailure(std::vector<std::string> words, std::string cause, TrackResult partial)
    : Error("LexiconFailure", "meaning lookup failed for " + std::to_string(words.size()) + " word(s): " + cause),
      words_(std::move(words)),
      partial_(std::move(partial)) {}

TrackResult track_vocabulary(std::span<const SegmentToken> sentence, const VocabDatabase& db,
                             const Lexicon& lexicon, Timestamp now) {
  for (const auto& token : sentence) {
    if (token.surface.empty()) throw InvalidArgument("empty word in sentence");
  }

  TrackResult out{db, {}};
  std::map<std::string, std::size_t> advanced_at;
  std::set<std::string> failed_set;
  std::vector<std::string> failed;
  std::string first_cause;

  for (const auto& token : sentence) {
    auto it = out.db.entries.find(token.surface);
    if (it != out.db.entries.end()) {
      VocabEntry& entry = it->second;
      entry.exposure_count += 1;
      entry.last_seen = std::max(entry.last_seen, now);
      const ProgressLevel before = entry.progress;
      if (before.value() < kMaxProgress) {
        entry.progress = before.advanced();
        if (const auto a = advanced_at.find(token.surface); a != advanced_at.end()) {
          out.report.advanced_words[a->second].new_progress = entry.progress.value();
        } else {
          advanced_at.emplace(token.surface, out.report.advanced_words.size());
          out.report.advanced_words.push_back({token.surface, before.value(), entry.progress.value()});
        }
      }
      continue;
    }

    if (failed_set.count(token.surface) != 0) continue;
    std::string meaning;
    try {
      meaning = lexicon.get_meaning(token.surface);
      if (meaning.empty()) throw UnknownWord(token.surface);
    } catch (const std::exception& e) {
      failed_set.insert(token.surface);
      failed.push_back(token.surface);
      if (first_cause.empty()) first_cause = e.what();
      continue;
    }

    VocabEntry entry;
    entry.surface = token.surface;
    entry.reading = token.reading;
    entry.meaning = meaning;
    entry.progress = ProgressLevel(1);
    entry.first_seen = now;
    entry.last_seen = now;
    entry.exposure_count = 1;
    out.db.entries.emplace(token.surface, std::move(entry));
    out.report.new_words.push_back({token.surface, std::move(meaning)});
  }

  out.report.display_lines = display_lines(out.db);
  if (!failed.empty()) throw LexiconFailure(std::move(failed), first_cause, std::move(out));
  return out;
}

std::string format_progress_line(const VocabEntry& entry) {
  return entry.surface + ": " + entry.meaning + " (Progress: " + std::to_string(entry.progress.value()) + "/" +
         std::to_string(kMaxProgress) + ")";
}

std::vector<const VocabEntry*> display_order(const VocabDatabase& db) {
  std::vector<const VocabEntry*> order;
  order.reserve(db.entries.size());
  for (const auto& [surface, entry] : db.entries) order.push_back(&entry);
  // std::map already iterates surfaces in byte (= code point) order
  std::stable_sort(order.begin(), order.end(),
                   [](const VocabEntry* a, const VocabEntry* b) { return a->progress < b->progress; });
  return order;
}

std::vector<std::string> display_lines(const VocabDatabase& db) {
  std::vector<std::string> lines;
  for (const VocabEntry* entry : display_order(db)) lines.push_back(format_progress_line(*entry));
  return lines;
}

std::string_view to_string(WordStatus status) {
  switch (status) {
    case WordStatus::Unknown:
      return "unknown";
    case WordStatus::Learning:
      return "learning";
    case WordStatus::Learned:
      return "learned";
  }
  return "unknown";
}

WordStatus word_status(const VocabDatabase& db, std::string_view surface) {
  const VocabEntry* entry = db.find(surface);
  if (entry == nullptr) return WordStatus::Unknown;
  return entry->progress.learned() ? WordStatus::Learned : WordStatus::Learning;
}

void validate(const SessionRecord& record) {
  if (record.session_id.empty()) throw InvalidArgument("session record without id");
  for (const auto& w : record.words_completed) {
    const bool known = std::find(record.words_advanced.begin(), record.words_advanced.end(), w) !=
                           record.words_advanced.end() ||
                       std::find(record.words_introduced.begin(), record.words_introduced.end(), w) !=
                           record.words_introduced.end();
    if (!known) throw InvalidArgument("completed word '" + w + "' was neither introduced nor advanced");
  }
}

namespace {

void add_unique(std::vector<std::string>& list, const std::string& word) {
  if (std::find(list.begin(), list.end(), word) == list.end()) list.push_back(word);
}

}  // namespace

SessionRecord apply_to_session(SessionRecord session, const VocabReport& report) {
  session.inputs_processed += 1;
  for (const auto& w : report.new_words) add_unique(session.words_introduced, w.surface);
  for (const auto& w : report.advanced_words) {
    add_unique(session.words_advanced, w.surface);
    if (w.new_progress == kMaxProgress) add_unique(session.words_completed, w.surface);
  }
  return session;
}

}  // namespace salad
