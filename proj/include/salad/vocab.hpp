#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "salad/error.hpp"
#include "salad/providers.hpp"
#include "salad/timestamp.hpp"

namespace salad {

/// Progress value at which a word counts as learned.
inline constexpr int kMaxProgress = 5;
inline constexpr int kVocabSchemaVersion = 1;

/// Per-word progress in [1, kMaxProgress].
class ProgressLevel {
 public:
  constexpr ProgressLevel() = default;
  explicit ProgressLevel(int value);

  constexpr int value() const noexcept { return value_; }
  constexpr bool learned() const noexcept { return value_ == kMaxProgress; }
  /// One step up, saturating at kMaxProgress.
  constexpr ProgressLevel advanced() const noexcept {
    ProgressLevel next;
    next.value_ = value_ < kMaxProgress ? value_ + 1 : value_;
    return next;
  }

  constexpr auto operator<=>(const ProgressLevel&) const = default;

 private:
  int value_ = 1;
};

struct VocabEntry {
  std::string surface;
  std::string reading;
  std::string meaning;
  ProgressLevel progress;
  Timestamp first_seen{};
  Timestamp last_seen{};
  std::uint64_t exposure_count = 0;

  bool operator==(const VocabEntry&) const = default;
};

struct VocabDatabase {
  std::map<std::string, VocabEntry> entries;
  int schema_version = kVocabSchemaVersion;

  const VocabEntry* find(std::string_view surface) const;
  bool operator==(const VocabDatabase&) const = default;
};

/// Throws InvalidArgument naming the first violated invariant.
void validate(const VocabEntry& entry);
void validate(const VocabDatabase& db);

struct NewWord {
  std::string surface;
  std::string meaning;
  bool operator==(const NewWord&) const = default;
};

struct AdvancedWord {
  std::string surface;
  int old_progress = 0;
  int new_progress = 0;
  bool operator==(const AdvancedWord&) const = default;
};

struct VocabReport {
  std::vector<NewWord> new_words;
  std::vector<AdvancedWord> advanced_words;
  std::vector<std::string> display_lines;

  bool operator==(const VocabReport&) const = default;
};

struct TrackResult {
  VocabDatabase db;
  VocabReport report;
};

/// Meaning resolution failed for at least one word. Those words were not
/// inserted; every other occurrence in the sentence was applied and the
/// resulting state travels with the error.
class LexiconFailure : public Error {
 public:
  LexiconFailure(std::vector<std::string> words, std::string cause, TrackResult partial);

  const std::vector<std::string>& words() const noexcept { return words_; }
  const TrackResult& partial() const noexcept { return partial_; }

 private:
  std::vector<std::string> words_;
  TrackResult partial_;
};

/// One pass of the vocabulary tracking algorithm over a sentence's tokens:
/// known words advance by one per occurrence (saturating at 5), unknown
/// words are inserted at progress 1 with their meaning fetched once from
/// the lexicon. The input database is left untouched.
TrackResult track_vocabulary(std::span<const SegmentToken> sentence, const VocabDatabase& db,
                             const Lexicon& lexicon, Timestamp now);

/// `<surface>: <meaning> (Progress: <p>/5)`
std::string format_progress_line(const VocabEntry& entry);

/// Entries ordered by (progress ascending, surface by code point).
std::vector<const VocabEntry*> display_order(const VocabDatabase& db);

std::vector<std::string> display_lines(const VocabDatabase& db);

enum class WordStatus { Unknown, Learning, Learned };

std::string_view to_string(WordStatus status);

WordStatus word_status(const VocabDatabase& db, std::string_view surface);

struct SessionRecord {
  std::string session_id;
  Timestamp started_at{};
  std::uint64_t inputs_processed = 0;
  std::vector<std::string> words_introduced;
  std::vector<std::string> words_advanced;
  std::vector<std::string> words_completed;

  bool operator==(const SessionRecord&) const = default;
};

void validate(const SessionRecord& record);

SessionRecord apply_to_session(SessionRecord session, const VocabReport& report);

}  // namespace salad
