#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "salad/error.hpp"
#include "salad/pipeline.hpp"
#include "salad/providers.hpp"
#include "salad/vocab.hpp"

namespace salad {

inline constexpr int kMinMidiPitch = 36;
inline constexpr int kMaxMidiPitch = 96;
/// Candidate substitutions tried per slot before giving up.
inline constexpr int kSlotAttempts = 20;

class EmptyVocabulary : public Error {
 public:
  EmptyVocabulary() : Error("EmptyVocabulary", "the vocabulary database is empty") {}
};

class NoFittingWords : public Error {
 public:
  explicit NoFittingWords(std::string details) : Error("NoFittingWords", std::move(details)) {}
};

class SlotArityMismatch : public Error {
 public:
  SlotArityMismatch(std::size_t slots, std::size_t words)
      : Error("SlotArityMismatch",
              "template has " + std::to_string(slots) + " slot(s) but " + std::to_string(words) + " word(s) given") {}
};

class MoraOverflow : public Error {
 public:
  MoraOverflow(std::size_t morae, std::size_t notes)
      : Error("MoraOverflow",
              "filled lyric has " + std::to_string(morae) + " morae for " + std::to_string(notes) + " notes") {}
};

class LengthMismatch : public Error {
 public:
  LengthMismatch(std::size_t morae, std::size_t notes)
      : Error("LengthMismatch", std::to_string(morae) + " morae vs " + std::to_string(notes) + " notes") {}
};

class TemplateError : public Error {
 public:
  explicit TemplateError(std::string details) : Error("TemplateError", std::move(details)) {}
};

void validate(const MelodyNote& note);

struct LyricSegment {
  bool slot = false;
  std::string kana;  // empty for slots

  bool operator==(const LyricSegment&) const = default;
};

struct LyricTemplate {
  std::string template_id;
  std::vector<std::vector<LyricSegment>> lines;
  std::vector<MelodyNote> melody;

  std::size_t slot_count() const;
  std::size_t fixed_morae(const KanaTable& kana) const;
  double total_duration() const;
};

/// Template text format:
///
///   # comment
///   @id <identifier>
///   @notes <midi>:<seconds> <midi>:<seconds> ...   (repeatable)
///   <lyric line: kana with {SLOT} markers>          (one or more)
///
/// Directives come before lyric lines. Throws TemplateError.
LyricTemplate parse_template(std::string_view text, const KanaTable& kana);
LyricTemplate load_template(const std::filesystem::path& path, const KanaTable& kana);
/// Every `*.tmpl` in `dir`, ordered by template id.
std::vector<LyricTemplate> load_templates(const std::filesystem::path& dir, const KanaTable& kana);

struct SlotWord {
  std::string surface;
  std::string reading;

  bool operator==(const SlotWord&) const = default;
};

struct SlotSelection {
  std::vector<SlotWord> words;
  bool used_fallback = false;  // no learning words; learned words stood in
};

/// The n weakest learning words (progress ascending, then surface), cycling
/// when there are fewer than n.
SlotSelection select_slot_words(const VocabDatabase& db, std::size_t n);

struct SlotPlacement {
  std::size_t slot = 0;
  std::string surface;
  std::size_t first_mora = 0;
  std::size_t morae = 0;
};

struct FilledLyric {
  std::string lyric;  // kana
  std::vector<SlotPlacement> placements;
};

FilledLyric fill_template(const LyricTemplate& tmpl, std::span<const SlotWord> words, const KanaTable& kana);

/// Pairs the i-th mora with the i-th note.
SongScore align_to_melody(std::string_view lyric, std::span<const MelodyNote> melody, const KanaTable& kana);

/// `song_id` is the id of the stored audio, so a song can be fetched by it.
struct RenderedSong {
  std::string song_id;
  SongScore score;
  std::string audio_ref;
  double duration = 0.0;
};

RenderedSong generate_song(const VocabDatabase& db, const LyricTemplate& tmpl, const ProviderSet& providers,
                           const KanaTable& kana, const AudioSink& sink);

}  // namespace salad
