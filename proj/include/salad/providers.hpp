#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "salad/audio.hpp"
#include "salad/jp_text.hpp"

namespace salad {

struct SegmentToken {
  std::string surface;
  std::string reading;

  bool operator==(const SegmentToken&) const = default;
};

/// One sentence rendered three ways, plus the provider's word segmentation.
struct TranslationTriple {
  std::string source_en;
  std::string kanji;
  std::string kana;
  std::string romaji;
  std::vector<SegmentToken> segmentation;

  bool operator==(const TranslationTriple&) const = default;
};

/// Throws InvalidArgument when segmentation surfaces do not concatenate to
/// the kanji sentence (whitespace and punctuation ignored) or a reading is
/// not kana.
void validate_triple(const TranslationTriple& triple);

struct GrammarNote {
  std::string pattern;
  std::string explanation;

  bool operator==(const GrammarNote&) const = default;
};

struct MelodyNote {
  int midi_pitch = 69;
  double duration = 0.0;  // seconds

  bool operator==(const MelodyNote&) const = default;
};

struct SongScore {
  std::vector<std::pair<MelodyNote, PhonemeUnit>> notes;
  std::string lyric_text;
  std::vector<std::string> slot_words;
  bool used_fallback = false;

  bool operator==(const SongScore&) const = default;
};

enum class Binding { Mock, Live };

std::string_view to_string(Binding b);

// Capability ports. Implementations must be safe to call concurrently.

class Translator {
 public:
  virtual ~Translator() = default;
  virtual Binding binding() const = 0;
  /// Throws UntranslatableInput or UpstreamFailure.
  virtual TranslationTriple translate(std::string_view source_en) const = 0;
};

class Grammarian {
 public:
  virtual ~Grammarian() = default;
  virtual Binding binding() const = 0;
  virtual std::vector<GrammarNote> explain(const TranslationTriple& triple) const = 0;
};

class Recognizer {
 public:
  virtual ~Recognizer() = default;
  virtual Binding binding() const = 0;
  /// Throws UnrecognizableAudio or UpstreamFailure.
  virtual std::string transcribe(const AudioClip& audio) const = 0;
};

class SpeechSynth {
 public:
  virtual ~SpeechSynth() = default;
  virtual Binding binding() const = 0;
  virtual AudioClip speak(std::string_view kana) const = 0;
};

class SingingSynth {
 public:
  virtual ~SingingSynth() = default;
  virtual Binding binding() const = 0;
  /// Throws EmptyScore on a score without notes.
  virtual AudioClip render(const SongScore& score) const = 0;
};

class Lexicon {
 public:
  virtual ~Lexicon() = default;
  virtual Binding binding() const = 0;
  /// Throws UnknownWord or UpstreamFailure.
  virtual std::string get_meaning(std::string_view surface) const = 0;
};

struct ProviderSet {
  std::shared_ptr<const Translator> translator;
  std::shared_ptr<const Grammarian> grammarian;
  std::shared_ptr<const Recognizer> recognizer;
  std::shared_ptr<const SpeechSynth> speech_synth;
  std::shared_ptr<const SingingSynth> singing_synth;
  std::shared_ptr<const Lexicon> lexicon;

  /// Throws InvalidArgument if any port is unbound.
  void check_bound() const;
};

}  // namespace salad
