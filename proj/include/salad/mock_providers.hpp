#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "salad/providers.hpp"

namespace salad {

struct LexiconRow {
  std::string surface;
  std::string reading;
  std::string meaning;
};

/// A grammar rule matches a segmentation token whose surface equals
/// `pattern`, or, for suffix rules (written `~pattern` in the file), whose
/// surface ends with it.
struct GrammarRule {
  std::string pattern;
  bool suffix = false;
  std::string explanation;
};

/// The hand-authored tables behind the offline providers:
/// `corpus.tsv`, `lexicon.tsv` and `grammar_rules.tsv`.
struct FixtureSet {
  std::vector<TranslationTriple> corpus;  // source_en holds the english column
  std::vector<LexiconRow> lexicon;
  std::vector<GrammarRule> grammar;

  static FixtureSet parse(std::string_view corpus_tsv, std::string_view lexicon_tsv, std::string_view grammar_tsv);
  static FixtureSet load(const std::filesystem::path& fixture_dir);
};

/// Lowercases ASCII, collapses whitespace and drops trailing `.`, `!`, `?`.
/// Corpus lookups compare normalized forms.
std::string normalize_english(std::string_view text);

/// Space-joined per-token romaji. The particle tokens は and へ are written
/// "wa" and "e" as pronounced; every other reading goes through the table.
std::string romanize_tokens(const KanaTable& kana, std::span<const SegmentToken> tokens);

class MockTranslator final : public Translator {
 public:
  MockTranslator(std::shared_ptr<const FixtureSet> fixtures, std::shared_ptr<const KanaTable> kana);
  Binding binding() const override { return Binding::Mock; }
  TranslationTriple translate(std::string_view source_en) const override;

 private:
  std::shared_ptr<const FixtureSet> fixtures_;
  std::shared_ptr<const KanaTable> kana_;
  std::map<std::string, std::size_t> by_sentence_;
  std::map<std::string, std::size_t> by_gloss_;
};

class MockGrammarian final : public Grammarian {
 public:
  explicit MockGrammarian(std::shared_ptr<const FixtureSet> fixtures) : fixtures_(std::move(fixtures)) {}
  Binding binding() const override { return Binding::Mock; }
  std::vector<GrammarNote> explain(const TranslationTriple& triple) const override;

 private:
  std::shared_ptr<const FixtureSet> fixtures_;
};

/// Returns the transcript carried in the clip's metadata channel.
class MockRecognizer final : public Recognizer {
 public:
  Binding binding() const override { return Binding::Mock; }
  std::string transcribe(const AudioClip& audio) const override;
};

/// One 150 ms sine per mora at 220 Hz + 20 Hz x vowel index (a,i,u,e,o);
/// ん sounds at index 5, っ is silent.
class MockSpeechSynth final : public SpeechSynth {
 public:
  static constexpr int kMoraMillis = 150;
  static constexpr double kBaseHz = 220.0;
  static constexpr double kStepHz = 20.0;

  explicit MockSpeechSynth(std::shared_ptr<const KanaTable> kana) : kana_(std::move(kana)) {}
  Binding binding() const override { return Binding::Mock; }
  AudioClip speak(std::string_view kana) const override;

  /// Sample offset at which mora `index` starts (index = count gives the end).
  static std::size_t mora_boundary(std::size_t index, int sample_rate);

 private:
  std::shared_ptr<const KanaTable> kana_;
};

/// One equal-tempered sine per note (A4 = MIDI 69 = 440 Hz).
class MockSingingSynth final : public SingingSynth {
 public:
  Binding binding() const override { return Binding::Mock; }
  AudioClip render(const SongScore& score) const override;
};

class MockLexicon final : public Lexicon {
 public:
  explicit MockLexicon(std::shared_ptr<const FixtureSet> fixtures);
  Binding binding() const override { return Binding::Mock; }
  std::string get_meaning(std::string_view surface) const override;

 private:
  std::shared_ptr<const FixtureSet> fixtures_;
  std::map<std::string, std::size_t, std::less<>> by_surface_;
};

ProviderSet make_mock_providers(std::shared_ptr<const FixtureSet> fixtures, std::shared_ptr<const KanaTable> kana);

}  // namespace salad
