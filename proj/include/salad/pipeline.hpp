#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "salad/json_io.hpp"
#include "salad/providers.hpp"
#include "salad/vocab.hpp"

namespace salad {

struct LearnerInput {
  enum class Kind { Text, Audio };

  Kind kind = Kind::Text;
  std::optional<std::string> text;
  std::optional<AudioClip> audio;
  std::string session_id;
  Timestamp received_at{};

  static LearnerInput from_text(std::string text, std::string session_id = {}, Timestamp at = now_utc());
  static LearnerInput from_audio(AudioClip audio, std::string session_id = {}, Timestamp at = now_utc());
};

/// Throws InvalidArgument unless exactly the payload matching `kind` is present.
void validate(const LearnerInput& input);

/// A non-fatal stage failure recorded on the result.
struct StageWarning {
  std::string stage;
  std::string code;
  std::string message;

  bool operator==(const StageWarning&) const = default;
};

struct PipelineResult {
  std::string transcript;
  TranslationTriple triple;
  std::vector<GrammarNote> grammar;
  VocabReport vocab_report;
  std::optional<std::string> pronunciation;  // stored clip id
  double pronunciation_seconds = 0.0;
  std::vector<StageWarning> warnings;
  std::int64_t elapsed_ms = 0;
  Timestamp received_at{};
};

/// Fields dropped by canonicalize(): they vary between otherwise identical runs.
inline constexpr const char* kVolatileFields[] = {"elapsed_ms", "received_at"};

Json to_json(const PipelineResult& result);
/// Removes kVolatileFields from the top level of a serialized result.
Json canonicalize(Json result);

namespace stage {
inline constexpr const char* kTranscription = "transcription";
inline constexpr const char* kTranslation = "translation";
inline constexpr const char* kGrammar = "grammar";
inline constexpr const char* kTracking = "tracking";
inline constexpr const char* kSynthesis = "synthesis";
}  // namespace stage

/// A stage failure. `code()` is the stage-level code (TranslationFailed, ...),
/// `cause_code()` the underlying provider error code.
class PipelineError : public Error {
 public:
  PipelineError(std::string code, std::string stage, std::string cause_code, std::string message)
      : Error(std::move(code), std::move(message), std::move(stage)), cause_code_(std::move(cause_code)) {}

  const std::string& cause_code() const noexcept { return cause_code_; }

 private:
  std::string cause_code_;
};

/// Where synthesized pronunciation clips go; returns the clip id.
using AudioSink = std::function<std::string(const AudioClip&)>;

struct ProcessOutcome {
  VocabDatabase db;
  PipelineResult result;
};

/// transcribe (audio only) -> translate -> explain -> track -> speak -> store.
/// Grammar and synthesis failures degrade to empty notes / no clip; any
/// other stage failure throws PipelineError and yields no database.
ProcessOutcome process_input(const LearnerInput& input, const VocabDatabase& db, const ProviderSet& providers,
                             const AudioSink& sink);

struct ReplayOutcome {
  VocabDatabase db;
  std::vector<PipelineResult> results;
};

/// Input `index` (1-based) failed fatally; `partial()` holds the state after
/// the inputs before it.
class AbortedAt : public Error {
 public:
  AbortedAt(std::size_t index, const PipelineError& cause, ReplayOutcome partial);

  std::size_t index() const noexcept { return index_; }
  const std::string& cause_code() const noexcept { return cause_code_; }
  const ReplayOutcome& partial() const noexcept { return partial_; }

 private:
  std::size_t index_;
  std::string cause_code_;
  ReplayOutcome partial_;
};

ReplayOutcome replay_corpus(std::span<const LearnerInput> inputs, const VocabDatabase& db,
                            const ProviderSet& providers, const AudioSink& sink);

}  // namespace salad
