#include "salad/pipeline.hpp"

#include <chrono>

namespace salad {

LearnerInput LearnerInput::from_text(std::string text, std::string session_id, Timestamp at) {
  LearnerInput in;
  in.kind = Kind::Text;
  in.text = std::move(text);
  in.session_id = std::move(session_id);
  in.received_at = at;
  return in;
}

LearnerInput LearnerInput::from_audio(AudioClip audio, std::string session_id, Timestamp at) {
  LearnerInput in;
  in.kind = Kind::Audio;
  in.audio = std::move(audio);
  in.session_id = std::move(session_id);
  in.received_at = at;
  return in;
}

void validate(const LearnerInput& input) {
  const bool ok = input.kind == LearnerInput::Kind::Text ? (input.text.has_value() && !input.audio.has_value())
                                                         : (input.audio.has_value() && !input.text.has_value());
  if (!ok) throw InvalidArgument("learner input must carry exactly the payload named by its kind");
}

Json to_json(const PipelineResult& r) {
  Json grammar = Json::array();
  for (const auto& note : r.grammar) grammar.push_back(to_json(note));
  Json warnings = Json::array();
  for (const auto& w : r.warnings) warnings.push_back({{"stage", w.stage}, {"code", w.code}, {"message", w.message}});
  Json pronunciation = nullptr;
  if (r.pronunciation) pronunciation = {{"id", *r.pronunciation}, {"duration_seconds", r.pronunciation_seconds}};
  return Json{{"transcript", r.transcript},
              {"triple", to_json(r.triple)},
              {"grammar", std::move(grammar)},
              {"vocab_report", to_json(r.vocab_report)},
              {"pronunciation", std::move(pronunciation)},
              {"warnings", std::move(warnings)},
              {"elapsed_ms", r.elapsed_ms},
              {"received_at", to_rfc3339(r.received_at)}};
}

Json canonicalize(Json result) {
  if (result.is_object()) {
    for (const char* key : kVolatileFields) result.erase(key);
  }
  return result;
}

namespace {

std::string code_of(const std::exception& e) {
  if (const auto* err = dynamic_cast<const Error*>(&e)) return err->code();
  return "InternalError";
}

template <typename Fn>
auto run_stage(const char* stage_name, const char* failure_code, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const std::exception& e) {
    throw PipelineError(failure_code, stage_name, code_of(e), std::string(stage_name) + ": " + e.what());
  }
}

}  // namespace

ProcessOutcome process_input(const LearnerInput& input, const VocabDatabase& db, const ProviderSet& providers,
                             const AudioSink& sink) {
  const auto started = std::chrono::steady_clock::now();
  validate(input);
  providers.check_bound();

  PipelineResult result;
  result.received_at = input.received_at;

  if (input.kind == LearnerInput::Kind::Audio) {
    result.transcript = run_stage(stage::kTranscription, "TranscriptionFailed",
                                  [&] { return providers.recognizer->transcribe(*input.audio); });
  } else {
    result.transcript = *input.text;
  }

  result.triple = run_stage(stage::kTranslation, "TranslationFailed", [&] {
    TranslationTriple t = providers.translator->translate(result.transcript);
    validate_triple(t);
    return t;
  });

  try {
    result.grammar = providers.grammarian->explain(result.triple);
  } catch (const std::exception& e) {
    result.grammar.clear();
    result.warnings.push_back({stage::kGrammar, "GrammarFailed", e.what()});
  }

  TrackResult tracked = run_stage(stage::kTracking, "TrackingFailed", [&] {
    return track_vocabulary(result.triple.segmentation, db, *providers.lexicon, input.received_at);
  });
  result.vocab_report = std::move(tracked.report);

  try {
    const AudioClip clip = providers.speech_synth->speak(result.triple.kana);
    result.pronunciation_seconds = clip.duration_seconds();
    result.pronunciation = sink(clip);
  } catch (const std::exception& e) {
    result.pronunciation.reset();
    result.pronunciation_seconds = 0.0;
    result.warnings.push_back({stage::kSynthesis, "SynthesisFailed", e.what()});
  }

  result.elapsed_ms =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - started).count();
  return {std::move(tracked.db), std::move(result)};
}

AbortedAt::AbortedAt(std::size_t index, const PipelineError& cause, ReplayOutcome partial)
    : Error("AbortedAt", "input " + std::to_string(index) + " failed: " + cause.code() + ": " + cause.what(),
            cause.stage()),
      index_(index),
      cause_code_(cause.code()),
      partial_(std::move(partial)) {}

ReplayOutcome replay_corpus(std::span<const LearnerInput> inputs, const VocabDatabase& db,
                            const ProviderSet& providers, const AudioSink& sink) {
  ReplayOutcome out{db, {}};
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    try {
      ProcessOutcome step = process_input(inputs[i], out.db, providers, sink);
      out.db = std::move(step.db);
      out.results.push_back(std::move(step.result));
    } catch (const PipelineError& e) {
      throw AbortedAt(i + 1, e, std::move(out));
    }
  }
  return out;
}

}  // namespace salad
