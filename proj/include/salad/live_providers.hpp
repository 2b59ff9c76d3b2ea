#pragma once

// Adapters for hosted services. Translation, grammar and definitions go
// through a chat-completion endpoint driven by prompt template files;
// recognition, speech and singing talk to plain HTTP endpoints:
//
//   recognizer     POST audio/wav               -> {"text": "..."}
//   speech synth   POST {"text","sample_rate"}  -> audio/wav
//   singing synth  POST <score json>            -> audio/wav
//
// Every adapter retries transport errors, 429 and 5xx with exponential
// backoff, rejects malformed bodies without retrying, and shares a cap on
// in-flight requests.

#include <chrono>
#include <condition_variable>
#include <filesystem>
#include <memory>
#include <mutex>
#include <string>

#include "salad/providers.hpp"

namespace salad {

struct HttpEndpoint {
  std::string url;      // scheme://host[:port]/path
  std::string api_key;  // sent as a bearer token when non-empty
};

struct RetryPolicy {
  int retries = 3;
  std::chrono::milliseconds backoff{200};
  std::chrono::seconds timeout{30};
};

/// Caps concurrent outbound requests.
class RequestLimiter {
 public:
  explicit RequestLimiter(std::size_t capacity);

  class Permit {
   public:
    explicit Permit(RequestLimiter& owner);
    ~Permit();
    Permit(const Permit&) = delete;
    Permit& operator=(const Permit&) = delete;

   private:
    RequestLimiter& owner_;
  };

  std::size_t capacity() const noexcept { return capacity_; }

 private:
  std::size_t capacity_;
  std::size_t in_use_ = 0;
  std::mutex mutex_;
  std::condition_variable freed_;
};

struct HttpReply {
  int status = 0;
  std::string body;
  std::string content_type;
};

/// POSTs with retry and the shared limiter. Throws UpstreamFailure when
/// attempts run out or a non-retryable status comes back.
class HttpTransport {
 public:
  HttpTransport(HttpEndpoint endpoint, RetryPolicy policy, std::shared_ptr<RequestLimiter> limiter);

  HttpReply post(const std::string& body, const std::string& content_type) const;
  const HttpEndpoint& endpoint() const noexcept { return endpoint_; }

 private:
  HttpEndpoint endpoint_;
  std::string base_;
  std::string path_;
  RetryPolicy policy_;
  std::shared_ptr<RequestLimiter> limiter_;
};

/// A prompt file with a single `{{input}}` placeholder. The first line may
/// be `# prompt <name> v<n>`, which is stripped and kept as the version tag.
class PromptTemplate {
 public:
  static PromptTemplate parse(std::string_view text);
  static PromptTemplate load(const std::filesystem::path& path);

  std::string render(std::string_view input) const;
  const std::string& version() const noexcept { return version_; }

 private:
  std::string version_;
  std::string body_;
};

/// Chat-completion client: sends one user message, returns the first
/// choice's message content.
class LlmClient {
 public:
  LlmClient(HttpTransport transport, std::string model);
  std::string complete(const std::string& prompt) const;

 private:
  HttpTransport transport_;
  std::string model_;
};

class LiveTranslator final : public Translator {
 public:
  LiveTranslator(std::shared_ptr<const LlmClient> llm, PromptTemplate prompt);
  Binding binding() const override { return Binding::Live; }
  TranslationTriple translate(std::string_view source_en) const override;

 private:
  std::shared_ptr<const LlmClient> llm_;
  PromptTemplate prompt_;
};

class LiveGrammarian final : public Grammarian {
 public:
  LiveGrammarian(std::shared_ptr<const LlmClient> llm, PromptTemplate prompt);
  Binding binding() const override { return Binding::Live; }
  std::vector<GrammarNote> explain(const TranslationTriple& triple) const override;

 private:
  std::shared_ptr<const LlmClient> llm_;
  PromptTemplate prompt_;
};

class LiveLexicon final : public Lexicon {
 public:
  LiveLexicon(std::shared_ptr<const LlmClient> llm, PromptTemplate prompt);
  Binding binding() const override { return Binding::Live; }
  std::string get_meaning(std::string_view surface) const override;

 private:
  std::shared_ptr<const LlmClient> llm_;
  PromptTemplate prompt_;
};

class LiveRecognizer final : public Recognizer {
 public:
  explicit LiveRecognizer(HttpTransport transport) : transport_(std::move(transport)) {}
  Binding binding() const override { return Binding::Live; }
  std::string transcribe(const AudioClip& audio) const override;

 private:
  HttpTransport transport_;
};

class LiveSpeechSynth final : public SpeechSynth {
 public:
  explicit LiveSpeechSynth(HttpTransport transport) : transport_(std::move(transport)) {}
  Binding binding() const override { return Binding::Live; }
  AudioClip speak(std::string_view kana) const override;

 private:
  HttpTransport transport_;
};

class LiveSingingSynth final : public SingingSynth {
 public:
  explicit LiveSingingSynth(HttpTransport transport) : transport_(std::move(transport)) {}
  Binding binding() const override { return Binding::Live; }
  AudioClip render(const SongScore& score) const override;

 private:
  HttpTransport transport_;
};

}  // namespace salad
