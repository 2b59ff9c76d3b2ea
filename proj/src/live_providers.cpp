#include "salad/live_providers.hpp"

#include <httplib.h>

#include <fstream>
#include <sstream>
#include <thread>

#include "salad/error.hpp"
#include "salad/json_io.hpp"

namespace salad {

RequestLimiter::RequestLimiter(std::size_t capacity) : capacity_(capacity == 0 ? 1 : capacity) {}

RequestLimiter::Permit::Permit(RequestLimiter& owner) : owner_(owner) {
  std::unique_lock lock(owner_.mutex_);
  owner_.freed_.wait(lock, [&] { return owner_.in_use_ < owner_.capacity_; });
  ++owner_.in_use_;
}

RequestLimiter::Permit::~Permit() {
  {
    std::lock_guard lock(owner_.mutex_);
    --owner_.in_use_;
  }
  owner_.freed_.notify_one();
}

HttpTransport::HttpTransport(HttpEndpoint endpoint, RetryPolicy policy, std::shared_ptr<RequestLimiter> limiter)
    : endpoint_(std::move(endpoint)), policy_(policy), limiter_(std::move(limiter)) {
  const auto scheme_end = endpoint_.url.find("://");
  if (scheme_end == std::string::npos) throw InvalidArgument("endpoint URL lacks a scheme: " + endpoint_.url);
  const auto path_start = endpoint_.url.find('/', scheme_end + 3);
  base_ = endpoint_.url.substr(0, path_start);
  path_ = path_start == std::string::npos ? "/" : endpoint_.url.substr(path_start);
  if (!limiter_) limiter_ = std::make_shared<RequestLimiter>(1);
}

HttpReply HttpTransport::post(const std::string& body, const std::string& content_type) const {
  std::string last_error;
  for (int attempt = 0; attempt <= policy_.retries; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(policy_.backoff * (1 << (attempt - 1)));
    RequestLimiter::Permit permit(*limiter_);
    httplib::Client client(base_);
    client.set_connection_timeout(policy_.timeout);
    client.set_read_timeout(policy_.timeout);
    client.set_write_timeout(policy_.timeout);
    httplib::Headers headers;
    if (!endpoint_.api_key.empty()) headers.emplace("Authorization", "Bearer " + endpoint_.api_key);
    auto res = client.Post(path_, headers, body, content_type);
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 429 || res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status < 200 || res->status >= 300) {
      throw UpstreamFailure(endpoint_.url + " answered HTTP " + std::to_string(res->status));
    }
    return {res->status, res->body, res->get_header_value("Content-Type")};
  }
  throw UpstreamFailure(endpoint_.url + " failed after " + std::to_string(policy_.retries + 1) +
                        " attempt(s): " + last_error);
}

PromptTemplate PromptTemplate::parse(std::string_view text) {
  PromptTemplate p;
  if (text.rfind("# prompt ", 0) == 0) {
    const auto eol = text.find('\n');
    p.version_ = std::string(text.substr(9, eol == std::string_view::npos ? std::string_view::npos : eol - 9));
    text.remove_prefix(eol == std::string_view::npos ? text.size() : eol + 1);
  }
  p.body_ = std::string(text);
  const auto first = p.body_.find("{{input}}");
  if (first == std::string::npos || p.body_.find("{{input}}", first + 1) != std::string::npos) {
    throw InvalidArgument("prompt template must contain exactly one {{input}} placeholder");
  }
  return p;
}

PromptTemplate PromptTemplate::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure("cannot open prompt " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::string PromptTemplate::render(std::string_view input) const {
  std::string out = body_;
  out.replace(out.find("{{input}}"), 9, input);
  return out;
}

LlmClient::LlmClient(HttpTransport transport, std::string model)
    : transport_(std::move(transport)), model_(std::move(model)) {}

std::string LlmClient::complete(const std::string& prompt) const {
  const Json request = {{"model", model_},
                        {"temperature", 0},
                        {"messages", Json::array({{{"role", "user"}, {"content", prompt}}})}};
  const HttpReply reply = transport_.post(request.dump(), "application/json");
  try {
    const Json body = Json::parse(reply.body);
    const Json& content = body.at("choices").at(0).at("message").at("content");
    if (!content.is_string()) throw UpstreamFailure("completion content is not a string");
    return content.get<std::string>();
  } catch (const Json::exception& e) {
    throw UpstreamFailure(std::string("malformed completion response: ") + e.what());
  }
}

namespace {

/// The model is asked to answer with a bare JSON object.
Json parse_model_json(const std::string& content) {
  try {
    Json j = Json::parse(content);
    if (!j.is_object()) throw UpstreamFailure("model answer is not a JSON object");
    return j;
  } catch (const Json::exception& e) {
    throw UpstreamFailure(std::string("model answer is not JSON: ") + e.what());
  }
}

AudioClip decode_reply_audio(const HttpReply& reply, std::string_view what) {
  try {
    AudioClip clip = decode_wav(reply.body);
    if (clip.sample_rate != kSampleRate) {
      throw UpstreamFailure(std::string(what) + " returned " + std::to_string(clip.sample_rate) + " Hz audio");
    }
    clip.transcript.reset();
    return clip;
  } catch (const InvalidAudio& e) {
    throw UpstreamFailure(std::string(what) + " returned invalid audio: " + e.what());
  }
}

}  // namespace

LiveTranslator::LiveTranslator(std::shared_ptr<const LlmClient> llm, PromptTemplate prompt)
    : llm_(std::move(llm)), prompt_(std::move(prompt)) {}

TranslationTriple LiveTranslator::translate(std::string_view source_en) const {
  if (source_en.find_first_not_of(" \t\r\n") == std::string_view::npos) throw UntranslatableInput("empty input");
  Json answer = parse_model_json(llm_->complete(prompt_.render(source_en)));
  answer["source_en"] = std::string(source_en);
  try {
    TranslationTriple t = triple_from_json(answer);
    validate_triple(t);
    return t;
  } catch (const InvalidArgument& e) {
    throw UpstreamFailure(std::string("malformed translation: ") + e.what());
  } catch (const UnmappableCodePoint& e) {
    throw UpstreamFailure(std::string("translation reading is not kana: ") + e.what());
  }
}

LiveGrammarian::LiveGrammarian(std::shared_ptr<const LlmClient> llm, PromptTemplate prompt)
    : llm_(std::move(llm)), prompt_(std::move(prompt)) {}

std::vector<GrammarNote> LiveGrammarian::explain(const TranslationTriple& triple) const {
  const Json answer = parse_model_json(llm_->complete(prompt_.render(to_json(triple).dump())));
  std::vector<GrammarNote> notes;
  try {
    if (answer.size() != 1 || !answer.contains("notes") || !answer["notes"].is_array()) {
      throw InvalidArgument("expected {\"notes\": [...]}");
    }
    for (const auto& n : answer["notes"]) notes.push_back(grammar_note_from_json(n));
  } catch (const InvalidArgument& e) {
    throw UpstreamFailure(std::string("malformed grammar notes: ") + e.what());
  }
  return notes;
}

LiveLexicon::LiveLexicon(std::shared_ptr<const LlmClient> llm, PromptTemplate prompt)
    : llm_(std::move(llm)), prompt_(std::move(prompt)) {}

std::string LiveLexicon::get_meaning(std::string_view surface) const {
  if (surface.empty()) throw InvalidArgument("empty surface");
  const Json answer = parse_model_json(llm_->complete(prompt_.render(surface)));
  if (answer.size() != 1 || !answer.contains("meaning") || !answer["meaning"].is_string()) {
    throw UpstreamFailure("expected {\"meaning\": \"...\"}");
  }
  std::string meaning = answer["meaning"].get<std::string>();
  if (meaning.empty()) throw UnknownWord(std::string(surface));
  return meaning;
}

std::string LiveRecognizer::transcribe(const AudioClip& audio) const {
  if (audio.samples.empty()) throw UnrecognizableAudio("empty audio");
  if (audio.sample_rate != kSampleRate) throw UnrecognizableAudio("unsupported sample rate");
  AudioClip plain = audio;
  plain.transcript.reset();
  const HttpReply reply = transport_.post(encode_wav(plain), "audio/wav");
  Json body;
  try {
    body = Json::parse(reply.body);
  } catch (const Json::exception& e) {
    throw UpstreamFailure(std::string("malformed recognizer response: ") + e.what());
  }
  if (!body.is_object() || !body.contains("text") || !body["text"].is_string()) {
    throw UpstreamFailure("recognizer response lacks a text field");
  }
  std::string text = body["text"].get<std::string>();
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) throw UnrecognizableAudio("no speech recognized");
  return text;
}

AudioClip LiveSpeechSynth::speak(std::string_view kana) const {
  if (kana.empty()) throw InvalidArgument("empty kana");
  validate_kana(kana);
  const Json request = {{"text", std::string(kana)}, {"sample_rate", kSampleRate}};
  return decode_reply_audio(transport_.post(request.dump(), "application/json"), "speech endpoint");
}

AudioClip LiveSingingSynth::render(const SongScore& score) const {
  if (score.notes.empty()) throw EmptyScore();
  Json request = to_json(score);
  request["sample_rate"] = kSampleRate;
  return decode_reply_audio(transport_.post(request.dump(), "application/json"), "singing endpoint");
}

}  // namespace salad
