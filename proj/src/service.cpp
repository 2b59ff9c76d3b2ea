#include "salad/service.hpp"

#include <httplib.h>

#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>

#include "salad/live_providers.hpp"

namespace salad {

namespace fs = std::filesystem;

fs::path default_assets_dir() {
  if (const char* env = std::getenv("SALAD_DATA_DIR"); env != nullptr && *env != '\0') return env;
  return SALAD_DEFAULT_DATA_DIR;
}

// ---------------------------------------------------------------------------
// configuration

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

long parse_int(const std::string& key, const std::string& value, long min) {
  std::size_t used = 0;
  long v = 0;
  try {
    v = std::stol(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != value.size() || v < min) {
    throw ConfigError("'" + key + "' expects an integer >= " + std::to_string(min) + ", got '" + value + "'");
  }
  return v;
}

}  // namespace

ServiceConfig ServiceConfig::parse(std::string_view text) {
  ServiceConfig c;
  std::istringstream in{std::string(text)};
  std::size_t line_no = 0;
  for (std::string raw; std::getline(in, raw);) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));

    if (key == "listen_address") {
      c.listen_address = value;
    } else if (key == "data_dir") {
      c.data_dir = value;
    } else if (key == "assets_dir") {
      c.assets_dir = value;
      c.template_dir = c.assets_dir / "templates";
    } else if (key == "template_dir") {
      c.template_dir = value;
    } else if (key == "static_dir") {
      c.static_dir = fs::path(value);
    } else if (key == "cors_origin") {
      c.cors_origin = value;
    } else if (key == "max_concurrent_requests") {
      c.max_concurrent_requests = static_cast<std::size_t>(parse_int(key, value, 1));
    } else if (key.rfind("provider.", 0) == 0) {
      const std::string port = key.substr(9);
      if (c.bindings.count(port) == 0) throw ConfigError("unknown provider port '" + port + "'");
      if (value == "mock") {
        c.bindings[port] = Binding::Mock;
      } else if (value == "live") {
        c.bindings[port] = Binding::Live;
      } else {
        throw ConfigError("provider binding must be mock or live, got '" + value + "'");
      }
    } else if (key == "live.llm.url_env") {
      c.llm.url_env = value;
    } else if (key == "live.llm.key_env") {
      c.llm.key_env = value;
    } else if (key == "live.llm.model") {
      c.llm_model = value;
    } else if (key == "live.asr.url_env") {
      c.asr.url_env = value;
    } else if (key == "live.asr.key_env") {
      c.asr.key_env = value;
    } else if (key == "live.tts.url_env") {
      c.tts.url_env = value;
    } else if (key == "live.tts.key_env") {
      c.tts.key_env = value;
    } else if (key == "live.svs.url_env") {
      c.svs.url_env = value;
    } else if (key == "live.svs.key_env") {
      c.svs.key_env = value;
    } else if (key == "live.retries") {
      c.live_retries = static_cast<int>(parse_int(key, value, 0));
    } else if (key == "live.backoff_ms") {
      c.live_backoff_ms = static_cast<int>(parse_int(key, value, 0));
    } else if (key == "live.timeout_s") {
      c.live_timeout_s = static_cast<int>(parse_int(key, value, 1));
    } else if (key == "live.max_in_flight") {
      c.live_max_in_flight = static_cast<std::size_t>(parse_int(key, value, 1));
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
  c.validate();
  return c;
}

ServiceConfig ServiceConfig::load(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

void ServiceConfig::validate() const {
  const auto require = [&](const char* port, const LiveEndpointConfig& ep, const char* prefix) {
    if (bindings.at(port) == Binding::Live && ep.url_env.empty()) {
      throw ConfigError(std::string("provider.") + port + " = live needs " + prefix + ".url_env");
    }
  };
  require("translator", llm, "live.llm");
  require("grammarian", llm, "live.llm");
  require("lexicon", llm, "live.llm");
  require("recognizer", asr, "live.asr");
  require("speech_synth", tts, "live.tts");
  require("singing_synth", svs, "live.svs");
  if (listen_address.find(':') == std::string::npos) throw ConfigError("listen_address must be host:port");
}

std::string ServiceConfig::effective_cors_origin() const {
  return cors_origin ? *cors_origin : "http://" + listen_address;
}

ProviderSet make_providers(const ServiceConfig& config, std::shared_ptr<const FixtureSet> fixtures,
                           std::shared_ptr<const KanaTable> kana) {
  ProviderSet set = make_mock_providers(fixtures, kana);
  const RetryPolicy policy{config.live_retries, std::chrono::milliseconds(config.live_backoff_ms),
                           std::chrono::seconds(config.live_timeout_s)};
  auto limiter = std::make_shared<RequestLimiter>(config.live_max_in_flight);

  const auto endpoint = [](const LiveEndpointConfig& ep) {
    const char* url = std::getenv(ep.url_env.c_str());
    if (url == nullptr || *url == '\0') throw ConfigError("environment variable " + ep.url_env + " is not set");
    HttpEndpoint out{url, {}};
    if (!ep.key_env.empty()) {
      if (const char* key = std::getenv(ep.key_env.c_str())) out.api_key = key;
    }
    return out;
  };
  const auto is_live = [&](const char* port) { return config.bindings.at(port) == Binding::Live; };
  const fs::path prompts = config.assets_dir / "prompts";

  std::shared_ptr<const LlmClient> llm;
  if (is_live("translator") || is_live("grammarian") || is_live("lexicon")) {
    llm = std::make_shared<LlmClient>(HttpTransport(endpoint(config.llm), policy, limiter), config.llm_model);
  }
  if (is_live("translator")) {
    set.translator = std::make_shared<LiveTranslator>(llm, PromptTemplate::load(prompts / "translate.v1.txt"));
  }
  if (is_live("grammarian")) {
    set.grammarian = std::make_shared<LiveGrammarian>(llm, PromptTemplate::load(prompts / "grammar.v1.txt"));
  }
  if (is_live("lexicon")) {
    set.lexicon = std::make_shared<LiveLexicon>(llm, PromptTemplate::load(prompts / "define.v1.txt"));
  }
  if (is_live("recognizer")) {
    set.recognizer = std::make_shared<LiveRecognizer>(HttpTransport(endpoint(config.asr), policy, limiter));
  }
  if (is_live("speech_synth")) {
    set.speech_synth = std::make_shared<LiveSpeechSynth>(HttpTransport(endpoint(config.tts), policy, limiter));
  }
  if (is_live("singing_synth")) {
    set.singing_synth = std::make_shared<LiveSingingSynth>(HttpTransport(endpoint(config.svs), policy, limiter));
  }
  return set;
}

// ---------------------------------------------------------------------------
// application core

namespace {

std::string random_session_id() {
  std::random_device rd;
  std::uniform_int_distribution<unsigned> dist(0, 15);
  std::string id = "session-";
  for (int i = 0; i < 16; ++i) id.push_back("0123456789abcdef"[dist(rd)]);
  return id;
}

}  // namespace

App::App(ServiceConfig config, std::shared_ptr<const KanaTable> kana, ProviderSet providers)
    : config_(std::move(config)),
      kana_(std::move(kana)),
      providers_(std::move(providers)),
      handle_(std::make_shared<Store>(config_.data_dir)),
      default_session_(random_session_id()) {
  providers_.check_bound();
  if (fs::exists(config_.template_dir)) templates_ = load_templates(config_.template_dir, *kana_);
  for (auto& record : handle_.store().load_sessions()) {
    std::string id = record.session_id;
    sessions_.insert_or_assign(std::move(id), std::move(record));
  }
}

std::unique_ptr<App> App::create(ServiceConfig config) {
  config.validate();
  auto kana = std::make_shared<const KanaTable>(KanaTable::load(config.assets_dir / "kana_table.tsv"));
  auto fixtures = std::make_shared<const FixtureSet>(FixtureSet::load(config.assets_dir / "fixtures"));
  ProviderSet providers = make_providers(config, fixtures, kana);
  return std::make_unique<App>(std::move(config), std::move(kana), std::move(providers));
}

PipelineResult App::process(LearnerInput input) {
  if (input.session_id.empty()) input.session_id = default_session_;
  if (input.audio && input.audio->duration_seconds() > kMaxUploadSeconds) {
    throw AudioTooLong(input.audio->duration_seconds());
  }
  Store& store = handle_.store();
  const AudioSink sink = [&store](const AudioClip& clip) { return store.put_audio(clip); };

  auto txn = handle_.begin();
  ProcessOutcome out = process_input(input, txn.current(), providers_, sink);
  txn.commit(std::move(out.db));
  record_session(input.session_id, input.received_at, out.result.vocab_report);
  return std::move(out.result);
}

std::vector<PipelineResult> App::replay(std::vector<LearnerInput> inputs) {
  for (auto& input : inputs) {
    if (input.session_id.empty()) input.session_id = default_session_;
  }
  Store& store = handle_.store();
  const AudioSink sink = [&store](const AudioClip& clip) { return store.put_audio(clip); };

  auto txn = handle_.begin();
  ReplayOutcome out = replay_corpus(inputs, txn.current(), providers_, sink);
  txn.commit(std::move(out.db));
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    record_session(inputs[i].session_id, inputs[i].received_at, out.results[i].vocab_report);
  }
  return std::move(out.results);
}

void App::record_session(const std::string& id, Timestamp started_at, const VocabReport& report) {
  std::lock_guard lock(sessions_mutex_);
  auto it = sessions_.find(id);
  SessionRecord record;
  if (it != sessions_.end()) {
    record = it->second;
  } else {
    record.session_id = id;
    record.started_at = started_at;
  }
  record = apply_to_session(std::move(record), report);
  handle_.store().append_session(record);
  sessions_.insert_or_assign(id, std::move(record));
}

Json App::vocabulary() const {
  const auto db = handle_.snapshot();
  Json entries = Json::array();
  std::size_t learning = 0;
  std::size_t learned = 0;
  for (const VocabEntry* e : display_order(*db)) {
    (e->progress.learned() ? learned : learning) += 1;
    entries.push_back({{"surface", e->surface},
                       {"reading", e->reading},
                       {"meaning", e->meaning},
                       {"progress", e->progress.value()},
                       {"status", std::string(to_string(word_status(*db, e->surface)))},
                       {"exposure_count", e->exposure_count},
                       {"first_seen", to_rfc3339(e->first_seen)},
                       {"last_seen", to_rfc3339(e->last_seen)},
                       {"display", format_progress_line(*e)}});
  }
  return Json{{"entries", std::move(entries)}, {"counts", {{"learning", learning}, {"learned", learned}}}};
}

std::vector<std::string> App::vocabulary_lines(std::optional<WordStatus> only) const {
  const auto db = handle_.snapshot();
  std::vector<std::string> lines;
  for (const VocabEntry* e : display_order(*db)) {
    if (only && word_status(*db, e->surface) != *only) continue;
    lines.push_back(format_progress_line(*e));
  }
  return lines;
}

const LyricTemplate& App::find_template(std::string_view template_id) const {
  for (const auto& t : templates_) {
    if (t.template_id == template_id) return t;
  }
  throw NotFound("template '" + std::string(template_id) + "'");
}

RenderedSong App::song(std::string_view template_id) {
  const LyricTemplate& tmpl = find_template(template_id);
  const auto db = handle_.snapshot();
  Store& store = handle_.store();
  return generate_song(*db, tmpl, providers_, *kana_, [&store](const AudioClip& clip) { return store.put_audio(clip); });
}

std::optional<SessionRecord> App::session(std::string_view id) const {
  std::lock_guard lock(sessions_mutex_);
  const auto it = sessions_.find(std::string(id));
  if (it == sessions_.end()) return std::nullopt;
  return it->second;
}

Json App::health() const {
  return Json{{"status", "ok"},
              {"providers",
               {{"translator", to_string(providers_.translator->binding())},
                {"grammarian", to_string(providers_.grammarian->binding())},
                {"recognizer", to_string(providers_.recognizer->binding())},
                {"speech_synth", to_string(providers_.speech_synth->binding())},
                {"singing_synth", to_string(providers_.singing_synth->binding())},
                {"lexicon", to_string(providers_.lexicon->binding())}}}};
}

int http_status_for(const Error& error) {
  if (const auto* p = dynamic_cast<const PipelineError*>(&error)) {
    if (p->cause_code() == "UpstreamFailure") return 502;
    if (p->cause_code() == "InvalidArgument" && p->code() != "TranslationFailed") return 400;
    return 422;
  }
  const std::string& code = error.code();
  if (code == "EmptyVocabulary") return 409;
  if (code == "NotFound") return 404;
  if (code == "UpstreamFailure") return 502;
  if (code == "AudioTooLong") return 413;
  if (code == "NoFittingWords" || code == "UntranslatableInput" || code == "UnrecognizableAudio") return 422;
  if (code == "InvalidArgument" || code == "InvalidAudio" || code == "UnmappableCodePoint") return 400;
  return 500;
}

Json error_body(const Error& error) {
  return Json{{"code", error.code()}, {"stage", error.stage()}, {"message", error.what()}};
}

// ---------------------------------------------------------------------------
// HTTP front end

namespace {

void send_json(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json; charset=utf-8");
}

void send_error(httplib::Response& res, const Error& e, const std::string& stage = {}) {
  Json body = error_body(e);
  if (body["stage"].get<std::string>().empty()) body["stage"] = stage;
  send_json(res, http_status_for(e), body);
}

std::string session_param(const httplib::Request& req) {
  if (req.has_param("session_id")) return req.get_param_value("session_id");
  return req.get_header_value("X-Session-Id");
}

LearnerInput parse_process_request(const httplib::Request& req) {
  const std::string type = req.get_header_value("Content-Type");
  if (req.is_multipart_form_data()) {
    if (!req.has_file("audio")) throw InvalidArgument("multipart upload needs an 'audio' part");
    std::string session = req.has_file("session_id") ? req.get_file_value("session_id").content : session_param(req);
    return LearnerInput::from_audio(decode_wav(req.get_file_value("audio").content), std::move(session));
  }
  if (type.rfind("audio/", 0) == 0) return LearnerInput::from_audio(decode_wav(req.body), session_param(req));
  Json body;
  try {
    body = Json::parse(req.body);
  } catch (const Json::exception&) {
    throw InvalidArgument("request body must be JSON {\"text\": ...} or a WAV upload");
  }
  if (!body.is_object() || !body.contains("text") || !body["text"].is_string()) {
    throw InvalidArgument("request body must contain a string 'text'");
  }
  std::string session = session_param(req);
  if (body.contains("session_id")) {
    if (!body["session_id"].is_string()) throw InvalidArgument("session_id must be a string");
    session = body["session_id"].get<std::string>();
  }
  return LearnerInput::from_text(body["text"].get<std::string>(), std::move(session));
}

template <typename Fn>
httplib::Server::Handler guarded(const char* stage, Fn fn) {
  return [stage, fn](const httplib::Request& req, httplib::Response& res) {
    try {
      fn(req, res);
    } catch (const Error& e) {
      send_error(res, e, stage);
    } catch (const std::exception& e) {
      send_error(res, Error("InternalError", e.what()), stage);
    }
  };
}

}  // namespace

HttpService::HttpService(App& app) : app_(app), server_(std::make_unique<httplib::Server>()) {
  const std::size_t workers = app_.config().max_concurrent_requests;
  server_->new_task_queue = [workers] { return new httplib::ThreadPool(workers); };
  server_->set_payload_max_length(kMaxUploadBytes);
  install_routes();
}

HttpService::~HttpService() { stop(); }

void HttpService::install_routes() {
  httplib::Server& s = *server_;
  const std::string origin = app_.config().effective_cors_origin();

  s.set_post_routing_handler([origin](const httplib::Request& req, httplib::Response& res) {
    if (req.get_header_value("Origin") == origin) {
      res.set_header("Access-Control-Allow-Origin", origin);
      res.set_header("Vary", "Origin");
    }
  });
  s.Options(R"(/api/.*)", [origin](const httplib::Request& req, httplib::Response& res) {
    if (req.get_header_value("Origin") == origin) {
      res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
      res.set_header("Access-Control-Allow-Headers", "Content-Type, X-Session-Id");
    }
    res.status = 204;
  });

  s.Post("/api/process", guarded("input", [this](const httplib::Request& req, httplib::Response& res) {
           LearnerInput input = parse_process_request(req);
           send_json(res, 200, to_json(app_.process(std::move(input))));
         }));

  s.Get("/api/vocabulary",
        guarded("vocabulary", [this](const httplib::Request&, httplib::Response& res) {
          send_json(res, 200, app_.vocabulary());
        }));

  s.Post("/api/song", guarded("song", [this](const httplib::Request& req, httplib::Response& res) {
           Json body;
           try {
             body = Json::parse(req.body);
           } catch (const Json::exception&) {
             throw InvalidArgument("request body must be JSON {\"template_id\": ...}");
           }
           if (!body.is_object() || !body.contains("template_id") || !body["template_id"].is_string()) {
             throw InvalidArgument("request body must contain a string 'template_id'");
           }
           const RenderedSong song = app_.song(body["template_id"].get<std::string>());
           send_json(res, 200,
                     {{"song_id", song.song_id},
                      {"audio_id", song.audio_ref},
                      {"duration_seconds", song.duration},
                      {"slot_words", song.score.slot_words},
                      {"lyric_text", song.score.lyric_text},
                      {"used_fallback", song.score.used_fallback}});
         }));

  s.Get(R"(/api/audio/([^/]+))", guarded("audio", [this](const httplib::Request& req, httplib::Response& res) {
          std::string id = req.matches[1];
          if (id.size() > 4 && id.substr(id.size() - 4) == ".wav") id.resize(id.size() - 4);
          res.status = 200;
          res.set_content(app_.store().store().get_audio_bytes(id), "audio/wav");
        }));

  s.Get(R"(/api/session/([^/]+))", guarded("session", [this](const httplib::Request& req, httplib::Response& res) {
          const auto record = app_.session(req.matches[1].str());
          if (!record) throw NotFound("session '" + req.matches[1].str() + "'");
          send_json(res, 200, to_json(*record));
        }));

  s.Get("/api/templates", guarded("templates", [this](const httplib::Request&, httplib::Response& res) {
          Json list = Json::array();
          for (const auto& t : app_.templates()) {
            list.push_back({{"template_id", t.template_id},
                            {"slot_count", t.slot_count()},
                            {"note_count", t.melody.size()},
                            {"duration_seconds", t.total_duration()}});
          }
          send_json(res, 200, {{"templates", std::move(list)}});
        }));

  s.Get("/healthz", guarded("health", [this](const httplib::Request&, httplib::Response& res) {
          send_json(res, 200, app_.health());
        }));

  s.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (!res.body.empty()) return;
    const char* code = res.status == 404 ? "NotFound" : res.status == 413 ? "PayloadTooLarge" : "HttpError";
    send_json(res, res.status, {{"code", code}, {"stage", "http"}, {"message", httplib::status_message(res.status)}});
  });

  if (app_.config().static_dir) s.set_mount_point("/", app_.config().static_dir->string());
}

int HttpService::bind() {
  const std::string& addr = app_.config().listen_address;
  const auto colon = addr.rfind(':');
  return bind(addr.substr(0, colon), std::stoi(addr.substr(colon + 1)));
}

int HttpService::bind(const std::string& host, int port) {
  if (port == 0) {
    const int chosen = server_->bind_to_any_port(host);
    if (chosen < 0) throw IoFailure("cannot bind " + host);
    return chosen;
  }
  if (!server_->bind_to_port(host, port)) throw IoFailure("cannot bind " + host + ":" + std::to_string(port));
  return port;
}

void HttpService::serve() { server_->listen_after_bind(); }

void HttpService::stop() {
  if (server_) server_->stop();
}

bool HttpService::running() const { return server_->is_running(); }

}  // namespace salad
