#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "salad/json_io.hpp"
#include "salad/mock_providers.hpp"
#include "salad/pipeline.hpp"
#include "salad/songcraft.hpp"
#include "salad/store.hpp"

namespace httplib {
class Server;
}

namespace salad {

/// SALAD_DATA_DIR from the environment, else the compiled-in data directory.
std::filesystem::path default_assets_dir();

struct LiveEndpointConfig {
  std::string url_env;
  std::string key_env;
};

/// Flat `key = value` configuration; see config/salad.conf for every key.
struct ServiceConfig {
  std::string listen_address = "127.0.0.1:8080";
  std::filesystem::path data_dir = "salad-data";
  std::filesystem::path assets_dir = default_assets_dir();
  std::filesystem::path template_dir = default_assets_dir() / "templates";
  std::optional<std::filesystem::path> static_dir;
  std::optional<std::string> cors_origin;  // defaults to http://<listen_address>
  std::size_t max_concurrent_requests = 8;

  std::map<std::string, Binding> bindings = {
      {"translator", Binding::Mock},   {"grammarian", Binding::Mock},    {"recognizer", Binding::Mock},
      {"speech_synth", Binding::Mock}, {"singing_synth", Binding::Mock}, {"lexicon", Binding::Mock}};

  LiveEndpointConfig llm;
  LiveEndpointConfig asr;
  LiveEndpointConfig tts;
  LiveEndpointConfig svs;
  std::string llm_model = "gpt-4o-mini";
  int live_retries = 3;
  int live_backoff_ms = 200;
  int live_timeout_s = 30;
  std::size_t live_max_in_flight = 4;

  /// Unknown keys and malformed values throw ConfigError.
  static ServiceConfig parse(std::string_view text);
  static ServiceConfig load(const std::filesystem::path& path);

  /// Live bindings must name their endpoint variables.
  void validate() const;
  std::string effective_cors_origin() const;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(std::string details) : Error("ConfigError", std::move(details)) {}
};

class AudioTooLong : public Error {
 public:
  explicit AudioTooLong(double seconds)
      : Error("AudioTooLong", "audio of " + std::to_string(seconds) + " s exceeds the 30 s limit") {}
};

inline constexpr double kMaxUploadSeconds = 30.0;
inline constexpr std::size_t kMaxUploadBytes = 2 * 1024 * 1024;

/// Builds the provider set named by the config; live ports read their URL
/// and key from the environment variables the config names.
ProviderSet make_providers(const ServiceConfig& config, std::shared_ptr<const FixtureSet> fixtures,
                           std::shared_ptr<const KanaTable> kana);

/// The service core shared by the HTTP front end and the CLI.
class App {
 public:
  /// Loads templates from the config's template_dir and opens the store.
  App(ServiceConfig config, std::shared_ptr<const KanaTable> kana, ProviderSet providers);
  /// Also loads the kana table and fixtures from assets_dir and binds providers.
  static std::unique_ptr<App> create(ServiceConfig config);

  const ServiceConfig& config() const noexcept { return config_; }
  const std::string& default_session() const noexcept { return default_session_; }
  StoreHandle& store() noexcept { return handle_; }
  const KanaTable& kana() const noexcept { return *kana_; }

  /// Runs the pipeline and commits the database and session record on
  /// success only. Throws PipelineError (or InvalidArgument/AudioTooLong).
  PipelineResult process(LearnerInput input);

  /// Folds the inputs in order and commits only if all of them succeed;
  /// throws AbortedAt otherwise, leaving the store untouched.
  std::vector<PipelineResult> replay(std::vector<LearnerInput> inputs);

  Json vocabulary() const;
  std::vector<std::string> vocabulary_lines(std::optional<WordStatus> only = std::nullopt) const;

  RenderedSong song(std::string_view template_id);
  const std::vector<LyricTemplate>& templates() const noexcept { return templates_; }
  const LyricTemplate& find_template(std::string_view template_id) const;

  std::optional<SessionRecord> session(std::string_view id) const;
  Json health() const;

 private:
  void record_session(const std::string& id, Timestamp started_at, const VocabReport& report);

  ServiceConfig config_;
  std::shared_ptr<const KanaTable> kana_;
  ProviderSet providers_;
  std::vector<LyricTemplate> templates_;
  StoreHandle handle_;
  std::string default_session_;
  mutable std::mutex sessions_mutex_;
  std::map<std::string, SessionRecord> sessions_;
};

/// HTTP status for an error raised by App.
int http_status_for(const Error& error);
Json error_body(const Error& error);

/// Routes the HTTP API onto an App.
class HttpService {
 public:
  explicit HttpService(App& app);
  ~HttpService();

  /// Binds to listen_address (port 0 picks a free port); returns the port.
  int bind();
  int bind(const std::string& host, int port);
  /// Serves until stop() is called.
  void serve();
  void stop();
  bool running() const;

 private:
  void install_routes();

  App& app_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace salad
