#include <doctest.h>

#include <httplib.h>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <thread>

#include "salad/error.hpp"
#include "salad/live_providers.hpp"
#include "support/service_fixture.hpp"
#include "support/test_env.hpp"

using namespace salad;

namespace {

/// A scripted upstream on a loopback port.
class FakeUpstream {
 public:
  using Handler = std::function<void(const httplib::Request&, httplib::Response&, int attempt)>;

  explicit FakeUpstream(Handler handler) : handler_(std::move(handler)) {
    server_.Post(".*", [this](const httplib::Request& req, httplib::Response& res) {
      const int n = ++attempts;
      const int now = ++in_flight;
      int seen = max_in_flight.load();
      while (now > seen && !max_in_flight.compare_exchange_weak(seen, now)) {
      }
      last_body = req.body;
      last_auth = req.get_header_value("Authorization");
      last_type = req.get_header_value("Content-Type");
      handler_(req, res, n);
      --in_flight;
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeUpstream() {
    server_.stop();
    thread_.join();
  }

  std::string url(const std::string& path = "/v1/endpoint") const {
    return "http://127.0.0.1:" + std::to_string(port_) + path;
  }

  std::atomic<int> attempts{0};
  std::atomic<int> in_flight{0};
  std::atomic<int> max_in_flight{0};
  std::string last_body;
  std::string last_auth;
  std::string last_type;

 private:
  Handler handler_;
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

RetryPolicy fast_policy(int retries = 3) { return {retries, std::chrono::milliseconds(1), std::chrono::seconds(5)}; }

HttpTransport transport_to(const FakeUpstream& up, RetryPolicy policy = fast_policy(), std::size_t cap = 4) {
  return HttpTransport({up.url(), "secret"}, policy, std::make_shared<RequestLimiter>(cap));
}

std::string completion(const Json& content) {
  return Json{{"choices", Json::array({{{"message", {{"role", "assistant"}, {"content", content.dump()}}}}})}}.dump();
}

const Json kSushi = {{"kanji", "私は寿司を食べます"},
                     {"kana", "わたしはすしをたべます"},
                     {"romaji", "watashi wa sushi o tabemasu"},
                     {"segmentation",
                      Json::array({{{"surface", "私"}, {"reading", "わたし"}},
                                   {{"surface", "は"}, {"reading", "は"}},
                                   {{"surface", "寿司"}, {"reading", "すし"}},
                                   {{"surface", "を"}, {"reading", "を"}},
                                   {{"surface", "食べます"}, {"reading", "たべます"}}})}};

PromptTemplate prompt(const char* name) {
  return PromptTemplate::load(test::assets_dir() / "prompts" / (std::string(name) + ".v1.txt"));
}

}  // namespace

TEST_CASE("prompt templates") {
  const auto p = PromptTemplate::parse("# prompt demo v2\nSay {{input}} now");
  CHECK(p.version() == "demo v2");
  CHECK(p.render("hi") == "Say hi now");
  CHECK_THROWS_AS(PromptTemplate::parse("no placeholder"), InvalidArgument);
  CHECK_THROWS_AS(PromptTemplate::parse("{{input}} {{input}}"), InvalidArgument);
  for (const char* name : {"translate", "grammar", "define"}) CHECK(prompt(name).version().rfind(name, 0) == 0);
}

TEST_CASE("live translator sends a deterministic chat request") {
  FakeUpstream up([](const auto&, auto& res, int) { res.set_content(completion(kSushi), "application/json"); });
  auto llm = std::make_shared<LlmClient>(transport_to(up), "test-model");
  LiveTranslator translator(llm, prompt("translate"));
  const auto t = translator.translate("I eat sushi");
  CHECK(t.kanji == "私は寿司を食べます");
  CHECK(t.source_en == "I eat sushi");
  CHECK(t.segmentation.size() == 5);
  const Json sent = Json::parse(up.last_body);
  CHECK(sent["model"] == "test-model");
  CHECK(sent["temperature"] == 0);
  CHECK(sent["messages"][0]["content"].get<std::string>().find("I eat sushi") != std::string::npos);
  CHECK(up.last_auth == "Bearer secret");
  CHECK_THROWS_AS(translator.translate(" "), UntranslatableInput);
}

TEST_CASE("transient failures are retried with backoff") {
  FakeUpstream up([](const auto&, auto& res, int attempt) {
    if (attempt == 1) {
      res.status = 503;
    } else if (attempt == 2) {
      res.status = 429;
    } else {
      res.set_content(completion({{"meaning", "sushi"}}), "application/json");
    }
  });
  LiveLexicon lexicon(std::make_shared<LlmClient>(transport_to(up), "m"), prompt("define"));
  CHECK(lexicon.get_meaning("寿司") == "sushi");
  CHECK(up.attempts == 3);
}

TEST_CASE("retries are bounded") {
  FakeUpstream up([](const auto&, auto& res, int) { res.status = 500; });
  LiveLexicon lexicon(std::make_shared<LlmClient>(transport_to(up, fast_policy(3)), "m"), prompt("define"));
  CHECK_THROWS_AS(lexicon.get_meaning("寿司"), UpstreamFailure);
  CHECK(up.attempts == 4);
}

TEST_CASE("client errors and malformed answers are not retried") {
  SUBCASE("HTTP 400") {
    FakeUpstream up([](const auto&, auto& res, int) { res.status = 400; });
    LiveLexicon lexicon(std::make_shared<LlmClient>(transport_to(up), "m"), prompt("define"));
    CHECK_THROWS_AS(lexicon.get_meaning("寿司"), UpstreamFailure);
    CHECK(up.attempts == 1);
  }
  SUBCASE("content is not JSON") {
    FakeUpstream up([](const auto&, auto& res, int) {
      res.set_content(Json{{"choices", Json::array({{{"message", {{"content", "sushi!"}}}}})}}.dump(),
                      "application/json");
    });
    LiveLexicon lexicon(std::make_shared<LlmClient>(transport_to(up), "m"), prompt("define"));
    CHECK_THROWS_AS(lexicon.get_meaning("寿司"), UpstreamFailure);
    CHECK(up.attempts == 1);
  }
  SUBCASE("envelope without choices") {
    FakeUpstream up([](const auto&, auto& res, int) { res.set_content("{}", "application/json"); });
    LiveLexicon lexicon(std::make_shared<LlmClient>(transport_to(up), "m"), prompt("define"));
    CHECK_THROWS_AS(lexicon.get_meaning("寿司"), UpstreamFailure);
  }
  SUBCASE("segmentation that does not rebuild the sentence") {
    Json broken = kSushi;
    broken["segmentation"].erase(4);
    FakeUpstream up([&](const auto&, auto& res, int) { res.set_content(completion(broken), "application/json"); });
    LiveTranslator translator(std::make_shared<LlmClient>(transport_to(up), "m"), prompt("translate"));
    CHECK_THROWS_AS(translator.translate("I eat sushi"), UpstreamFailure);
  }
  SUBCASE("extra fields in a lexicon answer") {
    FakeUpstream up([](const auto&, auto& res, int) {
      res.set_content(completion({{"meaning", "sushi"}, {"note", "x"}}), "application/json");
    });
    LiveLexicon lexicon(std::make_shared<LlmClient>(transport_to(up), "m"), prompt("define"));
    CHECK_THROWS_AS(lexicon.get_meaning("寿司"), UpstreamFailure);
  }
}

TEST_CASE("unreachable endpoint fails after retries") {
  // A port that was free a moment ago and has no listener now.
  const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  socklen_t len = sizeof addr;
  REQUIRE(::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) == 0);
  REQUIRE(::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len) == 0);
  ::close(fd);
  const int port = ntohs(addr.sin_port);
  HttpTransport t({"http://127.0.0.1:" + std::to_string(port) + "/x", ""}, fast_policy(1), nullptr);
  CHECK_THROWS_AS(t.post("{}", "application/json"), UpstreamFailure);
}

TEST_CASE("live grammarian parses notes") {
  FakeUpstream up([](const auto&, auto& res, int) {
    res.set_content(completion({{"notes", Json::array({{{"pattern", "は"}, {"explanation", "topic"}}})}}),
                    "application/json");
  });
  LiveGrammarian g(std::make_shared<LlmClient>(transport_to(up), "m"), prompt("grammar"));
  Json with_source = kSushi;
  with_source["source_en"] = "I eat sushi";
  const TranslationTriple t = triple_from_json(with_source);
  const auto notes = g.explain(t);
  REQUIRE(notes.size() == 1);
  CHECK(notes[0].pattern == "は");
}

TEST_CASE("live recognizer posts bare WAV") {
  FakeUpstream up([](const auto&, auto& res, int) { res.set_content(R"({"text":"good morning"})", "application/json"); });
  LiveRecognizer r(transport_to(up));
  AudioClip clip;
  clip.samples = {1, 2, 3};
  clip.transcript = "should not leak";
  CHECK(r.transcribe(clip) == "good morning");
  CHECK(up.last_type == "audio/wav");
  CHECK_FALSE(decode_wav(up.last_body).transcript.has_value());
  CHECK_THROWS_AS(r.transcribe(AudioClip{}), UnrecognizableAudio);
}

TEST_CASE("live synthesizers validate returned audio") {
  AudioClip tone;
  tone.samples.assign(100, 5);
  AudioClip wrong_rate = tone;
  wrong_rate.sample_rate = 16000;
  FakeUpstream good([&](const auto&, auto& res, int) { res.set_content(encode_wav(tone), "audio/wav"); });
  FakeUpstream bad([&](const auto&, auto& res, int) { res.set_content(encode_wav(wrong_rate), "audio/wav"); });
  FakeUpstream junk([&](const auto&, auto& res, int) { res.set_content("not audio", "audio/wav"); });

  CHECK(LiveSpeechSynth(transport_to(good)).speak("ねこ") == tone);
  CHECK(Json::parse(good.last_body)["text"] == "ねこ");
  CHECK_THROWS_AS(LiveSpeechSynth(transport_to(bad)).speak("ねこ"), UpstreamFailure);
  CHECK_THROWS_AS(LiveSpeechSynth(transport_to(junk)).speak("ねこ"), UpstreamFailure);
  CHECK_THROWS_AS(LiveSpeechSynth(transport_to(good)).speak("neko"), UnmappableCodePoint);

  SongScore score;
  score.notes.push_back({{69, 0.5}, {{"a"}, 0}});
  CHECK(LiveSingingSynth(transport_to(good)).render(score) == tone);
  CHECK(Json::parse(good.last_body)["sample_rate"] == kSampleRate);
  CHECK_THROWS_AS(LiveSingingSynth(transport_to(good)).render(SongScore{}), EmptyScore);
}

TEST_CASE("request limiter caps concurrent upstream calls") {
  FakeUpstream up([](const auto&, auto& res, int) {
    std::this_thread::sleep_for(std::chrono::milliseconds(30));
    res.set_content(R"({"text":"hi"})", "application/json");
  });
  const LiveRecognizer r(transport_to(up, fast_policy(), 2));
  AudioClip clip;
  clip.samples = {1};
  std::vector<std::thread> threads;
  for (int i = 0; i < 8; ++i) threads.emplace_back([&] { (void)r.transcribe(clip); });
  for (auto& t : threads) t.join();
  CHECK(up.attempts == 8);
  CHECK(up.max_in_flight <= 2);
}

TEST_CASE("service binds a live lexicon from the environment") {
  FakeUpstream up([](const httplib::Request& req, auto& res, int) {
    const std::string prompt = Json::parse(req.body)["messages"][0]["content"];
    const std::string word = prompt.substr(prompt.rfind('\n', prompt.size() - 2) + 1);
    res.set_content(completion({{"meaning", "live:" + word.substr(0, word.find('\n'))}}), "application/json");
  });
  ::setenv("SALAD_TEST_LLM_URL", up.url().c_str(), 1);
  test::TempDir dir;
  ServiceConfig config = test::mock_config(dir.path());
  config.bindings["lexicon"] = Binding::Live;
  config.llm.url_env = "SALAD_TEST_LLM_URL";
  config.live_backoff_ms = 1;
  test::RunningService svc(config);
  auto res = svc.post_json("/api/process", {{"text", "I eat sushi"}});
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(up.attempts == 5);
  const Json vocab = Json::parse(svc.get("/api/vocabulary")->body);
  bool found = false;
  for (const auto& e : vocab["entries"]) found = found || e["display"] == "寿司: live:寿司 (Progress: 1/5)";
  CHECK(found);
  CHECK(Json::parse(svc.get("/healthz")->body)["providers"]["lexicon"] == "live");
}

TEST_CASE("live upstream failure maps to 502 and leaves the store alone") {
  FakeUpstream up([](const auto&, auto& res, int) { res.status = 500; });
  ::setenv("SALAD_TEST_LLM_URL_DOWN", up.url().c_str(), 1);
  test::TempDir dir;
  ServiceConfig config = test::mock_config(dir.path());
  config.bindings["translator"] = Binding::Live;
  config.llm.url_env = "SALAD_TEST_LLM_URL_DOWN";
  config.live_backoff_ms = 1;
  test::RunningService svc(config);
  const std::string before = test::tree_digest(dir.path());
  auto res = svc.post_json("/api/process", {{"text", "I eat sushi"}});
  REQUIRE(res);
  CHECK(res->status == 502);
  CHECK(Json::parse(res->body)["code"] == "TranslationFailed");
  CHECK(test::tree_digest(dir.path()) == before);
}
