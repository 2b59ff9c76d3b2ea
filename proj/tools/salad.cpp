#include <CLI11.hpp>

#include <pthread.h>

#include <csignal>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

#include "salad/service.hpp"

namespace {

using namespace salad;

/// Process exit status for each error code; anything unlisted exits 70.
int exit_code_for(const std::string& code) {
  static const std::map<std::string, int> codes = {
      {"TranslationFailed", 3},  {"TranscriptionFailed", 4}, {"TrackingFailed", 5},  {"EmptyVocabulary", 6},
      {"NoFittingWords", 7},     {"AudioTooLong", 8},        {"AbortedAt", 9},       {"InvalidArgument", 65},
      {"InvalidAudio", 65},      {"UnmappableCodePoint", 65}, {"ConfigError", 78},   {"TemplateError", 65},
      {"NotFound", 66},          {"UpstreamFailure", 69},    {"CorruptStore", 74},   {"IoFailure", 74},
  };
  const auto it = codes.find(code);
  return it == codes.end() ? 70 : it->second;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void print_result(const PipelineResult& r) {
  std::cout << "Kanji: " << r.triple.kanji << '\n'
            << "Kana: " << r.triple.kana << '\n'
            << "Romaji: " << r.triple.romaji << '\n';
  for (const auto& note : r.grammar) std::cout << "Grammar: " << note.pattern << ": " << note.explanation << '\n';
  for (const auto& line : r.vocab_report.display_lines) std::cout << line << '\n';
  for (const auto& w : r.warnings) std::cerr << "warning: " << w.stage << ": " << w.code << ": " << w.message << '\n';
}

/// Blocks SIGINT/SIGTERM in every thread and stops the server from a
/// dedicated waiter thread once one arrives.
int serve(App& app) {
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  HttpService service(app);
  const int port = service.bind();
  const std::string& addr = app.config().listen_address;
  std::cout << "listening on " << addr.substr(0, addr.rfind(':')) << ':' << port << std::endl;

  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    service.stop();
  });
  service.serve();
  // serve() may also return on its own; wake the waiter so it can exit.
  pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App cli{"salad: English-to-Japanese learning assistant"};
  cli.require_subcommand(1);
  std::string config_path;
  std::string data_dir;
  cli.add_option("--config", config_path, "Service config file (key = value)");
  cli.add_option("--data-dir", data_dir, "Store directory (overrides the config)");

  auto* process = cli.add_subcommand("process", "Translate one sentence and track its vocabulary");
  std::string text;
  std::string audio_path;
  std::string session;
  bool as_json = false;
  auto* text_opt = process->add_option("text", text, "English sentence");
  auto* audio_opt = process->add_option("--audio", audio_path, "WAV file to transcribe instead of text");
  text_opt->excludes(audio_opt);
  process->add_option("--session", session, "Session id (default: a fresh per-process id)");
  process->add_flag("--json", as_json, "Print the canonical result as JSON");

  auto* vocab = cli.add_subcommand("vocab", "Vocabulary database");
  vocab->require_subcommand(1);
  auto* list = vocab->add_subcommand("list", "One progress line per word");
  bool only_learning = false;
  bool only_learned = false;
  auto* learning_flag = list->add_flag("--learning", only_learning, "Only words below 5/5");
  list->add_flag("--learned", only_learned, "Only words at 5/5")->excludes(learning_flag);

  auto* song = cli.add_subcommand("song", "Render a practice song from the weakest words");
  std::string template_id;
  std::string out_path;
  song->add_option("--template", template_id, "Template id")->required();
  song->add_option("--out", out_path, "Also write the WAV here");

  auto* serve_cmd = cli.add_subcommand("serve", "Run the HTTP service until SIGINT/SIGTERM");
  serve_cmd->add_option("--config", config_path, "Service config file");

  auto* replay = cli.add_subcommand("replay", "Process a file of sentences, one per line, all or nothing");
  std::string inputs_path;
  replay->add_option("inputs", inputs_path, "Text file of sentences")->required();

  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = cli.exit(e);
    return rc == 0 ? 0 : 64;
  }

  try {
    ServiceConfig config = config_path.empty() ? ServiceConfig{} : ServiceConfig::load(config_path);
    if (!data_dir.empty()) config.data_dir = data_dir;
    auto app = App::create(std::move(config));

    if (*process) {
      if (text.empty() && audio_path.empty()) throw InvalidArgument("give a sentence or --audio <file.wav>");
      LearnerInput input = audio_path.empty() ? LearnerInput::from_text(text, session)
                                              : LearnerInput::from_audio(decode_wav(read_file(audio_path)), session);
      const PipelineResult r = app->process(std::move(input));
      if (as_json) {
        std::cout << canonicalize(to_json(r)).dump(2) << '\n';
      } else {
        print_result(r);
      }
    } else if (*list) {
      std::optional<WordStatus> only;
      if (only_learning) only = WordStatus::Learning;
      if (only_learned) only = WordStatus::Learned;
      for (const auto& line : app->vocabulary_lines(only)) std::cout << line << '\n';
    } else if (*song) {
      const RenderedSong s = app->song(template_id);
      if (!out_path.empty()) {
        std::ofstream out(out_path, std::ios::binary);
        const std::string bytes = app->store().store().get_audio_bytes(s.audio_ref);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw IoFailure("cannot write " + out_path);
      }
      std::cout << "song_id: " << s.song_id << '\n' << "duration: " << s.duration << " s\n" << "slot words:";
      for (const auto& w : s.score.slot_words) std::cout << ' ' << w;
      std::cout << '\n' << "lyric: " << s.score.lyric_text << '\n';
    } else if (*serve_cmd) {
      return serve(*app);
    } else if (*replay) {
      std::istringstream lines(read_file(inputs_path));
      std::vector<LearnerInput> inputs;
      for (std::string line; std::getline(lines, line);) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        inputs.push_back(LearnerInput::from_text(line));
      }
      const auto results = app->replay(std::move(inputs));
      for (const auto& r : results) std::cout << r.triple.source_en << '\t' << r.triple.kanji << '\n';
      for (const auto& line : app->vocabulary_lines()) std::cout << line << '\n';
    }
  } catch (const Error& e) {
    std::cerr << e.code() << ": " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "InternalError: " << e.what() << '\n';
    return 70;
  }
  return 0;
}
