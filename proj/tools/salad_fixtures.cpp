// Maintenance tool for the shipped fixtures: fills the corpus romaji column
// from the kana table and renders transcript-bearing WAV clips.
#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "salad/mock_providers.hpp"
#include "salad/service.hpp"

namespace {

using namespace salad;

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoFailure("cannot write " + path.string());
}

/// Rewrites column 4 of every data row from the row's segmentation.
std::string romanize_corpus(const std::string& text, const KanaTable& kana) {
  std::istringstream in(text);
  std::string out;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.front() != '#') {
      std::vector<std::string> cols;
      std::istringstream row(line);
      for (std::string col; std::getline(row, col, '\t');) cols.push_back(col);
      if (cols.size() != 5) throw InvalidArgument("corpus row without 5 columns: " + line);
      std::vector<SegmentToken> tokens;
      std::istringstream segs(cols[4]);
      for (std::string seg; segs >> seg;) {
        const auto colon = seg.find(':');
        tokens.push_back({seg.substr(0, colon), seg.substr(colon + 1)});
      }
      cols[3] = romanize_tokens(kana, tokens);
      line = cols[0] + '\t' + cols[1] + '\t' + cols[2] + '\t' + cols[3] + '\t' + cols[4];
    }
    out += line + '\n';
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App cli{"salad-fixtures: regenerate derived fixture data"};
  cli.require_subcommand(1);
  std::filesystem::path assets = default_assets_dir();
  cli.add_option("--assets", assets, "Directory holding kana_table.tsv and fixtures/");

  auto* romanize = cli.add_subcommand("romanize", "Fill the romaji column of corpus.tsv in place");

  auto* audio = cli.add_subcommand("audio", "Speak a corpus sentence into a WAV that carries its transcript");
  std::string sentence;
  std::filesystem::path out_path;
  audio->add_option("--sentence", sentence, "English sentence from corpus.tsv")->required();
  audio->add_option("--out", out_path, "Output WAV")->required();

  CLI11_PARSE(cli, argc, argv);
  try {
    auto kana = std::make_shared<const KanaTable>(KanaTable::load(assets / "kana_table.tsv"));
    if (*romanize) {
      const auto path = assets / "fixtures" / "corpus.tsv";
      write_file(path, romanize_corpus(read_file(path), *kana));
    } else if (*audio) {
      const auto fixtures = std::make_shared<const FixtureSet>(FixtureSet::load(assets / "fixtures"));
      const TranslationTriple t = MockTranslator(fixtures, kana).translate(sentence);
      AudioClip clip = MockSpeechSynth(kana).speak(t.kana);
      clip.transcript = sentence;
      write_file(out_path, encode_wav(clip));
    }
  } catch (const Error& e) {
    std::cerr << e.code() << ": " << e.what() << '\n';
    return 1;
  }
  return 0;
}
