#include "test_env.hpp"

#include <stdlib.h>

#include <algorithm>
#include <fstream>
#include <sstream>
#include <vector>

#include "salad/error.hpp"
#include "salad/sha256.hpp"

namespace salad::test {

namespace fs = std::filesystem;

fs::path assets_dir() { return SALAD_TEST_ASSETS_DIR; }
fs::path tools_dir() { return SALAD_TEST_TOOLS_DIR; }
fs::path golden_dir() { return SALAD_TEST_GOLDEN_DIR; }

std::shared_ptr<const KanaTable> kana() {
  static const auto table = std::make_shared<const KanaTable>(KanaTable::load(assets_dir() / "kana_table.tsv"));
  return table;
}

std::shared_ptr<const FixtureSet> fixtures() {
  static const auto set = std::make_shared<const FixtureSet>(FixtureSet::load(assets_dir() / "fixtures"));
  return set;
}

ProviderSet mock_providers() { return make_mock_providers(fixtures(), kana()); }

TempDir::TempDir() {
  std::string pattern = (fs::temp_directory_path() / "salad-test-XXXXXX").string();
  if (mkdtemp(pattern.data()) == nullptr) throw IoFailure("mkdtemp failed");
  path_ = pattern;
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoFailure("cannot write " + path.string());
}

std::string tree_digest(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& item : fs::recursive_directory_iterator(dir)) {
    if (item.is_regular_file()) files.push_back(item.path());
  }
  std::sort(files.begin(), files.end());
  std::string manifest;
  for (const auto& f : files) {
    manifest += fs::relative(f, dir).string() + '\0' + sha256_hex(read_file(f)) + '\n';
  }
  return sha256_hex(manifest);
}

Timestamp at(std::int64_t seconds) {
  return Timestamp{std::chrono::seconds(1704067200 + seconds)};
}

ServiceConfig mock_config(const fs::path& data_dir) {
  ServiceConfig config;
  config.data_dir = data_dir;
  config.assets_dir = assets_dir();
  config.template_dir = assets_dir() / "templates";
  config.listen_address = "127.0.0.1:0";
  return config;
}

}  // namespace salad::test
