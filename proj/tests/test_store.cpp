#include <doctest.h>

#include <thread>

#include "salad/error.hpp"
#include "salad/store.hpp"
#include "support/generators.hpp"
#include "support/test_env.hpp"

using namespace salad;
namespace fs = std::filesystem;

TEST_CASE("fresh directory gives an empty database") {
  test::TempDir dir;
  Store store(dir / "data");
  CHECK(fs::is_directory(store.audio_dir()));
  CHECK(store.load_db() == VocabDatabase{});
  CHECK(store.load_sessions().empty());
}

TEST_CASE("save and load round trip with canonical bytes") {
  test::TempDir dir;
  Store store(dir.path());
  std::mt19937 rng(3);
  for (int i = 0; i < 50; ++i) {
    const VocabDatabase db = test::random_db(rng, 15);
    store.save_db(db);
    CHECK(store.load_db() == db);
    const std::string bytes = test::read_file(store.vocab_path());
    CHECK(bytes == serialize_db(db));
    store.save_db(db);
    CHECK(test::read_file(store.vocab_path()) == bytes);
  }
}

TEST_CASE("on-disk layout") {
  VocabEntry e;
  e.surface = "寿司";
  e.reading = "すし";
  e.meaning = "sushi";
  e.progress = ProgressLevel(2);
  e.first_seen = test::at(0);
  e.last_seen = test::at(60);
  e.exposure_count = 2;
  VocabDatabase db;
  db.entries["寿司"] = e;
  const Json j = Json::parse(serialize_db(db));
  CHECK(j["schema_version"] == 1);
  CHECK(j["entries"]["寿司"]["reading"] == "すし");
  CHECK(j["entries"]["寿司"]["first_seen"] == "2024-01-01T00:00:00Z");
  CHECK(j["entries"]["寿司"]["last_seen"] == "2024-01-01T00:01:00Z");
  CHECK(j["entries"]["寿司"]["progress"] == 2);
  CHECK(j["entries"]["寿司"]["exposure_count"] == 2);
  CHECK(serialize_db(db).back() == '\n');
}

TEST_CASE("corrupt files are rejected, never repaired") {
  test::TempDir dir;
  Store store(dir.path());
  std::mt19937 rng(5);
  VocabDatabase db;
  while (db.entries.size() < 3) db = test::random_db(rng, 6);
  const std::string good = serialize_db(db);
  for (std::size_t cut : {std::size_t{0}, std::size_t{1}, good.size() / 3, good.size() / 2, good.size() - 3}) {
    test::write_file(store.vocab_path(), good.substr(0, cut));
    CHECK_THROWS_AS(store.load_db(), CorruptStore);
  }
  Json j = Json::parse(good);
  j["schema_version"] = 2;
  test::write_file(store.vocab_path(), j.dump());
  CHECK_THROWS_AS(store.load_db(), CorruptStore);
  j["schema_version"] = 1;
  j["entries"].begin().value()["progress"] = 6;
  test::write_file(store.vocab_path(), j.dump());
  CHECK_THROWS_AS(store.load_db(), CorruptStore);
  CHECK(test::read_file(store.vocab_path()) == j.dump());
}

TEST_CASE("invalid database is rejected before any write") {
  test::TempDir dir;
  Store store(dir.path());
  VocabDatabase db;
  VocabEntry e;
  e.surface = "猫";
  e.meaning = "";
  db.entries["猫"] = e;
  CHECK_THROWS_AS(store.save_db(db), InvalidArgument);
  CHECK_FALSE(fs::exists(store.vocab_path()));
}

TEST_CASE("interrupted save leaves the previous file loadable") {
  test::TempDir dir;
  Store store(dir.path());
  std::mt19937 rng(9);
  const VocabDatabase before = test::random_db(rng, 10);
  store.save_db(before);
  const VocabDatabase after = test::random_db(rng, 10);
  const std::string next = serialize_db(after);
  test::write_file(store.vocab_path().string() + ".tmp.99999.0", next.substr(0, next.size() / 2));
  CHECK(store.load_db() == before);
  store.save_db(after);
  CHECK(store.load_db() == after);
}

TEST_CASE("sessions append in order and round trip") {
  test::TempDir dir;
  Store store(dir.path());
  for (int i = 0; i < 4; ++i) {
    SessionRecord r;
    r.session_id = "s" + std::to_string(i);
    r.started_at = test::at(i);
    r.inputs_processed = static_cast<std::uint64_t>(i);
    r.words_introduced = {"猫"};
    store.append_session(r);
  }
  const auto records = store.load_sessions();
  REQUIRE(records.size() == 4);
  CHECK(records[2].session_id == "s2");
  CHECK(records[3].words_introduced == std::vector<std::string>{"猫"});
}

TEST_CASE("concurrent session appends never interleave") {
  test::TempDir dir;
  Store store(dir.path());
  std::vector<std::thread> threads;
  for (int t = 0; t < 8; ++t) {
    threads.emplace_back([&, t] {
      for (int i = 0; i < 50; ++i) {
        SessionRecord r;
        r.session_id = "thread-" + std::to_string(t);
        r.started_at = test::at(i);
        r.inputs_processed = static_cast<std::uint64_t>(i);
        r.words_introduced.assign(static_cast<std::size_t>(i % 7), std::string(40, 'x'));
        store.append_session(r);
      }
    });
  }
  for (auto& th : threads) th.join();
  CHECK(store.load_sessions().size() == 400);
}

TEST_CASE("audio is content addressed") {
  test::TempDir dir;
  Store store(dir.path());
  AudioClip clip;
  clip.samples = {1, 2, 3, 4};
  const std::string id = store.put_audio(clip);
  CHECK(id.size() == 64);
  CHECK(store.put_audio(clip) == id);
  CHECK(std::distance(fs::directory_iterator(store.audio_dir()), fs::directory_iterator{}) == 1);
  CHECK(store.get_audio_bytes(id) == encode_wav(clip));
  CHECK(store.get_audio(id) == clip);
  CHECK(store.has_audio(id));
  CHECK_THROWS_AS(store.get_audio_bytes(std::string(64, '0')), NotFound);
  CHECK_THROWS_AS(store.get_audio_bytes("../vocab"), NotFound);
}

TEST_CASE("store handle serializes writers and publishes snapshots") {
  test::TempDir dir;
  StoreHandle handle(std::make_shared<Store>(dir.path()));
  const auto before = handle.snapshot();
  CHECK(before->entries.empty());
  {
    auto txn = handle.begin();
    VocabDatabase next = txn.current();
    VocabEntry e;
    e.surface = "猫";
    e.reading = "ねこ";
    e.meaning = "cat";
    e.first_seen = e.last_seen = test::at(0);
    e.exposure_count = 1;
    next.entries["猫"] = e;
    txn.commit(next);
  }
  CHECK(before->entries.empty());
  CHECK(handle.snapshot()->entries.size() == 1);
  CHECK(handle.store().load_db().entries.size() == 1);
  {
    auto txn = handle.begin();  // abandoned: nothing changes
  }
  CHECK(handle.snapshot()->entries.size() == 1);
}
