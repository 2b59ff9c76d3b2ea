#include <doctest.h>

#include "salad/error.hpp"
#include "salad/songcraft.hpp"
#include "support/test_env.hpp"

using namespace salad;

namespace {

VocabEntry entry(const std::string& surface, const std::string& reading, int progress) {
  VocabEntry e;
  e.surface = surface;
  e.reading = reading;
  e.meaning = "m";
  e.progress = ProgressLevel(progress);
  e.first_seen = e.last_seen = test::at(0);
  e.exposure_count = static_cast<std::uint64_t>(progress);
  return e;
}

VocabDatabase db_of(std::initializer_list<VocabEntry> entries) {
  VocabDatabase db;
  for (const auto& e : entries) db.entries[e.surface] = e;
  return db;
}

const std::string kSimple = "@id simple\n@notes 60:0.5 62:0.5 64:0.5 65:0.5\nら{SLOT}\n";

std::string store_nothing(const AudioClip&) { return "id"; }

}  // namespace

TEST_CASE("template parsing") {
  const auto t = parse_template(kSimple, *test::kana());
  CHECK(t.template_id == "simple");
  CHECK(t.melody.size() == 4);
  CHECK(t.slot_count() == 1);
  CHECK(t.fixed_morae(*test::kana()) == 1);
  CHECK(t.total_duration() == doctest::Approx(2.0));

  CHECK_THROWS_AS(parse_template("@notes 60:1\nら{SLOT}\n", *test::kana()), TemplateError);
  CHECK_THROWS_AS(parse_template("@id x\nら{SLOT}\n", *test::kana()), TemplateError);
  CHECK_THROWS_AS(parse_template("@id x\n@notes 60:1 60:1\nらら\n", *test::kana()), TemplateError);
  CHECK_THROWS_AS(parse_template("@id x\n@notes 20:1 60:1\nら{SLOT}\n", *test::kana()), TemplateError);
  CHECK_THROWS_AS(parse_template("@id x\n@notes 60:0 60:1\nら{SLOT}\n", *test::kana()), TemplateError);
  CHECK_THROWS_AS(parse_template("@id x\n@notes 60:1\nららら{SLOT}\n", *test::kana()), TemplateError);
  CHECK_THROWS_AS(parse_template("@id x y\n@notes 60:1 60:1\nら{SLOT}\n", *test::kana()), TemplateError);
  CHECK_THROWS_AS(parse_template("@id x\nら{SLOT}\n@notes 60:1 60:1\n", *test::kana()), TemplateError);
  CHECK_THROWS_AS(parse_template("@id x\n@notes 60:1 60:1\nla{SLOT}\n", *test::kana()), TemplateError);
}

TEST_CASE("shipped templates load and include a single-slot one") {
  const auto templates = load_templates(test::assets_dir() / "templates", *test::kana());
  REQUIRE(templates.size() >= 4);
  bool single = false;
  for (const auto& t : templates) {
    single = single || t.slot_count() == 1;
    CHECK(t.fixed_morae(*test::kana()) + t.slot_count() <= t.melody.size());
  }
  CHECK(single);
}

TEST_CASE("slot selection prefers the weakest learning words and cycles") {
  const auto db = db_of({entry("猫", "ねこ", 3), entry("犬", "いぬ", 1), entry("私", "わたし", 5)});
  const auto sel = select_slot_words(db, 3);
  CHECK_FALSE(sel.used_fallback);
  CHECK(sel.words == std::vector<SlotWord>{{"犬", "いぬ"}, {"猫", "ねこ"}, {"犬", "いぬ"}});

  const auto learned = select_slot_words(db_of({entry("私", "わたし", 5)}), 2);
  CHECK(learned.used_fallback);
  CHECK(learned.words.size() == 2);

  CHECK_THROWS_AS(select_slot_words(VocabDatabase{}, 1), EmptyVocabulary);
  CHECK_THROWS_AS(select_slot_words(db, 0), InvalidArgument);
}

TEST_CASE("filling and aligning") {
  const auto t = parse_template(kSimple, *test::kana());
  const std::vector<SlotWord> words = {{"私", "わたし"}};
  const auto filled = fill_template(t, words, *test::kana());
  CHECK(filled.lyric == "らわたし");
  REQUIRE(filled.placements.size() == 1);
  CHECK(filled.placements[0].first_mora == 1);
  CHECK(filled.placements[0].morae == 3);

  const auto score = align_to_melody(filled.lyric, t.melody, *test::kana());
  CHECK(score.notes.size() == 4);
  CHECK(score.notes[1].second.symbols == std::vector<std::string>{"w", "a"});

  const std::vector<SlotWord> too_long = {{"食べます", "たべます"}};
  CHECK_THROWS_AS(fill_template(t, too_long, *test::kana()), MoraOverflow);
  CHECK_THROWS_AS(fill_template(t, {}, *test::kana()), SlotArityMismatch);
  CHECK_THROWS_AS(align_to_melody("らら", t.melody, *test::kana()), LengthMismatch);
}

TEST_CASE("generate_song picks fitting learning words") {
  const auto t = parse_template(kSimple, *test::kana());
  const auto providers = test::mock_providers();
  const auto db = db_of({entry("猫", "ねこ", 1), entry("私", "わたし", 2), entry("食べます", "たべます", 5)});
  const auto song = generate_song(db, t, providers, *test::kana(), store_nothing);
  CHECK(song.score.slot_words == std::vector<std::string>{"私"});
  CHECK(song.score.lyric_text == "らわたし");
  CHECK_FALSE(song.score.used_fallback);
  CHECK(std::abs(song.duration - t.total_duration()) <= 1.0 / kSampleRate);
}

TEST_CASE("generate_song errors") {
  const auto t = parse_template(kSimple, *test::kana());
  const auto providers = test::mock_providers();
  CHECK_THROWS_AS(generate_song(VocabDatabase{}, t, providers, *test::kana(), store_nothing), EmptyVocabulary);
  CHECK_THROWS_AS(generate_song(db_of({entry("猫", "ねこ", 1)}), t, providers, *test::kana(), store_nothing),
                  NoFittingWords);
}
