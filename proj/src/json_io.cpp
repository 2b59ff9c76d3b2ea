#include "salad/json_io.hpp"

#include <set>

namespace salad {

namespace {

void expect_fields(const Json& j, std::initializer_list<const char*> fields, std::string_view what) {
  if (!j.is_object()) throw InvalidArgument(std::string(what) + ": expected an object");
  std::set<std::string> allowed(fields.begin(), fields.end());
  for (const auto& [key, value] : j.items()) {
    if (allowed.count(key) == 0) throw InvalidArgument(std::string(what) + ": unexpected field '" + key + "'");
  }
  for (const char* f : fields) {
    if (!j.contains(f)) throw InvalidArgument(std::string(what) + ": missing field '" + f + "'");
  }
}

std::string get_string(const Json& j, const char* key) {
  const Json& v = j.at(key);
  if (!v.is_string()) throw InvalidArgument(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

std::uint64_t get_uint(const Json& j, const char* key) {
  const Json& v = j.at(key);
  if (!v.is_number_unsigned()) throw InvalidArgument(std::string("field '") + key + "' must be a non-negative integer");
  return v.get<std::uint64_t>();
}

std::vector<std::string> get_strings(const Json& j, const char* key) {
  const Json& v = j.at(key);
  if (!v.is_array()) throw InvalidArgument(std::string("field '") + key + "' must be an array");
  std::vector<std::string> out;
  for (const auto& item : v) {
    if (!item.is_string()) throw InvalidArgument(std::string("field '") + key + "' must hold strings");
    out.push_back(item.get<std::string>());
  }
  return out;
}

}  // namespace

Json to_json(const VocabEntry& entry) {
  return Json{{"reading", entry.reading},
              {"meaning", entry.meaning},
              {"progress", entry.progress.value()},
              {"first_seen", to_rfc3339(entry.first_seen)},
              {"last_seen", to_rfc3339(entry.last_seen)},
              {"exposure_count", entry.exposure_count}};
}

Json to_json(const VocabDatabase& db) {
  Json entries = Json::object();
  for (const auto& [surface, entry] : db.entries) entries[surface] = to_json(entry);
  return Json{{"schema_version", db.schema_version}, {"entries", std::move(entries)}};
}

VocabDatabase vocab_from_json(const Json& j) {
  expect_fields(j, {"schema_version", "entries"}, "vocabulary");
  VocabDatabase db;
  const Json& version = j.at("schema_version");
  if (!version.is_number_integer()) throw InvalidArgument("schema_version must be an integer");
  db.schema_version = version.get<int>();
  if (db.schema_version != kVocabSchemaVersion) {
    throw InvalidArgument("unknown schema_version " + std::to_string(db.schema_version));
  }
  const Json& entries = j.at("entries");
  if (!entries.is_object()) throw InvalidArgument("entries must be an object");
  for (const auto& [surface, e] : entries.items()) {
    expect_fields(e, {"reading", "meaning", "progress", "first_seen", "last_seen", "exposure_count"},
                  "entry '" + surface + "'");
    VocabEntry entry;
    entry.surface = surface;
    entry.reading = get_string(e, "reading");
    entry.meaning = get_string(e, "meaning");
    const Json& p = e.at("progress");
    if (!p.is_number_integer()) throw InvalidArgument("progress must be an integer");
    entry.progress = ProgressLevel(p.get<int>());
    entry.first_seen = parse_rfc3339(get_string(e, "first_seen"));
    entry.last_seen = parse_rfc3339(get_string(e, "last_seen"));
    entry.exposure_count = get_uint(e, "exposure_count");
    db.entries.emplace(surface, std::move(entry));
  }
  validate(db);
  return db;
}

Json to_json(const SessionRecord& r) {
  return Json{{"session_id", r.session_id},
              {"started_at", to_rfc3339(r.started_at)},
              {"inputs_processed", r.inputs_processed},
              {"words_introduced", r.words_introduced},
              {"words_advanced", r.words_advanced},
              {"words_completed", r.words_completed}};
}

SessionRecord session_from_json(const Json& j) {
  expect_fields(j,
                {"session_id", "started_at", "inputs_processed", "words_introduced", "words_advanced",
                 "words_completed"},
                "session record");
  SessionRecord r;
  r.session_id = get_string(j, "session_id");
  r.started_at = parse_rfc3339(get_string(j, "started_at"));
  r.inputs_processed = get_uint(j, "inputs_processed");
  r.words_introduced = get_strings(j, "words_introduced");
  r.words_advanced = get_strings(j, "words_advanced");
  r.words_completed = get_strings(j, "words_completed");
  validate(r);
  return r;
}

Json to_json(const TranslationTriple& t) {
  Json seg = Json::array();
  for (const auto& token : t.segmentation) seg.push_back({{"surface", token.surface}, {"reading", token.reading}});
  return Json{{"source_en", t.source_en},
              {"kanji", t.kanji},
              {"kana", t.kana},
              {"romaji", t.romaji},
              {"segmentation", std::move(seg)}};
}

TranslationTriple triple_from_json(const Json& j) {
  expect_fields(j, {"source_en", "kanji", "kana", "romaji", "segmentation"}, "translation");
  TranslationTriple t;
  t.source_en = get_string(j, "source_en");
  t.kanji = get_string(j, "kanji");
  t.kana = get_string(j, "kana");
  t.romaji = get_string(j, "romaji");
  const Json& seg = j.at("segmentation");
  if (!seg.is_array()) throw InvalidArgument("segmentation must be an array");
  for (const auto& token : seg) {
    expect_fields(token, {"surface", "reading"}, "segmentation token");
    t.segmentation.push_back({get_string(token, "surface"), get_string(token, "reading")});
  }
  return t;
}

Json to_json(const GrammarNote& note) { return Json{{"pattern", note.pattern}, {"explanation", note.explanation}}; }

GrammarNote grammar_note_from_json(const Json& j) {
  expect_fields(j, {"pattern", "explanation"}, "grammar note");
  GrammarNote note{get_string(j, "pattern"), get_string(j, "explanation")};
  if (note.pattern.empty() || note.explanation.empty()) throw InvalidArgument("grammar note with empty field");
  return note;
}

Json to_json(const VocabReport& report) {
  Json new_words = Json::array();
  for (const auto& w : report.new_words) new_words.push_back({{"surface", w.surface}, {"meaning", w.meaning}});
  Json advanced = Json::array();
  for (const auto& w : report.advanced_words) {
    advanced.push_back({{"surface", w.surface}, {"old_progress", w.old_progress}, {"new_progress", w.new_progress}});
  }
  return Json{{"new_words", std::move(new_words)},
              {"advanced_words", std::move(advanced)},
              {"display_lines", report.display_lines}};
}

Json to_json(const SongScore& score) {
  Json notes = Json::array();
  for (const auto& [note, unit] : score.notes) {
    notes.push_back({{"midi_pitch", note.midi_pitch}, {"duration", note.duration}, {"phonemes", unit.symbols}});
  }
  return Json{{"notes", std::move(notes)},
              {"lyric_text", score.lyric_text},
              {"slot_words", score.slot_words},
              {"used_fallback", score.used_fallback}};
}

std::string canonical_dump(const Json& j) { return j.dump(); }

}  // namespace salad
