#pragma once

// JSON mappings for the domain types. Decoders are strict: missing or
// unexpected fields and ill-typed values throw InvalidArgument.

#include <json.hpp>

#include "salad/providers.hpp"
#include "salad/vocab.hpp"

namespace salad {

using Json = nlohmann::json;

Json to_json(const VocabEntry& entry);  // without the surface (it is the map key)
Json to_json(const VocabDatabase& db);
Json to_json(const SessionRecord& record);
Json to_json(const TranslationTriple& triple);
Json to_json(const GrammarNote& note);
Json to_json(const VocabReport& report);
Json to_json(const SongScore& score);

VocabDatabase vocab_from_json(const Json& j);
SessionRecord session_from_json(const Json& j);
TranslationTriple triple_from_json(const Json& j);
GrammarNote grammar_note_from_json(const Json& j);

/// Compact, key-sorted encoding; equal values give equal bytes.
std::string canonical_dump(const Json& j);

}  // namespace salad
