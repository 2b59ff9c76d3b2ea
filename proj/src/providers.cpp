#include "salad/providers.hpp"

#include "salad/error.hpp"
#include "salad/utf8.hpp"

namespace salad {

namespace {

bool is_space_or_punct(char32_t cp) {
  if (cp < 0x80) return !((cp >= '0' && cp <= '9') || (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z'));
  return (cp >= 0x3000 && cp <= 0x303F) ||  // CJK symbols and punctuation
         cp == 0x30FB ||                    // katakana middle dot
         (cp >= 0xFF01 && cp <= 0xFF0F) || (cp >= 0xFF1A && cp <= 0xFF20) || cp == 0xFF5E;
}

std::u32string strip(std::string_view text) {
  std::u32string out;
  for (char32_t cp : utf8::decode(text)) {
    if (!is_space_or_punct(cp)) out.push_back(cp);
  }
  return out;
}

}  // namespace

void validate_triple(const TranslationTriple& triple) {
  if (triple.kanji.empty()) throw InvalidArgument("translation has empty kanji text");
  if (triple.segmentation.empty()) throw InvalidArgument("translation has empty segmentation");
  validate_kana(triple.kana);
  std::u32string joined;
  for (const auto& token : triple.segmentation) {
    if (token.surface.empty()) throw InvalidArgument("segmentation token with empty surface");
    validate_kana(token.reading);
    joined += strip(token.surface);
  }
  if (joined != strip(triple.kanji)) {
    throw InvalidArgument("segmentation surfaces do not reproduce the kanji text '" + triple.kanji + "'");
  }
}

std::string_view to_string(Binding b) { return b == Binding::Mock ? "mock" : "live"; }

void ProviderSet::check_bound() const {
  if (!translator || !grammarian || !recognizer || !speech_synth || !singing_synth || !lexicon) {
    throw InvalidArgument("provider set has an unbound port");
  }
}

}  // namespace salad
