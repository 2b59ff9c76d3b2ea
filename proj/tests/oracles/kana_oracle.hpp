#pragma once

// Reference transliteration built from the gojuon grid, independent of the
// shipped kana table file and of the engine's converter.

#include <optional>
#include <string>
#include <vector>

namespace salad::oracle {

struct KanaReading {
  std::string romaji;
  std::vector<std::string> phonemes;
};

/// nullopt when the string breaks a kana rule (stray ー, non-kana).
struct Transliteration {
  std::string romaji;
  std::vector<std::vector<std::string>> morae;
};

std::optional<Transliteration> transliterate(const std::u32string& kana);

/// Every single code point the grid defines (hiragana only).
std::vector<char32_t> single_kana();

/// Code points random strings are drawn from: hiragana, katakana, ー.
const std::vector<char32_t>& kana_alphabet();

}  // namespace salad::oracle
