#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace salad {

/// One mora's phoneme labels, e.g. {"k","y","a"} for きゃ.
struct PhonemeUnit {
  std::vector<std::string> symbols;
  std::size_t mora_index = 0;

  bool operator==(const PhonemeUnit&) const = default;
};

/// Closed kana → (romaji, phonemes) table loaded from the versioned
/// `kana_table.tsv` data file. Keys are hiragana of one or two code points;
/// katakana input is folded onto hiragana before lookup.
class KanaTable {
 public:
  struct Entry {
    std::u32string kana;
    std::string romaji;
    std::vector<std::string> phonemes;
  };

  static KanaTable parse(std::string_view text);
  static KanaTable load(const std::filesystem::path& path);

  int version() const noexcept { return version_; }
  const std::vector<std::string>& alphabet() const noexcept { return alphabet_; }
  bool in_alphabet(std::string_view label) const;

  const Entry* find(std::u32string_view key) const;
  /// Entries in file order.
  const std::vector<Entry>& entries() const noexcept { return entries_; }

 private:
  int version_ = 0;
  std::vector<std::string> alphabet_;
  std::set<std::string, std::less<>> alphabet_set_;
  std::vector<Entry> entries_;
  std::map<std::u32string, std::size_t, std::less<>> index_;
};

/// Maps katakana U+30A1..U+30F6 onto the hiragana block; everything else
/// passes through unchanged.
char32_t fold_katakana(char32_t cp) noexcept;

/// Throws UnmappableCodePoint unless every code point is hiragana, katakana
/// or the long-vowel mark.
void validate_kana(std::string_view kana);

/// Hepburn romaji with wapuro long vowels: sokuon doubles the next consonant,
/// ん is written n' before a vowel or y.
std::string kana_to_romaji(const KanaTable& table, std::string_view kana);

std::vector<PhonemeUnit> kana_to_phonemes(const KanaTable& table, std::string_view kana);

std::size_t mora_count(const KanaTable& table, std::string_view kana);

}  // namespace salad
