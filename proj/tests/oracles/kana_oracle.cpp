#include "kana_oracle.hpp"

#include <map>

namespace salad::oracle {

namespace {

struct Syllable {
  std::string consonant;  // romaji spelling of the onset ("" for vowels)
  std::string label;      // phoneme label of the onset
  char vowel;
};

std::map<char32_t, Syllable> build_grid() {
  std::map<char32_t, Syllable> g;
  const auto row = [&](std::u32string kana, const char* cons, const char* label) {
    const char* vowels = "aiueo";
    for (std::size_t i = 0; i < kana.size(); ++i) {
      if (kana[i] != U'_') g[kana[i]] = {cons, label, vowels[i]};
    }
  };
  row(U"あいうえお", "", "");
  row(U"ぁぃぅぇぉ", "", "");
  row(U"かきくけこ", "k", "k");
  row(U"がぎぐげご", "g", "g");
  row(U"さ_すせそ", "s", "s");
  row(U"ざ_ずぜぞ", "z", "z");
  row(U"た__てと", "t", "t");
  row(U"だ__でど", "d", "d");
  row(U"なにぬねの", "n", "n");
  row(U"はひ_へほ", "h", "h");
  row(U"ばびぶべぼ", "b", "b");
  row(U"ぱぴぷぺぽ", "p", "p");
  row(U"まみむめも", "m", "m");
  row(U"や_ゆ_よ", "y", "y");
  row(U"ゃ_ゅ_ょ", "y", "y");
  row(U"らりるれろ", "r", "r");
  row(U"わ____", "w", "w");
  row(U"ゎ____", "w", "w");
  // Hepburn irregulars.
  g[U'し'] = {"sh", "sh", 'i'};
  g[U'じ'] = {"j", "j", 'i'};
  g[U'ち'] = {"ch", "ch", 'i'};
  g[U'ぢ'] = {"j", "j", 'i'};
  g[U'つ'] = {"ts", "ts", 'u'};
  g[U'づ'] = {"z", "z", 'u'};
  g[U'ふ'] = {"f", "f", 'u'};
  // Archaic kana read as bare vowels; を is read o.
  g[U'ゐ'] = {"", "", 'i'};
  g[U'ゑ'] = {"", "", 'e'};
  g[U'を'] = {"", "", 'o'};
  g[U'ゔ'] = {"v", "v", 'u'};
  g[U'ゕ'] = {"k", "k", 'a'};
  g[U'ゖ'] = {"k", "k", 'e'};
  return g;
}

const std::map<char32_t, Syllable>& grid() {
  static const auto g = build_grid();
  return g;
}

bool is_small_y(char32_t c) { return c == U'ゃ' || c == U'ゅ' || c == U'ょ'; }
bool is_small_vowel(char32_t c) { return c == U'ぁ' || c == U'ぃ' || c == U'ぅ' || c == U'ぇ' || c == U'ぉ'; }

/// i-column kana that take a small ya/yu/yo.
bool takes_yoon(char32_t c) {
  return std::u32string_view(U"きぎしじちぢにひびぴみり").find(c) != std::u32string_view::npos;
}

/// Consonant kana + small vowel pairs used for loanwords: the onset of the
/// first kana (w for う) with the vowel of the second.
bool loan_pair(char32_t c, char32_t small) {
  switch (c) {
    case U'し':
    case U'じ':
    case U'ち':
      return small == U'ぇ';
    case U'つ':
      return small == U'ぁ';
    case U'て':
    case U'で':
      return small == U'ぃ';
    case U'と':
    case U'ど':
      return small == U'ぅ';
    case U'ふ':
    case U'ゔ':
      return small != U'ぅ';
    case U'う':
      return small == U'ぃ' || small == U'ぇ' || small == U'ぉ';
    default:
      return false;
  }
}

char32_t fold(char32_t c) { return (c >= 0x30A1 && c <= 0x30F6) ? c - 0x60 : c; }

struct Mora {
  enum Kind { Plain, Sokuon, Nasal, Long } kind;
  std::string romaji;
  std::vector<std::string> phonemes;
};

Mora plain(const Syllable& onset, char vowel, bool yoon) {
  Mora m{Mora::Plain, onset.consonant, {}};
  if (!onset.label.empty()) m.phonemes.push_back(onset.label);
  const bool palatal = onset.label == "sh" || onset.label == "j" || onset.label == "ch";
  if (yoon && !palatal) {
    m.romaji += 'y';
    m.phonemes.push_back("y");
  }
  m.romaji += vowel;
  m.phonemes.push_back(std::string(1, vowel));
  return m;
}

bool vowel_initial(const std::string& romaji) {
  return !romaji.empty() && std::string_view("aeiou").find(romaji[0]) != std::string_view::npos;
}

}  // namespace

std::optional<Transliteration> transliterate(const std::u32string& input) {
  std::u32string s;
  for (char32_t c : input) s.push_back(fold(c));

  std::vector<Mora> morae;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char32_t c = s[i];
    const char32_t next = i + 1 < s.size() ? s[i + 1] : 0;
    if (c == U'ー') {
      if (morae.empty() || morae.back().kind == Mora::Sokuon || morae.back().kind == Mora::Nasal) return std::nullopt;
      const std::string v = morae.back().phonemes.back();
      morae.push_back({Mora::Long, v, {v}});
    } else if (c == U'っ') {
      morae.push_back({Mora::Sokuon, "t", {"cl"}});
    } else if (c == U'ん') {
      morae.push_back({Mora::Nasal, "n", {"N"}});
    } else {
      const auto it = grid().find(c);
      if (it == grid().end()) return std::nullopt;
      if (takes_yoon(c) && is_small_y(next)) {
        morae.push_back(plain(it->second, grid().at(next).vowel, true));
        ++i;
      } else if (is_small_vowel(next) && loan_pair(c, next)) {
        static const Syllable w_onset{"w", "w", 'u'};
        morae.push_back(plain(c == U'う' ? w_onset : it->second, grid().at(next).vowel, false));
        ++i;
      } else {
        morae.push_back(plain(it->second, it->second.vowel, false));
      }
    }
  }

  Transliteration out;
  for (std::size_t i = 0; i < morae.size(); ++i) {
    const Mora& m = morae[i];
    const Mora* next = i + 1 < morae.size() ? &morae[i + 1] : nullptr;
    if (m.kind == Mora::Sokuon && next != nullptr && next->kind == Mora::Plain && !vowel_initial(next->romaji)) {
      out.romaji += next->romaji.compare(0, 2, "ch") == 0 ? 't' : next->romaji[0];
    } else if (m.kind == Mora::Nasal && next != nullptr &&
               (vowel_initial(next->romaji) || next->romaji[0] == 'y')) {
      out.romaji += "n'";
    } else {
      out.romaji += m.romaji;
    }
    out.morae.push_back(m.phonemes);
  }
  return out;
}

std::vector<char32_t> single_kana() {
  std::vector<char32_t> out;
  for (char32_t c = 0x3041; c <= 0x3096; ++c) out.push_back(c);
  return out;
}

const std::vector<char32_t>& kana_alphabet() {
  static const std::vector<char32_t> alphabet = [] {
    std::vector<char32_t> a;
    for (char32_t c = 0x3041; c <= 0x3096; ++c) a.push_back(c);
    for (char32_t c = 0x30A1; c <= 0x30F6; ++c) a.push_back(c);
    a.push_back(U'ー');
    return a;
  }();
  return alphabet;
}

}  // namespace salad::oracle
