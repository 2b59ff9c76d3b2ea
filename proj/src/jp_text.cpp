#include "salad/jp_text.hpp"

#include <fstream>
#include <sstream>

#include "salad/error.hpp"
#include "salad/utf8.hpp"

namespace salad {

namespace {

constexpr char32_t kLongVowelMark = U'ー';

bool is_hiragana(char32_t cp) { return cp >= 0x3041 && cp <= 0x3096; }
bool is_katakana(char32_t cp) { return cp >= 0x30A1 && cp <= 0x30FA; }

bool is_vowel(std::string_view label) {
  return label == "a" || label == "i" || label == "u" || label == "e" || label == "o";
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    out.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<std::string> split_words(std::string_view text) {
  std::vector<std::string> out;
  std::istringstream in{std::string(text)};
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

enum class MoraKind { Regular, Sokuon, Nasal, Long };

struct Mora {
  MoraKind kind;
  const KanaTable::Entry* entry;  // null for Long
  std::string vowel;              // Long only
};

std::vector<Mora> segment(const KanaTable& table, std::string_view kana) {
  std::u32string cps = utf8::decode(kana);
  for (std::size_t i = 0; i < cps.size(); ++i) {
    const char32_t cp = cps[i];
    if (!is_hiragana(cp) && !is_katakana(cp) && cp != kLongVowelMark) {
      throw UnmappableCodePoint(i, "not a kana character");
    }
    cps[i] = fold_katakana(cp);
  }

  std::vector<Mora> morae;
  std::size_t i = 0;
  while (i < cps.size()) {
    if (cps[i] == kLongVowelMark) {
      if (morae.empty()) throw UnmappableCodePoint(i, "long-vowel mark without a preceding vowel");
      const Mora& prev = morae.back();
      std::string vowel;
      if (prev.kind == MoraKind::Long) {
        vowel = prev.vowel;
      } else if (prev.kind == MoraKind::Regular && is_vowel(prev.entry->phonemes.back())) {
        vowel = prev.entry->phonemes.back();
      } else {
        throw UnmappableCodePoint(i, "long-vowel mark without a preceding vowel");
      }
      morae.push_back({MoraKind::Long, nullptr, std::move(vowel)});
      ++i;
      continue;
    }
    const KanaTable::Entry* entry = nullptr;
    std::size_t used = 0;
    if (i + 1 < cps.size()) {
      entry = table.find(std::u32string_view(cps).substr(i, 2));
      used = 2;
    }
    if (entry == nullptr) {
      entry = table.find(std::u32string_view(cps).substr(i, 1));
      used = 1;
    }
    if (entry == nullptr) throw UnmappableCodePoint(i, "no table entry");
    MoraKind kind = MoraKind::Regular;
    if (entry->phonemes.size() == 1 && entry->phonemes[0] == "cl") kind = MoraKind::Sokuon;
    if (entry->phonemes.size() == 1 && entry->phonemes[0] == "N") kind = MoraKind::Nasal;
    morae.push_back({kind, entry, {}});
    i += used;
  }
  return morae;
}

const std::string& mora_romaji(const Mora& m) { return m.kind == MoraKind::Long ? m.vowel : m.entry->romaji; }

}  // namespace

char32_t fold_katakana(char32_t cp) noexcept {
  if (cp >= 0x30A1 && cp <= 0x30F6) return cp - 0x60;
  return cp;
}

void validate_kana(std::string_view kana) {
  const std::u32string cps = utf8::decode(kana);
  for (std::size_t i = 0; i < cps.size(); ++i) {
    if (!is_hiragana(cps[i]) && !is_katakana(cps[i]) && cps[i] != kLongVowelMark) {
      throw UnmappableCodePoint(i, "not a kana character");
    }
  }
}

bool KanaTable::in_alphabet(std::string_view label) const { return alphabet_set_.find(label) != alphabet_set_.end(); }

const KanaTable::Entry* KanaTable::find(std::u32string_view key) const {
  const auto it = index_.find(key);
  return it == index_.end() ? nullptr : &entries_[it->second];
}

KanaTable KanaTable::parse(std::string_view text) {
  KanaTable table;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& why) {
    throw InvalidArgument("kana table line " + std::to_string(line_no) + ": " + why);
  };
  for (std::string_view line : split(text, '\n')) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    if (line.front() == '@') {
      const auto words = split_words(line);
      if (words[0] == "@version" && words.size() == 2) {
        table.version_ = std::stoi(words[1]);
      } else if (words[0] == "@alphabet" && words.size() > 1) {
        table.alphabet_.assign(words.begin() + 1, words.end());
        table.alphabet_set_.insert(table.alphabet_.begin(), table.alphabet_.end());
      } else {
        fail("unknown directive");
      }
      continue;
    }
    if (table.alphabet_.empty()) fail("row before @alphabet directive");
    const auto cols = split(line, '\t');
    if (cols.size() != 3) fail("expected kana<TAB>romaji<TAB>phonemes");
    Entry entry;
    entry.kana = utf8::decode(cols[0]);
    if (entry.kana.empty() || entry.kana.size() > 2) fail("kana key must be one or two code points");
    for (char32_t cp : entry.kana) {
      if (!is_hiragana(cp)) fail("kana keys must be hiragana");
    }
    entry.romaji = std::string(cols[1]);
    if (entry.romaji.empty()) fail("empty romaji");
    for (char c : entry.romaji) {
      if (!(c >= 'a' && c <= 'z')) fail("romaji must be lowercase ASCII");
    }
    entry.phonemes = split_words(cols[2]);
    if (entry.phonemes.empty()) fail("empty phoneme list");
    for (const auto& p : entry.phonemes) {
      if (!table.in_alphabet(p)) fail("phoneme '" + p + "' not in alphabet");
    }
    if (table.index_.count(entry.kana) != 0) fail("duplicate kana key");
    table.index_.emplace(entry.kana, table.entries_.size());
    table.entries_.push_back(std::move(entry));
  }
  if (table.version_ != 1) throw InvalidArgument("kana table: unsupported or missing @version");
  for (const char* v : {"a", "i", "u", "e", "o", "N", "cl"}) {
    if (!table.in_alphabet(v)) throw InvalidArgument(std::string("kana table: alphabet lacks ") + v);
  }
  return table;
}

KanaTable KanaTable::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure("cannot open kana table " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::string kana_to_romaji(const KanaTable& table, std::string_view kana) {
  const auto morae = segment(table, kana);
  std::string out;
  for (std::size_t i = 0; i < morae.size(); ++i) {
    const Mora& m = morae[i];
    const Mora* next = i + 1 < morae.size() ? &morae[i + 1] : nullptr;
    switch (m.kind) {
      case MoraKind::Sokuon: {
        const bool geminates = next != nullptr && next->kind == MoraKind::Regular &&
                               !is_vowel(next->entry->phonemes.front());
        if (!geminates) {
          out += m.entry->romaji;
        } else if (next->entry->romaji.rfind("ch", 0) == 0) {
          out += 't';
        } else {
          out += next->entry->romaji.front();
        }
        break;
      }
      case MoraKind::Nasal: {
        out += m.entry->romaji;
        if (next != nullptr) {
          const char c = mora_romaji(*next).front();
          if (c == 'a' || c == 'i' || c == 'u' || c == 'e' || c == 'o' || c == 'y') out += '\'';
        }
        break;
      }
      case MoraKind::Long:
        out += m.vowel;
        break;
      case MoraKind::Regular:
        out += m.entry->romaji;
        break;
    }
  }
  return out;
}

std::vector<PhonemeUnit> kana_to_phonemes(const KanaTable& table, std::string_view kana) {
  const auto morae = segment(table, kana);
  std::vector<PhonemeUnit> units;
  units.reserve(morae.size());
  for (std::size_t i = 0; i < morae.size(); ++i) {
    const Mora& m = morae[i];
    PhonemeUnit unit;
    unit.mora_index = i;
    if (m.kind == MoraKind::Long) {
      unit.symbols = {m.vowel};
    } else {
      unit.symbols = m.entry->phonemes;
    }
    units.push_back(std::move(unit));
  }
  return units;
}

std::size_t mora_count(const KanaTable& table, std::string_view kana) { return segment(table, kana).size(); }

}  // namespace salad
