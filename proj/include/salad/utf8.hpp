#pragma once

#include <string>
#include <string_view>

namespace salad::utf8 {

/// Decodes UTF-8. Malformed input throws UnmappableCodePoint carrying the
/// index of the offending code point.
std::u32string decode(std::string_view bytes);

std::string encode(std::u32string_view cps);
void append(std::string& out, char32_t cp);

/// Number of code points; throws on malformed input.
std::size_t length(std::string_view bytes);

}  // namespace salad::utf8
