#include "salad/timestamp.hpp"

#include <charconv>
#include <cstdio>

#include "salad/error.hpp"

namespace salad {

namespace chr = std::chrono;

Timestamp now_utc() { return chr::floor<chr::seconds>(chr::system_clock::now()); }

std::string to_rfc3339(Timestamp t) {
  const auto day = chr::floor<chr::days>(t);
  const chr::year_month_day ymd{day};
  const chr::hh_mm_ss hms{t - day};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                static_cast<int>(hms.seconds().count()));
  return buf;
}

namespace {

int digits(std::string_view text, std::size_t pos, std::size_t len) {
  int value = 0;
  const char* first = text.data() + pos;
  const char* last = first + len;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) {
    throw InvalidArgument("malformed RFC 3339 timestamp: " + std::string(text));
  }
  return value;
}

}  // namespace

Timestamp parse_rfc3339(std::string_view text) {
  // 0123456789012345678 9
  // YYYY-MM-DDTHH:MM:SSZ
  if (text.size() != 20 || text[4] != '-' || text[7] != '-' || text[10] != 'T' || text[13] != ':' ||
      text[16] != ':' || text[19] != 'Z') {
    throw InvalidArgument("malformed RFC 3339 timestamp: " + std::string(text));
  }
  const chr::year_month_day ymd{chr::year{digits(text, 0, 4)},
                                chr::month{static_cast<unsigned>(digits(text, 5, 2))},
                                chr::day{static_cast<unsigned>(digits(text, 8, 2))}};
  const int h = digits(text, 11, 2);
  const int m = digits(text, 14, 2);
  const int s = digits(text, 17, 2);
  if (!ymd.ok() || h > 23 || m > 59 || s > 59) {
    throw InvalidArgument("out-of-range RFC 3339 timestamp: " + std::string(text));
  }
  return chr::sys_days{ymd} + chr::hours{h} + chr::minutes{m} + chr::seconds{s};
}

}  // namespace salad
