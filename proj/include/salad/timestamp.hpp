#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace salad {

/// UTC wall-clock instant with one-second resolution.
using Timestamp = std::chrono::sys_seconds;

Timestamp now_utc();

/// Formats as RFC 3339 `YYYY-MM-DDTHH:MM:SSZ`.
std::string to_rfc3339(Timestamp t);

/// Parses the subset produced by to_rfc3339 (UTC, `Z` suffix, optional
/// fractional seconds are rejected). Throws InvalidArgument.
Timestamp parse_rfc3339(std::string_view text);

}  // namespace salad
