#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace aicarbon {

/// Seconds since the Unix epoch, UTC.
using EpochSeconds = std::int64_t;

/// Parses an RFC 3339 timestamp ("2024-10-01T00:05:00Z", "...+02:00",
/// fractional seconds allowed). Returns nullopt on malformed input.
std::optional<EpochSeconds> parse_rfc3339(std::string_view text);

std::string format_rfc3339(EpochSeconds t);

/// Snaps to the nearest multiple of gridSeconds when within toleranceSeconds,
/// nullopt otherwise.
std::optional<EpochSeconds> snap_to_grid(EpochSeconds t, std::int64_t gridSeconds, std::int64_t toleranceSeconds);

}
