#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace wpc {

/// Parses an ISO-8601 instant ("2017-06-01T00:10:00", space separator and
/// "Z"/"+hh:mm" offsets accepted, fractional seconds truncated) to epoch
/// seconds UTC. Date-only strings parse as midnight.
std::optional<std::int64_t> parseIso8601(const std::string& text);

/// Inverse of parseIso8601 for report output: "YYYY-MM-DDTHH:MM:SSZ".
std::string formatIso8601(std::int64_t epochSeconds);

} // namespace wpc
