#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "smas/core/types.hpp"

namespace smas::ingest {

/// "anon_" followed by the first 32 hex digits of HMAC-SHA256(salt, meter_id).
/// Throws Error(invalid_argument) for an empty salt.
[[nodiscard]] std::string pseudonym(const std::string& meter_id, const std::string& salt);

/// Lowercase hex SHA-256 of `data`.
[[nodiscard]] std::string sha256_hex(std::string_view data);

[[nodiscard]] std::vector<core::HourlyReading> anonymize(std::span<const core::HourlyReading> rows,
                                                         const std::string& salt);
/// Also sets `anonymized`. Feed area and neighborhood ids are kept.
[[nodiscard]] std::vector<core::CustomerRecord> anonymize(std::span<const core::CustomerRecord> records,
                                                          const std::string& salt);

}  // namespace smas::ingest
