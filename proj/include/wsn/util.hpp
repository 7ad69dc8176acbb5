#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace wsn {

/// Fixed 9-decimal rendering used by every log that prints seconds.
std::string fixed9(double value);

std::string to_hex(const std::uint8_t* data, std::size_t size);
std::string to_hex(const std::vector<std::uint8_t>& data);

/// Printable ASCII kept as-is, everything else rendered as \xNN.
std::string text_with_hex_escapes(const std::uint8_t* data, std::size_t size);

/// Splits one CSV line on commas (fields never contain commas or quotes here).
std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace wsn
