#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace threatcrawl {

std::string sha256_hex(std::string_view data);

std::string base64_encode(std::span<const std::uint8_t> bytes);
std::optional<std::vector<std::uint8_t>> base64_decode(std::string_view text);

// Little-endian IEEE-754 binary64 packing used by the model file.
std::string encode_f64_le(std::span<const double> values);
std::optional<std::vector<double>> decode_f64_le(std::string_view base64);

}  // namespace threatcrawl
