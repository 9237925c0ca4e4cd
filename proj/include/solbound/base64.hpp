#pragma once
// Standard-alphabet base64 (RFC 4648) with '=' padding, via OpenSSL.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace solbound::base64 {

std::string encode(std::span<const std::uint8_t> bytes);

// nullopt on characters outside the alphabet or a bad length.
std::optional<std::vector<std::uint8_t>> decode(std::string_view text);

inline bool is_alphabet_char(char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '+' ||
         c == '/';
}

}  // namespace solbound::base64
