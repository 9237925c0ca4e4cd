#pragma once
// Small helpers shared by the document parsers. Every failure names the JSON
// path of the offending field so diagnostics point somewhere useful.

#include <cstdint>
#include <string>
#include <string_view>

#include <json.hpp>

#include "solbound/error.hpp"

namespace solbound::jsonu {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

// Parses text; on failure reports line and column of the syntax error.
Json parse_document(std::string_view text, std::string_view what);

const Json& require(const Json& obj, std::string_view key, std::string_view path);
std::string require_string(const Json& obj, std::string_view key, std::string_view path);
double require_number(const Json& obj, std::string_view key, std::string_view path);
std::uint64_t require_positive_int(const Json& obj, std::string_view key, std::string_view path);
std::uint64_t as_positive_int(const Json& v, std::string_view path);
double as_number(const Json& v, std::string_view path);

inline std::string join(std::string_view path, std::string_view key) {
  if (path.empty()) return std::string(key);
  return std::string(path) + "." + std::string(key);
}

inline std::string index(std::string_view path, std::size_t i) {
  return std::string(path) + "[" + std::to_string(i) + "]";
}

// Canonical text form: two-space indent, trailing newline.
std::string dump(const OrderedJson& j);

}  // namespace solbound::jsonu
