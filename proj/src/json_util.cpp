#include "solbound/json_util.hpp"

#include <cmath>

namespace solbound::jsonu {

namespace {

std::pair<std::size_t, std::size_t> line_col(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace

Json parse_document(std::string_view text, std::string_view what) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    auto [line, col] = line_col(text, e.byte == 0 ? 0 : e.byte - 1);
    throw Error(ErrorKind::kParse, std::string(what) + ": syntax error at line " +
                                       std::to_string(line) + ", column " +
                                       std::to_string(col));
  }
}

const Json& require(const Json& obj, std::string_view key, std::string_view path) {
  if (!obj.is_object()) {
    throw Error(ErrorKind::kParse, "'" + std::string(path.empty() ? "<root>" : path) +
                                       "' must be an object");
  }
  auto it = obj.find(std::string(key));
  if (it == obj.end()) {
    throw Error(ErrorKind::kMissingField, "missing required field '" + join(path, key) + "'");
  }
  return *it;
}

std::string require_string(const Json& obj, std::string_view key, std::string_view path) {
  const Json& v = require(obj, key, path);
  if (!v.is_string()) {
    throw Error(ErrorKind::kInvalidValue, "field '" + join(path, key) + "' must be a string");
  }
  return v.get<std::string>();
}

double as_number(const Json& v, std::string_view path) {
  if (!v.is_number()) {
    throw Error(ErrorKind::kInvalidValue, "field '" + std::string(path) + "' must be a number");
  }
  const double d = v.get<double>();
  if (!std::isfinite(d)) {
    throw Error(ErrorKind::kInvalidValue, "field '" + std::string(path) + "' must be finite");
  }
  return d;
}

double require_number(const Json& obj, std::string_view key, std::string_view path) {
  return as_number(require(obj, key, path), join(path, key));
}

std::uint64_t as_positive_int(const Json& v, std::string_view path) {
  if (v.is_number_unsigned() && v.get<std::uint64_t>() > 0) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() > 0) {
    return static_cast<std::uint64_t>(v.get<std::int64_t>());
  }
  throw Error(ErrorKind::kInvalidValue,
              "field '" + std::string(path) + "' must be a positive integer");
}

std::uint64_t require_positive_int(const Json& obj, std::string_view key, std::string_view path) {
  return as_positive_int(require(obj, key, path), join(path, key));
}

std::string dump(const OrderedJson& j) { return j.dump(2) + "\n"; }

}  // namespace solbound::jsonu
