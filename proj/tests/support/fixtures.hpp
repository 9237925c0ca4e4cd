#pragma once

#include <fstream>
#include <sstream>
#include <string>

#ifndef SOLBOUND_DATA_DIR
#error "SOLBOUND_DATA_DIR must point at the data/ directory"
#endif

namespace fixtures {

inline std::string path(const std::string& rel) { return std::string(SOLBOUND_DATA_DIR) + "/" + rel; }

inline std::string read(const std::string& rel) {
  std::ifstream in(path(rel), std::ios::binary);
  if (!in) throw std::runtime_error("missing fixture " + rel);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace fixtures
