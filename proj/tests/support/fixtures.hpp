#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace mill::testing {

inline std::string fixture_dir() { return MILL_FIXTURES; }

inline std::string fixture_path(const std::string& name) { return fixture_dir() + "/" + name; }

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace mill::testing
