#ifndef ADDIVORTES_TEST_SUPPORT_HPP
#define ADDIVORTES_TEST_SUPPORT_HPP

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>

namespace test_support {

namespace fs = std::filesystem;

inline fs::path temp_path(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "addivortes_unit";
  fs::create_directories(dir);
  return dir / name;
}

inline fs::path temp_file(const std::string& name, const std::string& content) {
  const auto path = temp_path(name);
  std::ofstream(path, std::ios::binary) << content;
  return path;
}

inline std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::string exact(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace test_support

#endif
