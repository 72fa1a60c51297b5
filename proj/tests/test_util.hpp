#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "solarfc/surfrad.hpp"

namespace testutil {

inline std::string fixtures_dir() {
  const char* env = std::getenv("SOLARFC_FIXTURES");
  return env ? env : "tests/fixtures";
}

inline std::string fixture(const std::string& name) { return fixtures_dir() + "/" + name; }

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline solarfc::SiteMeta boulder() {
  solarfc::SiteMeta site;
  site.site_id = "bou";
  site.latitude_deg = 40.05;
  site.longitude_deg = -105.01;
  site.elevation_m = 1577.0;
  return site;
}

// Scratch directory unique per test binary run.
inline std::string scratch_dir(const std::string& tag) {
  auto dir = std::filesystem::temp_directory_path() / ("solarfc_" + tag);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir.string();
}

}  // namespace testutil
