#pragma once

#include <cstdlib>
#include <stdexcept>
#include <filesystem>
#include <string>

#include "specverify/requirements.hpp"

namespace svtest {

inline std::filesystem::path fixtures() { return SV_FIXTURE_DIR; }
inline std::filesystem::path fixture(const std::string& rel) { return fixtures() / rel; }
inline std::string fixture_text(const std::string& rel) { return specverify::read_file(fixture(rel)); }

/// Fresh directory under the system temp dir, removed on scope exit.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "svtest") {
    std::string tmpl = (std::filesystem::temp_directory_path() / (tag + "-XXXXXX")).string();
    char* made = mkdtemp(tmpl.data());
    if (!made) throw std::runtime_error("mkdtemp failed");
    path_ = made;
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  std::filesystem::path path_;
};

}  // namespace svtest
