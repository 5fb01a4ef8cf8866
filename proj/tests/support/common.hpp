#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <random>
#include <string>

#include "polydawg/bql/parser.hpp"
#include "polydawg/error.hpp"

namespace testing {

inline std::optional<polydawg::ErrorCode> error_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const polydawg::Error& e) {
    return e.code();
  }
  return std::nullopt;
}

inline polydawg::bql::IslandQuery island_of(const std::string& text) {
  return std::get<polydawg::bql::IslandQuery>(polydawg::bql::parse(text).node);
}

/// Fresh path under the system temp directory, removed on destruction.
class TempPath {
 public:
  explicit TempPath(const std::string& stem) {
    std::random_device rd;
    path_ = (std::filesystem::temp_directory_path() /
             (stem + "_" + std::to_string(rd()) + "_" + std::to_string(rd())))
                .string();
  }
  ~TempPath() {
    std::error_code ec;
    std::filesystem::remove(path_, ec);
  }
  const std::string& str() const { return path_; }

 private:
  std::string path_;
};

}  // namespace testing
