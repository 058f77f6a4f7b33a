#pragma once

#include <cstdlib>
#include <filesystem>
#include <string>

#include <unistd.h>

#include "r3bench/core/rng.hpp"
#include "r3bench/core/types.hpp"

namespace r3bench::testing {

inline PointCloud random_cloud(Rng& gen, std::size_t n, bool intensity = false, double extent = 30.0) {
  PointCloud c;
  c.has_intensity = intensity;
  c.points.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    c.points.push_back({gen.uniform(-extent, extent), gen.uniform(-extent, extent), gen.uniform(-2, 2),
                        intensity ? gen.uniform01() : 0.0});
  }
  return c;
}

/// True when `sub` equals `full` with some points deleted (order preserved, bit-equal).
inline bool is_subsequence(const PointCloud& sub, const PointCloud& full) {
  std::size_t j = 0;
  for (const Point3& p : sub.points) {
    while (j < full.size() && !(full.points[j] == p)) ++j;
    if (j == full.size()) return false;
    ++j;
  }
  return true;
}

// Fresh scratch directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() /
            ("r3bench_" + tag + "_" + std::to_string(std::rand()) + "_" + std::to_string(::getpid()));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace r3bench::testing
