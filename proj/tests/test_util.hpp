#pragma once

#include <atomic>
#include <filesystem>
#include <string>

#include <unistd.h>

#include "ouphase/sde.hpp"

namespace testutil {

/// Unique scratch directory, removed on destruction.
struct TempDir {
  std::filesystem::path path;

  TempDir() {
    static std::atomic<int> counter{0};
    path = std::filesystem::temp_directory_path() /
           ("ouphase-test-" + std::to_string(::getpid()) + "-" +
            std::to_string(counter.fetch_add(1)));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::filesystem::path file(const std::string& name) const { return path / name; }
};

inline ouphase::ComplexField random_field(Eigen::Index rows, Eigen::Index cols,
                                          std::uint64_t seed) {
  ouphase::Rng rng(seed);
  return ouphase::sample_complex_gaussian(rows, cols, rng);
}

}  // namespace testutil
