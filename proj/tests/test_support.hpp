#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include "mlfd/imagery.hpp"

namespace mlfd::testing {

/// Fresh directory under the test working directory, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& name)
      : path_(std::filesystem::current_path() / ("tmp_" + name)) {
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
  std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  std::filesystem::path path_;
};

inline GrayImage random_image(std::mt19937_64& rng, std::size_t w, std::size_t h, int max_value) {
  GrayImage img(w, h);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      img(x, y) = static_cast<std::uint8_t>(rng() % static_cast<std::uint64_t>(max_value + 1));
    }
  }
  return img;
}

inline GrayImage constant_image(std::size_t w, std::size_t h, std::uint8_t v) {
  return GrayImage(w, h, std::vector<std::uint8_t>(w * h, v));
}

}  // namespace mlfd::testing
