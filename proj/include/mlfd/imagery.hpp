#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "mlfd/error.hpp"

namespace mlfd {

/// Row-major 8-bit grayscale raster.
class GrayImage {
 public:
  GrayImage() = default;
  /// Zero-filled image. Throws ConfigError if a dimension is zero.
  GrayImage(std::size_t width, std::size_t height);
  /// Throws DataError unless pixels.size() == width * height.
  GrayImage(std::size_t width, std::size_t height, std::vector<std::uint8_t> pixels);

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }
  std::size_t size() const { return pixels_.size(); }
  bool empty() const { return pixels_.empty(); }

  std::uint8_t operator()(std::size_t x, std::size_t y) const { return pixels_[y * width_ + x]; }
  std::uint8_t& operator()(std::size_t x, std::size_t y) { return pixels_[y * width_ + x]; }

  std::span<const std::uint8_t> pixels() const { return pixels_; }
  std::uint8_t min_value() const;
  std::uint8_t max_value() const;

  /// Copy of the rectangle [x0, x0+w) x [y0, y0+h).
  GrayImage crop(std::size_t x0, std::size_t y0, std::size_t w, std::size_t h) const;

  friend bool operator==(const GrayImage&, const GrayImage&) = default;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<std::uint8_t> pixels_;
};

/// Failure while reading an image file; `kind` tells the cases apart.
class ImageError : public DataError {
 public:
  enum class Kind { kMissingFile, kUnsupportedFormat, kTruncated };
  ImageError(Kind kind, const std::string& what) : DataError(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Reads a PGM (P2/P5, maxval <= 255) or 8-bit PNG (gray, gray+alpha, RGB,
/// RGBA or palette). Color is reduced with BT.601 luma.
GrayImage load_grayscale(const std::filesystem::path& path);

/// Parses PGM bytes already in memory. `origin` is only used in messages.
GrayImage decode_pgm(std::span<const std::uint8_t> bytes, const std::string& origin = "<memory>");

/// round(0.299 R + 0.587 G + 0.114 B), computed in integer arithmetic.
std::uint8_t luma_bt601(std::uint8_t r, std::uint8_t g, std::uint8_t b);

/// Binary (P5) PGM encoding with maxval 255.
std::vector<std::uint8_t> encode_pgm(const GrayImage& img);
void save_pgm(const GrayImage& img, const std::filesystem::path& path);

/// Non-overlapping tiles, left-to-right then top-to-bottom. Right and bottom
/// remainders that do not fill a whole tile are dropped.
std::vector<GrayImage> tile_fixed(const GrayImage& img, std::size_t tile_w, std::size_t tile_h);

struct ManifestEntry {
  std::filesystem::path path;
  std::string label;
  std::size_t index = 0;  // position within its class

  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

struct DatasetManifest {
  std::vector<ManifestEntry> entries;
  std::vector<std::string> classes;

  friend bool operator==(const DatasetManifest&, const DatasetManifest&) = default;
};

/// One subdirectory per class holding .pgm/.png files. Entries are sorted by
/// (label, filename) so the result does not depend on directory order.
DatasetManifest scan_dataset(const std::filesystem::path& root);

/// CSV with header `path,label,index`.
std::string manifest_to_csv(const DatasetManifest& manifest);

}  // namespace mlfd
