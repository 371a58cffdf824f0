#include "mlfd/imagery.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cstring>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>

namespace mlfd {

namespace fs = std::filesystem;

GrayImage::GrayImage(std::size_t width, std::size_t height)
    : width_(width), height_(height), pixels_(width * height, 0) {
  if (width == 0 || height == 0) throw ConfigError("image dimensions must be >= 1");
}

GrayImage::GrayImage(std::size_t width, std::size_t height, std::vector<std::uint8_t> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  if (width == 0 || height == 0) throw ConfigError("image dimensions must be >= 1");
  if (pixels_.size() != width * height) {
    throw DataError("pixel count " + std::to_string(pixels_.size()) + " does not match " +
                    std::to_string(width) + "x" + std::to_string(height));
  }
}

std::uint8_t GrayImage::min_value() const {
  return pixels_.empty() ? 0 : *std::min_element(pixels_.begin(), pixels_.end());
}

std::uint8_t GrayImage::max_value() const {
  return pixels_.empty() ? 0 : *std::max_element(pixels_.begin(), pixels_.end());
}

GrayImage GrayImage::crop(std::size_t x0, std::size_t y0, std::size_t w, std::size_t h) const {
  if (w == 0 || h == 0 || x0 + w > width_ || y0 + h > height_) {
    throw ConfigError("crop rectangle outside image bounds");
  }
  std::vector<std::uint8_t> out;
  out.reserve(w * h);
  for (std::size_t y = y0; y < y0 + h; ++y) {
    auto row = pixels_.begin() + static_cast<std::ptrdiff_t>(y * width_ + x0);
    out.insert(out.end(), row, row + static_cast<std::ptrdiff_t>(w));
  }
  return GrayImage(w, h, std::move(out));
}

std::uint8_t luma_bt601(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  const unsigned weighted = 299u * r + 587u * g + 114u * b;
  return static_cast<std::uint8_t>((weighted + 500u) / 1000u);
}

namespace {

class PgmReader {
 public:
  PgmReader(std::span<const std::uint8_t> bytes, const std::string& origin)
      : bytes_(bytes), origin_(origin) {}

  // Skips whitespace and '#' comments, then reads an unsigned decimal.
  unsigned long next_number() {
    for (;;) {
      while (pos_ < bytes_.size() && std::isspace(bytes_[pos_])) ++pos_;
      if (pos_ < bytes_.size() && bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
        continue;
      }
      break;
    }
    if (pos_ >= bytes_.size()) {
      throw ImageError(ImageError::Kind::kTruncated, origin_ + ": unexpected end of PGM data");
    }
    if (!std::isdigit(bytes_[pos_])) {
      throw ImageError(ImageError::Kind::kUnsupportedFormat,
                       origin_ + ": malformed PGM header or sample");
    }
    unsigned long value = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      value = value * 10 + static_cast<unsigned long>(bytes_[pos_] - '0');
      if (value > 1'000'000'000UL) {
        throw ImageError(ImageError::Kind::kUnsupportedFormat, origin_ + ": PGM value overflow");
      }
      ++pos_;
    }
    return value;
  }

  std::size_t pos() const { return pos_; }
  void advance(std::size_t n) { pos_ += n; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::string origin_;
  std::size_t pos_ = 2;  // past the magic
};

GrayImage decode_png(const fs::path& path) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  const std::string origin = path.string();

  if (!png_image_begin_read_from_file(&image, origin.c_str())) {
    throw ImageError(ImageError::Kind::kUnsupportedFormat,
                     origin + ": cannot decode PNG header: " + image.message);
  }
  if (image.format & PNG_FORMAT_FLAG_LINEAR) {
    png_image_free(&image);
    throw ImageError(ImageError::Kind::kUnsupportedFormat,
                     origin + ": only 8-bit PNG images are supported");
  }
  const bool color = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
  image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  const std::size_t channels = color ? 3 : 1;
  std::vector<std::uint8_t> buffer(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw ImageError(ImageError::Kind::kTruncated, origin + ": corrupt PNG pixel data: " + msg);
  }
  const std::size_t w = image.width;
  const std::size_t h = image.height;
  if (!color) return GrayImage(w, h, std::move(buffer));

  std::vector<std::uint8_t> gray(w * h);
  for (std::size_t i = 0; i < gray.size(); ++i) {
    gray[i] = luma_bt601(buffer[channels * i], buffer[channels * i + 1], buffer[channels * i + 2]);
  }
  return GrayImage(w, h, std::move(gray));
}

}  // namespace

GrayImage decode_pgm(std::span<const std::uint8_t> bytes, const std::string& origin) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '2' && bytes[1] != '5')) {
    throw ImageError(ImageError::Kind::kUnsupportedFormat,
                     origin + ": not a P2/P5 PGM file");
  }
  const bool binary = bytes[1] == '5';
  PgmReader reader(bytes, origin);
  const auto width = reader.next_number();
  const auto height = reader.next_number();
  const auto maxval = reader.next_number();
  if (width == 0 || height == 0) {
    throw ImageError(ImageError::Kind::kUnsupportedFormat, origin + ": zero image dimension");
  }
  if (maxval == 0 || maxval > 255) {
    throw ImageError(ImageError::Kind::kUnsupportedFormat,
                     origin + ": unsupported PGM maxval " + std::to_string(maxval));
  }
  const std::size_t count = width * height;
  std::vector<std::uint8_t> pixels(count);
  if (binary) {
    // Exactly one whitespace byte separates the header from the raster.
    reader.advance(1);
    if (reader.pos() > bytes.size() || bytes.size() - reader.pos() < count) {
      throw ImageError(ImageError::Kind::kTruncated,
                       origin + ": truncated PGM raster (expected " + std::to_string(count) +
                           " bytes)");
    }
    std::copy_n(bytes.begin() + static_cast<std::ptrdiff_t>(reader.pos()), count, pixels.begin());
  } else {
    for (auto& p : pixels) {
      const auto v = reader.next_number();
      if (v > maxval) {
        throw ImageError(ImageError::Kind::kUnsupportedFormat,
                         origin + ": sample exceeds maxval");
      }
      p = static_cast<std::uint8_t>(v);
    }
  }
  for (auto p : pixels) {
    if (p > maxval) {
      throw ImageError(ImageError::Kind::kUnsupportedFormat, origin + ": sample exceeds maxval");
    }
  }
  return GrayImage(width, height, std::move(pixels));
}

GrayImage load_grayscale(const fs::path& path) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) {
    throw ImageError(ImageError::Kind::kMissingFile, path.string() + ": no such file");
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ImageError(ImageError::Kind::kMissingFile, path.string() + ": cannot open");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());

  static constexpr std::uint8_t kPngMagic[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  if (bytes.size() >= 8 && std::equal(kPngMagic, kPngMagic + 8, bytes.begin())) {
    return decode_png(path);
  }
  return decode_pgm(bytes, path.string());
}

std::vector<std::uint8_t> encode_pgm(const GrayImage& img) {
  const std::string header = "P5\n" + std::to_string(img.width()) + " " +
                             std::to_string(img.height()) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), img.pixels().begin(), img.pixels().end());
  return out;
}

void save_pgm(const GrayImage& img, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError(path.string() + ": cannot open for writing");
  const auto bytes = encode_pgm(img);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError(path.string() + ": write failed");
}

std::vector<GrayImage> tile_fixed(const GrayImage& img, std::size_t tile_w, std::size_t tile_h) {
  if (tile_w == 0 || tile_h == 0) throw ConfigError("tile dimensions must be >= 1");
  if (tile_w > img.width() || tile_h > img.height()) {
    throw ConfigError("tile " + std::to_string(tile_w) + "x" + std::to_string(tile_h) +
                      " larger than image " + std::to_string(img.width()) + "x" +
                      std::to_string(img.height()));
  }
  std::vector<GrayImage> tiles;
  for (std::size_t ty = 0; ty + tile_h <= img.height(); ty += tile_h) {
    for (std::size_t tx = 0; tx + tile_w <= img.width(); tx += tile_w) {
      tiles.push_back(img.crop(tx, ty, tile_w, tile_h));
    }
  }
  return tiles;
}

namespace {

bool is_image_file(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".pgm" || ext == ".png";
}

}  // namespace

DatasetManifest scan_dataset(const fs::path& root) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) throw DataError(root.string() + ": not a directory");

  std::map<std::string, std::vector<fs::path>> by_class;
  for (const auto& dir : fs::directory_iterator(root)) {
    if (!dir.is_directory()) continue;
    auto& files = by_class[dir.path().filename().string()];
    for (const auto& f : fs::directory_iterator(dir.path())) {
      if (f.is_regular_file() && is_image_file(f.path())) files.push_back(f.path());
    }
  }
  if (by_class.empty()) throw DataError(root.string() + ": no class subdirectories");

  DatasetManifest manifest;
  for (auto& [label, files] : by_class) {
    if (files.empty()) throw DataError("class directory '" + label + "' contains no images");
    std::sort(files.begin(), files.end(), [](const fs::path& a, const fs::path& b) {
      return a.filename().string() < b.filename().string();
    });
    manifest.classes.push_back(label);
    for (std::size_t i = 0; i < files.size(); ++i) {
      manifest.entries.push_back({files[i], label, i});
    }
  }
  return manifest;
}

std::string manifest_to_csv(const DatasetManifest& manifest) {
  std::ostringstream out;
  out << "path,label,index\n";
  for (const auto& e : manifest.entries) {
    out << e.path.generic_string() << ',' << e.label << ',' << e.index << '\n';
  }
  return out.str();
}

}  // namespace mlfd
