#include <doctest.h>
#include <png.h>

#include <cstring>
#include <fstream>
#include <set>

#include "mlfd/imagery.hpp"
#include "test_support.hpp"

using namespace mlfd;
using mlfd::testing::TempDir;

namespace {

void write_text(const std::filesystem::path& p, const std::string& s) {
  std::ofstream f(p, std::ios::binary);
  f << s;
}

void write_png(const std::filesystem::path& p, std::uint32_t w, std::uint32_t h,
               std::uint32_t format, const std::vector<std::uint8_t>& data) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  image.width = w;
  image.height = h;
  image.format = format;
  REQUIRE(png_image_write_to_file(&image, p.string().c_str(), 0, data.data(), 0, nullptr));
}

ImageError::Kind error_kind(const std::filesystem::path& p) {
  try {
    load_grayscale(p);
  } catch (const ImageError& e) {
    return e.kind();
  }
  FAIL("expected ImageError");
  return ImageError::Kind::kMissingFile;
}

}  // namespace

TEST_CASE("ascii PGM parses in row-major order") {
  TempDir dir("imagery_p2");
  write_text(dir / "a.pgm", "P2\n# comment\n2 2\n255\n0 64\n128 255\n");
  const auto img = load_grayscale(dir / "a.pgm");
  CHECK(img.width() == 2);
  CHECK(img.height() == 2);
  CHECK(std::vector<std::uint8_t>(img.pixels().begin(), img.pixels().end()) ==
        std::vector<std::uint8_t>{0, 64, 128, 255});
}

TEST_CASE("BT.601 luma") {
  CHECK(luma_bt601(255, 0, 0) == 76);
  CHECK(luma_bt601(0, 255, 0) == 150);
  CHECK(luma_bt601(0, 0, 255) == 29);
  CHECK(luma_bt601(255, 255, 255) == 255);
  CHECK(luma_bt601(0, 0, 0) == 0);
}

TEST_CASE("PNG inputs: RGB converted by luma, gray passed through") {
  TempDir dir("imagery_png");
  write_png(dir / "rgb.png", 2, 1, PNG_FORMAT_RGB, {255, 0, 0, 10, 20, 30});
  const auto rgb = load_grayscale(dir / "rgb.png");
  REQUIRE(rgb.width() == 2);
  CHECK(rgb(0, 0) == 76);
  CHECK(rgb(1, 0) == luma_bt601(10, 20, 30));

  write_png(dir / "gray.png", 3, 2, PNG_FORMAT_GRAY, {0, 1, 2, 100, 200, 255});
  const auto gray = load_grayscale(dir / "gray.png");
  CHECK(gray == GrayImage(3, 2, {0, 1, 2, 100, 200, 255}));
}

TEST_CASE("load errors are distinguishable") {
  TempDir dir("imagery_errors");
  CHECK(error_kind(dir / "missing.pgm") == ImageError::Kind::kMissingFile);

  write_text(dir / "p7.pgm", "P7\nWIDTH 2\n");
  CHECK(error_kind(dir / "p7.pgm") == ImageError::Kind::kUnsupportedFormat);

  write_text(dir / "deep.pgm", "P5\n2 2\n65535\n");
  CHECK(error_kind(dir / "deep.pgm") == ImageError::Kind::kUnsupportedFormat);

  write_text(dir / "short.pgm", std::string("P5\n4 4\n255\n") + std::string(7, 'x'));
  CHECK(error_kind(dir / "short.pgm") == ImageError::Kind::kTruncated);

  write_text(dir / "short_ascii.pgm", "P2\n2 2\n255\n1 2 3\n");
  CHECK(error_kind(dir / "short_ascii.pgm") == ImageError::Kind::kTruncated);

  std::vector<std::uint8_t> wide(2 * 2 * 3 * 2, 0);
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  image.width = 2;
  image.height = 2;
  image.format = PNG_FORMAT_LINEAR_RGB;
  REQUIRE(png_image_write_to_file(&image, (dir / "wide.png").string().c_str(), 0, wide.data(), 0,
                                  nullptr));
  CHECK(error_kind(dir / "wide.png") == ImageError::Kind::kUnsupportedFormat);
}

TEST_CASE("P5 write/read round-trip on random images") {
  TempDir dir("imagery_roundtrip");
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const auto img = mlfd::testing::random_image(rng, 1 + rng() % 40, 1 + rng() % 40, 255);
    save_pgm(img, dir / "r.pgm");
    const auto back = load_grayscale(dir / "r.pgm");
    CHECK(back == img);
    save_pgm(back, dir / "r2.pgm");
    CHECK(load_grayscale(dir / "r2.pgm") == img);
  }
}

TEST_CASE("tile_fixed counts and remainder rule") {
  CHECK(tile_fixed(GrayImage(4, 4), 2, 2).size() == 4);
  CHECK(tile_fixed(GrayImage(5, 5), 2, 2).size() == 4);
  CHECK(tile_fixed(GrayImage(640, 640), 200, 200).size() == 9);
  CHECK_THROWS_AS(tile_fixed(GrayImage(4, 4), 5, 2), ConfigError);
}

TEST_CASE("tiles are disjoint, in bounds, and in reading order") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t w = 1 + rng() % 30, h = 1 + rng() % 30;
    const std::size_t tw = 1 + rng() % w, th = 1 + rng() % h;
    // Encode each pixel's position so tile contents reveal their origin.
    GrayImage img(w, h);
    for (std::size_t y = 0; y < h; ++y)
      for (std::size_t x = 0; x < w; ++x) img(x, y) = static_cast<std::uint8_t>((y * w + x) % 251);
    const auto tiles = tile_fixed(img, tw, th);
    REQUIRE(tiles.size() == (w / tw) * (h / th));
    for (std::size_t t = 0; t < tiles.size(); ++t) {
      const std::size_t x0 = (t % (w / tw)) * tw, y0 = (t / (w / tw)) * th;
      CHECK(tiles[t] == img.crop(x0, y0, tw, th));
    }
  }
}

TEST_CASE("scan_dataset layout, ordering and errors") {
  TempDir dir("imagery_scan");
  std::filesystem::create_directories(dir / "b");
  std::filesystem::create_directories(dir / "a");
  for (const char* name : {"z.pgm", "m.pgm", "a.pgm"}) {
    save_pgm(GrayImage(2, 2), dir / "b" / name);
    save_pgm(GrayImage(2, 2), dir / "a" / name);
  }
  write_text(dir / "a" / "notes.txt", "ignored");

  const auto m = scan_dataset(dir.path());
  CHECK(m.classes == std::vector<std::string>{"a", "b"});
  REQUIRE(m.entries.size() == 6);
  CHECK(m.entries[0].label == "a");
  CHECK(m.entries[0].path.filename() == "a.pgm");
  CHECK(m.entries[2].path.filename() == "z.pgm");
  CHECK(m.entries[2].index == 2);
  CHECK(m.entries[3].label == "b");
  CHECK(scan_dataset(dir.path()) == m);
  std::set<std::string> labels;
  for (const auto& e : m.entries) labels.insert(e.label);
  CHECK(labels.size() == m.classes.size());

  const auto csv = manifest_to_csv(m);
  CHECK(csv.rfind("path,label,index\n", 0) == 0);

  TempDir empty("imagery_scan_empty");
  std::filesystem::create_directories(empty / "only");
  CHECK_THROWS_AS(scan_dataset(empty.path()), DataError);
  TempDir none("imagery_scan_none");
  CHECK_THROWS_AS(scan_dataset(none.path()), DataError);
}
