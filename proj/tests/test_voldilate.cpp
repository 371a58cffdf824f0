#include <doctest.h>

#include <algorithm>

#include "mlfd/voldilate.hpp"
#include "test_support.hpp"

using namespace mlfd;
using mlfd::testing::constant_image;
using mlfd::testing::random_image;

namespace {

// Legendre: n is a sum of three squares iff n is not 4^a (8b + 7).
bool three_square_representable(std::int64_t n) {
  while (n % 4 == 0 && n > 0) n /= 4;
  return n % 8 != 7;
}

GrayImage mirror_x(const GrayImage& img) {
  GrayImage out(img.width(), img.height());
  for (std::size_t y = 0; y < img.height(); ++y)
    for (std::size_t x = 0; x < img.width(); ++x) out(x, y) = img(img.width() - 1 - x, y);
  return out;
}

GrayImage mirror_y(const GrayImage& img) {
  GrayImage out(img.width(), img.height());
  for (std::size_t y = 0; y < img.height(); ++y)
    for (std::size_t x = 0; x < img.width(); ++x) out(x, y) = img(x, img.height() - 1 - y);
  return out;
}

}  // namespace

TEST_CASE("achievable distances") {
  CHECK(achievable_distances(2).squared == std::vector<std::int64_t>{1, 2, 3, 4});
  CHECK(achievable_distances(10).size() == 85);
  CHECK_THROWS_AS(achievable_distances(0), ConfigError);

  for (int r = 1; r <= 20; ++r) {
    const auto set = achievable_distances(r);
    std::vector<std::int64_t> expected;
    for (std::int64_t n = 1; n <= r * r; ++n)
      if (three_square_representable(n)) expected.push_back(n);
    CHECK(set.squared == expected);
    CHECK(std::find(set.squared.begin(), set.squared.end(), 7) == set.squared.end());
    CHECK(std::is_sorted(set.squared.begin(), set.squared.end()));
  }
}

TEST_CASE("1-D lower envelope matches brute force") {
  std::mt19937_64 rng(5);
  std::vector<std::int64_t> site, start;
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + rng() % 40;
    const std::int64_t cap = 1 + static_cast<std::int64_t>(rng() % 200);
    std::vector<std::int32_t> in(n), out(n);
    for (auto& v : in) v = (rng() % 3 == 0) ? detail::kFar : static_cast<std::int32_t>(rng() % 60);
    detail::squared_distance_1d(in.data(), out.data(), n, cap, site, start);
    for (std::size_t q = 0; q < n; ++q) {
      std::int64_t best = INT64_MAX;
      for (std::size_t p = 0; p < n; ++p) {
        if (in[p] == detail::kFar) continue;
        const auto d = static_cast<std::int64_t>(q) - static_cast<std::int64_t>(p);
        best = std::min(best, d * d + in[p]);
      }
      const std::int32_t expected = best > cap ? detail::kFar : static_cast<std::int32_t>(best);
      REQUIRE(out[q] == expected);
    }
  }
}

TEST_CASE("hand-counted volumes") {
  const std::vector<std::uint64_t> sphere{7, 19, 27, 33};
  for (std::uint8_t v : {0, 9, 255}) {
    CHECK(dilation_curve(constant_image(1, 1, v), 2).volumes == sphere);
  }
  CHECK(dilation_curve_oracle(constant_image(1, 1, 3), 2).volumes == sphere);
  CHECK(dilation_curve(constant_image(2, 1, 0), 1).volumes == std::vector<std::uint64_t>{12});
  CHECK(dilation_curve_oracle(constant_image(2, 1, 0), 1).volumes == std::vector<std::uint64_t>{12});
  CHECK(dilation_curve(constant_image(2, 2, 5), 2) == dilation_curve_oracle(constant_image(2, 2, 5), 2));
}

TEST_CASE("separable transform equals brute-force oracle on random images") {
  std::mt19937_64 rng(20240601);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t w = 1 + rng() % 8, h = 1 + rng() % 8;
    const int r_max = 1 + static_cast<int>(rng() % 4);
    const auto img = random_image(rng, w, h, 8);
    const auto fast = dilation_curve(img, r_max);
    const auto slow = dilation_curve_oracle(img, r_max);
    REQUIRE(fast == slow);
  }
}

TEST_CASE("curve invariants") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 15; ++trial) {
    const std::size_t w = 1 + rng() % 24, h = 1 + rng() % 24;
    const int r_max = 1 + static_cast<int>(rng() % 6);
    const auto img = random_image(rng, w, h, 200);
    const auto curve = dilation_curve(img, r_max);
    CHECK(curve.surface_voxels == w * h);
    CHECK(std::is_sorted(curve.volumes.begin(), curve.volumes.end()));
    CHECK(curve.volumes.front() >= w * h);
    CHECK(curve.volumes.back() <= padded_grid_shape(img, r_max).voxels());

    GrayImage shifted = img;
    for (std::size_t y = 0; y < h; ++y)
      for (std::size_t x = 0; x < w; ++x) shifted(x, y) = static_cast<std::uint8_t>(img(x, y) + 55);
    CHECK(dilation_curve(shifted, r_max) == curve);
    CHECK(dilation_curve(mirror_x(img), r_max) == curve);
    CHECK(dilation_curve(mirror_y(img), r_max) == curve);
  }
}

TEST_CASE("worker count does not change the result") {
  std::mt19937_64 rng(4);
  const auto img = random_image(rng, 37, 23, 120);
  const auto one = dilation_curve(img, DilationOptions{.r_max = 6, .workers = 1});
  for (unsigned workers : {2u, 3u, 7u}) {
    CHECK(dilation_curve(img, DilationOptions{.r_max = 6, .workers = workers}) == one);
  }
}

TEST_CASE("memory budget is enforced") {
  const auto img = constant_image(100, 100, 0);
  CHECK_THROWS_AS(dilation_curve(img, DilationOptions{.r_max = 10, .memory_budget_bytes = 1024}),
                  ResourceLimitError);
  CHECK_NOTHROW(dilation_curve(img, DilationOptions{.r_max = 10, .memory_budget_bytes = 1 << 20}));
}

TEST_CASE("oracle rejects oversized input") {
  CHECK_THROWS_AS(dilation_curve_oracle(constant_image(9, 8, 0), 1), ConfigError);
  CHECK_THROWS_AS(dilation_curve_oracle(constant_image(2, 2, 17), 1), ConfigError);
}

TEST_CASE("curve CSV") {
  const auto csv = curve_to_csv(dilation_curve(constant_image(1, 1, 0), 2));
  CHECK(csv == "d_squared,volume\n1,7\n2,19\n3,27\n4,33\n");
}
