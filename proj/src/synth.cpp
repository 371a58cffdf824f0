#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <numbers>
#include <sstream>

#include "mlfd/pipeline.hpp"

namespace mlfd {

namespace {

// splitmix64: platform-independent stream for the generators.
class SplitMix {
 public:
  explicit SplitMix(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double normal() {
    const double u1 = std::max(uniform(), 1e-300);
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::uint64_t state_;
};

std::uint8_t to_pixel(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

// Separable moving average with clamped borders.
std::vector<double> box_blur(const std::vector<double>& in, std::size_t n, int radius) {
  auto pass = [&](const std::vector<double>& src, bool horizontal) {
    std::vector<double> dst(src.size());
    const auto len = static_cast<long>(n);
    for (long a = 0; a < len; ++a) {
      for (long b = 0; b < len; ++b) {
        double sum = 0.0;
        for (long t = -radius; t <= radius; ++t) {
          const long c = std::clamp(b + t, 0L, len - 1);
          sum += horizontal ? src[static_cast<std::size_t>(a * len + c)]
                            : src[static_cast<std::size_t>(c * len + a)];
        }
        const auto idx = horizontal ? a * len + b : b * len + a;
        dst[static_cast<std::size_t>(idx)] = sum / static_cast<double>(2 * radius + 1);
      }
    }
    return dst;
  };
  return pass(pass(in, true), false);
}

}  // namespace

GrayImage synth_texture(int class_id, int sample, std::size_t size, std::uint64_t seed) {
  if (class_id < 0 || class_id >= 8) throw ConfigError("class id must be in [0, 8)");
  if (size < 32) throw ConfigError("synthetic texture size must be >= 32");
  SplitMix rng(seed * 0x100000001b3ULL + static_cast<std::uint64_t>(class_id) * 1000003ULL +
               static_cast<std::uint64_t>(sample));
  const int family = class_id % 3;
  const int variant = class_id / 3;
  const double noise_sigma = 6.0;
  GrayImage img(size, size);

  if (family == 0) {
    // Sinusoidal grating.
    const double period = 6.0 + 5.0 * variant;
    const double theta = std::numbers::pi * (0.15 + 0.35 * variant) + 0.08 * (rng.uniform() - 0.5);
    const double phase = 2.0 * std::numbers::pi * rng.uniform();
    const double amplitude = 70.0 + 10.0 * rng.uniform();
    const double kx = std::cos(theta) * 2.0 * std::numbers::pi / period;
    const double ky = std::sin(theta) * 2.0 * std::numbers::pi / period;
    for (std::size_t y = 0; y < size; ++y) {
      for (std::size_t x = 0; x < size; ++x) {
        const double v = 128.0 + amplitude * std::sin(kx * static_cast<double>(x) +
                                                      ky * static_cast<double>(y) + phase);
        img(x, y) = to_pixel(v + noise_sigma * rng.normal());
      }
    }
  } else if (family == 1) {
    // Checkerboard.
    const auto period = static_cast<std::size_t>(4 + 6 * variant);
    const std::size_t ox = rng.next() % (2 * period), oy = rng.next() % (2 * period);
    const double contrast = 45.0 + 10.0 * rng.uniform();
    for (std::size_t y = 0; y < size; ++y) {
      for (std::size_t x = 0; x < size; ++x) {
        const bool on = (((x + ox) / period) + ((y + oy) / period)) % 2 == 0;
        img(x, y) = to_pixel(128.0 + (on ? contrast : -contrast) + noise_sigma * rng.normal());
      }
    }
  } else {
    // Value noise smoothed by a class-specific kernel, contrast-normalized.
    const int radius = 1 + 3 * variant;
    std::vector<double> field(size * size);
    for (auto& v : field) v = rng.uniform();
    field = box_blur(field, size, radius);
    const auto [lo, hi] = std::minmax_element(field.begin(), field.end());
    const double span = std::max(*hi - *lo, 1e-12);
    const double lo_v = *lo;
    for (std::size_t i = 0; i < field.size(); ++i) {
      const double v = 40.0 + 170.0 * (field[i] - lo_v) / span;
      img(i % size, i / size) = to_pixel(v);
    }
  }
  return img;
}

std::size_t generate_synthetic(const std::filesystem::path& out, const SynthSpec& spec) {
  if (spec.n_classes < 2 || spec.n_classes > 8) throw ConfigError("classes must be in [2, 8]");
  if (spec.samples_per_class < 1) throw ConfigError("samples per class must be >= 1");
  if (spec.size < 32) throw ConfigError("size must be >= 32");

  std::error_code ec;
  std::filesystem::create_directories(out, ec);
  if (ec) throw DataError(out.string() + ": cannot create directory: " + ec.message());
  std::size_t written = 0;
  for (int c = 0; c < spec.n_classes; ++c) {
    const auto dir = out / ("class_" + std::to_string(c));
    std::filesystem::create_directories(dir, ec);
    if (ec) throw DataError(dir.string() + ": cannot create directory: " + ec.message());
    for (int s = 0; s < spec.samples_per_class; ++s) {
      std::ostringstream name;
      name << "sample_" << std::setw(3) << std::setfill('0') << s << ".pgm";
      save_pgm(synth_texture(c, s, spec.size, spec.seed), dir / name.str());
      ++written;
    }
  }
  return written;
}

}  // namespace mlfd
