#include "mlfd/voldilate.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <thread>

namespace mlfd {

RadiusSet achievable_distances(int r_max) {
  if (r_max < 1) throw ConfigError("r_max must be >= 1, got " + std::to_string(r_max));
  const std::int64_t limit = std::int64_t{r_max} * r_max;
  std::vector<bool> hit(static_cast<std::size_t>(limit) + 1, false);
  for (std::int64_t i = 0; i <= r_max; ++i) {
    for (std::int64_t j = i; j <= r_max; ++j) {
      for (std::int64_t k = j; k <= r_max; ++k) {
        const auto d2 = i * i + j * j + k * k;
        if (d2 <= limit) hit[static_cast<std::size_t>(d2)] = true;
      }
    }
  }
  RadiusSet set{r_max, {}};
  for (std::int64_t d2 = 1; d2 <= limit; ++d2) {
    if (hit[static_cast<std::size_t>(d2)]) set.squared.push_back(d2);
  }
  return set;
}

GridShape padded_grid_shape(const GrayImage& img, int r_max) {
  const auto pad = static_cast<std::size_t>(r_max);
  const std::size_t depth = static_cast<std::size_t>(img.max_value() - img.min_value()) + 1;
  return {img.width() + 2 * pad, img.height() + 2 * pad, depth + 2 * pad};
}

namespace detail {

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  // b > 0 at every call site
  std::int64_t q = a / b;
  if ((a % b != 0) && (a < 0)) --q;
  return q;
}

}  // namespace

void squared_distance_1d(const std::int32_t* in, std::int32_t* out, std::size_t n,
                         std::int64_t cap, std::vector<std::int64_t>& site,
                         std::vector<std::int64_t>& start) {
  site.resize(n);
  start.resize(n);
  auto value = [in](std::int64_t x, std::int64_t p) {
    return (x - p) * (x - p) + std::int64_t{in[p]};
  };
  // First x at which site u is strictly better than site i (i < u).
  auto separation = [in](std::int64_t i, std::int64_t u) {
    return floor_div(u * u - i * i + std::int64_t{in[u]} - std::int64_t{in[i]}, 2 * (u - i));
  };

  std::ptrdiff_t top = -1;
  const auto len = static_cast<std::int64_t>(n);
  for (std::int64_t u = 0; u < len; ++u) {
    if (in[u] == kFar) continue;
    while (top >= 0 && value(start[top], site[top]) > value(start[top], u)) --top;
    if (top < 0) {
      top = 0;
      site[0] = u;
      start[0] = 0;
    } else {
      const auto w = 1 + separation(site[top], u);
      if (w < len) {
        ++top;
        site[top] = u;
        start[top] = w;
      }
    }
  }

  if (top < 0) {
    std::fill(out, out + n, kFar);
    return;
  }
  for (std::int64_t x = len - 1; x >= 0; --x) {
    const auto d = value(x, site[top]);
    out[x] = d > cap ? kFar : static_cast<std::int32_t>(d);
    if (x == start[top]) --top;
  }
}

}  // namespace detail

namespace {

using detail::kFar;

unsigned resolve_workers(unsigned requested) {
  if (requested != 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

// Histogram of final squared distances <= cap for z-slices [z_begin, z_end).
// The z pass is closed form: every (x, y) column holds exactly one surface
// voxel, so the slice starts from (z - f(x, y))^2.
void process_slices(const GrayImage& img, int r_max, const GridShape& grid, std::size_t z_begin,
                    std::size_t z_end, std::vector<std::uint64_t>& hist) {
  const std::int64_t cap = std::int64_t{r_max} * r_max;
  const auto pad = static_cast<std::size_t>(r_max);
  const std::size_t nx = grid.nx, ny = grid.ny;
  const int base = img.min_value();

  std::vector<std::int32_t> slice(nx * ny);
  std::vector<std::int32_t> line(std::max(nx, ny)), column(ny), result(ny);
  std::vector<std::int64_t> site, start;

  for (std::size_t z = z_begin; z < z_end; ++z) {
    std::fill(slice.begin(), slice.end(), kFar);
    const auto zpos = static_cast<std::int64_t>(z) - static_cast<std::int64_t>(pad);
    for (std::size_t y = 0; y < img.height(); ++y) {
      std::int32_t* row = slice.data() + (y + pad) * nx;
      bool any = false;
      for (std::size_t x = 0; x < img.width(); ++x) {
        const std::int64_t dz = zpos - (img(x, y) - base);
        if (dz * dz <= cap) {
          row[x + pad] = static_cast<std::int32_t>(dz * dz);
          any = true;
        }
      }
      if (!any) continue;
      std::copy(row, row + nx, line.begin());
      detail::squared_distance_1d(line.data(), row, nx, cap, site, start);
    }
    for (std::size_t x = 0; x < nx; ++x) {
      for (std::size_t y = 0; y < ny; ++y) column[y] = slice[y * nx + x];
      detail::squared_distance_1d(column.data(), result.data(), ny, cap, site, start);
      for (std::size_t y = 0; y < ny; ++y) {
        if (result[y] != kFar) ++hist[static_cast<std::size_t>(result[y])];
      }
    }
  }
}

DilationCurve curve_from_histogram(const RadiusSet& radii, const std::vector<std::uint64_t>& hist) {
  DilationCurve curve;
  curve.radii = radii;
  curve.surface_voxels = hist[0];
  curve.volumes.reserve(radii.size());
  std::uint64_t running = hist[0];
  std::size_t next = 1;
  for (const auto d2 : radii.squared) {
    for (; next <= static_cast<std::size_t>(d2); ++next) running += hist[next];
    curve.volumes.push_back(running);
  }
  return curve;
}

}  // namespace

DilationCurve dilation_curve(const GrayImage& img, const DilationOptions& opts) {
  if (img.empty()) throw DataError("dilation_curve: empty image");
  const RadiusSet radii = achievable_distances(opts.r_max);
  const GridShape grid = padded_grid_shape(img, opts.r_max);

  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(resolve_workers(opts.workers), grid.nz));
  // Working storage: one padded xy-slice per worker.
  const std::uint64_t needed_voxels = std::uint64_t{grid.nx} * grid.ny * workers;
  const std::uint64_t allowed_voxels = opts.memory_budget_bytes / sizeof(std::int32_t);
  if (needed_voxels > allowed_voxels) {
    throw ResourceLimitError("voxel storage budget exceeded: required " +
                             std::to_string(needed_voxels) + " voxels, allowed " +
                             std::to_string(allowed_voxels));
  }

  const std::size_t bins = static_cast<std::size_t>(opts.r_max) * opts.r_max + 1;
  std::vector<std::vector<std::uint64_t>> partial(workers, std::vector<std::uint64_t>(bins, 0));
  if (workers == 1) {
    process_slices(img, opts.r_max, grid, 0, grid.nz, partial[0]);
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (grid.nz + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const std::size_t z0 = std::min(grid.nz, w * chunk);
      const std::size_t z1 = std::min(grid.nz, z0 + chunk);
      pool.emplace_back([&, w, z0, z1] { process_slices(img, opts.r_max, grid, z0, z1, partial[w]); });
    }
  }
  std::vector<std::uint64_t> hist(bins, 0);
  for (const auto& h : partial) {
    for (std::size_t i = 0; i < bins; ++i) hist[i] += h[i];
  }
  return curve_from_histogram(radii, hist);
}

DilationCurve dilation_curve_oracle(const GrayImage& img, int r_max) {
  if (img.empty() || img.size() > 64 || img.max_value() > 16) {
    throw ConfigError("oracle limited to width*height <= 64 and intensities <= 16");
  }
  const RadiusSet radii = achievable_distances(r_max);
  const std::int64_t cap = std::int64_t{r_max} * r_max;
  const std::int64_t w = static_cast<std::int64_t>(img.width());
  const std::int64_t h = static_cast<std::int64_t>(img.height());
  const std::int64_t zlo = img.min_value() - r_max, zhi = img.max_value() + r_max;

  std::vector<std::uint64_t> hist(static_cast<std::size_t>(cap) + 1, 0);
  for (std::int64_t z = zlo; z <= zhi; ++z) {
    for (std::int64_t y = -r_max; y < h + r_max; ++y) {
      for (std::int64_t x = -r_max; x < w + r_max; ++x) {
        std::int64_t best = INT64_MAX;
        for (std::int64_t sy = 0; sy < h; ++sy) {
          for (std::int64_t sx = 0; sx < w; ++sx) {
            const std::int64_t dz = z - img(static_cast<std::size_t>(sx), static_cast<std::size_t>(sy));
            best = std::min(best, (x - sx) * (x - sx) + (y - sy) * (y - sy) + dz * dz);
          }
        }
        if (best <= cap) ++hist[static_cast<std::size_t>(best)];
      }
    }
  }
  return curve_from_histogram(radii, hist);
}

std::string curve_to_csv(const DilationCurve& curve) {
  std::ostringstream out;
  out << "d_squared,volume\n";
  for (std::size_t k = 0; k < curve.volumes.size(); ++k) {
    out << curve.radii.squared[k] << ',' << curve.volumes[k] << '\n';
  }
  return out.str();
}

}  // namespace mlfd
