#include "mlfd/multilevel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mlfd {

namespace {

double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 2) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

}  // namespace

std::vector<CellBounds> decomposition_cells(std::size_t width, std::size_t height, int level,
                                            std::size_t min_cell_side) {
  if (level < 1) throw ConfigError("decomposition level must be >= 1");
  if (width == 0 || height == 0) throw DataError("cannot decompose an empty image");
  if (level >= 32) throw ConfigError("decomposition level too deep");
  const std::size_t per_side = std::size_t{1} << (level - 1);
  if (level > 1 && (width / per_side < min_cell_side || height / per_side < min_cell_side)) {
    throw ConfigError("level " + std::to_string(level) + " too deep for a " +
                      std::to_string(width) + "x" + std::to_string(height) +
                      " image with minimum cell side " + std::to_string(min_cell_side));
  }
  std::vector<CellBounds> cells;
  cells.reserve(per_side * per_side);
  for (std::size_t k = 0; k < per_side; ++k) {
    const std::size_t y0 = k * height / per_side, y1 = (k + 1) * height / per_side;
    for (std::size_t j = 0; j < per_side; ++j) {
      const std::size_t x0 = j * width / per_side, x1 = (j + 1) * width / per_side;
      cells.push_back({x0, y0, x1 - x0, y1 - y0});
    }
  }
  return cells;
}

std::vector<GrayImage> decompose(const GrayImage& img, int level, std::size_t min_cell_side) {
  std::vector<GrayImage> out;
  for (const auto& c : decomposition_cells(img.width(), img.height(), level, min_cell_side)) {
    out.push_back(img.crop(c.x0, c.y0, c.width, c.height));
  }
  return out;
}

int max_feasible_level(std::size_t width, std::size_t height, std::size_t min_cell_side) {
  int level = 1;
  while (level < 31) {
    const std::size_t per_side = std::size_t{1} << level;
    if (width / per_side < min_cell_side || height / per_side < min_cell_side ||
        width / per_side == 0 || height / per_side == 0) {
      break;
    }
    ++level;
  }
  return level;
}

LevelDescriptors summarize_cells(std::span<const DescriptorVector> cells) {
  if (cells.empty()) throw DataError("summarize_cells: no cells");
  const std::size_t n = cells.front().size();
  for (const auto& c : cells) {
    if (c.size() != n) throw DataError("summarize_cells: descriptor lengths differ");
  }
  const auto count = static_cast<double>(cells.size());
  LevelDescriptors out;
  out.mean.r_max = cells.front().r_max;
  out.mean.values.resize(n);
  out.deviation.resize(n);
  std::vector<double> column(cells.size()), squares(cells.size());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < cells.size(); ++c) column[c] = cells[c].values[i];
    std::sort(column.begin(), column.end());
    const double mean = pairwise_sum(column) / count;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      squares[c] = (column[c] - mean) * (column[c] - mean);
    }
    out.mean.values[i] = mean;
    out.deviation[i] = std::sqrt(pairwise_sum(squares) / count);
  }
  return out;
}

LevelDescriptors level_descriptors(const GrayImage& img, int level,
                                   const MultilevelOptions& opts) {
  std::vector<DescriptorVector> cells;
  for (const auto& cell : decompose(img, level, opts.min_cell_side)) {
    cells.push_back(bm_descriptors(cell, opts.dilation));
  }
  return summarize_cells(cells);
}

double shannon_entropy(std::span<const double> u) {
  double k = 0.0;
  for (double x : u) {
    if (x < 0.0 || std::isnan(x)) throw DataError("shannon_entropy: negative component");
    if (x > 0.0) k += x * std::log(x);
  }
  return k;
}

MultilevelFeatures build_efv(const GrayImage& img, const MultilevelOptions& opts) {
  if (opts.levels < 1) throw ConfigError("levels must be >= 1");
  // Fail before any heavy work if the deepest level is infeasible.
  decomposition_cells(img.width(), img.height(), opts.levels, opts.min_cell_side);

  MultilevelFeatures f;
  for (int level = 1; level <= opts.levels; ++level) {
    auto summary = level_descriptors(img, level, opts);
    f.mean_by_level.push_back(std::move(summary.mean));
    f.deviation_by_level.push_back(std::move(summary.deviation));
  }
  const std::size_t n = f.mean_by_level.front().size();
  const auto levels = static_cast<std::size_t>(opts.levels);
  f.efv.resize(2 * n);
  std::vector<double> trajectory(levels);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t l = 0; l < levels; ++l) trajectory[l] = f.mean_by_level[l].values[i];
    f.efv[i] = shannon_entropy(trajectory);
    for (std::size_t l = 0; l < levels; ++l) trajectory[l] = f.deviation_by_level[l][i];
    f.efv[n + i] = shannon_entropy(trajectory);
  }
  return f;
}

std::string efv_csv_header(std::size_t n) {
  std::ostringstream out;
  for (std::size_t i = 1; i <= n; ++i) out << (i > 1 ? "," : "") << "K_avg_" << i;
  for (std::size_t i = 1; i <= n; ++i) out << ",K_dev_" << i;
  return out.str();
}

}  // namespace mlfd
