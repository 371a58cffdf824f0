#pragma once

#include <span>
#include <vector>

#include "mlfd/bmdesc.hpp"

namespace mlfd {

/// Pixel rectangle [x0, x0+width) x [y0, y0+height).
struct CellBounds {
  std::size_t x0 = 0, y0 = 0, width = 0, height = 0;
  friend bool operator==(const CellBounds&, const CellBounds&) = default;
};

struct MultilevelOptions {
  int levels = 3;
  /// Smallest admissible cell side at levels >= 2. Level 1 is the whole
  /// image and is always admissible.
  std::size_t min_cell_side = 32;
  DilationOptions dilation;
};

/// Cell rectangles at `level` (1-based): a 2^(level-1) grid per side with
/// floor-based boundaries, row-major. Throws ConfigError when a cell side
/// would fall below min_cell_side.
std::vector<CellBounds> decomposition_cells(std::size_t width, std::size_t height, int level,
                                            std::size_t min_cell_side);

std::vector<GrayImage> decompose(const GrayImage& img, int level, std::size_t min_cell_side);

/// Deepest level whose cells all satisfy min_cell_side.
int max_feasible_level(std::size_t width, std::size_t height, std::size_t min_cell_side);

struct LevelDescriptors {
  DescriptorVector mean;
  std::vector<double> deviation;  // population standard deviation per component
};

/// Mean and population deviation of per-cell descriptor vectors. Each
/// component is reduced over its values in ascending order, so the result is
/// bit-identical under any reordering of the cells.
LevelDescriptors summarize_cells(std::span<const DescriptorVector> cells);

LevelDescriptors level_descriptors(const GrayImage& img, int level,
                                   const MultilevelOptions& opts);

/// sum_i u_i ln u_i, with 0 ln 0 = 0. Throws DataError on a negative entry.
double shannon_entropy(std::span<const double> u);

struct MultilevelFeatures {
  std::vector<DescriptorVector> mean_by_level;
  std::vector<std::vector<double>> deviation_by_level;
  /// [K(phi_1) .. K(phi_n), K(psi_1) .. K(psi_n)]
  std::vector<double> efv;
};

MultilevelFeatures build_efv(const GrayImage& img, const MultilevelOptions& opts);

/// Header `K_avg_1..K_avg_n,K_dev_1..K_dev_n`.
std::string efv_csv_header(std::size_t n);

}  // namespace mlfd
