#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mlfd/imagery.hpp"

namespace mlfd {

/// Squared Euclidean distances d^2 = i^2 + j^2 + k^2 with 1 <= d^2 <= r_max^2,
/// ascending. These are the only radii at which the dilation volume of a
/// lattice set can change.
struct RadiusSet {
  int r_max = 0;
  std::vector<std::int64_t> squared;

  std::size_t size() const { return squared.size(); }
  friend bool operator==(const RadiusSet&, const RadiusSet&) = default;
};

RadiusSet achievable_distances(int r_max);

/// V(d) for every achievable d; volumes[k] counts lattice points whose
/// squared distance to the intensity surface is <= radii.squared[k].
struct DilationCurve {
  RadiusSet radii;
  std::vector<std::uint64_t> volumes;
  std::uint64_t surface_voxels = 0;  // points at distance 0, always width*height

  friend bool operator==(const DilationCurve&, const DilationCurve&) = default;
};

struct DilationOptions {
  int r_max = 10;
  /// Upper bound on the bytes of distance storage for the padded grid.
  std::uint64_t memory_budget_bytes = 512ull << 20;
  /// Threads used for the line passes; 0 means hardware concurrency.
  unsigned workers = 1;
};

/// Dimensions of the padded voxel grid for an image.
struct GridShape {
  std::size_t nx = 0, ny = 0, nz = 0;
  std::uint64_t voxels() const { return std::uint64_t{nx} * ny * nz; }
};

GridShape padded_grid_shape(const GrayImage& img, int r_max);

/// Exact dilation volumes via a separable squared Euclidean distance
/// transform on a grid padded by r_max on every face. Throws
/// ResourceLimitError when the grid exceeds the memory budget.
DilationCurve dilation_curve(const GrayImage& img, const DilationOptions& opts);
inline DilationCurve dilation_curve(const GrayImage& img, int r_max) {
  return dilation_curve(img, DilationOptions{.r_max = r_max});
}

/// Brute-force reference: for every padded-grid voxel, minimum squared
/// distance over all surface points. Limited to tiny inputs
/// (width*height <= 64, max intensity <= 16).
DilationCurve dilation_curve_oracle(const GrayImage& img, int r_max);

/// CSV with header `d_squared,volume`.
std::string curve_to_csv(const DilationCurve& curve);

namespace detail {

inline constexpr std::int32_t kFar = INT32_MAX;

/// 1-D lower-envelope pass: out[q] = min_p (q - p)^2 + in[p], with kFar
/// entries ignored. Results above `cap` are reported as kFar.
void squared_distance_1d(const std::int32_t* in, std::int32_t* out, std::size_t n,
                         std::int64_t cap, std::vector<std::int64_t>& scratch_site,
                         std::vector<std::int64_t>& scratch_start);

}  // namespace detail

}  // namespace mlfd
