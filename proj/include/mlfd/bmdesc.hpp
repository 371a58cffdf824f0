#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mlfd/voldilate.hpp"

namespace mlfd {

/// Natural log of the dilation volume at each achievable radius, ascending.
struct DescriptorVector {
  int r_max = 0;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  friend bool operator==(const DescriptorVector&, const DescriptorVector&) = default;
};

DescriptorVector descriptors_from_curve(const DilationCurve& curve);
DescriptorVector bm_descriptors(const GrayImage& img, const DilationOptions& opts);
inline DescriptorVector bm_descriptors(const GrayImage& img, int r_max) {
  return bm_descriptors(img, DilationOptions{.r_max = r_max});
}

/// Optional window on the squared radii used by the fit (inclusive bounds).
struct FdWindow {
  std::optional<std::int64_t> min_d_squared;
  std::optional<std::int64_t> max_d_squared;
};

struct FdEstimate {
  double dimension = 0.0;   // 3 - slope
  double slope = 0.0;       // least-squares slope of ln V against ln r
  double intercept = 0.0;
  double rms_residual = 0.0;
  std::size_t points = 0;
};

/// Bouligand-Minkowski dimension from the log-log dilation curve.
FdEstimate estimate_fd(const DilationCurve& curve, const FdWindow& window = {});

/// Same fit on explicit (radius, volume) samples; radii must be > 0.
FdEstimate estimate_fd(const std::vector<double>& radii, const std::vector<double>& volumes);

/// Header `d_squared_<k>,...` for the achievable radii of r_max.
std::string descriptor_csv_header(const RadiusSet& radii);

}  // namespace mlfd
