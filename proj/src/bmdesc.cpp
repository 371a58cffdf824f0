#include "mlfd/bmdesc.hpp"

#include <cmath>
#include <sstream>

namespace mlfd {

DescriptorVector descriptors_from_curve(const DilationCurve& curve) {
  DescriptorVector out{curve.radii.r_max, {}};
  out.values.reserve(curve.volumes.size());
  for (const auto v : curve.volumes) out.values.push_back(std::log(static_cast<double>(v)));
  return out;
}

DescriptorVector bm_descriptors(const GrayImage& img, const DilationOptions& opts) {
  return descriptors_from_curve(dilation_curve(img, opts));
}

FdEstimate estimate_fd(const std::vector<double>& radii, const std::vector<double>& volumes) {
  if (radii.size() != volumes.size()) throw ConfigError("estimate_fd: size mismatch");
  if (radii.size() < 2) throw DataError("estimate_fd: need at least 2 points");

  const auto n = static_cast<double>(radii.size());
  double mx = 0.0, my = 0.0;
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0) || !(volumes[i] > 0.0)) {
      throw DataError("estimate_fd: radii and volumes must be positive");
    }
    lx.push_back(std::log(radii[i]));
    ly.push_back(std::log(volumes[i]));
    mx += lx.back();
    my += ly.back();
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (sxx <= 0.0) throw DataError("estimate_fd: radii must span at least 2 distinct values");

  FdEstimate fit;
  fit.points = lx.size();
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.dimension = 3.0 - fit.slope;
  double ss = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double r = ly[i] - (fit.intercept + fit.slope * lx[i]);
    ss += r * r;
  }
  fit.rms_residual = std::sqrt(ss / n);
  return fit;
}

FdEstimate estimate_fd(const DilationCurve& curve, const FdWindow& window) {
  std::vector<double> radii, volumes;
  for (std::size_t k = 0; k < curve.volumes.size(); ++k) {
    const auto d2 = curve.radii.squared[k];
    if (window.min_d_squared && d2 < *window.min_d_squared) continue;
    if (window.max_d_squared && d2 > *window.max_d_squared) continue;
    radii.push_back(std::sqrt(static_cast<double>(d2)));
    volumes.push_back(static_cast<double>(curve.volumes[k]));
  }
  return estimate_fd(radii, volumes);
}

std::string descriptor_csv_header(const RadiusSet& radii) {
  std::ostringstream out;
  for (std::size_t k = 0; k < radii.size(); ++k) {
    if (k) out << ',';
    out << "d_squared_" << radii.squared[k];
  }
  return out.str();
}

}  // namespace mlfd
