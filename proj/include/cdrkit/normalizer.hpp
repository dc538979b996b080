#ifndef CDRKIT_NORMALIZER_HPP
#define CDRKIT_NORMALIZER_HPP

#include <cmath>
#include <utility>
#include <vector>

#include "cdrkit/types.hpp"

namespace cdrkit {

enum class NormKind { MinMax, Variance };

inline const char* to_string(NormKind k) { return k == NormKind::MinMax ? "minmax" : "variance"; }

struct AxisNorm {
  double min = 0.0, max = 0.0;
  double mean = 0.0, var = 0.0;  // population variance
  bool degenerate = false;       // the axis never moves in the training data
};

/// Fitted per-axis statistics. Variance scaling divides by sigma^2 as printed
/// in the source formulation; std_divisor switches to the conventional sigma.
struct NormalizerParams {
  NormKind kind = NormKind::MinMax;
  bool std_divisor = false;
  AxisNorm lat, lon;

  bool any_degenerate() const { return lat.degenerate || lon.degenerate; }
};

namespace detail {

inline AxisNorm fit_axis(const std::vector<double>& xs) {
  AxisNorm a;
  a.min = xs[0];
  a.max = xs[0];
  double sum = 0.0;
  for (double x : xs) {
    a.min = std::min(a.min, x);
    a.max = std::max(a.max, x);
    sum += x;
  }
  a.mean = sum / static_cast<double>(xs.size());
  double sq = 0.0;
  for (double x : xs) sq += (x - a.mean) * (x - a.mean);
  a.var = sq / static_cast<double>(xs.size());
  a.degenerate = a.max == a.min;
  return a;
}

inline double fwd_axis(const AxisNorm& a, NormKind kind, bool std_divisor, double x) {
  if (a.degenerate) return kind == NormKind::MinMax ? 0.5 : 0.0;
  if (kind == NormKind::MinMax) return (x - a.min) / (a.max - a.min);
  return (x - a.mean) / (std_divisor ? std::sqrt(a.var) : a.var);
}

inline double inv_axis(const AxisNorm& a, NormKind kind, bool std_divisor, double y) {
  if (a.degenerate) return kind == NormKind::MinMax ? a.min : a.mean;
  if (kind == NormKind::MinMax) return y * (a.max - a.min) + a.min;
  return y * (std_divisor ? std::sqrt(a.var) : a.var) + a.mean;
}

}  // namespace detail

/// Fit per-axis statistics on training coordinates only. A zero-spread axis
/// is marked degenerate: it maps to a constant (0.5 for min-max, 0 for
/// variance scaling) and inverts to the constant training value.
inline NormalizerParams fit_normalizer(const std::vector<std::pair<double, double>>& coords,
                                       NormKind kind, bool std_divisor = false) {
  if (coords.size() < 2) throw InsufficientDataError("fit_normalizer: needs at least 2 points");
  std::vector<double> lats, lons;
  lats.reserve(coords.size());
  lons.reserve(coords.size());
  for (const auto& [lat, lon] : coords) {
    lats.push_back(lat);
    lons.push_back(lon);
  }
  NormalizerParams p;
  p.kind = kind;
  p.std_divisor = std_divisor;
  p.lat = detail::fit_axis(lats);
  p.lon = detail::fit_axis(lons);
  return p;
}

/// Points outside the training range are fine: min-max simply maps them
/// outside [0, 1].
inline std::pair<double, double> normalize(const NormalizerParams& p, double lat, double lon) {
  return {detail::fwd_axis(p.lat, p.kind, p.std_divisor, lat),
          detail::fwd_axis(p.lon, p.kind, p.std_divisor, lon)};
}

/// Exact algebraic inverse of normalize().
inline std::pair<double, double> denormalize(const NormalizerParams& p, double x, double y) {
  return {detail::inv_axis(p.lat, p.kind, p.std_divisor, x),
          detail::inv_axis(p.lon, p.kind, p.std_divisor, y)};
}

}  // namespace cdrkit

#endif  // CDRKIT_NORMALIZER_HPP
