#pragma once

#include <limits>

namespace abcpass {

/// Generalized Pareto distribution with location fixed at 0, truncated to
/// [0, s_max]. Shape chi may be negative, in which case the natural support
/// already ends at -sigma/chi.
struct GpdParams {
  double chi = 0.0;
  double sigma = 0.1;  // > 0
  double s_max = 1.0;  // truncation bound, > 0

  /// Upper end of the effective support: min(s_max, -sigma/chi) for chi < 0.
  double support_end() const;
};

// |chi| below this is evaluated via the exponential limit.
inline constexpr double kGpdShapeEpsilon = 1e-8;

/// Untruncated CDF at s (s >= 0).
double gpd_cdf_untruncated(double s, const GpdParams& p);

/// Density of the truncated GPD; 0 outside [0, support_end].
double gpd_density(double s, const GpdParams& p);

/// log of gpd_density; -inf outside the support.
double gpd_log_density(double s, const GpdParams& p);

}  // namespace abcpass
