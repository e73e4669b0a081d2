#include "abcpass/gpd.hpp"

#include <cmath>

#include "abcpass/errors.hpp"

namespace abcpass {

double GpdParams::support_end() const {
  if (chi < -kGpdShapeEpsilon) {
    return std::min(s_max, -sigma / chi);
  }
  return s_max;
}

double gpd_cdf_untruncated(double s, const GpdParams& p) {
  contract_check(p.sigma > 0.0, "gpd: sigma must be > 0");
  if (s <= 0.0) return 0.0;
  if (std::abs(p.chi) < kGpdShapeEpsilon) {
    return -std::expm1(-s / p.sigma);
  }
  const double z = 1.0 + p.chi * s / p.sigma;
  if (z <= 0.0) return 1.0;  // past the natural support end (chi < 0)
  return -std::expm1(-std::log(z) / p.chi);
}

double gpd_log_density(double s, const GpdParams& p) {
  contract_check(p.sigma > 0.0, "gpd: sigma must be > 0");
  contract_check(p.s_max > 0.0, "gpd: s_max must be > 0");
  const double end = p.support_end();
  if (s < 0.0 || s > end) return -std::numeric_limits<double>::infinity();
  const double log_norm = std::log(gpd_cdf_untruncated(end, p));
  if (std::abs(p.chi) < kGpdShapeEpsilon) {
    return -std::log(p.sigma) - s / p.sigma - log_norm;
  }
  const double z = 1.0 + p.chi * s / p.sigma;
  if (z <= 0.0) return -std::numeric_limits<double>::infinity();
  return -std::log(p.sigma) + (-1.0 / p.chi - 1.0) * std::log(z) - log_norm;
}

double gpd_density(double s, const GpdParams& p) {
  const double lf = gpd_log_density(s, p);
  return std::isinf(lf) ? 0.0 : std::exp(lf);
}

}  // namespace abcpass
