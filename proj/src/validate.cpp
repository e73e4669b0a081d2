#include "abcpass/validate.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "abcpass/errors.hpp"

namespace abcpass {

Density1D normal_mu_posterior(double xbar, double s2, int n) {
  contract_check(n >= 2 && s2 > 0.0, "normal posterior: need n >= 2 and S2 > 0");
  boost::math::normal_distribution<double> dist(xbar, std::sqrt(s2 / n));
  return [dist](double mu) { return boost::math::pdf(dist, mu); };
}

Density1D normal_sigma2_posterior(double s2, int n) {
  contract_check(n >= 2 && s2 > 0.0, "normal posterior: need n >= 2 and S2 > 0");
  boost::math::chi_squared_distribution<double> dist(n - 1);
  const double scale = (n - 1) / s2;
  return [dist, scale](double v) {
    if (v <= 0.0) return 0.0;
    return scale * boost::math::pdf(dist, scale * v);
  };
}

GaussianPosterior glm_posterior(const Eigen::MatrixXd& design, const Eigen::MatrixXd& noise_cov,
                                const Eigen::VectorXd& s_obs,
                                const std::optional<GaussianPrior>& prior,
                                const Eigen::VectorXd& offset) {
  const auto m = design.rows();
  const auto n = design.cols();
  contract_check(noise_cov.rows() == m && noise_cov.cols() == m && s_obs.size() == m,
                 "glm_posterior: dimension mismatch");
  Eigen::VectorXd c = offset.size() == 0 ? Eigen::VectorXd::Zero(m) : offset;
  contract_check(c.size() == m, "glm_posterior: offset length mismatch");

  const Eigen::LLT<Eigen::MatrixXd> noise_llt(noise_cov);
  contract_check(noise_llt.info() == Eigen::Success,
                 "glm_posterior: noise covariance not positive definite");
  const Eigen::MatrixXd ct_sinv = noise_llt.solve(design).transpose();  // C' Sigma_s^-1

  Eigen::MatrixXd precision = ct_sinv * design;
  Eigen::VectorXd d = ct_sinv * (s_obs - c);
  if (prior.has_value()) {
    contract_check(prior->mean.size() == n && prior->cov.rows() == n && prior->cov.cols() == n,
                   "glm_posterior: prior dimension mismatch");
    const Eigen::LLT<Eigen::MatrixXd> prior_llt(prior->cov);
    contract_check(prior_llt.info() == Eigen::Success,
                   "glm_posterior: prior covariance not positive definite");
    precision += prior_llt.solve(Eigen::MatrixXd::Identity(n, n));
    d += prior_llt.solve(prior->mean);
  }

  const Eigen::LLT<Eigen::MatrixXd> post_llt(precision);
  if (post_llt.info() != Eigen::Success) {
    throw RunError("glm_posterior: C' Sigma_s^-1 C is singular under a flat prior");
  }
  GaussianPosterior post;
  post.cov = post_llt.solve(Eigen::MatrixXd::Identity(n, n));
  post.mean = post.cov * d;
  return post;
}

BinnedDensity bin_density(const Density1D& density, double lo, double hi, int bins) {
  contract_check(bins >= 10 && lo < hi, "bin_density: need >= 10 bins and lo < hi");
  BinnedDensity out;
  out.lo = lo;
  out.hi = hi;
  out.mass.resize(bins);
  const double width = (hi - lo) / bins;
  using boost::math::quadrature::gauss_kronrod;
  for (int k = 0; k < bins; ++k) {
    const double a = lo + k * width;
    out.mass[k] = gauss_kronrod<double, 31>::integrate(density, a, a + width, 10, 1e-10);
  }
  const double total = out.mass.sum();
  contract_check(total > 0.0, "bin_density: density integrates to zero over the support");
  out.mass /= total;
  return out;
}

BinnedDensity bin_samples(std::span<const double> samples, double lo, double hi, int bins) {
  contract_check(bins >= 10 && lo < hi, "bin_samples: need >= 10 bins and lo < hi");
  contract_check(!samples.empty(), "bin_samples: no samples");
  BinnedDensity out;
  out.lo = lo;
  out.hi = hi;
  out.mass = Eigen::VectorXd::Zero(bins);
  const double inv_width = bins / (hi - lo);
  for (const double x : samples) {
    if (x < lo || x > hi) {
      throw ContractError("bin_samples: sample " + std::to_string(x) +
                          " outside the prior support; sampler bug upstream");
    }
    auto k = static_cast<Eigen::Index>((x - lo) * inv_width);
    if (k == bins) --k;  // x == hi lands in the last bin
    out.mass[k] += 1.0;
  }
  out.mass /= double(samples.size());
  return out;
}

double l1_distance(const BinnedDensity& a, const BinnedDensity& b) {
  contract_check(a.bins() == b.bins() && a.lo == b.lo && a.hi == b.hi,
                 "l1_distance: binnings differ");
  return (a.mass - b.mass).cwiseAbs().sum();
}

double l1_samples_vs_density(std::span<const double> samples, const Density1D& truth, double lo,
                             double hi, int bins) {
  return l1_distance(bin_samples(samples, lo, hi, bins), bin_density(truth, lo, hi, bins));
}

double prior_baseline_l1(const Density1D& truth, double lo, double hi, int bins) {
  const BinnedDensity q = bin_density(truth, lo, hi, bins);
  const double flat = 1.0 / bins;
  double l1 = 0.0;
  for (Eigen::Index k = 0; k < q.mass.size(); ++k) l1 += std::abs(flat - q.mass[k]);
  return l1;
}

}  // namespace abcpass
