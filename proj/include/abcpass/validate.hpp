#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace abcpass {

using Density1D = std::function<double(double)>;

/// Marginal posterior of mu given (xbar, S2, n): Normal(xbar, S2/n).
Density1D normal_mu_posterior(double xbar, double s2, int n);

/// Marginal posterior density of sigma2 given (S2, n):
/// f(v) = ((n-1)/S2) * chi2_pdf_{n-1}((n-1) v / S2).
Density1D normal_sigma2_posterior(double s2, int n);

struct GaussianPosterior {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

struct GaussianPrior {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

/// Posterior of theta for s = c + C theta + eps, eps ~ N(0, Sigma_s):
/// N(Dd, D) with D = (C' Sigma_s^-1 C + Sigma_theta^-1)^-1 and
/// d = C' Sigma_s^-1 (s_obs - c) + Sigma_theta^-1 theta_0.
/// No prior given = flat prior (Sigma_theta^-1 = 0), which requires
/// C' Sigma_s^-1 C to be invertible.
GaussianPosterior glm_posterior(const Eigen::MatrixXd& design, const Eigen::MatrixXd& noise_cov,
                                const Eigen::VectorXd& s_obs,
                                const std::optional<GaussianPrior>& prior = std::nullopt,
                                const Eigen::VectorXd& offset = Eigen::VectorXd());

/// Probability masses over K equal-width bins of [lo, hi]; masses sum to 1.
struct BinnedDensity {
  double lo = 0.0;
  double hi = 1.0;
  Eigen::VectorXd mass;

  std::size_t bins() const { return static_cast<std::size_t>(mass.size()); }
  double bin_width() const { return (hi - lo) / double(mass.size()); }
};

/// Integrates a density per bin (adaptive Gauss-Kronrod) and renormalizes to
/// the [lo, hi] window, i.e. the density truncated to the prior support.
BinnedDensity bin_density(const Density1D& density, double lo, double hi, int bins = 100);

/// Histogram of samples as bin masses. Samples outside [lo, hi] are an error:
/// chains live on the prior support by construction.
BinnedDensity bin_samples(std::span<const double> samples, double lo, double hi, int bins = 100);

/// Sum of |p_k - q_k| over bins; range [0, 2].
double l1_distance(const BinnedDensity& a, const BinnedDensity& b);

/// L1 between a sample histogram and an exact density on the same binning.
double l1_samples_vs_density(std::span<const double> samples, const Density1D& truth, double lo,
                             double hi, int bins = 100);

/// L1 between the flat prior on [lo, hi] and the truth: the no-data baseline.
double prior_baseline_l1(const Density1D& truth, double lo, double hi, int bins = 100);

}  // namespace abcpass
