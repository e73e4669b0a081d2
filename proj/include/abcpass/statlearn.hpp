#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "abcpass/model.hpp"
#include "abcpass/rng.hpp"

namespace abcpass {

/// Prior-predictive simulations: theta drawn from the prior, stats simulated.
/// Row r of theta/stats is one simulation.
struct PilotSet {
  std::vector<std::string> param_names;
  std::vector<std::string> stat_names;
  Eigen::MatrixXd theta;  // P x n, stored scale
  Eigen::MatrixXd stats;  // P x m

  std::size_t rows() const { return static_cast<std::size_t>(theta.rows()); }
};

/// Simulates P pilot rows in parallel; row r uses seed derive_seed(seed, r).
PilotSet generate_pilot(const ParameterSpace& space, const Simulator& sim, std::size_t rows,
                        RandomSeed seed, unsigned threads = 1);

/// Per-statistic power transform y = ((x + shift)^lambda - 1) / lambda
/// (log(x + shift) at lambda = 0). Shifts make all pilot values positive;
/// inputs below the pilot floor are clamped to it and counted.
struct BoxCoxTransform {
  Eigen::VectorXd lambda;
  Eigen::VectorXd shift;
  Eigen::VectorXd floor;    // smallest positive shifted pilot value, per statistic
  Eigen::VectorXd ref_min;  // raw pilot range, for diagnostics
  Eigen::VectorXd ref_max;
  std::vector<std::uint8_t> degenerate;  // constant statistic: identity transform, flagged

  std::size_t stat_count() const { return static_cast<std::size_t>(lambda.size()); }
  double transform_one(std::size_t j, double x, std::uint64_t* clamp_count = nullptr) const;
  void apply(std::span<const double> stats, std::span<double> out,
             std::uint64_t* clamp_count = nullptr) const;
  Eigen::MatrixXd apply_matrix(const Eigen::MatrixXd& stats) const;
};

/// Fits lambda per statistic on the grid {-5, -4.9, ..., 5} by maximizing the
/// profile log-likelihood of the linear regression of the transformed
/// statistic on theta (Gaussian residuals, Jacobian term included).
BoxCoxTransform fit_boxcox(const PilotSet& pilot);

/// One approximately sufficient linear combination of (transformed) statistics
/// for one parameter: tau = beta . boxcox(s).
struct LinearProjection {
  std::string parameter;
  Eigen::VectorXd beta;
  BoxCoxTransform transform;
  double tau_mean = 0.0;
  double tau_sd = 1.0;  // pilot SD, used to standardize tau distances

  double project(std::span<const double> stats, std::uint64_t* clamp_count = nullptr) const;
};

/// Estimates beta = cov(s)^-1 cov(s, theta_i) on the transformed pilot, with a
/// small ridge scaled by tr(cov)/m. Throws naming collinear statistics when
/// cov(s) is rank-deficient even after the ridge.
LinearProjection learn_projection(const PilotSet& pilot, const BoxCoxTransform& transform,
                                  std::size_t target_param, double ridge = 1e-8);

/// Pearson correlation between theta_i and tau_i on a held-out fraction of the
/// pilot; the linearity diagnostic reported alongside each projection.
double projection_linearity(const PilotSet& pilot, const LinearProjection& proj,
                            std::size_t target_param, double holdout_fraction = 0.1);

/// Recomputes tau_mean / tau_sd over a pilot set; for projections built from
/// known coefficients rather than learned ones.
void set_tau_moments(LinearProjection& proj, const PilotSet& pilot);

}  // namespace abcpass
