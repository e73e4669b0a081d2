#pragma once

#include <Eigen/Dense>

#include "abcpass/model.hpp"

namespace abcpass {

/// theta = (mu, sigma2); statistics = (sample mean, unbiased sample variance)
/// of n i.i.d. normal draws.
class NormalModel : public Simulator {
 public:
  using Simulator::simulate;
  explicit NormalModel(int sample_size = 10);
  std::size_t stat_count() const override { return 2; }
  std::vector<std::string> stat_names() const override { return {"mean", "var"}; }
  void simulate(std::span<const double> theta_natural, RandomSeed seed,
                std::span<double> out) const override;
  int sample_size() const { return n_; }

 private:
  int n_;
};

/// Rows of B are cyclic right-rotations of (1/n, 2/n, ..., n/n); the returned
/// C = B * det(B'B)^(-1/2n) has det(C'C) = 1, so posterior volume is constant
/// across dimensionalities.
Eigen::MatrixXd cyclic_design_matrix(int n);

/// s = C theta + eps with eps ~ N(0, I).
class GlmModel : public Simulator {
 public:
  using Simulator::simulate;
  explicit GlmModel(Eigen::MatrixXd design);
  std::size_t stat_count() const override { return static_cast<std::size_t>(design_.rows()); }
  std::vector<std::string> stat_names() const override;
  void simulate(std::span<const double> theta_natural, RandomSeed seed,
                std::span<double> out) const override;
  const Eigen::MatrixXd& design() const { return design_; }

 private:
  Eigen::MatrixXd design_;
};

/// theta = success probability; statistic = success count out of N trials.
/// Discrete statistic, so the tolerance delta = 0 regime is reachable exactly.
class BinomialCheckModel : public Simulator {
 public:
  using Simulator::simulate;
  explicit BinomialCheckModel(int trials = 20);
  std::size_t stat_count() const override { return 1; }
  std::vector<std::string> stat_names() const override { return {"successes"}; }
  void simulate(std::span<const double> theta_natural, RandomSeed seed,
                std::span<double> out) const override;
  int trials() const { return trials_; }

 private:
  int trials_;
};

}  // namespace abcpass
