#include "abcpass/toy_models.hpp"

#include <cmath>

#include "abcpass/errors.hpp"

namespace abcpass {

NormalModel::NormalModel(int sample_size) : n_(sample_size) {
  contract_check(n_ >= 2, "normal model: sample size must be >= 2");
}

void NormalModel::simulate(std::span<const double> theta_natural, RandomSeed seed,
                           std::span<double> out) const {
  contract_check(theta_natural.size() == 2 && out.size() == 2,
                 "normal model: expects theta = (mu, sigma2)");
  const double mu = theta_natural[0];
  const double sigma2 = theta_natural[1];
  contract_check(sigma2 > 0.0, "normal model: sigma2 must be > 0");

  Engine engine = make_engine(seed);
  std::normal_distribution<double> normal(mu, std::sqrt(sigma2));
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int i = 0; i < n_; ++i) {
    const double x = normal(engine);
    sum += x;
    sum_sq += x * x;
  }
  const double mean = sum / n_;
  out[0] = mean;
  out[1] = (sum_sq - n_ * mean * mean) / (n_ - 1);
}

Eigen::MatrixXd cyclic_design_matrix(int n) {
  contract_check(n >= 1, "cyclic design: n must be >= 1");
  Eigen::MatrixXd b(n, n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      // row r is the base row (1/n, ..., n/n) rotated right by r
      b(r, c) = double((c - r + n) % n + 1) / double(n);
    }
  }
  const double log_abs_det = Eigen::PartialPivLU<Eigen::MatrixXd>(b)
                                 .matrixLU()
                                 .diagonal()
                                 .array()
                                 .abs()
                                 .log()
                                 .sum();
  contract_check(std::isfinite(log_abs_det), "cyclic design: B is singular");
  // det(B'B)^(-1/2n) = |det B|^(-1/n)
  return b * std::exp(-log_abs_det / n);
}

GlmModel::GlmModel(Eigen::MatrixXd design) : design_(std::move(design)) {
  contract_check(design_.rows() > 0 && design_.allFinite(), "glm model: invalid design matrix");
}

std::vector<std::string> GlmModel::stat_names() const {
  std::vector<std::string> names;
  for (Eigen::Index j = 0; j < design_.rows(); ++j) {
    names.push_back("s_" + std::to_string(j + 1));
  }
  return names;
}

void GlmModel::simulate(std::span<const double> theta_natural, RandomSeed seed,
                        std::span<double> out) const {
  const auto m = static_cast<std::size_t>(design_.rows());
  contract_check(theta_natural.size() == static_cast<std::size_t>(design_.cols()) &&
                     out.size() == m,
                 "glm model: dimension mismatch");
  Engine engine = make_engine(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t r = 0; r < m; ++r) {
    double v = 0.0;
    for (Eigen::Index c = 0; c < design_.cols(); ++c) {
      v += design_(static_cast<Eigen::Index>(r), c) * theta_natural[static_cast<std::size_t>(c)];
    }
    out[r] = v + normal(engine);
  }
}

BinomialCheckModel::BinomialCheckModel(int trials) : trials_(trials) {
  contract_check(trials_ >= 1, "binomial model: trials must be >= 1");
}

void BinomialCheckModel::simulate(std::span<const double> theta_natural, RandomSeed seed,
                                  std::span<double> out) const {
  contract_check(theta_natural.size() == 1 && out.size() == 1,
                 "binomial model: expects theta = (p)");
  const double p = theta_natural[0];
  contract_check(p >= 0.0 && p <= 1.0, "binomial model: p must lie in [0, 1]");
  Engine engine = make_engine(seed);
  out[0] = double(std::binomial_distribution<int>(trials_, p)(engine));
}

}  // namespace abcpass
