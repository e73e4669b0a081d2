#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "abcpass/errors.hpp"
#include "abcpass/validate.hpp"
#include "abcpass/rng.hpp"

using namespace abcpass;

TEST_CASE("normal posterior marginals: mode, normalization, sigma2 argmax") {
  const int n = 10;
  const double xbar = 1.3;
  const double s2 = 5.0;

  const Density1D mu_density = normal_mu_posterior(xbar, s2, n);
  double best_x = 0.0;
  double best_f = -1.0;
  for (int k = 0; k <= 4000; ++k) {
    const double x = -10.0 + 20.0 * k / 4000.0;
    if (mu_density(x) > best_f) {
      best_f = mu_density(x);
      best_x = x;
    }
  }
  CHECK(best_x == doctest::Approx(xbar).epsilon(1e-2));

  const Density1D v_density = normal_sigma2_posterior(s2, n);
  using boost::math::quadrature::gauss_kronrod;
  const double total = gauss_kronrod<double, 61>::integrate(v_density, 0.0, 400.0, 12, 1e-12);
  CHECK(std::abs(total - 1.0) < 1e-6);

  // numerical argmax of the displayed density lands at S^2 (n-3)/(n-1)
  best_f = -1.0;
  for (int k = 1; k <= 40000; ++k) {
    const double v = 15.0 * k / 40000.0;
    if (v_density(v) > best_f) {
      best_f = v_density(v);
      best_x = v;
    }
  }
  CHECK(best_x == doctest::Approx(s2 * (n - 3.0) / (n - 1.0)).epsilon(1e-3));
}

TEST_CASE("glm posterior: identity case, prior-only case, quadrature oracle") {
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(2, 2);
  const Eigen::VectorXd s_obs = (Eigen::VectorXd(2) << 0.7, -1.2).finished();
  const GaussianPosterior identity_post = glm_posterior(eye, eye, s_obs);
  CHECK((identity_post.mean - s_obs).norm() < 1e-12);
  CHECK((identity_post.cov - eye).norm() < 1e-12);

  // no data: C = 0 returns the prior
  GaussianPrior prior;
  prior.mean = (Eigen::VectorXd(2) << 3.0, -1.0).finished();
  prior.cov = (Eigen::MatrixXd(2, 2) << 2.0, 0.3, 0.3, 1.0).finished();
  const GaussianPosterior prior_post =
      glm_posterior(Eigen::MatrixXd::Zero(2, 2), eye, Eigen::VectorXd::Zero(2), prior);
  CHECK((prior_post.mean - prior.mean).norm() < 1e-12);
  CHECK((prior_post.cov - prior.cov).norm() < 1e-12);

  // flat prior with singular C'C is an error
  CHECK_THROWS_AS(glm_posterior(Eigen::MatrixXd::Zero(2, 2), eye, Eigen::VectorXd::Zero(2)),
                  RunError);

  // random 3x3 design vs brute-force grid integration over theta
  Engine engine = make_engine(55);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd c(3, 3);
  for (int r = 0; r < 3; ++r) {
    for (int j = 0; j < 3; ++j) c(r, j) = normal(engine) + (r == j ? 1.5 : 0.0);
  }
  const Eigen::VectorXd observed = (Eigen::VectorXd(3) << 0.4, -0.9, 1.7).finished();
  const GaussianPosterior post = glm_posterior(c, Eigen::MatrixXd::Identity(3, 3), observed);

  const int grid = 81;
  const double half_width = 6.0;
  Eigen::VectorXd lo(3);
  Eigen::VectorXd step(3);
  for (int i = 0; i < 3; ++i) {
    const double sd = std::sqrt(post.cov(i, i));
    lo[i] = post.mean[i] - half_width * sd;
    step[i] = 2.0 * half_width * sd / (grid - 1);
  }
  double total = 0.0;
  Eigen::VectorXd moment1 = Eigen::VectorXd::Zero(3);
  Eigen::MatrixXd moment2 = Eigen::MatrixXd::Zero(3, 3);
  Eigen::VectorXd theta(3);
  for (int a = 0; a < grid; ++a) {
    theta[0] = lo[0] + a * step[0];
    for (int b = 0; b < grid; ++b) {
      theta[1] = lo[1] + b * step[1];
      for (int d = 0; d < grid; ++d) {
        theta[2] = lo[2] + d * step[2];
        const Eigen::VectorXd resid = observed - c * theta;
        const double density = std::exp(-0.5 * resid.squaredNorm());
        total += density;
        moment1 += density * theta;
        moment2 += density * theta * theta.transpose();
      }
    }
  }
  moment1 /= total;
  moment2 /= total;
  const Eigen::MatrixXd cov_grid = moment2 - moment1 * moment1.transpose();
  CHECK((moment1 - post.mean).norm() / post.mean.norm() < 1e-3);
  CHECK((cov_grid - post.cov).norm() / post.cov.norm() < 1e-3);
}

TEST_CASE("glm posterior covariance is symmetric positive definite") {
  Engine engine = make_engine(56);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int rep = 0; rep < 100; ++rep) {
    const int n = 2 + int(engine() % 4);
    Eigen::MatrixXd c(n, n);
    for (int r = 0; r < n; ++r) {
      for (int j = 0; j < n; ++j) c(r, j) = normal(engine) + (r == j ? 2.0 : 0.0);
    }
    Eigen::VectorXd s_obs(n);
    for (int r = 0; r < n; ++r) s_obs[r] = normal(engine);
    const GaussianPosterior post =
        glm_posterior(c, Eigen::MatrixXd::Identity(n, n), s_obs);
    CHECK((post.cov - post.cov.transpose()).norm() < 1e-10);
    CHECK(Eigen::LLT<Eigen::MatrixXd>(post.cov).info() == Eigen::Success);
  }
}

TEST_CASE("binned densities: normalization, identity, disjoint supports") {
  const Density1D gaussian = [](double x) { return std::exp(-0.5 * x * x); };
  const BinnedDensity q = bin_density(gaussian, -10.0, 10.0, 100);
  CHECK(std::abs(q.mass.sum() - 1.0) < 1e-9);
  CHECK(l1_distance(q, q) == 0.0);

  // disjoint: samples on the left half, truth massed on the right half
  std::vector<double> left(1000, 0.2);
  const Density1D right = [](double x) { return (x > 0.6 && x < 0.9) ? 1.0 : 0.0; };
  CHECK(l1_samples_vs_density(left, right, 0.0, 1.0, 100) == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("sample self-distance floor and the prior baseline") {
  Engine engine = make_engine(57);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> samples;
  samples.reserve(1000000);
  for (int i = 0; i < 1000000; ++i) {
    double x = normal(engine);
    while (x < -10.0 || x > 10.0) x = normal(engine);
    samples.push_back(x);
  }
  const Density1D truth = [](double x) { return std::exp(-0.5 * x * x); };
  CHECK(l1_samples_vs_density(samples, truth, -10.0, 10.0, 100) < 0.02);

  // uniform samples against a sharp truth approach the prior-truth L1
  std::uniform_real_distribution<double> unif(-10.0, 10.0);
  std::vector<double> prior_samples;
  for (int i = 0; i < 1000000; ++i) prior_samples.push_back(unif(engine));
  const Density1D sharp = [](double x) { return std::exp(-0.5 * x * x / 0.01); };
  const double baseline = prior_baseline_l1(sharp, -10.0, 10.0, 100);
  CHECK(l1_samples_vs_density(prior_samples, sharp, -10.0, 10.0, 100) ==
        doctest::Approx(baseline).epsilon(0.02));
  CHECK(baseline > 1.9);  // nearly all truth mass sits in one bin
}

TEST_CASE("sample-vs-sample distance is symmetric") {
  Engine engine = make_engine(58);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> a;
  std::vector<double> b;
  for (int i = 0; i < 20000; ++i) {
    a.push_back(unif(engine));
    b.push_back(std::pow(unif(engine), 2.0));
  }
  const BinnedDensity pa = bin_samples(a, 0.0, 1.0, 50);
  const BinnedDensity pb = bin_samples(b, 0.0, 1.0, 50);
  CHECK(l1_distance(pa, pb) == l1_distance(pb, pa));
  CHECK(l1_distance(pa, pb) > 0.0);
}

TEST_CASE("samples outside the support are a contract violation") {
  const std::vector<double> bad{0.5, 1.5};
  CHECK_THROWS_AS(bin_samples(bad, 0.0, 1.0, 10), ContractError);
}
