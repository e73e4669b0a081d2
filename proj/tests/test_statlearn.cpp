#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "abcpass/errors.hpp"
#include "abcpass/statlearn.hpp"
#include "abcpass/toy_models.hpp"
#include "abcpass/validate.hpp"
#include "test_support.hpp"

using namespace abcpass;

namespace {

// uniformly random rotation via QR of a Gaussian matrix; keeps the
// prior-predictive covariance isotropic so beta_i = c_i exactly
Eigen::MatrixXd random_rotation(int n, Engine& engine) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd g(n, n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) g(r, c) = normal(engine);
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int c = 0; c < n; ++c) {
    if (r(c, c) < 0) q.col(c) = -q.col(c);
  }
  return q;
}

PilotSet glm_pilot(const Eigen::MatrixXd& design, std::size_t rows, RandomSeed seed) {
  const GlmModel model(design);
  const int n = static_cast<int>(design.cols());
  std::vector<ParameterDef> defs;
  for (int i = 0; i < n; ++i) {
    defs.push_back({"theta_" + std::to_string(i + 1), {PriorKind::kUniform, -100.0, 100.0},
                    ParamScale::kLinear});
  }
  const ParameterSpace space(std::move(defs));
  return generate_pilot(space, model, rows, seed, 2);
}

}  // namespace

TEST_CASE("apply_boxcox: power family members") {
  BoxCoxTransform t;
  t.lambda = Eigen::Vector3d(1.0, 0.0, 2.0);
  t.shift = Eigen::Vector3d::Zero();
  t.floor = Eigen::Vector3d::Constant(1e-12);
  t.ref_min = Eigen::Vector3d::Zero();
  t.ref_max = Eigen::Vector3d::Ones();
  t.degenerate.assign(3, 0);

  CHECK(t.transform_one(0, 3.0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(t.transform_one(1, std::exp(1.0)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(t.transform_one(2, 3.0) == doctest::Approx(4.0).epsilon(1e-15));

  // below-floor inputs clamp to the floor and are counted
  std::uint64_t clamps = 0;
  CHECK(t.transform_one(1, -5.0, &clamps) == doctest::Approx(std::log(1e-12)));
  CHECK(clamps == 1);
}

TEST_CASE("fit_boxcox recovers the generating transform") {
  Engine engine = make_engine(41);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 3.0);
  const std::size_t rows = 10000;

  PilotSet pilot;
  pilot.param_names = {"theta"};
  pilot.stat_names = {"linear", "exponential"};
  pilot.theta.resize(rows, 1);
  pilot.stats.resize(rows, 2);
  for (std::size_t r = 0; r < rows; ++r) {
    const double theta = unif(engine);
    pilot.theta(static_cast<Eigen::Index>(r), 0) = theta;
    pilot.stats(static_cast<Eigen::Index>(r), 0) = 2.0 * theta + 5.0 + 0.5 * noise(engine);
    pilot.stats(static_cast<Eigen::Index>(r), 1) =
        std::exp(theta + 0.1 * noise(engine));
  }
  const BoxCoxTransform t = fit_boxcox(pilot);
  CHECK(t.lambda[0] == doctest::Approx(1.0).epsilon(0.11));
  CHECK(std::abs(t.lambda[1]) <= 0.15);
  CHECK(t.degenerate[0] == 0);
}

TEST_CASE("fit_boxcox flags constant statistics") {
  Engine engine = make_engine(42);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  PilotSet pilot;
  pilot.param_names = {"theta"};
  pilot.stat_names = {"flat", "ok"};
  pilot.theta.resize(100, 1);
  pilot.stats.resize(100, 2);
  for (Eigen::Index r = 0; r < 100; ++r) {
    pilot.theta(r, 0) = unif(engine);
    pilot.stats(r, 0) = 7.0;
    pilot.stats(r, 1) = pilot.theta(r, 0) + unif(engine);
  }
  const BoxCoxTransform t = fit_boxcox(pilot);
  CHECK(t.degenerate[0] == 1);
  CHECK(t.lambda[0] == 1.0);
  CHECK(t.shift[0] == 0.0);
  CHECK(t.degenerate[1] == 0);
}

TEST_CASE("apply_boxcox is strictly monotone over the pilot range") {
  Engine engine = make_engine(43);
  std::uniform_real_distribution<double> unif(0.5, 9.5);
  PilotSet pilot;
  pilot.param_names = {"theta"};
  pilot.stat_names = {"s"};
  pilot.theta.resize(500, 1);
  pilot.stats.resize(500, 1);
  for (Eigen::Index r = 0; r < 500; ++r) {
    pilot.theta(r, 0) = unif(engine);
    pilot.stats(r, 0) = std::pow(pilot.theta(r, 0), 3.0) + 0.1 * unif(engine);
  }
  const BoxCoxTransform t = fit_boxcox(pilot);
  double previous = -std::numeric_limits<double>::infinity();
  for (int k = 0; k <= 200; ++k) {
    const double x = t.ref_min[0] + (t.ref_max[0] - t.ref_min[0]) * k / 200.0;
    const double y = t.transform_one(0, x);
    CHECK(y > previous);
    previous = y;
  }
}

TEST_CASE("learn_projection: identity design gives unit vectors") {
  const int n = 3;
  const PilotSet pilot = glm_pilot(Eigen::MatrixXd::Identity(n, n), 100000, 404);
  const BoxCoxTransform t = fit_boxcox(pilot);
  for (int i = 0; i < n; ++i) {
    const LinearProjection proj = learn_projection(pilot, t, static_cast<std::size_t>(i));
    for (int j = 0; j < n; ++j) {
      CHECK(std::abs(proj.beta[j] - (i == j ? 1.0 : 0.0)) < 0.05);
    }
  }
}

TEST_CASE("learn_projection: known rotation design recovers beta = c_i") {
  Engine engine = make_engine(47);
  const int n = 3;
  const Eigen::MatrixXd c = random_rotation(n, engine);
  const PilotSet pilot = glm_pilot(c, 100000, 405);
  const BoxCoxTransform t = fit_boxcox(pilot);
  for (int i = 0; i < n; ++i) {
    const LinearProjection proj = learn_projection(pilot, t, static_cast<std::size_t>(i));
    const Eigen::VectorXd analytic = c.col(i);  // noise covariance is identity
    const double rel = (proj.beta - analytic).norm() / analytic.norm();
    CHECK(rel < 0.05);
  }
}

TEST_CASE("learn_projection: exact collinearity without ridge is an error") {
  Engine engine = make_engine(44);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  PilotSet pilot;
  pilot.param_names = {"theta"};
  pilot.stat_names = {"a", "a_copy"};
  pilot.theta.resize(500, 1);
  pilot.stats.resize(500, 2);
  for (Eigen::Index r = 0; r < 500; ++r) {
    pilot.theta(r, 0) = unif(engine);
    pilot.stats(r, 0) = pilot.theta(r, 0) + unif(engine);
    pilot.stats(r, 1) = pilot.stats(r, 0);
  }
  const BoxCoxTransform t = fit_boxcox(pilot);
  CHECK_THROWS_WITH_AS(learn_projection(pilot, t, 0, 0.0),
                       doctest::Contains("collinear"), RunError);
  // the default ridge makes the same pilot solvable
  CHECK_NOTHROW(learn_projection(pilot, t, 0));
}

TEST_CASE("theorem-2 consistency: error halves when the pilot quadruples") {
  Engine engine = make_engine(45);
  const int n = 3;
  double err_small = 0.0;
  double err_large = 0.0;
  for (int rep = 0; rep < 6; ++rep) {
    const Eigen::MatrixXd c = random_rotation(n, engine);
    for (const bool large : {false, true}) {
      const std::size_t rows = large ? 10000 : 2500;
      const PilotSet pilot = glm_pilot(c, rows, 500 + 10 * rep + large);
      const BoxCoxTransform t = fit_boxcox(pilot);
      double err = 0.0;
      for (int i = 0; i < n; ++i) {
        const LinearProjection proj = learn_projection(pilot, t, static_cast<std::size_t>(i));
        err += (proj.beta - c.col(i)).norm() / c.col(i).norm();
      }
      (large ? err_large : err_small) += err / n;
    }
  }
  CHECK(err_large / err_small > 0.25);
  CHECK(err_large / err_small < 0.80);
}

TEST_CASE("posterior equivalence: rejection on the tau projections matches the analytic GLM") {
  Engine engine = make_engine(46);
  const int n = 3;
  const Eigen::MatrixXd c = random_rotation(n, engine);
  const GlmModel model(c);
  const std::size_t rows = 40000;
  const PilotSet pilot = glm_pilot(c, rows, 600);
  const BoxCoxTransform t = fit_boxcox(pilot);

  std::vector<LinearProjection> projections;
  for (int i = 0; i < n; ++i) {
    projections.push_back(learn_projection(pilot, t, static_cast<std::size_t>(i)));
  }

  const std::vector<double> truth{10.0, -25.0, 40.0};
  const std::vector<double> s_obs = model.simulate(truth, 31);
  Eigen::VectorXd observed(n);
  for (int j = 0; j < n; ++j) observed[j] = s_obs[static_cast<std::size_t>(j)];
  const GaussianPosterior post =
      glm_posterior(c, Eigen::MatrixXd::Identity(n, n), observed);

  // joint standardized distance over the three projections
  std::vector<double> tau_obs(n);
  for (int i = 0; i < n; ++i) tau_obs[static_cast<std::size_t>(i)] = projections[i].project(s_obs);
  std::vector<double> distances(rows);
  std::vector<double> row(n);
  for (std::size_t r = 0; r < rows; ++r) {
    double d2 = 0.0;
    for (int j = 0; j < n; ++j) row[static_cast<std::size_t>(j)] = pilot.stats(r, j);
    for (int i = 0; i < n; ++i) {
      const double d = (projections[i].project(row) - tau_obs[static_cast<std::size_t>(i)]) /
                       projections[i].tau_sd;
      d2 += d * d;
    }
    distances[r] = std::sqrt(d2);
  }
  auto sorted = distances;
  std::sort(sorted.begin(), sorted.end());
  const double tolerance = sorted[rows / 200];  // 0.5% quantile

  for (int i = 0; i < n; ++i) {
    std::vector<double> accepted;
    for (std::size_t r = 0; r < rows; ++r) {
      if (distances[r] <= tolerance) accepted.push_back(pilot.theta(r, i));
    }
    REQUIRE(accepted.size() >= 50);
    const double se = test::sd_of(accepted) / std::sqrt(double(accepted.size()));
    CHECK(std::abs(test::mean_of(accepted) - post.mean[i]) < 3.0 * se);
  }
}

TEST_CASE("projection linearity diagnostic is near 1 for a linear model") {
  const int n = 2;
  const PilotSet pilot = glm_pilot(Eigen::MatrixXd::Identity(n, n), 20000, 700);
  const BoxCoxTransform t = fit_boxcox(pilot);
  const LinearProjection proj = learn_projection(pilot, t, 0);
  CHECK(projection_linearity(pilot, proj, 0) > 0.99);
}
