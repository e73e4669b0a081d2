#include "abcpass/statlearn.hpp"

#include <cmath>
#include <limits>

#include "abcpass/errors.hpp"
#include "abcpass/parallel.hpp"

namespace abcpass {

PilotSet generate_pilot(const ParameterSpace& space, const Simulator& sim, std::size_t rows,
                        RandomSeed seed, unsigned threads) {
  contract_check(rows > 0, "pilot: need at least one row");
  PilotSet pilot;
  for (const auto& p : space.params()) pilot.param_names.push_back(p.name);
  pilot.stat_names = sim.stat_names();
  const auto n = space.size();
  const auto m = sim.stat_count();
  pilot.theta.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(n));
  pilot.stats.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(m));

  parallel_for(rows, threads, [&](std::size_t r) {
    Engine engine = make_engine(derive_seed(seed, r));
    const ParameterVector theta = space.prior_sample(engine);
    const ParameterVector nat = space.natural(theta);
    std::vector<double> stats(m);
    sim.simulate(nat, engine(), stats);
    for (std::size_t j = 0; j < n; ++j) pilot.theta(r, j) = theta[j];
    for (std::size_t j = 0; j < m; ++j) {
      if (!std::isfinite(stats[j])) {
        throw RunError("pilot row " + std::to_string(r) + ": non-finite statistic " +
                       pilot.stat_names[j]);
      }
      pilot.stats(r, j) = stats[j];
    }
  });
  return pilot;
}

double BoxCoxTransform::transform_one(std::size_t j, double x, std::uint64_t* clamp_count) const {
  const auto ji = static_cast<Eigen::Index>(j);
  if (!degenerate.empty() && degenerate[j]) return x - 1.0;
  double v = x + shift[ji];
  if (v <= 0.0) {
    v = floor[ji];
    if (clamp_count != nullptr) ++*clamp_count;
  }
  const double l = lambda[ji];
  if (l == 0.0) return std::log(v);
  if (l == 1.0) return v - 1.0;
  return (std::pow(v, l) - 1.0) / l;
}

void BoxCoxTransform::apply(std::span<const double> stats, std::span<double> out,
                            std::uint64_t* clamp_count) const {
  contract_check(stats.size() == stat_count() && out.size() == stat_count(),
                 "boxcox: statistic length mismatch");
  for (std::size_t j = 0; j < stats.size(); ++j) out[j] = transform_one(j, stats[j], clamp_count);
}

Eigen::MatrixXd BoxCoxTransform::apply_matrix(const Eigen::MatrixXd& stats) const {
  Eigen::MatrixXd out(stats.rows(), stats.cols());
  for (Eigen::Index r = 0; r < stats.rows(); ++r) {
    for (Eigen::Index j = 0; j < stats.cols(); ++j) {
      out(r, j) = transform_one(static_cast<std::size_t>(j), stats(r, j));
    }
  }
  return out;
}

BoxCoxTransform fit_boxcox(const PilotSet& pilot) {
  const auto rows = static_cast<Eigen::Index>(pilot.rows());
  const auto m = pilot.stats.cols();
  const auto n = pilot.theta.cols();
  contract_check(rows >= 50, "fit_boxcox: need at least 50 pilot rows");

  BoxCoxTransform t;
  t.lambda.resize(m);
  t.shift.resize(m);
  t.floor.resize(m);
  t.ref_min.resize(m);
  t.ref_max.resize(m);
  t.degenerate.assign(static_cast<std::size_t>(m), 0);

  // one regression design for all statistics and lambdas: [1, theta]
  Eigen::MatrixXd design(rows, n + 1);
  design.col(0).setOnes();
  design.rightCols(n) = pilot.theta;
  const Eigen::MatrixXd thin_q =
      Eigen::HouseholderQR<Eigen::MatrixXd>(design).householderQ() *
      Eigen::MatrixXd::Identity(rows, n + 1);

  for (Eigen::Index j = 0; j < m; ++j) {
    const Eigen::VectorXd x = pilot.stats.col(j);
    const double min_v = x.minCoeff();
    const double max_v = x.maxCoeff();
    t.ref_min[j] = min_v;
    t.ref_max[j] = max_v;
    if (max_v == min_v) {
      t.degenerate[static_cast<std::size_t>(j)] = 1;
      t.lambda[j] = 1.0;
      t.shift[j] = 0.0;
      t.floor[j] = min_v;
      continue;
    }
    const double eps = 1e-6 * (max_v - min_v);
    const double shift = std::max(0.0, eps - min_v);
    t.shift[j] = shift;
    const Eigen::VectorXd shifted = x.array() + shift;
    t.floor[j] = shifted.minCoeff();
    const double log_jacobian_base = shifted.array().log().sum();

    double best_lambda = 1.0;
    double best_loglik = -std::numeric_limits<double>::infinity();
    Eigen::VectorXd y(rows);
    for (int k = 0; k <= 100; ++k) {
      const double lambda = (k - 50) / 10.0;
      if (lambda == 0.0) {
        y = shifted.array().log();
      } else {
        y = (shifted.array().pow(lambda) - 1.0) / lambda;
      }
      const double rss =
          std::max(y.squaredNorm() - (thin_q.transpose() * y).squaredNorm(), 1e-300);
      const double loglik = -0.5 * rows * std::log(rss / rows) + (lambda - 1.0) * log_jacobian_base;
      if (loglik > best_loglik) {
        best_loglik = loglik;
        best_lambda = lambda;
      }
    }
    t.lambda[j] = best_lambda;
  }
  return t;
}

namespace {

// names of statistic pairs with |correlation| ~ 1, for the singularity error
std::string collinear_stat_names(const PilotSet& pilot, const Eigen::MatrixXd& transformed) {
  const auto m = transformed.cols();
  const Eigen::MatrixXd centered = transformed.rowwise() - transformed.colwise().mean();
  const Eigen::VectorXd norms = centered.colwise().norm();
  std::string out;
  for (Eigen::Index a = 0; a < m; ++a) {
    if (norms[a] == 0.0) {
      out += (out.empty() ? "" : ", ") + pilot.stat_names[static_cast<std::size_t>(a)] +
             " (constant)";
      continue;
    }
    for (Eigen::Index b = a + 1; b < m; ++b) {
      if (norms[b] == 0.0) continue;
      const double r = centered.col(a).dot(centered.col(b)) / (norms[a] * norms[b]);
      if (std::abs(r) > 0.9999) {
        out += (out.empty() ? "" : ", ") + pilot.stat_names[static_cast<std::size_t>(a)] + "~" +
               pilot.stat_names[static_cast<std::size_t>(b)];
      }
    }
  }
  return out.empty() ? "(none identified)" : out;
}

}  // namespace

LinearProjection learn_projection(const PilotSet& pilot, const BoxCoxTransform& transform,
                                  std::size_t target_param, double ridge) {
  const auto rows = static_cast<Eigen::Index>(pilot.rows());
  const auto m = pilot.stats.cols();
  contract_check(target_param < pilot.param_names.size(), "learn_projection: bad target index");
  contract_check(ridge >= 0.0, "learn_projection: ridge must be >= 0");

  const Eigen::MatrixXd y = transform.apply_matrix(pilot.stats);
  const Eigen::MatrixXd yc = y.rowwise() - y.colwise().mean();
  const Eigen::VectorXd theta = pilot.theta.col(static_cast<Eigen::Index>(target_param));
  const Eigen::VectorXd tc = theta.array() - theta.mean();

  const Eigen::MatrixXd cov_s = yc.transpose() * yc / double(rows - 1);
  const Eigen::VectorXd cov_st = yc.transpose() * tc / double(rows - 1);
  Eigen::MatrixXd a = cov_s;
  a.diagonal().array() += ridge * cov_s.trace() / double(m);

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  if (qr.rank() < m) {
    throw RunError("learn_projection(" + pilot.param_names[target_param] +
                   "): statistic covariance is singular; collinear statistics: " +
                   collinear_stat_names(pilot, y));
  }

  LinearProjection proj;
  proj.parameter = pilot.param_names[target_param];
  proj.beta = qr.solve(cov_st);
  proj.transform = transform;
  contract_check(proj.beta.allFinite(), "learn_projection: non-finite coefficients");

  const Eigen::VectorXd tau = y * proj.beta;
  proj.tau_mean = tau.mean();
  proj.tau_sd = std::sqrt((tau.array() - proj.tau_mean).square().sum() / double(rows - 1));
  contract_check(proj.tau_sd > 0.0,
                 "learn_projection(" + proj.parameter + "): SD(tau) is zero on the pilot set");
  return proj;
}

double LinearProjection::project(std::span<const double> stats,
                                 std::uint64_t* clamp_count) const {
  contract_check(stats.size() == static_cast<std::size_t>(beta.size()),
                 "project: statistic length mismatch");
  double tau = 0.0;
  if (transform.stat_count() == 0) {  // no transform: raw linear combination
    for (std::size_t j = 0; j < stats.size(); ++j) {
      tau += beta[static_cast<Eigen::Index>(j)] * stats[j];
    }
    return tau;
  }
  for (std::size_t j = 0; j < stats.size(); ++j) {
    tau += beta[static_cast<Eigen::Index>(j)] * transform.transform_one(j, stats[j], clamp_count);
  }
  return tau;
}

void set_tau_moments(LinearProjection& proj, const PilotSet& pilot) {
  const auto rows = static_cast<Eigen::Index>(pilot.rows());
  contract_check(rows >= 2, "set_tau_moments: need at least two pilot rows");
  Eigen::VectorXd tau(rows);
  std::vector<double> row(static_cast<std::size_t>(pilot.stats.cols()));
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      row[j] = pilot.stats(r, static_cast<Eigen::Index>(j));
    }
    tau[r] = proj.project(row);
  }
  proj.tau_mean = tau.mean();
  proj.tau_sd = std::sqrt((tau.array() - proj.tau_mean).square().sum() / double(rows - 1));
  contract_check(proj.tau_sd > 0.0, "set_tau_moments: SD(tau) is zero on the pilot set");
}

double projection_linearity(const PilotSet& pilot, const LinearProjection& proj,
                            std::size_t target_param, double holdout_fraction) {
  const auto rows = static_cast<Eigen::Index>(pilot.rows());
  const auto held = std::max<Eigen::Index>(2, static_cast<Eigen::Index>(
                                                  std::ceil(holdout_fraction * double(rows))));
  const auto start = rows - held;
  Eigen::VectorXd tau(held);
  std::vector<double> row(static_cast<std::size_t>(pilot.stats.cols()));
  for (Eigen::Index r = 0; r < held; ++r) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      row[j] = pilot.stats(start + r, static_cast<Eigen::Index>(j));
    }
    tau[r] = proj.project(row);
  }
  const Eigen::VectorXd th =
      pilot.theta.col(static_cast<Eigen::Index>(target_param)).segment(start, held);
  const Eigen::ArrayXd ta = tau.array() - tau.mean();
  const Eigen::ArrayXd tha = th.array() - th.mean();
  const double denom = std::sqrt(ta.square().sum() * tha.square().sum());
  return denom == 0.0 ? 0.0 : (ta * tha).sum() / denom;
}

}  // namespace abcpass
