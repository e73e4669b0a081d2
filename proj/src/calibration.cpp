#include "abcpass/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "abcpass/errors.hpp"

namespace abcpass {

namespace {

// sample SD of the retained parameter values; exactly 0 when they are all
// equal (or fewer than two), so the width fallback triggers reliably
double sample_sd(const Eigen::MatrixXd& theta, const std::vector<std::size_t>& rows,
                 std::size_t col) {
  if (rows.size() < 2) return 0.0;
  double mean = 0.0;
  double min_v = std::numeric_limits<double>::infinity();
  double max_v = -std::numeric_limits<double>::infinity();
  for (const auto r : rows) {
    const double v = theta(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(col));
    mean += v;
    min_v = std::min(min_v, v);
    max_v = std::max(max_v, v);
  }
  if (min_v == max_v) return 0.0;
  mean /= double(rows.size());
  double ss = 0.0;
  for (const auto r : rows) {
    const double d = theta(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(col)) - mean;
    ss += d * d;
  }
  return std::sqrt(ss / double(rows.size() - 1));
}

}  // namespace

CalibrationResult calibrate_from_distances(const Eigen::MatrixXd& theta,
                                           const Eigen::MatrixXd& distances,
                                           const std::vector<int>& distance_column,
                                           const ParameterSpace& space, double retain) {
  const auto rows = theta.rows();
  const auto n = space.size();
  contract_check(rows > 0, "calibrate: pilot is empty");
  contract_check(retain > 0.0 && retain <= 1.0, "calibrate: retain fraction must be in (0, 1]");
  contract_check(static_cast<std::size_t>(theta.cols()) == n &&
                     distance_column.size() == n && distances.rows() == rows,
                 "calibrate: dimension mismatch");

  const auto keep = std::min<std::size_t>(
      static_cast<std::size_t>(rows),
      std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(retain * double(rows)))));

  CalibrationResult out;
  out.tolerance.assign(n, 0.0);
  out.width.assign(n, 0.0);
  out.retained_rows.resize(n);
  out.width_fallback.assign(n, 0);

  std::vector<std::size_t> order(static_cast<std::size_t>(rows));
  for (std::size_t i = 0; i < n; ++i) {
    const int dc = distance_column[i];
    if (dc < 0) continue;  // hyper-parameter, second pass
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const double da = distances(static_cast<Eigen::Index>(a), dc);
      const double db = distances(static_cast<Eigen::Index>(b), dc);
      return da != db ? da < db : a < b;
    });
    order.resize(keep);
    out.retained_rows[i] = order;
    out.tolerance[i] = distances(static_cast<Eigen::Index>(order.back()), dc);
    order.resize(static_cast<std::size_t>(rows));

    const double sd = sample_sd(theta, out.retained_rows[i], i);
    if (sd > 0.0) {
      out.width[i] = 0.5 * sd;
    } else {
      out.width[i] = 0.01 * space.range(i);
      out.width_fallback[i] = 1;
    }
  }

  // hyper-parameters: no simulation distance of their own; use the union of
  // the rows retained for the parameters that depend on them
  for (std::size_t i = 0; i < n; ++i) {
    if (distance_column[i] >= 0) continue;
    std::set<std::size_t> united;
    for (const std::size_t dep : space.dependents_of(i)) {
      united.insert(out.retained_rows[dep].begin(), out.retained_rows[dep].end());
    }
    out.retained_rows[i].assign(united.begin(), united.end());
    const double sd = sample_sd(theta, out.retained_rows[i], i);
    if (sd > 0.0) {
      out.width[i] = 0.5 * sd;
    } else {
      out.width[i] = 0.1 * space.range(i);
      out.width_fallback[i] = 1;
    }
  }

  // start: pilot row with the smallest summed standardized distance
  Eigen::Index best_row = 0;
  double best_sum = std::numeric_limits<double>::infinity();
  for (Eigen::Index r = 0; r < rows; ++r) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (distance_column[i] >= 0) sum += distances(r, distance_column[i]);
    }
    if (sum < best_sum) {
      best_sum = sum;
      best_row = r;
    }
  }
  out.start.assign(theta.row(best_row).begin(), theta.row(best_row).end());
  contract_check(space.prior_density(out.start) > 0.0,
                 "calibrate: start row has zero prior density");
  return out;
}

CalibrationResult calibrate(const PilotSet& pilot,
                            const std::vector<LinearProjection>& projections,
                            std::span<const double> s_obs, const ParameterSpace& space,
                            double retain) {
  const auto rows = pilot.stats.rows();
  const auto n = space.size();
  contract_check(projections.size() == n, "calibrate: one projection per parameter");
  contract_check(s_obs.size() == static_cast<std::size_t>(pilot.stats.cols()),
                 "calibrate: observed statistics length mismatch");

  Eigen::MatrixXd distances(rows, static_cast<Eigen::Index>(n));
  std::vector<int> distance_column(n);
  std::vector<double> row(static_cast<std::size_t>(pilot.stats.cols()));
  for (std::size_t i = 0; i < n; ++i) {
    distance_column[i] = static_cast<int>(i);
    const auto& proj = projections[i];
    const double tau_obs = proj.project(s_obs);
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (std::size_t j = 0; j < row.size(); ++j) row[j] = pilot.stats(r, static_cast<Eigen::Index>(j));
      distances(r, static_cast<Eigen::Index>(i)) = std::abs(proj.project(row) - tau_obs) / proj.tau_sd;
    }
  }
  return calibrate_from_distances(pilot.theta, distances, distance_column, space, retain);
}

GlobalCalibration calibrate_global(const PilotSet& pilot, std::span<const double> s_obs,
                                   const ParameterSpace& space, double retain) {
  const auto rows = pilot.stats.rows();
  const auto m = pilot.stats.cols();
  contract_check(s_obs.size() == static_cast<std::size_t>(m),
                 "calibrate: observed statistics length mismatch");

  GlobalCalibration out;
  out.stat_sd.resize(static_cast<std::size_t>(m));
  for (Eigen::Index j = 0; j < m; ++j) {
    const double mean = pilot.stats.col(j).mean();
    const double sd =
        std::sqrt((pilot.stats.col(j).array() - mean).square().sum() / double(rows - 1));
    if (sd <= 0.0) {
      throw RunError("calibrate: pilot statistic '" + pilot.stat_names[static_cast<std::size_t>(j)] +
                     "' is constant; cannot standardize distances");
    }
    out.stat_sd[static_cast<std::size_t>(j)] = sd;
  }

  Eigen::MatrixXd distances(rows, 1);
  std::vector<double> row(static_cast<std::size_t>(m));
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (std::size_t j = 0; j < row.size(); ++j) row[j] = pilot.stats(r, static_cast<Eigen::Index>(j));
    distances(r, 0) = standardized_distance(row, s_obs, out.stat_sd);
  }
  const std::vector<int> distance_column(space.size(), 0);
  out.result = calibrate_from_distances(pilot.theta, distances, distance_column, space, retain);
  out.result.global_tolerance = out.result.tolerance.empty() ? 0.0 : out.result.tolerance[0];
  return out;
}

ParameterVector warm_start_retry(const ProbeRunner& probe, const CalibrationResult& calibration,
                                 const Eigen::MatrixXd& pilot_theta, RandomSeed seed,
                                 std::uint64_t* rounds_out) {
  constexpr int kMaxRounds = 50;
  ParameterVector start = calibration.start;
  const std::size_t n = start.size();
  Engine engine = make_engine(derive_seed(seed, 0x77a7));

  std::vector<std::uint64_t> accepts;
  for (int round = 1; round <= kMaxRounds; ++round) {
    accepts = probe(start, derive_seed(seed, static_cast<std::uint64_t>(round)));
    contract_check(accepts.size() == n, "warm start: probe must report one count per parameter");
    bool all_updated = true;
    for (std::size_t i = 0; i < n; ++i) {
      if (accepts[i] > 0) continue;
      all_updated = false;
      const auto& rows = calibration.retained_rows[i];
      if (!rows.empty()) {
        const auto pick = std::uniform_int_distribution<std::size_t>(0, rows.size() - 1)(engine);
        start[i] = pilot_theta(static_cast<Eigen::Index>(rows[pick]), static_cast<Eigen::Index>(i));
      }
    }
    if (all_updated) {
      if (rounds_out != nullptr) *rounds_out = static_cast<std::uint64_t>(round);
      return start;
    }
  }

  std::string report = "warm start failed: parameters without accepted updates after 50 rounds:";
  for (std::size_t i = 0; i < n; ++i) {
    report += " [" + std::to_string(i) + "]=" + std::to_string(accepts[i]);
  }
  throw RunError(report);
}

}  // namespace abcpass
