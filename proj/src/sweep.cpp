#include "abcpass/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "abcpass/errors.hpp"
#include "abcpass/parallel.hpp"

namespace abcpass {

std::string method_name(Method method) {
  return method == Method::kAbcMcmc ? "abc-mcmc" : "abc-pass";
}

namespace {

double quantile_of_sorted(const std::vector<double>& sorted, double fraction) {
  contract_check(!sorted.empty(), "sweep: empty distance table");
  const double pos = fraction * double(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double w = pos - double(lo);
  return (1.0 - w) * sorted[lo] + w * sorted[hi];
}

// per-parameter histogram accumulated while the chain streams by
struct HistogramSink {
  const ParameterSpace* space;
  int bins;
  std::size_t skip;  // burn-in iterations
  std::vector<std::vector<double>> counts;  // per param
  std::size_t kept = 0;

  HistogramSink(const ParameterSpace& s, int b, std::size_t skip_iters)
      : space(&s), bins(b), skip(skip_iters),
        counts(s.size(), std::vector<double>(static_cast<std::size_t>(b), 0.0)) {}

  void operator()(std::size_t iter, std::span<const double> theta) {
    if (iter < skip) return;
    ++kept;
    for (std::size_t i = 0; i < theta.size(); ++i) {
      const double lo = space->lower(i);
      const double hi = space->upper(i);
      auto k = static_cast<long>((theta[i] - lo) / (hi - lo) * bins);
      k = std::clamp<long>(k, 0, bins - 1);
      counts[i][static_cast<std::size_t>(k)] += 1.0;
    }
  }

  double l1_against(std::size_t param, const Eigen::VectorXd& truth_mass) const {
    double l1 = 0.0;
    for (int k = 0; k < bins; ++k) {
      l1 += std::abs(counts[param][static_cast<std::size_t>(k)] / double(kept) -
                     truth_mass[k]);
    }
    return l1;
  }
};

}  // namespace

SweepResult run_sweep(const SweepSetup& setup, Method method, const SweepGrid& grid,
                      const TruthMarginals& truth, RandomSeed seed, unsigned threads) {
  const auto& space = *setup.space;
  const auto& pilot = *setup.pilot;
  const std::size_t n = space.size();
  contract_check(!grid.tolerances.empty() && !grid.widths.empty() && grid.replicates >= 1,
                 "sweep: grid must be nonempty with >= 1 replicates");
  contract_check(truth.per_param.size() == n, "sweep: one truth marginal per parameter");
  contract_check(setup.start.size() == n, "sweep: start length mismatch");

  // truth bin masses and prior baselines, once per parameter
  std::vector<Eigen::VectorXd> truth_mass(n);
  SweepResult result;
  result.method = method;
  result.prior_baseline.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    truth_mass[i] =
        bin_density(truth.per_param[i], space.lower(i), space.upper(i), setup.bins).mass;
    result.prior_baseline[i] =
        (Eigen::VectorXd::Constant(setup.bins, 1.0 / setup.bins) - truth_mass[i])
            .cwiseAbs()
            .sum();
  }

  // pilot-derived standardizations and sorted distance tables
  const auto rows = pilot.stats.rows();
  std::vector<double> stat_sd;
  std::vector<double> mcmc_distances;
  std::vector<std::vector<double>> pass_distances(n);
  std::vector<double> tau_obs(n, 0.0);
  if (method == Method::kAbcMcmc) {
    const auto m = pilot.stats.cols();
    stat_sd.resize(static_cast<std::size_t>(m));
    for (Eigen::Index j = 0; j < m; ++j) {
      const double mean = pilot.stats.col(j).mean();
      const double sd =
          std::sqrt((pilot.stats.col(j).array() - mean).square().sum() / double(rows - 1));
      contract_check(sd > 0.0, "sweep: constant pilot statistic");
      stat_sd[static_cast<std::size_t>(j)] = sd;
    }
    mcmc_distances.resize(static_cast<std::size_t>(rows));
    std::vector<double> row(static_cast<std::size_t>(m));
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (std::size_t j = 0; j < row.size(); ++j) {
        row[j] = pilot.stats(r, static_cast<Eigen::Index>(j));
      }
      mcmc_distances[static_cast<std::size_t>(r)] =
          standardized_distance(row, setup.s_obs, stat_sd);
    }
    std::sort(mcmc_distances.begin(), mcmc_distances.end());
  } else {
    contract_check(setup.projections.size() == n, "sweep: one projection per parameter");
    std::vector<double> row(static_cast<std::size_t>(pilot.stats.cols()));
    for (std::size_t i = 0; i < n; ++i) {
      const auto& proj = setup.projections[i];
      tau_obs[i] = proj.project(setup.s_obs);
      auto& table = pass_distances[i];
      table.resize(static_cast<std::size_t>(rows));
      for (Eigen::Index r = 0; r < rows; ++r) {
        for (std::size_t j = 0; j < row.size(); ++j) {
          row[j] = pilot.stats(r, static_cast<Eigen::Index>(j));
        }
        table[static_cast<std::size_t>(r)] = std::abs(proj.project(row) - tau_obs[i]) / proj.tau_sd;
      }
      std::sort(table.begin(), table.end());
    }
  }

  const std::size_t n_cells = grid.tolerances.size() * grid.widths.size();
  const std::size_t n_tasks = n_cells * grid.replicates;
  const auto skip = static_cast<std::size_t>(setup.burn_in * double(grid.iterations));

  // task results: L1 per parameter, NaN = failed (no accepted updates)
  std::vector<std::vector<double>> task_l1(n_tasks, std::vector<double>(n, 0.0));

  parallel_for(n_tasks, threads, [&](std::size_t task) {
    const std::size_t cell = task / grid.replicates;
    const double tol_frac = grid.tolerances[cell / grid.widths.size()];
    const double width_frac = grid.widths[cell % grid.widths.size()];
    const RandomSeed task_seed = derive_seed(seed, task);

    ProposalKernel kernel;
    kernel.widths.resize(n);
    for (std::size_t i = 0; i < n; ++i) kernel.widths[i] = width_frac * space.range(i);

    ParameterVector start = setup.start;
    if (setup.start_noise_sd > 0.0) {
      Engine jitter = make_engine(derive_seed(task_seed, 0x5747));
      std::normal_distribution<double> noise(0.0, setup.start_noise_sd);
      for (std::size_t i = 0; i < n; ++i) {
        start[i] = reflect_into(start[i] + noise(jitter), space.lower(i), space.upper(i));
      }
    }

    HistogramSink sink(space, setup.bins, skip);
    ChainDiagnostics diagnostics;
    if (method == Method::kAbcMcmc) {
      AbcMcmcOptions options;
      options.model = setup.model;
      options.space = setup.space;
      options.observed_stats = setup.s_obs;
      options.stat_sd = stat_sd;
      options.tolerance = quantile_of_sorted(mcmc_distances, tol_frac);
      options.kernel = kernel;
      options.start = start;
      options.iterations = grid.iterations;
      options.seed = task_seed;
      options.store_records = false;
      diagnostics = run_abc_mcmc(options, std::ref(sink)).diagnostics;
    } else {
      AbcPassOptions options;
      options.model = setup.model;
      options.space = setup.space;
      options.projections = setup.projections;
      options.tau_obs = tau_obs;
      options.tolerances.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        options.tolerances[i] = quantile_of_sorted(pass_distances[i], tol_frac);
      }
      options.kernel = kernel;
      options.schedule = UpdateSchedule::uniform(n);
      options.start = start;
      options.iterations = grid.iterations;
      options.seed = task_seed;
      options.store_records = false;
      diagnostics = run_abc_pass(options, std::ref(sink)).diagnostics;
    }

    for (std::size_t i = 0; i < n; ++i) {
      task_l1[task][i] = diagnostics.per_param[i].mh_accepts == 0
                             ? std::numeric_limits<double>::quiet_NaN()
                             : sink.l1_against(i, truth_mass[i]);
    }
  });

  // aggregate per cell
  result.cells.resize(n_cells);
  result.min_l1.assign(n, std::numeric_limits<double>::infinity());
  result.argmin.assign(n, {0.0, 0.0});
  result.min_mean_l1 = std::numeric_limits<double>::infinity();
  for (std::size_t cell = 0; cell < n_cells; ++cell) {
    auto& out = result.cells[cell];
    out.tolerance_fraction = grid.tolerances[cell / grid.widths.size()];
    out.width_fraction = grid.widths[cell % grid.widths.size()];
    out.mean_l1.assign(n, std::numeric_limits<double>::quiet_NaN());
    out.n_failed.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      double sum = 0.0;
      std::size_t ok = 0;
      for (std::size_t rep = 0; rep < grid.replicates; ++rep) {
        const double l1 = task_l1[cell * grid.replicates + rep][i];
        if (std::isnan(l1)) {
          ++out.n_failed[i];
        } else {
          sum += l1;
          ++ok;
        }
      }
      if (ok > 0) {
        out.mean_l1[i] = sum / double(ok);
        if (out.mean_l1[i] < result.min_l1[i]) {
          result.min_l1[i] = out.mean_l1[i];
          result.argmin[i] = {out.tolerance_fraction, out.width_fraction};
        }
      }
    }
    // cell mean over parameters, for the single-number dimensionality curves
    if (std::none_of(out.mean_l1.begin(), out.mean_l1.end(),
                     [](double v) { return std::isnan(v); })) {
      double mean = 0.0;
      for (const double v : out.mean_l1) mean += v;
      mean /= double(n);
      if (mean < result.min_mean_l1) {
        result.min_mean_l1 = mean;
        result.argmin_mean = {out.tolerance_fraction, out.width_fraction};
      }
    }
  }
  return result;
}

}  // namespace abcpass
