#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "abcpass/model.hpp"
#include "abcpass/statlearn.hpp"

namespace abcpass {

/// Probabilities for choosing which parameter to update; all > 0, sum to 1.
class UpdateSchedule {
 public:
  static UpdateSchedule uniform(std::size_t n);
  explicit UpdateSchedule(std::vector<double> weights);

  std::size_t size() const { return probabilities_.size(); }
  const std::vector<double>& probabilities() const { return probabilities_; }
  std::size_t sample(Engine& engine) const;

 private:
  std::vector<double> probabilities_;
  std::vector<double> cumulative_;
};

struct ParamCounters {
  std::uint64_t proposals = 0;
  std::uint64_t simulations = 0;
  std::uint64_t distance_passes = 0;
  std::uint64_t mh_accepts = 0;
};

struct ChainDiagnostics {
  std::vector<ParamCounters> per_param;
  std::uint64_t total_simulations = 0;
  std::uint64_t sim_failures = 0;
  std::uint64_t uniform_fallback_proposals = 0;
  std::uint64_t boxcox_clamps = 0;
  std::uint64_t warm_start_rounds = 0;
};

/// One recorded theta per iteration, accepted or not, plus acceptance
/// bookkeeping. For every parameter: mh_accepts <= distance_passes <= proposals.
struct Chain {
  std::vector<std::string> param_names;
  std::size_t iterations = 0;
  std::vector<double> records;  // iterations x n, row-major; empty when streamed
  ChainDiagnostics diagnostics;
  RandomSeed seed = 0;
  std::string config_snapshot;

  std::size_t n_params() const { return param_names.size(); }
  std::span<const double> row(std::size_t t) const {
    return std::span<const double>(records).subspan(t * n_params(), n_params());
  }
  /// All post-burn-in values of one parameter.
  std::vector<double> column(std::size_t param, double burn_in_fraction = 0.0) const;
};

/// Called once per iteration with the recorded state; lets sweeps accumulate
/// histograms without materializing chains.
using RecordSink = std::function<void(std::size_t iter, std::span<const double> theta)>;

/// Euclidean distance of component-wise (a_j - b_j) / scale_j.
double standardized_distance(std::span<const double> a, std::span<const double> b,
                             std::span<const double> scale);

/// min(1, pi(theta') / pi(theta)); proposal kernels are symmetric by
/// reflection so the Hastings correction is exactly 1. The current state must
/// have positive prior density.
double mh_ratio(std::span<const double> theta, std::span<const double> proposed,
                const ParameterSpace& space);

struct AbcMcmcOptions {
  const Simulator* model = nullptr;
  const ParameterSpace* space = nullptr;
  std::vector<double> observed_stats;
  std::vector<double> stat_sd;  // per-statistic standardization, > 0
  double tolerance = 0.0;       // on the standardized full-vector distance
  ProposalKernel kernel;
  ParameterVector start;
  std::size_t iterations = 0;
  RandomSeed seed = 0;
  bool store_records = true;
};

/// Classic likelihood-free MCMC: every iteration perturbs all components,
/// simulates, rejects when the full-vector distance exceeds the tolerance,
/// then applies the Metropolis-Hastings accept step.
Chain run_abc_mcmc(const AbcMcmcOptions& options, const RecordSink& sink = nullptr);

struct AbcPassOptions {
  const Simulator* model = nullptr;
  const ParameterSpace* space = nullptr;
  std::vector<LinearProjection> projections;  // one per parameter, same order
  std::vector<double> tau_obs;                // projections applied to s_obs
  std::vector<double> tolerances;             // per parameter, standardized by tau_sd
  ProposalKernel kernel;
  UpdateSchedule schedule = UpdateSchedule::uniform(1);
  ParameterVector start;
  std::size_t iterations = 0;
  RandomSeed seed = 0;
  bool store_records = true;
};

/// Single-parameter-update MCMC accepted on the updated parameter's own
/// statistic: draw an index from the schedule, perturb that component only,
/// simulate, and test |tau_i - tau_i_obs| against the parameter's tolerance
/// before the Metropolis-Hastings step.
Chain run_abc_pass(const AbcPassOptions& options, const RecordSink& sink = nullptr);

}  // namespace abcpass
