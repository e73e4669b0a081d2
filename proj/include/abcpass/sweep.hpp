#pragma once

#include <utility>
#include <vector>

#include "abcpass/calibration.hpp"
#include "abcpass/sampler.hpp"
#include "abcpass/validate.hpp"

namespace abcpass {

enum class Method { kAbcMcmc, kAbcPass };

std::string method_name(Method method);

/// Tolerance x proposal-width grid. Tolerances are quantile fractions of the
/// pilot distance distribution; widths are fractions of the prior range.
struct SweepGrid {
  std::vector<double> tolerances;
  std::vector<double> widths;
  std::size_t replicates = 1;
  std::size_t iterations = 0;
};

/// Analytic truth marginal per parameter, evaluated on the prior support.
struct TruthMarginals {
  std::vector<Density1D> per_param;
};

struct SweepCell {
  double tolerance_fraction = 0.0;
  double width_fraction = 0.0;
  std::vector<double> mean_l1;        // per parameter; NaN when every replicate failed
  std::vector<std::size_t> n_failed;  // replicates with zero accepted updates, per parameter
};

struct SweepResult {
  Method method = Method::kAbcPass;
  std::vector<SweepCell> cells;
  std::vector<double> min_l1;                            // per parameter
  std::vector<std::pair<double, double>> argmin;         // per parameter: (tolerance, width)
  std::vector<double> prior_baseline;                    // per parameter
  double min_mean_l1 = 0.0;                              // min over cells of the parameter mean
  std::pair<double, double> argmin_mean = {0.0, 0.0};
};

struct SweepSetup {
  const Simulator* model = nullptr;
  const ParameterSpace* space = nullptr;
  const PilotSet* pilot = nullptr;
  std::vector<LinearProjection> projections;  // abc-pass only
  std::vector<double> s_obs;
  ParameterVector start;
  double start_noise_sd = 0.0;  // per-replicate N(0, sd) jitter on the start, reflected inside
  double burn_in = 0.1;
  int bins = 100;
};

/// Runs replicate chains for every grid cell, scores each parameter's marginal
/// against its truth by binned L1, and reports per-cell means plus the
/// grid minimum. Cells where every replicate had zero accepted updates for a
/// parameter are excluded from that parameter's argmin.
SweepResult run_sweep(const SweepSetup& setup, Method method, const SweepGrid& grid,
                      const TruthMarginals& truth, RandomSeed seed, unsigned threads = 1);

}  // namespace abcpass
