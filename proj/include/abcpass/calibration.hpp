#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

#include "abcpass/model.hpp"
#include "abcpass/sampler.hpp"
#include "abcpass/statlearn.hpp"

namespace abcpass {

/// Tolerances, proposal widths and the chain start derived from the retained
/// fraction of pilot simulations.
struct CalibrationResult {
  std::vector<double> tolerance;  // per parameter, standardized distance units
  std::vector<double> width;      // per parameter, proposal kernel width
  ParameterVector start;
  std::vector<std::vector<std::size_t>> retained_rows;  // per parameter
  std::vector<std::uint8_t> width_fallback;             // retained SD was zero
  double global_tolerance = 0.0;                        // abc-mcmc runs only

  ProposalKernel kernel() const { return ProposalKernel{width}; }
};

/// Per-parameter calibration from an explicit distance matrix (rows x params).
/// Parameters may lack a distance column (hyper-parameters, marked by a
/// negative column index): they are calibrated from the rows retained for the
/// parameters that depend on them, with a 10%-of-prior-range width fallback.
///
/// For each parameter with distances: retain the ceil(retain * P) smallest;
/// tolerance = largest retained distance; width = 0.5 * SD of the retained
/// parameter values; start = the row minimizing the summed distances.
CalibrationResult calibrate_from_distances(const Eigen::MatrixXd& theta,
                                           const Eigen::MatrixXd& distances,
                                           const std::vector<int>& distance_column,
                                           const ParameterSpace& space, double retain);

/// ABC-PaSS calibration: distances are |tau_i(row) - tau_i(s_obs)| / sd(tau_i).
CalibrationResult calibrate(const PilotSet& pilot,
                            const std::vector<LinearProjection>& projections,
                            std::span<const double> s_obs, const ParameterSpace& space,
                            double retain);

/// ABC-MCMC calibration: one retained set from the standardized full-vector
/// statistic distance; widths for every parameter come from that single set.
/// Also returns the per-statistic pilot SDs used for standardization.
struct GlobalCalibration {
  CalibrationResult result;
  std::vector<double> stat_sd;
};
GlobalCalibration calibrate_global(const PilotSet& pilot, std::span<const double> s_obs,
                                   const ParameterSpace& space, double retain);

/// Runs a short probe from calibration.start and returns per-parameter
/// accepted-update counts. Used by warm_start_retry.
using ProbeRunner =
    std::function<std::vector<std::uint64_t>(const ParameterVector& start, RandomSeed seed)>;

/// Repairs the chain start: probe for probe_iters iterations; every parameter
/// with zero accepted updates gets its start resampled from its retained pilot
/// values; repeat until all parameters have accepted at least once, up to 50
/// rounds, then fail with a per-parameter acceptance report.
ParameterVector warm_start_retry(const ProbeRunner& probe, const CalibrationResult& calibration,
                                 const Eigen::MatrixXd& pilot_theta, RandomSeed seed,
                                 std::uint64_t* rounds_out = nullptr);

}  // namespace abcpass
