#pragma once

#include <filesystem>
#include <memory>
#include <optional>

#include "abcpass/config.hpp"
#include "abcpass/io.hpp"
#include "abcpass/parallel.hpp"
#include "abcpass/sweep.hpp"

namespace abcpass {

struct PipelineOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output;
  unsigned threads = 0;  // 0 = hardware concurrency
};

RunConfig effective_config(RunConfig config, const PipelineOverrides& overrides);

/// Builds the configured toy simulator (normal | glm | binomial).
std::unique_ptr<Simulator> make_toy_model(const RunConfig& config);

/// Observed statistics: explicit values, or one simulation at observed.truth.
std::vector<double> observed_statistics(const RunConfig& config, const Simulator& model);

/// Analytic truth marginals for the configured toy model and observation.
TruthMarginals toy_truth_marginals(const RunConfig& config, const ParameterSpace& space,
                                   std::span<const double> s_obs);

/// Stage artifacts on disk, reused when their config hash matches.
struct StagePaths {
  std::filesystem::path dir;
  std::filesystem::path pilot() const { return dir / "pilot.csv"; }
  std::filesystem::path pilot_meta() const { return dir / "pilot.meta.json"; }
  std::filesystem::path calibration_pilot() const { return dir / "calibration_pilot.csv"; }
  std::filesystem::path calibration_pilot_meta() const {
    return dir / "calibration_pilot.meta.json";
  }
  std::filesystem::path projections() const { return dir / "projections.json"; }
  std::filesystem::path calibration() const { return dir / "calibration.json"; }
  std::filesystem::path chain() const { return dir / "chain.csv"; }
  std::filesystem::path diagnostics() const { return dir / "diagnostics.json"; }
  std::filesystem::path sweep_csv() const { return dir / "sweep.csv"; }
  std::filesystem::path sweep_summary() const { return dir / "sweep_summary.json"; }
  std::filesystem::path significance() const { return dir / "significance.csv"; }
  std::filesystem::path report() const { return dir / "summary.csv"; }
  std::filesystem::path trajectories() const { return dir / "trajectories.csv"; }
};

enum class PipelineStage { kPilot, kLearn, kCalibrate, kRun };

/// pilot -> learn projections -> calibrate -> warm start -> sampler run.
/// Every stage is persisted and reused on rerun when the config hash matches;
/// with a total iteration count of zero the run stops after calibration.
/// Returns the chain (empty when the run stage was skipped).
Chain pipeline_run(const RunConfig& config, const PipelineOverrides& overrides,
                   PipelineStage until = PipelineStage::kRun);

/// The full hierarchical Wright-Fisher pipeline: ingest, projection pilot,
/// calibration pilot, calibrate, warm start, joint chain, significance report.
struct WfRunResult {
  WfDataset dataset;
  WfLayout layout;
  Chain chain;
};
WfRunResult wf_infer(const RunConfig& config, const PipelineOverrides& overrides);

/// Tolerance x width grids for both methods; writes sweep.csv + summary JSON.
void sweep_pipeline(const RunConfig& config, const PipelineOverrides& overrides);

/// Writes a synthetic Wright-Fisher trajectory CSV from the fixture block.
/// Returns the true (log10Ne, s_1..L) used, in fixture order.
std::vector<double> simulate_fixture(const RunConfig& config, const PipelineOverrides& overrides);

/// Posterior summary table for a persisted chain; adds P(Ne s > 10) per locus
/// when the chain has the hierarchical WF layout.
void report_pipeline(const std::filesystem::path& chain_csv, double burn_in,
                     const std::filesystem::path& out_csv);

}  // namespace abcpass
