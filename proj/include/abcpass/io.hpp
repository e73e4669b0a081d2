#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "abcpass/calibration.hpp"
#include "abcpass/sampler.hpp"
#include "abcpass/statlearn.hpp"
#include "abcpass/sweep.hpp"
#include "abcpass/wf_hier.hpp"

namespace abcpass {

/// Round-trippable double formatting used by every CSV writer.
std::string format_double(double value);

// chain CSV: header `iter,<param names...>`, one row per iteration
void write_chain_csv(const Chain& chain, const std::filesystem::path& path);
Chain read_chain_csv(const std::filesystem::path& path);

// pilot CSV: header `<param names...>,<stat names...>`
void write_pilot_csv(const PilotSet& pilot, const std::filesystem::path& path);
PilotSet read_pilot_csv(const std::filesystem::path& path, std::size_t n_params);

nlohmann::json projection_to_json(const LinearProjection& proj);
LinearProjection projection_from_json(const nlohmann::json& doc);
void write_projections_json(const std::vector<LinearProjection>& projections,
                            const std::string& stamp, const std::filesystem::path& path);
std::vector<LinearProjection> read_projections_json(const std::filesystem::path& path,
                                                    std::string* stamp = nullptr);

void write_calibration_json(const CalibrationResult& calibration,
                            const std::vector<double>& observed_stats,
                            const std::vector<double>& stat_sd, const std::string& stamp,
                            const std::filesystem::path& path);
CalibrationResult read_calibration_json(const std::filesystem::path& path,
                                        std::vector<double>* observed_stats = nullptr,
                                        std::vector<double>* stat_sd = nullptr,
                                        std::string* stamp = nullptr);

void write_diagnostics_json(const Chain& chain, const nlohmann::json& config_echo,
                            const nlohmann::json& extra, const std::filesystem::path& path);

/// Trajectory CSV: header `locus,position,generation,sample_size,count`.
/// Keeps loci with minor-allele frequency >= 0.02 at >= 2 timepoints (after
/// the optional restriction to the last window_last timepoints); reports
/// dropped counts. Malformed rows fail with their line number.
TrajectoryDataset ingest_trajectories(const std::filesystem::path& path, int window_last = 0);
void write_trajectories(const TrajectoryDataset& dataset, const std::filesystem::path& path);

// sweep CSV: `method,n_params,tolerance,width,param,mean_L1,n_failed`
void write_sweep_csv(const SweepResult& result, const std::vector<std::string>& param_names,
                     const std::filesystem::path& path, bool append = false);
nlohmann::json sweep_summary_json(const SweepResult& result,
                                  const std::vector<std::string>& param_names);

void write_significance_csv(const std::vector<SignificanceEntry>& entries,
                            const std::filesystem::path& path);

/// Posterior summary per parameter: median, mean, central 95% interval.
struct PosteriorSummary {
  std::string parameter;
  double median = 0.0;
  double mean = 0.0;
  double q025 = 0.0;
  double q975 = 0.0;
};
std::vector<PosteriorSummary> report_posteriors(const Chain& chain, double burn_in_fraction);
void write_report_csv(const std::vector<PosteriorSummary>& report,
                      const std::filesystem::path& path);

void write_json_file(const nlohmann::json& doc, const std::filesystem::path& path);
nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace abcpass
