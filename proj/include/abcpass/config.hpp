#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "abcpass/model.hpp"
#include "abcpass/wf_hier.hpp"

namespace abcpass {

struct ParameterConfig {
  std::string name;
  std::string prior = "uniform";  // uniform | log10-uniform
  double lower = 0.0;
  double upper = 1.0;
  int count = 1;  // > 1 expands to name_1 .. name_count
};

struct ModelSection {
  std::string kind;  // normal | glm | binomial | wf
  int sample_size = 10;      // normal
  int dimension = 2;         // glm
  int trials = 20;           // binomial
  std::string trajectories;  // wf: path to the trajectory CSV
  int window_last = 0;       // wf: keep only the last k timepoints (0 = all)
  std::string ploidy = "haploid";
};

struct ObservedSection {
  std::vector<double> values;        // explicit observed statistics
  std::vector<double> truth;         // or: generate from these natural-scale parameters
  std::uint64_t seed = 1;            // seed for the generated observation
};

struct DfeSection {
  bool enabled = false;
  double chi_lower = -0.2;
  double chi_upper = 1.0;
  double log10_sigma_lower = -2.5;
  double log10_sigma_upper = -0.5;
  double s_max = 1.0;
  double hyper_weight = 5.0;  // schedule weight multiplier for chi and sigma
};

struct McmcSection {
  std::uint64_t iterations_per_parameter = 100000;
  std::uint64_t iterations = 0;  // overrides iterations_per_parameter * n when set
  double burn_in = 0.1;
  std::uint64_t probe_iterations = 1000;
  std::vector<double> schedule_weights;  // optional, one per parameter
};

struct SweepSection {
  std::vector<double> tolerances = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  std::vector<double> widths = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  std::uint64_t replicates = 50;
  std::string projection_source = "learned";  // learned | analytic (glm only)
  std::string start = "calibrated";           // calibrated | truth
  double start_noise_sd = 0.0;                // per-replicate jitter around the start
};

struct FixtureSection {  // `simulate` subcommand (wf trajectory generation)
  double log10_ne = 3.0;
  std::vector<double> s;     // per locus; empty = draw from the s prior
  int n_loci = 20;
  int n_timepoints = 10;
  int generations_between = 13;
  int sample_size = 1000;
  double init_freq_lower = 0.05;
  double init_freq_upper = 0.5;
};

struct RunConfig {
  ModelSection model;
  std::vector<ParameterConfig> parameters;
  std::string method = "abc-pass";  // abc-pass | abc-mcmc
  std::uint64_t pilot_size = 10000;
  double retain = 0.01;
  double ridge = 1e-8;
  McmcSection mcmc;
  ObservedSection observed;
  DfeSection dfe;
  SweepSection sweep;
  FixtureSection fixture;
  std::uint64_t seed = 1;
  std::string output = "out";

  /// Expanded parameter space for toy models (wf builds its own from data).
  ParameterSpace build_space() const;
  WfPriors wf_priors() const;
  Ploidy ploidy() const;
};

/// Parses and validates a config document. Unknown keys anywhere are rejected.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::string& path);

/// Canonical JSON echo of the config (defaults filled in).
nlohmann::json config_to_json(const RunConfig& config);

/// Stable hash of (canonical config, seed) used to stamp artifacts.
std::string config_hash(const RunConfig& config);

/// The full schema with defaults, as printed by the config-schema subcommand.
std::string config_schema_text();

}  // namespace abcpass
