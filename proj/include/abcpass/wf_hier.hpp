#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "abcpass/model.hpp"
#include "abcpass/sampler.hpp"
#include "abcpass/statlearn.hpp"
#include "abcpass/wf.hpp"

namespace abcpass {

struct TrajectoryPoint {
  int generation = 0;
  int sample_size = 1;
  int count = 0;
};

struct RawLocus {
  std::string id;
  long long position = 0;
  std::vector<TrajectoryPoint> points;
};

/// Loci that passed the ingestion frequency filter, as read from disk.
struct TrajectoryDataset {
  std::vector<RawLocus> loci;
  std::size_t dropped = 0;
};

/// One locus prepared for inference: trajectory restricted to the timepoints
/// from the first segregating one onward (rebased to generation 0), oriented
/// so the focal allele is the minor allele at that first timepoint.
struct ObservedLocus {
  std::string id;
  long long position = 0;
  SamplingPlan plan;
  std::vector<int> counts;
  double init_freq = 0.0;
  LocusStats stats;
  bool flipped = false;
};

struct WfDataset {
  std::vector<ObservedLocus> loci;
  std::size_t n_loci() const { return loci.size(); }
};

WfDataset build_wf_dataset(const TrajectoryDataset& raw);

/// Priors of the hierarchical model, in stored units (log10 where noted).
struct WfPriors {
  double log10_ne_lower = 1.5;
  double log10_ne_upper = 4.5;
  double s_lower = 0.0;
  double s_upper = 1.0;
  bool dfe = false;
  double chi_lower = -0.2;
  double chi_upper = 1.0;
  double log10_sigma_lower = -2.5;
  double log10_sigma_upper = -0.5;
  double s_max = 1.0;  // GPD truncation bound
};

/// Index layout of the hierarchical state vector:
/// (log10Ne, [chi, log10sigma,] s_1 .. s_L).
struct WfLayout {
  std::size_t n_loci = 0;
  bool dfe = false;

  std::size_t ne_index() const { return 0; }
  std::size_t chi_index() const { return 1; }
  std::size_t sigma_index() const { return 2; }
  std::size_t s_index(std::size_t locus) const { return (dfe ? 3 : 1) + locus; }
  std::size_t s_offset() const { return dfe ? 3 : 1; }
  bool is_s(std::size_t param) const { return param >= s_offset(); }
  std::size_t size() const { return (dfe ? 3 : 1) + n_loci; }
};

ParameterSpace make_wf_space(const WfPriors& priors, std::size_t n_loci);

/// Single-locus prior-predictive simulator for learning the projections:
/// theta = (Ne, s); each simulation picks one observed locus (seed-derived)
/// and reproduces its sampling plan and initial frequency.
class WfPilotSimulator : public Simulator {
 public:
  using Simulator::simulate;
  WfPilotSimulator(const WfDataset& dataset, Ploidy ploidy);
  std::size_t stat_count() const override { return LocusStats::kCount; }
  std::vector<std::string> stat_names() const override { return LocusStats::names(); }
  void simulate(std::span<const double> theta_natural, RandomSeed seed,
                std::span<double> out) const override;

 private:
  const WfDataset* dataset_;
  Ploidy ploidy_;
};

/// Full-model simulator for the calibration pilot: theta follows WfLayout and
/// the statistics are the L concatenated per-locus blocks.
class WfFullSimulator : public Simulator {
 public:
  using Simulator::simulate;
  WfFullSimulator(const WfDataset& dataset, WfLayout layout, Ploidy ploidy);
  std::size_t stat_count() const override { return LocusStats::kCount * dataset_->n_loci(); }
  std::vector<std::string> stat_names() const override;
  void simulate(std::span<const double> theta_natural, RandomSeed seed,
                std::span<double> out) const override;

 private:
  const WfDataset* dataset_;
  WfLayout layout_;
  Ploidy ploidy_;
};

struct WfChainOptions {
  WfLayout layout;
  LinearProjection proj_s;
  LinearProjection proj_ne;
  std::vector<double> tau_s_obs;  // per locus
  double tau_ne_obs = 0.0;        // summed over loci
  std::vector<double> tau_s_sd;   // per-locus standardization of tau_s distances
  double tau_ne_sd = 1.0;
  std::vector<double> delta_s;    // per locus, standardized units
  double delta_ne = 0.0;
  ProposalKernel kernel;
  UpdateSchedule schedule = UpdateSchedule::uniform(1);
  ParameterVector start;
  std::size_t iterations = 0;
  RandomSeed seed = 0;
  Ploidy ploidy = Ploidy::kHaploid;
  unsigned threads = 1;  // locus simulations inside one Ne update
  bool store_records = true;
};

/// The three component updates of the hierarchical sampler. Each changes at
/// most its own component: s updates simulate the one locus, Ne updates
/// simulate all loci, hyper updates are analytic (no simulation).
class WfUpdater {
 public:
  WfUpdater(const ParameterSpace& space, const WfDataset& dataset, const WfChainOptions& options);

  bool s_update(ParameterVector& theta, std::size_t locus, Engine& engine);
  bool ne_update(ParameterVector& theta, Engine& engine);
  bool hyper_update(ParameterVector& theta, std::size_t hyper_index, Engine& engine);

  /// Dispatches on the parameter index per the layout.
  bool update(ParameterVector& theta, std::size_t param, Engine& engine);

  ChainDiagnostics& diagnostics() { return diagnostics_; }
  const WfLayout& layout() const { return options_->layout; }

 private:
  const ParameterSpace* space_;
  const WfDataset* dataset_;
  const WfChainOptions* options_;
  ChainDiagnostics diagnostics_;
  ProposalDiagnostics proposal_diagnostics_;
  std::vector<double> stat_buffer_;
  std::vector<double> tau_buffer_;
};

Chain run_wf_chain(const ParameterSpace& space, const WfDataset& dataset,
                   const WfChainOptions& options, const RecordSink& sink = nullptr);

/// Fraction of post-burn-in draws with Ne * s_l > threshold, per locus.
struct SignificanceEntry {
  std::string id;
  long long position = 0;
  double probability = 0.0;
  bool significant = false;
};
std::vector<SignificanceEntry> significance(const Chain& chain, const WfDataset& dataset,
                                            const WfLayout& layout, double burn_in_fraction,
                                            double threshold = 10.0, double min_prob = 0.95);

}  // namespace abcpass
