#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "abcpass/rng.hpp"

namespace abcpass {

enum class Ploidy { kHaploid, kDiploid };

/// When and how deeply the population is sampled. Generations are strictly
/// increasing; the first one anchors the trajectory start.
struct SamplingPlan {
  struct Timepoint {
    int generation = 0;
    int sample_size = 1;
  };
  std::vector<Timepoint> points;

  std::size_t size() const { return points.size(); }
  void validate() const;
};

/// Observed counts of the focal allele at each timepoint of the plan.
struct LocusTrajectory {
  SamplingPlan plan;
  std::vector<int> counts;

  double frequency(std::size_t t) const {
    return double(counts[t]) / double(plan.points[t].sample_size);
  }
};

/// Wright-Fisher trajectory with fitnesses 1 and 1+s: each generation applies
/// deterministic selection p* = p(1+s) / (1 + p s), then binomial resampling
/// of Ne (haploid) or 2 Ne (diploid) gene copies. Absorption at 0 or 1 is
/// permanent. Observations are binomial samples of the plan's sizes.
LocusTrajectory wf_simulate_locus(std::uint64_t ne, double s, double init_freq,
                                  const SamplingPlan& plan, RandomSeed seed,
                                  Ploidy ploidy = Ploidy::kHaploid);

/// Standardized allele-frequency change between two samples x and y separated
/// by t generations, correcting for sample sizes n_x and n_y:
///   Fs  = (x - y)^2 / (z (1 - z)),  z = (x + y) / 2
///   Fs' = (1/t) * (Fs [1 - 1/(2 nh)] - 2/nh) / ((1 + Fs/4) [1 - 1/n_y])
/// with nh the harmonic mean of n_x and n_y. Requires z(1-z) > 0.
double fsprime_pair(double x, double y, int t, int n_x, int n_y);

/// Per-locus summary: Fs' sums over increasing and decreasing consecutive
/// pairs, plus the boosted terms (squares and cross product).
struct LocusStats {
  double fsi = 0.0;
  double fsd = 0.0;
  bool usable = false;  // at least one pair had a defined Fs

  std::array<double, 5> values() const {
    return {fsi, fsd, fsi * fsi, fsd * fsd, fsi * fsd};
  }
  static const std::vector<std::string>& names();
  static constexpr std::size_t kCount = 5;
};

/// Sums Fs' over consecutive pairs: increasing pairs (y > x) into fsi,
/// decreasing (y < x) into fsd; ties and pairs with z(1-z) = 0 are skipped.
LocusStats locus_stats(const LocusTrajectory& traj);

}  // namespace abcpass
