#include "abcpass/wf.hpp"

#include <cmath>
#include <string>

#include "abcpass/errors.hpp"

namespace abcpass {

void SamplingPlan::validate() const {
  contract_check(points.size() >= 2, "sampling plan: need at least two timepoints");
  contract_check(points.front().generation == 0, "sampling plan: must start at generation 0");
  for (std::size_t t = 0; t < points.size(); ++t) {
    contract_check(points[t].generation >= 0 && points[t].sample_size >= 1,
                   "sampling plan: bad timepoint " + std::to_string(t));
    if (t > 0) {
      contract_check(points[t].generation > points[t - 1].generation,
                     "sampling plan: generations must be strictly increasing");
    }
  }
}

LocusTrajectory wf_simulate_locus(std::uint64_t ne, double s, double init_freq,
                                  const SamplingPlan& plan, RandomSeed seed, Ploidy ploidy) {
  plan.validate();
  contract_check(ne >= 2, "wf: Ne must be >= 2");
  contract_check(s > -1.0, "wf: s must be > -1");
  contract_check(init_freq > 0.0 && init_freq < 1.0, "wf: init_freq must lie in (0, 1)");

  const auto copies = ploidy == Ploidy::kHaploid ? ne : 2 * ne;
  Engine engine = make_engine(seed);

  LocusTrajectory traj;
  traj.plan = plan;
  traj.counts.resize(plan.size());

  double p = init_freq;
  int generation = plan.points.front().generation;
  for (std::size_t t = 0; t < plan.size(); ++t) {
    for (; generation < plan.points[t].generation; ++generation) {
      if (p <= 0.0 || p >= 1.0) break;  // absorbed; stays absorbed
      const double p_sel = p * (1.0 + s) / (1.0 + p * s);
      const auto k = std::binomial_distribution<std::uint64_t>(copies, p_sel)(engine);
      p = double(k) / double(copies);
    }
    generation = plan.points[t].generation;
    const int size = plan.points[t].sample_size;
    traj.counts[t] =
        p <= 0.0 ? 0 : (p >= 1.0 ? size : std::binomial_distribution<int>(size, p)(engine));
  }
  return traj;
}

double fsprime_pair(double x, double y, int t, int n_x, int n_y) {
  contract_check(x >= 0.0 && x <= 1.0 && y >= 0.0 && y <= 1.0,
                 "fsprime: frequencies must lie in [0, 1]");
  contract_check(t >= 1, "fsprime: generations between samples must be >= 1");
  contract_check(n_x >= 2 && n_y >= 2, "fsprime: sample sizes must be >= 2");
  const double z = 0.5 * (x + y);
  contract_check(z > 0.0 && z < 1.0, "fsprime: undefined when both samples are fixed");

  const double fs = (x - y) * (x - y) / (z * (1.0 - z));
  const double nh = 2.0 / (1.0 / n_x + 1.0 / n_y);  // harmonic mean
  return (fs * (1.0 - 1.0 / (2.0 * nh)) - 2.0 / nh) /
         (t * (1.0 + fs / 4.0) * (1.0 - 1.0 / double(n_y)));
}

const std::vector<std::string>& LocusStats::names() {
  static const std::vector<std::string> kNames = {"fsi", "fsd", "fsi_sq", "fsd_sq", "fsi_fsd"};
  return kNames;
}

LocusStats locus_stats(const LocusTrajectory& traj) {
  contract_check(traj.counts.size() == traj.plan.size() && traj.plan.size() >= 2,
                 "locus_stats: need >= 2 timepoints with counts");
  LocusStats stats;
  for (std::size_t t = 0; t + 1 < traj.plan.size(); ++t) {
    const double x = traj.frequency(t);
    const double y = traj.frequency(t + 1);
    const double z = 0.5 * (x + y);
    if (z <= 0.0 || z >= 1.0) continue;  // Fs undefined; skip the pair
    if (x == y) continue;                // ties contribute to neither sum
    const double fs = fsprime_pair(x, y,
                                   traj.plan.points[t + 1].generation -
                                       traj.plan.points[t].generation,
                                   traj.plan.points[t].sample_size,
                                   traj.plan.points[t + 1].sample_size);
    stats.usable = true;
    if (y > x) {
      stats.fsi += fs;
    } else {
      stats.fsd += fs;
    }
  }
  return stats;
}

}  // namespace abcpass
