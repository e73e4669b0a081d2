#include "abcpass/wf_hier.hpp"

#include <cmath>

#include "abcpass/errors.hpp"
#include "abcpass/parallel.hpp"

namespace abcpass {

WfDataset build_wf_dataset(const TrajectoryDataset& raw) {
  WfDataset out;
  for (const auto& locus : raw.loci) {
    contract_check(locus.points.size() >= 2,
                   "locus " + locus.id + ": need at least two timepoints");
    // first segregating timepoint anchors the simulated trajectory
    std::size_t first = locus.points.size();
    for (std::size_t t = 0; t < locus.points.size(); ++t) {
      const auto& p = locus.points[t];
      if (p.count > 0 && p.count < p.sample_size) {
        first = t;
        break;
      }
    }
    if (first + 2 > locus.points.size()) continue;  // nothing left to compare against

    ObservedLocus obs;
    obs.id = locus.id;
    obs.position = locus.position;
    const int base_gen = locus.points[first].generation;
    const bool flip = locus.points[first].count * 2 > locus.points[first].sample_size;
    obs.flipped = flip;
    for (std::size_t t = first; t < locus.points.size(); ++t) {
      const auto& p = locus.points[t];
      obs.plan.points.push_back({p.generation - base_gen, p.sample_size});
      obs.counts.push_back(flip ? p.sample_size - p.count : p.count);
    }
    obs.init_freq = double(obs.counts.front()) / double(obs.plan.points.front().sample_size);
    obs.stats = locus_stats(LocusTrajectory{obs.plan, obs.counts});
    out.loci.push_back(std::move(obs));
  }
  return out;
}

ParameterSpace make_wf_space(const WfPriors& priors, std::size_t n_loci) {
  contract_check(n_loci >= 1, "wf space: need at least one locus");
  std::vector<ParameterDef> params;
  params.push_back({"log10Ne",
                    {PriorKind::kLog10Uniform, priors.log10_ne_lower, priors.log10_ne_upper},
                    ParamScale::kLog10});
  if (priors.dfe) {
    params.push_back(
        {"chi", {PriorKind::kUniform, priors.chi_lower, priors.chi_upper}, ParamScale::kLinear});
    params.push_back({"log10sigma",
                      {PriorKind::kLog10Uniform, priors.log10_sigma_lower,
                       priors.log10_sigma_upper},
                      ParamScale::kLog10});
  }
  for (std::size_t l = 0; l < n_loci; ++l) {
    PriorSpec prior;
    if (priors.dfe) {
      prior.kind = PriorKind::kGpdConditional;
      prior.lower = 0.0;
      prior.upper = priors.s_max;
      prior.shape_ref = "chi";
      prior.scale_ref = "log10sigma";
    } else {
      prior.kind = PriorKind::kUniform;
      prior.lower = priors.s_lower;
      prior.upper = priors.s_upper;
    }
    params.push_back({"s_" + std::to_string(l + 1), prior, ParamScale::kLinear});
  }
  return ParameterSpace(std::move(params), priors.s_max);
}

WfPilotSimulator::WfPilotSimulator(const WfDataset& dataset, Ploidy ploidy)
    : dataset_(&dataset), ploidy_(ploidy) {
  contract_check(dataset.n_loci() >= 1, "wf pilot: empty dataset");
}

void WfPilotSimulator::simulate(std::span<const double> theta_natural, RandomSeed seed,
                                std::span<double> out) const {
  contract_check(theta_natural.size() == 2 && out.size() == LocusStats::kCount,
                 "wf pilot: expects theta = (Ne, s)");
  const auto ne = static_cast<std::uint64_t>(std::llround(theta_natural[0]));
  const auto& locus = dataset_->loci[splitmix64(seed) % dataset_->n_loci()];
  const auto traj = wf_simulate_locus(ne, theta_natural[1], locus.init_freq, locus.plan,
                                      derive_seed(seed, 1), ploidy_);
  const auto values = locus_stats(traj).values();
  std::copy(values.begin(), values.end(), out.begin());
}

WfFullSimulator::WfFullSimulator(const WfDataset& dataset, WfLayout layout, Ploidy ploidy)
    : dataset_(&dataset), layout_(layout), ploidy_(ploidy) {
  contract_check(layout.n_loci == dataset.n_loci(), "wf full simulator: layout mismatch");
}

std::vector<std::string> WfFullSimulator::stat_names() const {
  std::vector<std::string> names;
  for (std::size_t l = 0; l < dataset_->n_loci(); ++l) {
    for (const auto& base : LocusStats::names()) {
      names.push_back(base + "_" + std::to_string(l + 1));
    }
  }
  return names;
}

void WfFullSimulator::simulate(std::span<const double> theta_natural, RandomSeed seed,
                               std::span<double> out) const {
  contract_check(theta_natural.size() == layout_.size() &&
                     out.size() == LocusStats::kCount * dataset_->n_loci(),
                 "wf full simulator: dimension mismatch");
  const auto ne =
      static_cast<std::uint64_t>(std::llround(theta_natural[layout_.ne_index()]));
  for (std::size_t l = 0; l < dataset_->n_loci(); ++l) {
    const auto& locus = dataset_->loci[l];
    const auto traj = wf_simulate_locus(ne, theta_natural[layout_.s_index(l)], locus.init_freq,
                                        locus.plan, derive_seed(seed, l), ploidy_);
    const auto values = locus_stats(traj).values();
    std::copy(values.begin(), values.end(), out.begin() + LocusStats::kCount * l);
  }
}

WfUpdater::WfUpdater(const ParameterSpace& space, const WfDataset& dataset,
                     const WfChainOptions& options)
    : space_(&space), dataset_(&dataset), options_(&options) {
  const auto& layout = options.layout;
  contract_check(space.size() == layout.size() && dataset.n_loci() == layout.n_loci,
                 "wf updater: layout mismatch");
  contract_check(options.tau_s_obs.size() == layout.n_loci &&
                     options.tau_s_sd.size() == layout.n_loci &&
                     options.delta_s.size() == layout.n_loci,
                 "wf updater: per-locus vectors must match the locus count");
  diagnostics_.per_param.resize(layout.size());
  stat_buffer_.resize(LocusStats::kCount);
  tau_buffer_.resize(layout.n_loci);
}

bool WfUpdater::s_update(ParameterVector& theta, std::size_t locus, Engine& engine) {
  const auto& opt = *options_;
  const std::size_t i = opt.layout.s_index(locus);
  auto& counters = diagnostics_.per_param[i];
  ++counters.proposals;

  const double proposed =
      propose_component(theta[i], i, opt.kernel, *space_, engine, &proposal_diagnostics_);
  double log_ratio = 0.0;
  if (space_->has_conditional_priors()) {
    ParameterVector prop_vec = theta;
    prop_vec[i] = proposed;
    log_ratio = space_->prior_log_ratio_component(theta, prop_vec, i);
    if (std::isinf(log_ratio)) return false;  // outside the conditional GPD support
  }

  const auto& obs = dataset_->loci[locus];
  const auto ne = static_cast<std::uint64_t>(
      std::llround(space_->natural_value(opt.layout.ne_index(), theta[opt.layout.ne_index()])));
  const auto traj =
      wf_simulate_locus(ne, proposed, obs.init_freq, obs.plan, engine(), opt.ploidy);
  ++counters.simulations;
  ++diagnostics_.total_simulations;

  const auto values = locus_stats(traj).values();
  const double tau = opt.proj_s.project(values, &diagnostics_.boxcox_clamps);
  if (std::abs(tau - opt.tau_s_obs[locus]) / opt.tau_s_sd[locus] > opt.delta_s[locus]) {
    return false;
  }
  ++counters.distance_passes;
  const double h = std::min(1.0, std::exp(log_ratio));
  if (h < 1.0 && std::uniform_real_distribution<double>(0.0, 1.0)(engine) >= h) return false;
  theta[i] = proposed;
  ++counters.mh_accepts;
  return true;
}

bool WfUpdater::ne_update(ParameterVector& theta, Engine& engine) {
  const auto& opt = *options_;
  const std::size_t i = opt.layout.ne_index();
  auto& counters = diagnostics_.per_param[i];
  ++counters.proposals;

  const double proposed =
      propose_component(theta[i], i, opt.kernel, *space_, engine, &proposal_diagnostics_);
  const auto ne = static_cast<std::uint64_t>(
      std::llround(space_->natural_value(i, proposed)));

  // simulate every locus under the proposed Ne and the current s values
  const RandomSeed base = engine();
  const std::size_t n_loci = opt.layout.n_loci;
  parallel_for(n_loci, opt.threads, [&](std::size_t l) {
    const auto& obs = dataset_->loci[l];
    const auto traj = wf_simulate_locus(ne, theta[opt.layout.s_index(l)], obs.init_freq,
                                        obs.plan, derive_seed(base, l), opt.ploidy);
    tau_buffer_[l] = opt.proj_ne.project(locus_stats(traj).values());
  });
  ++counters.simulations;
  diagnostics_.total_simulations += n_loci;

  double tau = 0.0;
  for (const double v : tau_buffer_) tau += v;
  if (std::abs(tau - opt.tau_ne_obs) / opt.tau_ne_sd > opt.delta_ne) return false;
  ++counters.distance_passes;
  // uniform prior on log10Ne and no GPD dependence: the MH ratio is 1
  theta[i] = proposed;
  ++counters.mh_accepts;
  return true;
}

bool WfUpdater::hyper_update(ParameterVector& theta, std::size_t hyper_index, Engine& engine) {
  auto& counters = diagnostics_.per_param[hyper_index];
  ++counters.proposals;

  ParameterVector proposed = theta;
  proposed[hyper_index] = propose_component(theta[hyper_index], hyper_index, options_->kernel,
                                            *space_, engine, &proposal_diagnostics_);
  // analytic update: product of truncated-GPD densities over loci, no simulation
  const double log_ratio = space_->prior_log_ratio_component(theta, proposed, hyper_index);
  if (std::isinf(log_ratio)) return false;  // some current s_l would lose support
  ++counters.distance_passes;
  const double h = std::min(1.0, std::exp(log_ratio));
  if (h < 1.0 && std::uniform_real_distribution<double>(0.0, 1.0)(engine) >= h) return false;
  theta[hyper_index] = proposed[hyper_index];
  ++counters.mh_accepts;
  return true;
}

bool WfUpdater::update(ParameterVector& theta, std::size_t param, Engine& engine) {
  const auto& layout = options_->layout;
  if (param == layout.ne_index()) return ne_update(theta, engine);
  if (layout.dfe && (param == layout.chi_index() || param == layout.sigma_index())) {
    return hyper_update(theta, param, engine);
  }
  return s_update(theta, param - layout.s_offset(), engine);
}

Chain run_wf_chain(const ParameterSpace& space, const WfDataset& dataset,
                   const WfChainOptions& options, const RecordSink& sink) {
  contract_check(options.schedule.size() == space.size(), "wf chain: schedule length mismatch");
  contract_check(options.start.size() == space.size(), "wf chain: start length mismatch");
  contract_check(space.prior_density(options.start) > 0.0,
                 "wf chain: start must have positive prior density");

  WfUpdater updater(space, dataset, options);
  Chain chain;
  for (const auto& p : space.params()) chain.param_names.push_back(p.name);
  chain.seed = options.seed;
  chain.iterations = options.iterations;
  if (options.store_records) chain.records.reserve(options.iterations * space.size());

  Engine engine = make_engine(options.seed);
  ParameterVector theta = options.start;
  for (std::size_t t = 0; t < options.iterations; ++t) {
    const std::size_t i = options.schedule.sample(engine);
    updater.update(theta, i, engine);
    if (options.store_records) chain.records.insert(chain.records.end(), theta.begin(), theta.end());
    if (sink) sink(t, theta);
  }
  chain.diagnostics = updater.diagnostics();
  return chain;
}

std::vector<SignificanceEntry> significance(const Chain& chain, const WfDataset& dataset,
                                            const WfLayout& layout, double burn_in_fraction,
                                            double threshold, double min_prob) {
  contract_check(chain.n_params() == layout.size(), "significance: chain/layout mismatch");
  const auto skip = static_cast<std::size_t>(burn_in_fraction * double(chain.iterations));
  contract_check(chain.iterations - skip >= 100,
                 "significance: need at least 100 post-burn-in draws");

  std::vector<SignificanceEntry> out(layout.n_loci);
  for (std::size_t l = 0; l < layout.n_loci; ++l) {
    out[l].id = dataset.loci[l].id;
    out[l].position = dataset.loci[l].position;
  }
  const double n_draws = double(chain.iterations - skip);
  for (std::size_t t = skip; t < chain.iterations; ++t) {
    const auto row = chain.row(t);
    const double ne = std::pow(10.0, row[layout.ne_index()]);
    for (std::size_t l = 0; l < layout.n_loci; ++l) {
      if (ne * row[layout.s_index(l)] > threshold) out[l].probability += 1.0;
    }
  }
  for (auto& entry : out) {
    entry.probability /= n_draws;
    entry.significant = entry.probability > min_prob;
  }
  return out;
}

}  // namespace abcpass
