#include "abcpass/sampler.hpp"

#include <cmath>
#include <limits>

#include "abcpass/errors.hpp"

namespace abcpass {

UpdateSchedule UpdateSchedule::uniform(std::size_t n) {
  return UpdateSchedule(std::vector<double>(n, 1.0));
}

UpdateSchedule::UpdateSchedule(std::vector<double> weights) {
  contract_check(!weights.empty(), "schedule: needs at least one parameter");
  double total = 0.0;
  for (const double w : weights) {
    contract_check(w > 0.0 && std::isfinite(w), "schedule: weights must be positive and finite");
    total += w;
  }
  probabilities_.reserve(weights.size());
  cumulative_.reserve(weights.size());
  double acc = 0.0;
  for (const double w : weights) {
    probabilities_.push_back(w / total);
    acc += w / total;
    cumulative_.push_back(acc);
  }
  cumulative_.back() = 1.0;
}

std::size_t UpdateSchedule::sample(Engine& engine) const {
  if (size() == 1) return 0;  // no randomness spent; matches the 1-parameter degeneracy
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(engine);
  const auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), u);
  return std::min<std::size_t>(std::size_t(it - cumulative_.begin()), size() - 1);
}

std::vector<double> Chain::column(std::size_t param, double burn_in_fraction) const {
  contract_check(param < n_params(), "chain column: bad parameter index");
  contract_check(!records.empty(), "chain column: records were streamed, not stored");
  const auto skip = static_cast<std::size_t>(burn_in_fraction * double(iterations));
  std::vector<double> out;
  out.reserve(iterations - skip);
  for (std::size_t t = skip; t < iterations; ++t) out.push_back(records[t * n_params() + param]);
  return out;
}

double standardized_distance(std::span<const double> a, std::span<const double> b,
                             std::span<const double> scale) {
  contract_check(a.size() == b.size() && a.size() == scale.size(),
                 "standardized_distance: length mismatch");
  double sum = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    contract_check(scale[j] > 0.0, "standardized_distance: zero scale");
    const double d = (a[j] - b[j]) / scale[j];
    sum += d * d;
  }
  return std::sqrt(sum);
}

double mh_ratio(std::span<const double> theta, std::span<const double> proposed,
                const ParameterSpace& space) {
  const double log_current = space.prior_log_density(theta);
  contract_check(!std::isinf(log_current),
                 "mh_ratio: current state has zero prior density; the chain must never "
                 "occupy zero-prior states");
  const double log_proposed = space.prior_log_density(proposed);
  if (std::isinf(log_proposed)) return 0.0;
  return std::min(1.0, std::exp(log_proposed - log_current));
}

namespace {

void simulate_with_retry(const Simulator& model, std::span<const double> theta_natural,
                         Engine& engine, std::span<double> out, ChainDiagnostics& diag) {
  for (int attempt = 0;; ++attempt) {
    try {
      model.simulate(theta_natural, engine(), out);
      ++diag.total_simulations;
      return;
    } catch (const SimulationFailure&) {
      ++diag.sim_failures;
      if (attempt + 1 >= 10000) {
        throw RunError("simulator failed 10^4 consecutive times; aborting the run");
      }
    }
  }
}

// accept with probability h, spending a uniform draw only when h < 1
bool mh_accept(double h, Engine& engine) {
  if (h >= 1.0) return true;
  if (h <= 0.0) return false;
  return std::uniform_real_distribution<double>(0.0, 1.0)(engine) < h;
}

}  // namespace

Chain run_abc_mcmc(const AbcMcmcOptions& options, const RecordSink& sink) {
  const auto& space = *options.space;
  const auto& model = *options.model;
  const std::size_t n = space.size();
  const std::size_t m = model.stat_count();
  contract_check(options.observed_stats.size() == m,
                 "abc-mcmc: observed statistics length mismatch");
  contract_check(options.stat_sd.size() == m, "abc-mcmc: stat_sd length mismatch");
  contract_check(options.start.size() == n, "abc-mcmc: start length mismatch");
  contract_check(space.prior_density(options.start) > 0.0,
                 "abc-mcmc: start must have positive prior density");

  Chain chain;
  for (const auto& p : space.params()) chain.param_names.push_back(p.name);
  chain.seed = options.seed;
  chain.iterations = options.iterations;
  chain.diagnostics.per_param.resize(n);
  if (options.store_records) chain.records.reserve(options.iterations * n);

  Engine engine = make_engine(options.seed);
  ParameterVector theta = options.start;
  ParameterVector proposed(n);
  std::vector<double> natural(n);
  std::vector<double> stats(m);
  ProposalDiagnostics prop_diag;

  for (std::size_t t = 0; t < options.iterations; ++t) {
    // full-vector update: every component perturbed
    for (std::size_t i = 0; i < n; ++i) {
      proposed[i] = propose_component(theta[i], i, options.kernel, space, engine, &prop_diag);
      ++chain.diagnostics.per_param[i].proposals;
    }
    space.natural(proposed, natural);
    simulate_with_retry(model, natural, engine, stats, chain.diagnostics);
    for (auto& c : chain.diagnostics.per_param) ++c.simulations;

    // a failed distance check is a rejected move: the chain stays and the
    // current state is recorded again, keeping the run length fixed at T
    if (standardized_distance(stats, options.observed_stats, options.stat_sd) <=
        options.tolerance) {
      for (auto& c : chain.diagnostics.per_param) ++c.distance_passes;
      const double log_ratio = space.prior_log_ratio(theta, proposed);
      if (mh_accept(std::isinf(log_ratio) ? 0.0 : std::min(1.0, std::exp(log_ratio)), engine)) {
        theta = proposed;
        for (auto& c : chain.diagnostics.per_param) ++c.mh_accepts;
      }
    }

    if (options.store_records) {
      chain.records.insert(chain.records.end(), theta.begin(), theta.end());
    }
    if (sink) sink(t, theta);
  }
  chain.diagnostics.uniform_fallback_proposals = prop_diag.uniform_fallbacks;
  return chain;
}

Chain run_abc_pass(const AbcPassOptions& options, const RecordSink& sink) {
  const auto& space = *options.space;
  const auto& model = *options.model;
  const std::size_t n = space.size();
  const std::size_t m = model.stat_count();
  contract_check(options.projections.size() == n, "abc-pass: one projection per parameter");
  contract_check(options.tau_obs.size() == n && options.tolerances.size() == n,
                 "abc-pass: tau_obs/tolerances length mismatch");
  contract_check(options.schedule.size() == n, "abc-pass: schedule length mismatch");
  contract_check(options.start.size() == n, "abc-pass: start length mismatch");
  contract_check(space.prior_density(options.start) > 0.0,
                 "abc-pass: start must have positive prior density");

  Chain chain;
  for (const auto& p : space.params()) chain.param_names.push_back(p.name);
  chain.seed = options.seed;
  chain.iterations = options.iterations;
  chain.diagnostics.per_param.resize(n);
  if (options.store_records) chain.records.reserve(options.iterations * n);

  Engine engine = make_engine(options.seed);
  ParameterVector theta = options.start;
  ParameterVector proposed(n);
  std::vector<double> natural(n);
  std::vector<double> stats(m);
  ProposalDiagnostics prop_diag;

  for (std::size_t t = 0; t < options.iterations; ++t) {
    const std::size_t i = options.schedule.sample(engine);
    auto& counters = chain.diagnostics.per_param[i];
    ++counters.proposals;

    proposed = theta;
    proposed[i] = propose_component(theta[i], i, options.kernel, space, engine, &prop_diag);

    // zero-prior short-circuit (gpd-conditional support), before any simulation
    const double log_ratio = space.prior_log_ratio_component(theta, proposed, i);
    if (!std::isinf(log_ratio)) {
      space.natural(proposed, natural);
      simulate_with_retry(model, natural, engine, stats, chain.diagnostics);
      ++counters.simulations;

      const auto& proj = options.projections[i];
      const double tau = proj.project(stats, &chain.diagnostics.boxcox_clamps);
      if (std::abs(tau - options.tau_obs[i]) / proj.tau_sd <= options.tolerances[i]) {
        ++counters.distance_passes;
        if (mh_accept(std::min(1.0, std::exp(log_ratio)), engine)) {
          theta[i] = proposed[i];
          ++counters.mh_accepts;
        }
      }
    }

    if (options.store_records) {
      chain.records.insert(chain.records.end(), theta.begin(), theta.end());
    }
    if (sink) sink(t, theta);
  }
  chain.diagnostics.uniform_fallback_proposals = prop_diag.uniform_fallbacks;
  return chain;
}

}  // namespace abcpass
