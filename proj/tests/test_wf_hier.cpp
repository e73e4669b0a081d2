#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "abcpass/errors.hpp"
#include "abcpass/wf_hier.hpp"
#include "test_support.hpp"

using namespace abcpass;

namespace {

TrajectoryDataset fixture_dataset(std::size_t n_loci, RandomSeed seed, double s = 0.2) {
  SamplingPlan plan;
  for (int t = 0; t < 10; ++t) plan.points.push_back({13 * t, 1000});
  TrajectoryDataset raw;
  for (std::size_t l = 0; l < n_loci; ++l) {
    const auto traj = wf_simulate_locus(1000, s, 0.2, plan, derive_seed(seed, l));
    RawLocus locus;
    locus.id = "locus_" + std::to_string(l + 1);
    locus.position = static_cast<long long>(l + 1);
    for (std::size_t t = 0; t < plan.size(); ++t) {
      locus.points.push_back({plan.points[t].generation, plan.points[t].sample_size,
                              traj.counts[t]});
    }
    raw.loci.push_back(std::move(locus));
  }
  return raw;
}

WfChainOptions base_options(const WfDataset& dataset, const WfLayout& layout) {
  WfChainOptions options;
  options.layout = layout;
  options.proj_s = test::identity_projection(0, LocusStats::kCount);
  options.proj_ne = test::identity_projection(1, LocusStats::kCount);
  options.tau_s_obs.assign(dataset.n_loci(), 0.0);
  options.tau_ne_obs = 0.0;
  options.tau_s_sd.assign(dataset.n_loci(), 1.0);
  options.tau_ne_sd = 1.0;
  options.delta_s.assign(dataset.n_loci(), std::numeric_limits<double>::infinity());
  options.delta_ne = std::numeric_limits<double>::infinity();
  options.kernel.widths.assign(layout.size(), 0.1);
  options.schedule = UpdateSchedule::uniform(layout.size());
  options.start.assign(layout.size(), 0.0);
  return options;
}

}  // namespace

TEST_CASE("dataset preparation: orientation, rebasing, initial frequency") {
  TrajectoryDataset raw;
  RawLocus locus;
  locus.id = "flip";
  locus.position = 7;
  // first segregating timepoint is at generation 26 with the major allele
  // recorded: counts flip to track the minor allele; generations rebase to 0
  locus.points = {{0, 100, 0}, {13, 100, 100}, {26, 100, 80}, {39, 100, 60}, {52, 100, 95}};
  raw.loci.push_back(locus);

  const WfDataset dataset = build_wf_dataset(raw);
  REQUIRE(dataset.n_loci() == 1);
  const ObservedLocus& obs = dataset.loci[0];
  CHECK(obs.flipped);
  CHECK(obs.plan.points.size() == 3);
  CHECK(obs.plan.points[0].generation == 0);
  CHECK(obs.plan.points[1].generation == 13);
  CHECK(obs.plan.points[2].generation == 26);
  CHECK(obs.counts == std::vector<int>{20, 40, 5});
  CHECK(obs.init_freq == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(obs.stats.usable);

  // a locus that is minor-oriented already does not flip
  RawLocus plain;
  plain.id = "plain";
  plain.points = {{0, 100, 10}, {13, 100, 30}, {26, 100, 20}};
  TrajectoryDataset raw2;
  raw2.loci.push_back(plain);
  const WfDataset dataset2 = build_wf_dataset(raw2);
  CHECK_FALSE(dataset2.loci[0].flipped);
  CHECK(dataset2.loci[0].init_freq == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("gpd density integrates to one over its support") {
  using boost::math::quadrature::gauss_kronrod;
  const auto mass = [](const GpdParams& p) {
    return gauss_kronrod<double, 61>::integrate([&](double s) { return gpd_density(s, p); }, 0.0,
                                                p.support_end(), 12, 1e-10);
  };
  CHECK(std::abs(mass({0.5, 0.05, 1.0}) - 1.0) < 1e-6);

  Engine engine = make_engine(91);
  std::uniform_real_distribution<double> chi_prior(-0.2, 1.0);
  std::uniform_real_distribution<double> log_sigma_prior(-2.5, -0.5);
  for (int rep = 0; rep < 100; ++rep) {
    GpdParams p{chi_prior(engine), std::pow(10.0, log_sigma_prior(engine)), 1.0};
    CHECK(std::abs(mass(p) - 1.0) < 1e-6);
  }
}

TEST_CASE("hyper update: analytic ratio, support rejection, empty product") {
  // L = 1, s = 0.1, chi = 0 fixed, sigma 0.1 -> 0.2 (untruncated, s_max huge):
  // the density ratio is (5 e^{-1/2}) / (10 e^{-1}) = 0.8243606...
  const WfPriors priors{1.5, 4.5, 0.0, 1.0, true, -0.2, 1.0, -2.5, -0.5, 1e9};
  const ParameterSpace space = make_wf_space(priors, 1);
  const WfLayout layout{1, true};
  const ParameterVector theta{3.0, 0.0, std::log10(0.1), 0.1};
  ParameterVector proposed = theta;
  proposed[layout.sigma_index()] = std::log10(0.2);
  CHECK(std::exp(space.prior_log_ratio_component(theta, proposed, layout.sigma_index())) ==
        doctest::Approx(0.82436063535006407).epsilon(1e-12));

  // proposed chi < 0 shrinking the support below the current s is rejected
  const WfPriors truncated{1.5, 4.5, 0.0, 1.0, true, -0.2, 1.0, -2.5, -0.5, 1.0};
  const ParameterSpace space2 = make_wf_space(truncated, 1);
  const ParameterVector state{3.0, 0.5, std::log10(0.05), 0.3};
  ParameterVector bad = state;
  bad[layout.chi_index()] = -0.2;  // support end = 0.05/0.2 = 0.25 < s = 0.3
  CHECK(std::isinf(space2.prior_log_ratio_component(state, bad, layout.chi_index())));

  // no gpd-conditional parameters: the ratio is an empty product
  const ParameterSpace hypers_only(
      {{"chi", {PriorKind::kUniform, -0.2, 1.0}, ParamScale::kLinear},
       {"log10sigma", {PriorKind::kLog10Uniform, -2.5, -0.5}, ParamScale::kLog10}});
  const ParameterVector h0{0.3, -1.0};
  const ParameterVector h1{0.9, -1.0};
  CHECK(hypers_only.prior_log_ratio_component(h0, h1, 0) == 0.0);
}

TEST_CASE("updaters change only their own component") {
  const TrajectoryDataset raw = fixture_dataset(6, 92);
  const WfDataset dataset = build_wf_dataset(raw);
  REQUIRE(dataset.n_loci() == 6);
  const WfPriors priors{1.5, 4.5, 0.0, 1.0, true, -0.2, 1.0, -2.5, -0.5, 1.0};
  const WfLayout layout{6, true};
  const ParameterSpace space = make_wf_space(priors, 6);

  WfChainOptions options = base_options(dataset, layout);
  Engine prior_engine = make_engine(93);
  options.start = space.prior_sample(prior_engine);

  WfUpdater updater(space, dataset, options);
  Engine engine = make_engine(94);
  ParameterVector theta = options.start;

  for (int rep = 0; rep < 50; ++rep) {
    ParameterVector before = theta;
    updater.ne_update(theta, engine);
    for (std::size_t i = 0; i < layout.size(); ++i) {
      if (i != layout.ne_index()) CHECK(theta[i] == before[i]);
    }

    before = theta;
    updater.s_update(theta, 2, engine);
    for (std::size_t i = 0; i < layout.size(); ++i) {
      if (i != layout.s_index(2)) CHECK(theta[i] == before[i]);
    }

    before = theta;
    updater.hyper_update(theta, layout.chi_index(), engine);
    for (std::size_t i = 0; i < layout.size(); ++i) {
      if (i != layout.chi_index()) CHECK(theta[i] == before[i]);
    }
  }

  const auto& diag = updater.diagnostics();
  for (const auto& c : diag.per_param) {
    CHECK(c.mh_accepts <= c.distance_passes);
    CHECK(c.distance_passes <= c.proposals);
  }
  // hyper updates never simulate
  CHECK(diag.per_param[layout.chi_index()].simulations == 0);
}

TEST_CASE("wf chain: record count, determinism, thread independence") {
  const TrajectoryDataset raw = fixture_dataset(4, 95);
  const WfDataset dataset = build_wf_dataset(raw);
  const WfPriors priors;  // no DFE
  const WfLayout layout{dataset.n_loci(), false};
  const ParameterSpace space = make_wf_space(priors, dataset.n_loci());

  WfChainOptions options = base_options(dataset, layout);
  options.delta_s.assign(dataset.n_loci(), 1.5);
  options.delta_ne = 1.5;
  // observed taus from the dataset itself so distances are meaningful
  for (std::size_t l = 0; l < dataset.n_loci(); ++l) {
    options.tau_s_obs[l] = options.proj_s.project(dataset.loci[l].stats.values());
    options.tau_ne_obs += options.proj_ne.project(dataset.loci[l].stats.values());
  }
  Engine prior_engine = make_engine(96);
  options.start = space.prior_sample(prior_engine);
  options.iterations = 3000;
  options.seed = 97;

  options.threads = 1;
  const Chain single = run_wf_chain(space, dataset, options);
  CHECK(single.iterations == 3000);
  CHECK(single.records.size() == 3000 * layout.size());

  options.threads = 2;
  const Chain doubled = run_wf_chain(space, dataset, options);
  CHECK(single.records == doubled.records);

  const Chain again = run_wf_chain(space, dataset, options);
  CHECK(doubled.records == again.records);

  // some movement happened
  const auto& diag = doubled.diagnostics;
  std::uint64_t total_accepts = 0;
  for (const auto& c : diag.per_param) total_accepts += c.mh_accepts;
  CHECK(total_accepts > 0);
}

TEST_CASE("hyper chain alone converges to the grid-evaluated conditional posterior") {
  // fixed s_1..20 drawn from GPD(chi = 0.5, sigma = 0.05, s_max = 1)
  const GpdParams true_dfe{0.5, 0.05, 1.0};
  Engine engine = make_engine(98);
  const std::size_t n_loci = 20;
  std::vector<double> s_values;
  {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t l = 0; l < n_loci; ++l) {
      // inverse-CDF draw from the truncated GPD
      const double u = unit(engine) * gpd_cdf_untruncated(true_dfe.support_end(), true_dfe);
      const double s = true_dfe.sigma / true_dfe.chi *
                       std::expm1(-true_dfe.chi * std::log1p(-u));
      s_values.push_back(std::clamp(s, 0.0, true_dfe.support_end()));
    }
  }

  const WfPriors priors{1.5, 4.5, 0.0, 1.0, true, -0.2, 1.0, -2.5, -0.5, 1.0};
  const ParameterSpace space = make_wf_space(priors, n_loci);
  const WfLayout layout{n_loci, true};

  const TrajectoryDataset raw = fixture_dataset(n_loci, 99);
  const WfDataset dataset = build_wf_dataset(raw);
  REQUIRE(dataset.n_loci() == n_loci);

  WfChainOptions options = base_options(dataset, layout);
  options.kernel.widths.assign(layout.size(), 0.0);
  options.kernel.widths[layout.chi_index()] = 0.12;
  options.kernel.widths[layout.sigma_index()] = 0.2;
  ParameterVector theta(layout.size(), 0.0);
  theta[layout.ne_index()] = 3.0;
  theta[layout.chi_index()] = 0.4;
  theta[layout.sigma_index()] = -1.5;
  for (std::size_t l = 0; l < n_loci; ++l) theta[layout.s_index(l)] = s_values[l];
  options.start = theta;

  WfUpdater updater(space, dataset, options);
  Engine chain_engine = make_engine(100);
  const std::size_t iterations = 30000;
  const int grid = 30;
  Eigen::MatrixXd histogram = Eigen::MatrixXd::Zero(grid, grid);
  for (std::size_t t = 0; t < iterations; ++t) {
    updater.hyper_update(theta, t % 2 == 0 ? layout.chi_index() : layout.sigma_index(),
                         chain_engine);
    const auto chi_bin = std::min<long>(
        grid - 1, static_cast<long>((theta[layout.chi_index()] + 0.2) / 1.2 * grid));
    const auto sigma_bin = std::min<long>(
        grid - 1, static_cast<long>((theta[layout.sigma_index()] + 2.5) / 2.0 * grid));
    histogram(chi_bin, sigma_bin) += 1.0;
  }
  histogram /= double(iterations);

  // grid-quadrature oracle for the conditional posterior on the prior box
  Eigen::MatrixXd truth(grid, grid);
  for (int a = 0; a < grid; ++a) {
    const double chi = -0.2 + 1.2 * (a + 0.5) / grid;
    for (int b = 0; b < grid; ++b) {
      const double log_sigma = -2.5 + 2.0 * (b + 0.5) / grid;
      const GpdParams p{chi, std::pow(10.0, log_sigma), 1.0};
      double log_density = 0.0;
      for (const double s : s_values) log_density += gpd_log_density(s, p);
      truth(a, b) = log_density;  // -inf where the support excludes some s
    }
  }
  const double max_log = truth.maxCoeff();
  double total = 0.0;
  for (int a = 0; a < grid; ++a) {
    for (int b = 0; b < grid; ++b) {
      truth(a, b) = std::isinf(truth(a, b)) ? 0.0 : std::exp(truth(a, b) - max_log);
      total += truth(a, b);
    }
  }
  truth /= total;

  const double l1 = (histogram - truth).cwiseAbs().sum();
  CHECK(l1 < 0.35);  // the acceptance suite runs the full-budget version
}

TEST_CASE("significance: counting rule") {
  const TrajectoryDataset raw = fixture_dataset(2, 101);
  const WfDataset dataset = build_wf_dataset(raw);
  const WfLayout layout{2, false};

  Chain chain;
  chain.param_names = {"log10Ne", "s_1", "s_2"};
  chain.iterations = 200;
  for (std::size_t t = 0; t < 200; ++t) {
    chain.records.push_back(3.0);                       // Ne = 1000
    chain.records.push_back(t < 100 ? 0.5 : 0.0);       // locus 1: above 10 half the time
    chain.records.push_back(0.5);                       // locus 2: always above
  }
  chain.diagnostics.per_param.resize(3);

  const auto entries = significance(chain, dataset, layout, 0.0);
  REQUIRE(entries.size() == 2);
  CHECK(entries[0].probability == doctest::Approx(0.5).epsilon(1e-12));
  CHECK_FALSE(entries[0].significant);
  CHECK(entries[1].probability == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(entries[1].significant);

  // all draws at Ne * s = 0
  Chain zero;
  zero.param_names = chain.param_names;
  zero.iterations = 200;
  for (std::size_t t = 0; t < 200; ++t) {
    zero.records.push_back(3.0);
    zero.records.push_back(0.0);
    zero.records.push_back(0.0);
  }
  zero.diagnostics.per_param.resize(3);
  const auto none = significance(zero, dataset, layout, 0.0);
  CHECK(none[0].probability == 0.0);
  CHECK_FALSE(none[0].significant);
}

TEST_CASE("pilot simulator cycles loci deterministically") {
  const TrajectoryDataset raw = fixture_dataset(5, 102);
  const WfDataset dataset = build_wf_dataset(raw);
  const WfPilotSimulator sim(dataset, Ploidy::kHaploid);
  const std::vector<double> theta{1000.0, 0.2};
  CHECK(sim.simulate(theta, 7) == sim.simulate(theta, 7));
  bool any_differs = false;
  const auto base = sim.simulate(theta, 7);
  for (RandomSeed seed = 8; seed < 28; ++seed) {
    if (sim.simulate(theta, seed) != base) any_differs = true;
  }
  CHECK(any_differs);
}

TEST_CASE("full simulator: per-locus blocks depend on their own s") {
  const TrajectoryDataset raw = fixture_dataset(3, 103);
  const WfDataset dataset = build_wf_dataset(raw);
  const WfLayout layout{3, false};
  const WfFullSimulator sim(dataset, layout, Ploidy::kHaploid);
  CHECK(sim.stat_count() == 15);

  std::vector<double> theta{1000.0, 0.1, 0.2, 0.3};
  const auto base = sim.simulate(theta, 11);
  theta[2] = 0.9;  // only locus 2's block may change
  const auto changed = sim.simulate(theta, 11);
  for (std::size_t j = 0; j < 5; ++j) {
    CHECK(base[j] == changed[j]);
    CHECK(base[10 + j] == changed[10 + j]);
  }
  bool block_changed = false;
  for (std::size_t j = 5; j < 10; ++j) {
    if (base[j] != changed[j]) block_changed = true;
  }
  CHECK(block_changed);
}
