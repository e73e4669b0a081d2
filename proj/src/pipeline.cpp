#include "abcpass/pipeline.hpp"

#include <boost/math/distributions/beta.hpp>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>

#include "abcpass/errors.hpp"
#include "abcpass/toy_models.hpp"
#include "abcpass/validate.hpp"

namespace abcpass {

namespace {

using nlohmann::json;

// fixed seed-stream tags, one per pipeline stage
constexpr std::uint64_t kPilotStream = 101;
constexpr std::uint64_t kCalibrationPilotStream = 102;
constexpr std::uint64_t kWarmStartStream = 103;
constexpr std::uint64_t kChainStream = 104;
constexpr std::uint64_t kSweepStream = 105;
constexpr std::uint64_t kFixtureStream = 106;

unsigned effective_threads(const PipelineOverrides& overrides) {
  return overrides.threads == 0 ? default_thread_count() : overrides.threads;
}

bool artifact_fresh(const std::filesystem::path& artifact, const std::filesystem::path& meta,
                    const std::string& hash) {
  if (!std::filesystem::exists(artifact) || !std::filesystem::exists(meta)) return false;
  return read_json_file(meta).value("config_hash", "") == hash;
}

void stamp(const std::filesystem::path& meta, const std::string& hash) {
  write_json_file(json{{"config_hash", hash}}, meta);
}

PilotSet pilot_stage(const RunConfig& config, const Simulator& model,
                     const ParameterSpace& space, const StagePaths& paths,
                     const std::string& hash, std::uint64_t stream, unsigned threads,
                     const std::filesystem::path& csv, const std::filesystem::path& meta) {
  if (artifact_fresh(csv, meta, hash)) return read_pilot_csv(csv, space.size());
  PilotSet pilot =
      generate_pilot(space, model, config.pilot_size, derive_seed(config.seed, stream), threads);
  (void)paths;
  write_pilot_csv(pilot, csv);
  stamp(meta, hash);
  return pilot;
}

std::vector<LinearProjection> learn_stage(const RunConfig& config, const PilotSet& pilot,
                                          const StagePaths& paths, const std::string& hash) {
  if (artifact_fresh(paths.projections(), paths.projections(), hash)) {
    std::string stored;
    auto projections = read_projections_json(paths.projections(), &stored);
    if (stored == hash) return projections;
  }
  const BoxCoxTransform transform = fit_boxcox(pilot);
  std::vector<LinearProjection> projections;
  for (std::size_t i = 0; i < pilot.param_names.size(); ++i) {
    projections.push_back(learn_projection(pilot, transform, i, config.ridge));
  }
  write_projections_json(projections, hash, paths.projections());
  return projections;
}

UpdateSchedule toy_schedule(const RunConfig& config, std::size_t n) {
  if (config.mcmc.schedule_weights.empty()) return UpdateSchedule::uniform(n);
  if (config.mcmc.schedule_weights.size() != n) {
    throw ConfigError("config.mcmc.schedule_weights: expected " + std::to_string(n) + " entries");
  }
  return UpdateSchedule(config.mcmc.schedule_weights);
}

std::uint64_t total_iterations(const RunConfig& config, std::size_t n) {
  return config.mcmc.iterations != 0 ? config.mcmc.iterations
                                     : config.mcmc.iterations_per_parameter * n;
}

json linearity_json(const PilotSet& pilot, const std::vector<LinearProjection>& projections) {
  json out = json::array();
  for (std::size_t i = 0; i < projections.size(); ++i) {
    out.push_back({{"parameter", projections[i].parameter},
                   {"pearson_r", projection_linearity(pilot, projections[i], i)}});
  }
  return out;
}

}  // namespace

RunConfig effective_config(RunConfig config, const PipelineOverrides& overrides) {
  if (overrides.seed.has_value()) config.seed = *overrides.seed;
  if (overrides.output.has_value()) config.output = *overrides.output;
  return config;
}

std::unique_ptr<Simulator> make_toy_model(const RunConfig& config) {
  const auto& m = config.model;
  if (m.kind == "normal") return std::make_unique<NormalModel>(m.sample_size);
  if (m.kind == "glm") return std::make_unique<GlmModel>(cyclic_design_matrix(m.dimension));
  if (m.kind == "binomial") return std::make_unique<BinomialCheckModel>(m.trials);
  throw ConfigError("model.kind '" + m.kind + "' is not a toy model");
}

std::vector<double> observed_statistics(const RunConfig& config, const Simulator& model) {
  const auto& obs = config.observed;
  if (!obs.values.empty()) {
    if (obs.values.size() != model.stat_count()) {
      throw ConfigError("observed.values: expected " + std::to_string(model.stat_count()) +
                        " statistics");
    }
    return obs.values;
  }
  if (!obs.truth.empty()) {
    return model.simulate(obs.truth, obs.seed);
  }
  throw ConfigError("observed: either values or truth is required");
}

TruthMarginals toy_truth_marginals(const RunConfig& config, const ParameterSpace& space,
                                   std::span<const double> s_obs) {
  TruthMarginals truth;
  if (config.model.kind == "normal") {
    contract_check(space.size() == 2, "normal model: expected 2 parameters");
    truth.per_param.push_back(normal_mu_posterior(s_obs[0], s_obs[1], config.model.sample_size));
    truth.per_param.push_back(normal_sigma2_posterior(s_obs[1], config.model.sample_size));
    return truth;
  }
  if (config.model.kind == "glm") {
    const Eigen::MatrixXd design = cyclic_design_matrix(config.model.dimension);
    Eigen::VectorXd observed(static_cast<Eigen::Index>(s_obs.size()));
    for (std::size_t j = 0; j < s_obs.size(); ++j) observed[static_cast<Eigen::Index>(j)] = s_obs[j];
    const GaussianPosterior post = glm_posterior(
        design, Eigen::MatrixXd::Identity(design.rows(), design.rows()), observed);
    for (Eigen::Index i = 0; i < post.mean.size(); ++i) {
      boost::math::normal_distribution<double> marginal(post.mean[i], std::sqrt(post.cov(i, i)));
      truth.per_param.push_back([marginal](double x) { return boost::math::pdf(marginal, x); });
    }
    return truth;
  }
  if (config.model.kind == "binomial") {
    const double k = s_obs[0];
    boost::math::beta_distribution<double> posterior(k + 1.0, config.model.trials - k + 1.0);
    truth.per_param.push_back([posterior](double p) {
      if (p <= 0.0 || p >= 1.0) return 0.0;
      return boost::math::pdf(posterior, p);
    });
    return truth;
  }
  throw ConfigError("truth marginals: unsupported model kind " + config.model.kind);
}

Chain pipeline_run(const RunConfig& raw_config, const PipelineOverrides& overrides,
                   PipelineStage until) {
  const RunConfig config = effective_config(raw_config, overrides);
  const unsigned threads = effective_threads(overrides);
  const std::string hash = config_hash(config);
  StagePaths paths{config.output};

  const auto model = make_toy_model(config);
  const ParameterSpace space = config.build_space();
  const std::vector<double> s_obs = observed_statistics(config, *model);
  const bool use_pass = config.method == "abc-pass";

  const PilotSet pilot = pilot_stage(config, *model, space, paths, hash, kPilotStream, threads,
                                     paths.pilot(), paths.pilot_meta());
  if (until == PipelineStage::kPilot) return Chain{};

  std::vector<LinearProjection> projections;
  if (use_pass) projections = learn_stage(config, pilot, paths, hash);
  if (until == PipelineStage::kLearn) return Chain{};

  CalibrationResult calibration;
  std::vector<double> stat_sd;
  {
    std::string stored;
    bool fresh = false;
    if (std::filesystem::exists(paths.calibration())) {
      auto loaded = read_calibration_json(paths.calibration(), nullptr, &stat_sd, &stored);
      if (stored == hash) {
        calibration = std::move(loaded);
        fresh = true;
      }
    }
    if (!fresh) {
      if (use_pass) {
        calibration = calibrate(pilot, projections, s_obs, space, config.retain);
        GlobalCalibration global = calibrate_global(pilot, s_obs, space, config.retain);
        stat_sd = global.stat_sd;  // persisted for diagnostics and abc-mcmc reuse
      } else {
        GlobalCalibration global = calibrate_global(pilot, s_obs, space, config.retain);
        calibration = global.result;
        stat_sd = global.stat_sd;
      }
      write_calibration_json(calibration, s_obs, stat_sd, hash, paths.calibration());
    }
  }
  if (until == PipelineStage::kCalibrate) return Chain{};

  const std::uint64_t iterations = total_iterations(config, space.size());
  if (iterations == 0) return Chain{};

  std::vector<double> tau_obs(space.size(), 0.0);
  std::vector<double> tolerances(space.size(), 0.0);
  if (use_pass) {
    for (std::size_t i = 0; i < space.size(); ++i) {
      tau_obs[i] = projections[i].project(s_obs);
      tolerances[i] = calibration.tolerance[i];
    }
  }
  const UpdateSchedule schedule = toy_schedule(config, space.size());

  const auto run_once = [&](const ParameterVector& start, std::uint64_t iters, RandomSeed seed,
                            bool store) {
    if (use_pass) {
      AbcPassOptions options;
      options.model = model.get();
      options.space = &space;
      options.projections = projections;
      options.tau_obs = tau_obs;
      options.tolerances = tolerances;
      options.kernel = calibration.kernel();
      options.schedule = schedule;
      options.start = start;
      options.iterations = iters;
      options.seed = seed;
      options.store_records = store;
      return run_abc_pass(options);
    }
    AbcMcmcOptions options;
    options.model = model.get();
    options.space = &space;
    options.observed_stats = s_obs;
    options.stat_sd = stat_sd;
    options.tolerance = calibration.global_tolerance;
    options.kernel = calibration.kernel();
    options.start = start;
    options.iterations = iters;
    options.seed = seed;
    options.store_records = store;
    return run_abc_mcmc(options);
  };

  ParameterVector start = calibration.start;
  std::uint64_t warm_rounds = 0;
  if (config.mcmc.probe_iterations > 0) {
    const ProbeRunner probe = [&](const ParameterVector& probe_start, RandomSeed probe_seed) {
      const Chain probe_chain = run_once(probe_start, config.mcmc.probe_iterations, probe_seed,
                                         false);
      std::vector<std::uint64_t> accepts;
      for (const auto& c : probe_chain.diagnostics.per_param) accepts.push_back(c.mh_accepts);
      return accepts;
    };
    start = warm_start_retry(probe, calibration, pilot.theta,
                             derive_seed(config.seed, kWarmStartStream), &warm_rounds);
  }

  Chain chain = run_once(start, iterations, derive_seed(config.seed, kChainStream), true);
  chain.diagnostics.warm_start_rounds = warm_rounds;
  chain.config_snapshot = config_to_json(config).dump();

  write_chain_csv(chain, paths.chain());
  json extra;
  extra["warm_start_rounds"] = warm_rounds;
  extra["start"] = start;
  extra["config_hash"] = hash;
  if (use_pass) extra["projection_linearity"] = linearity_json(pilot, projections);
  write_diagnostics_json(chain, config_to_json(config), extra, paths.diagnostics());
  return chain;
}

WfRunResult wf_infer(const RunConfig& raw_config, const PipelineOverrides& overrides) {
  const RunConfig config = effective_config(raw_config, overrides);
  const unsigned threads = effective_threads(overrides);
  const std::string hash = config_hash(config);
  StagePaths paths{config.output};
  if (config.model.kind != "wf") throw ConfigError("wf-infer requires model.kind = wf");
  if (config.model.trajectories.empty()) {
    throw ConfigError("wf-infer requires model.trajectories");
  }

  const TrajectoryDataset raw = ingest_trajectories(config.model.trajectories,
                                                    config.model.window_last);
  WfRunResult result;
  result.dataset = build_wf_dataset(raw);
  const std::size_t n_loci = result.dataset.n_loci();
  if (n_loci == 0) throw RunError("wf-infer: no usable locus after trajectory preparation");

  const WfPriors priors = config.wf_priors();
  result.layout = WfLayout{n_loci, priors.dfe};
  const ParameterSpace space = make_wf_space(priors, n_loci);
  const Ploidy ploidy = config.ploidy();

  // projection pilot: single-locus simulations over (Ne, s)
  PriorSpec ne_prior;
  ne_prior.kind = PriorKind::kLog10Uniform;
  ne_prior.lower = priors.log10_ne_lower;
  ne_prior.upper = priors.log10_ne_upper;
  PriorSpec s_prior;
  s_prior.kind = PriorKind::kUniform;
  s_prior.lower = 0.0;
  s_prior.upper = priors.dfe ? priors.s_max : priors.s_upper;
  const ParameterSpace pilot_space({{"log10Ne", ne_prior, ParamScale::kLog10},
                                    {"s", s_prior, ParamScale::kLinear}});
  const WfPilotSimulator pilot_sim(result.dataset, ploidy);
  const PilotSet pilot = pilot_stage(config, pilot_sim, pilot_space, paths, hash, kPilotStream,
                                     threads, paths.pilot(), paths.pilot_meta());

  const std::vector<LinearProjection> projections = learn_stage(config, pilot, paths, hash);
  const LinearProjection& proj_ne = projections[0];
  const LinearProjection& proj_s = projections[1];

  // observed taus
  std::vector<double> tau_s_obs(n_loci, 0.0);
  double tau_ne_obs = 0.0;
  for (std::size_t l = 0; l < n_loci; ++l) {
    const auto values = result.dataset.loci[l].stats.values();
    tau_s_obs[l] = proj_s.project(values);
    tau_ne_obs += proj_ne.project(values);
  }

  // calibration pilot: full-model simulations
  const WfFullSimulator full_sim(result.dataset, result.layout, ploidy);
  const PilotSet calibration_pilot =
      pilot_stage(config, full_sim, space, paths, hash, kCalibrationPilotStream, threads,
                  paths.calibration_pilot(), paths.calibration_pilot_meta());
  const auto rows = calibration_pilot.stats.rows();

  // per-parameter distance columns: Ne first, then one per locus
  Eigen::MatrixXd tau_s_rows(rows, static_cast<Eigen::Index>(n_loci));
  Eigen::VectorXd tau_ne_rows(rows);
  std::vector<double> block(LocusStats::kCount);
  for (Eigen::Index r = 0; r < rows; ++r) {
    double total = 0.0;
    for (std::size_t l = 0; l < n_loci; ++l) {
      for (std::size_t j = 0; j < LocusStats::kCount; ++j) {
        block[j] = calibration_pilot.stats(
            r, static_cast<Eigen::Index>(l * LocusStats::kCount + j));
      }
      tau_s_rows(r, static_cast<Eigen::Index>(l)) = proj_s.project(block);
      total += proj_ne.project(block);
    }
    tau_ne_rows[r] = total;
  }
  const auto column_sd = [](const Eigen::VectorXd& v) {
    const double mean = v.mean();
    return std::sqrt((v.array() - mean).square().sum() / double(v.size() - 1));
  };
  double tau_ne_sd = column_sd(tau_ne_rows);
  if (tau_ne_sd <= 0.0) tau_ne_sd = proj_ne.tau_sd;
  std::vector<double> tau_s_sd(n_loci);
  for (std::size_t l = 0; l < n_loci; ++l) {
    tau_s_sd[l] = column_sd(tau_s_rows.col(static_cast<Eigen::Index>(l)));
    if (tau_s_sd[l] <= 0.0) tau_s_sd[l] = proj_s.tau_sd;
  }

  Eigen::MatrixXd distances(rows, static_cast<Eigen::Index>(1 + n_loci));
  for (Eigen::Index r = 0; r < rows; ++r) {
    distances(r, 0) = std::abs(tau_ne_rows[r] - tau_ne_obs) / tau_ne_sd;
    for (std::size_t l = 0; l < n_loci; ++l) {
      distances(r, static_cast<Eigen::Index>(1 + l)) =
          std::abs(tau_s_rows(r, static_cast<Eigen::Index>(l)) - tau_s_obs[l]) / tau_s_sd[l];
    }
  }
  std::vector<int> distance_column(space.size(), -1);
  distance_column[result.layout.ne_index()] = 0;
  for (std::size_t l = 0; l < n_loci; ++l) {
    distance_column[result.layout.s_index(l)] = static_cast<int>(1 + l);
  }

  CalibrationResult calibration = calibrate_from_distances(
      calibration_pilot.theta, distances, distance_column, space, config.retain);
  write_calibration_json(calibration, {}, {}, hash, paths.calibration());

  // schedule: uniform, hyper-parameters upweighted (their updates are free)
  std::vector<double> weights(space.size(), 1.0);
  if (priors.dfe) {
    weights[result.layout.chi_index()] = config.dfe.hyper_weight;
    weights[result.layout.sigma_index()] = config.dfe.hyper_weight;
  }
  if (!config.mcmc.schedule_weights.empty()) {
    if (config.mcmc.schedule_weights.size() != space.size()) {
      throw ConfigError("config.mcmc.schedule_weights: expected " +
                        std::to_string(space.size()) + " entries");
    }
    weights = config.mcmc.schedule_weights;
  }

  WfChainOptions options;
  options.layout = result.layout;
  options.proj_s = proj_s;
  options.proj_ne = proj_ne;
  options.tau_s_obs = tau_s_obs;
  options.tau_ne_obs = tau_ne_obs;
  options.tau_s_sd = tau_s_sd;
  options.tau_ne_sd = tau_ne_sd;
  options.delta_s.resize(n_loci);
  for (std::size_t l = 0; l < n_loci; ++l) {
    options.delta_s[l] = calibration.tolerance[result.layout.s_index(l)];
  }
  options.delta_ne = calibration.tolerance[result.layout.ne_index()];
  options.kernel = calibration.kernel();
  options.schedule = UpdateSchedule(weights);
  options.ploidy = ploidy;
  options.threads = threads;

  std::uint64_t warm_rounds = 0;
  ParameterVector start = calibration.start;
  if (config.mcmc.probe_iterations > 0) {
    const ProbeRunner probe = [&](const ParameterVector& probe_start, RandomSeed probe_seed) {
      WfChainOptions probe_options = options;
      probe_options.start = probe_start;
      probe_options.iterations = config.mcmc.probe_iterations;
      probe_options.seed = probe_seed;
      probe_options.store_records = false;
      const Chain probe_chain = run_wf_chain(space, result.dataset, probe_options);
      std::vector<std::uint64_t> accepts;
      for (const auto& c : probe_chain.diagnostics.per_param) accepts.push_back(c.mh_accepts);
      return accepts;
    };
    start = warm_start_retry(probe, calibration, calibration_pilot.theta,
                             derive_seed(config.seed, kWarmStartStream), &warm_rounds);
  }

  options.start = start;
  options.iterations = total_iterations(config, space.size());
  options.seed = derive_seed(config.seed, kChainStream);
  options.store_records = true;
  result.chain = run_wf_chain(space, result.dataset, options);
  result.chain.diagnostics.warm_start_rounds = warm_rounds;
  result.chain.config_snapshot = config_to_json(config).dump();

  write_chain_csv(result.chain, paths.chain());
  json extra;
  extra["warm_start_rounds"] = warm_rounds;
  extra["config_hash"] = hash;
  extra["n_loci"] = n_loci;
  extra["dropped_loci"] = raw.dropped;
  extra["projection_linearity"] = linearity_json(pilot, projections);
  write_diagnostics_json(result.chain, config_to_json(config), extra, paths.diagnostics());

  const auto entries = significance(result.chain, result.dataset, result.layout,
                                    config.mcmc.burn_in);
  write_significance_csv(entries, paths.significance());
  write_report_csv(report_posteriors(result.chain, config.mcmc.burn_in), paths.report());
  return result;
}

void sweep_pipeline(const RunConfig& raw_config, const PipelineOverrides& overrides) {
  const RunConfig config = effective_config(raw_config, overrides);
  const unsigned threads = effective_threads(overrides);
  const std::string hash = config_hash(config);
  StagePaths paths{config.output};

  const auto model = make_toy_model(config);
  const ParameterSpace space = config.build_space();
  const std::vector<double> s_obs = observed_statistics(config, *model);
  const PilotSet pilot = pilot_stage(config, *model, space, paths, hash, kPilotStream, threads,
                                     paths.pilot(), paths.pilot_meta());
  const TruthMarginals truth = toy_truth_marginals(config, space, s_obs);

  std::vector<LinearProjection> projections;
  if (config.sweep.projection_source == "analytic") {
    if (config.model.kind != "glm") {
      throw ConfigError("sweep.projection_source analytic requires the glm model");
    }
    const Eigen::MatrixXd design = cyclic_design_matrix(config.model.dimension);
    for (std::size_t i = 0; i < space.size(); ++i) {
      LinearProjection proj;
      proj.parameter = space.param(i).name;
      proj.beta = design.col(static_cast<Eigen::Index>(i));  // noise covariance is I
      set_tau_moments(proj, pilot);
      projections.push_back(std::move(proj));
    }
  } else {
    projections = learn_stage(config, pilot, paths, hash);
  }

  SweepSetup setup;
  setup.model = model.get();
  setup.space = &space;
  setup.pilot = &pilot;
  setup.projections = projections;
  setup.s_obs = s_obs;
  setup.burn_in = config.mcmc.burn_in;
  setup.start_noise_sd = config.sweep.start_noise_sd;
  if (config.sweep.start == "truth") {
    if (config.observed.truth.empty()) {
      throw ConfigError("sweep.start truth requires observed.truth");
    }
    setup.start.resize(space.size());
    for (std::size_t i = 0; i < space.size(); ++i) {
      const double natural = config.observed.truth[i];
      setup.start[i] = space.param(i).scale == ParamScale::kLog10 ? std::log10(natural) : natural;
    }
  } else {
    setup.start = calibrate(pilot, projections, s_obs, space, config.retain).start;
  }

  SweepGrid grid;
  grid.tolerances = config.sweep.tolerances;
  grid.widths = config.sweep.widths;
  grid.replicates = config.sweep.replicates;
  grid.iterations = total_iterations(config, space.size());

  std::vector<std::string> names;
  for (const auto& p : space.params()) names.push_back(p.name);

  json summary;
  bool first = true;
  for (const Method method : {Method::kAbcMcmc, Method::kAbcPass}) {
    const SweepResult result = run_sweep(setup, method, grid, truth,
                                         derive_seed(config.seed, kSweepStream), threads);
    write_sweep_csv(result, names, paths.sweep_csv(), !first);
    summary[method_name(method)] = sweep_summary_json(result, names);
    first = false;
  }
  write_json_file(summary, paths.sweep_summary());
}

std::vector<double> simulate_fixture(const RunConfig& raw_config,
                                     const PipelineOverrides& overrides) {
  const RunConfig config = effective_config(raw_config, overrides);
  StagePaths paths{config.output};
  const auto& fx = config.fixture;

  SamplingPlan plan;
  for (int t = 0; t < fx.n_timepoints; ++t) {
    plan.points.push_back({t * fx.generations_between, fx.sample_size});
  }
  const auto ne = static_cast<std::uint64_t>(std::llround(std::pow(10.0, fx.log10_ne)));

  Engine engine = make_engine(derive_seed(config.seed, kFixtureStream));
  std::uniform_real_distribution<double> init(fx.init_freq_lower, fx.init_freq_upper);
  std::uniform_real_distribution<double> s_prior(0.0, 1.0);

  std::vector<double> truth;
  truth.push_back(fx.log10_ne);
  TrajectoryDataset dataset;
  for (int l = 0; l < fx.n_loci; ++l) {
    const double s = fx.s.empty() ? s_prior(engine) : fx.s[static_cast<std::size_t>(l) % fx.s.size()];
    const double init_freq = init(engine);
    const auto traj = wf_simulate_locus(ne, s, init_freq, plan, engine(), config.ploidy());
    truth.push_back(s);
    RawLocus locus;
    locus.id = "locus_" + std::to_string(l + 1);
    locus.position = l + 1;
    for (std::size_t t = 0; t < plan.size(); ++t) {
      locus.points.push_back({plan.points[t].generation, plan.points[t].sample_size,
                              traj.counts[t]});
    }
    dataset.loci.push_back(std::move(locus));
  }
  write_trajectories(dataset, paths.trajectories());
  return truth;
}

void report_pipeline(const std::filesystem::path& chain_csv, double burn_in,
                     const std::filesystem::path& out_csv) {
  const Chain chain = read_chain_csv(chain_csv);
  const auto report = report_posteriors(chain, burn_in);

  // hierarchical WF chains additionally get P(Ne s > 10) per locus
  const bool wf_shaped = !chain.param_names.empty() && chain.param_names[0] == "log10Ne";
  std::vector<double> probability(report.size(), -1.0);
  if (wf_shaped) {
    const auto skip = static_cast<std::size_t>(burn_in * double(chain.iterations));
    const double n_draws = double(chain.iterations - skip);
    for (std::size_t i = 0; i < chain.n_params(); ++i) {
      if (chain.param_names[i].rfind("s_", 0) != 0) continue;
      double hits = 0.0;
      for (std::size_t t = skip; t < chain.iterations; ++t) {
        const auto row = chain.row(t);
        if (std::pow(10.0, row[0]) * row[i] > 10.0) hits += 1.0;
      }
      probability[i] = hits / n_draws;
    }
  }

  if (out_csv.has_parent_path()) std::filesystem::create_directories(out_csv.parent_path());
  std::ofstream out(out_csv);
  if (!out) throw RunError("cannot write file: " + out_csv.string());
  out << "param,median,mean,q025,q975,P_Nes_gt_10\n";
  for (std::size_t i = 0; i < report.size(); ++i) {
    const auto& r = report[i];
    out << r.parameter << ',' << format_double(r.median) << ',' << format_double(r.mean) << ','
        << format_double(r.q025) << ',' << format_double(r.q975) << ',';
    if (probability[i] >= 0.0) out << format_double(probability[i]);
    out << '\n';
  }
}

}  // namespace abcpass
