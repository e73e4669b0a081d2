#include "abcpass/config.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <set>

#include "abcpass/errors.hpp"

namespace abcpass {

namespace {

using nlohmann::json;

/// View over a JSON object that tracks which keys were read and rejects the
/// rest, so typos in config files fail loudly.
class Strict {
 public:
  Strict(const json& node, std::string path) : node_(&node), path_(std::move(path)) {
    if (!node.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  bool has(const std::string& key) {
    consumed_.insert(key);
    return node_->contains(key);
  }

  const json& at(const std::string& key) {
    consumed_.insert(key);
    return node_->at(key);
  }

  template <typename T>
  void read(const std::string& key, T& out) {
    consumed_.insert(key);
    if (!node_->contains(key)) return;
    try {
      node_->at(key).get_to(out);
    } catch (const json::exception& e) {
      throw ConfigError(path_ + "." + key + ": " + e.what());
    }
  }

  std::string child_path(const std::string& key) const { return path_ + "." + key; }

  void finish() const {
    for (const auto& [key, value] : node_->items()) {
      (void)value;
      if (!consumed_.contains(key)) {
        throw ConfigError(path_ + ": unknown key '" + key + "'");
      }
    }
  }

 private:
  const json* node_;
  std::string path_;
  std::set<std::string> consumed_;
};

void parse_model(const json& node, const std::string& path, ModelSection& out) {
  Strict s(node, path);
  s.read("kind", out.kind);
  s.read("sample_size", out.sample_size);
  s.read("dimension", out.dimension);
  s.read("trials", out.trials);
  s.read("trajectories", out.trajectories);
  s.read("window_last", out.window_last);
  s.read("ploidy", out.ploidy);
  s.finish();
  static const std::set<std::string> kinds = {"normal", "glm", "binomial", "wf"};
  if (!kinds.contains(out.kind)) {
    throw ConfigError(path + ".kind: must be one of normal, glm, binomial, wf");
  }
  if (out.ploidy != "haploid" && out.ploidy != "diploid") {
    throw ConfigError(path + ".ploidy: must be haploid or diploid");
  }
}

void parse_parameter(const json& node, const std::string& path, ParameterConfig& out) {
  Strict s(node, path);
  s.read("name", out.name);
  s.read("prior", out.prior);
  s.read("lower", out.lower);
  s.read("upper", out.upper);
  s.read("count", out.count);
  s.finish();
  if (out.name.empty()) throw ConfigError(path + ".name: required");
  if (out.prior != "uniform" && out.prior != "log10-uniform") {
    throw ConfigError(path + ".prior: must be uniform or log10-uniform");
  }
  if (!(out.lower < out.upper)) throw ConfigError(path + ": requires lower < upper");
  if (out.count < 1) throw ConfigError(path + ".count: must be >= 1");
}

void parse_observed(const json& node, const std::string& path, ObservedSection& out) {
  Strict s(node, path);
  s.read("values", out.values);
  s.read("truth", out.truth);
  s.read("seed", out.seed);
  s.finish();
  if (!out.values.empty() && !out.truth.empty()) {
    throw ConfigError(path + ": give either explicit values or truth parameters, not both");
  }
}

void parse_dfe(const json& node, const std::string& path, DfeSection& out) {
  Strict s(node, path);
  s.read("enabled", out.enabled);
  s.read("chi_lower", out.chi_lower);
  s.read("chi_upper", out.chi_upper);
  s.read("log10_sigma_lower", out.log10_sigma_lower);
  s.read("log10_sigma_upper", out.log10_sigma_upper);
  s.read("s_max", out.s_max);
  s.read("hyper_weight", out.hyper_weight);
  s.finish();
  if (out.s_max <= 0.0) throw ConfigError(path + ".s_max: must be > 0");
  if (out.hyper_weight <= 0.0) throw ConfigError(path + ".hyper_weight: must be > 0");
}

void parse_mcmc(const json& node, const std::string& path, McmcSection& out) {
  Strict s(node, path);
  s.read("iterations_per_parameter", out.iterations_per_parameter);
  s.read("iterations", out.iterations);
  s.read("burn_in", out.burn_in);
  s.read("probe_iterations", out.probe_iterations);
  s.read("schedule_weights", out.schedule_weights);
  s.finish();
  if (out.burn_in < 0.0 || out.burn_in >= 1.0) {
    throw ConfigError(path + ".burn_in: must lie in [0, 1)");
  }
}

void parse_sweep(const json& node, const std::string& path, SweepSection& out) {
  Strict s(node, path);
  s.read("tolerances", out.tolerances);
  s.read("widths", out.widths);
  s.read("replicates", out.replicates);
  s.read("projection_source", out.projection_source);
  s.read("start", out.start);
  s.read("start_noise_sd", out.start_noise_sd);
  s.finish();
  if (out.tolerances.empty() || out.widths.empty()) {
    throw ConfigError(path + ": tolerances and widths must be nonempty");
  }
  if (out.replicates < 1) throw ConfigError(path + ".replicates: must be >= 1");
  if (out.projection_source != "learned" && out.projection_source != "analytic") {
    throw ConfigError(path + ".projection_source: must be learned or analytic");
  }
  if (out.start != "calibrated" && out.start != "truth") {
    throw ConfigError(path + ".start: must be calibrated or truth");
  }
  if (out.start_noise_sd < 0.0) throw ConfigError(path + ".start_noise_sd: must be >= 0");
}

void parse_fixture(const json& node, const std::string& path, FixtureSection& out) {
  Strict s(node, path);
  s.read("log10_ne", out.log10_ne);
  s.read("s", out.s);
  s.read("n_loci", out.n_loci);
  s.read("n_timepoints", out.n_timepoints);
  s.read("generations_between", out.generations_between);
  s.read("sample_size", out.sample_size);
  s.read("init_freq_lower", out.init_freq_lower);
  s.read("init_freq_upper", out.init_freq_upper);
  s.finish();
  if (out.n_loci < 1 || out.n_timepoints < 2 || out.generations_between < 1 ||
      out.sample_size < 2) {
    throw ConfigError(path + ": invalid fixture geometry");
  }
  if (!(out.init_freq_lower > 0.0 && out.init_freq_lower <= out.init_freq_upper &&
        out.init_freq_upper < 1.0)) {
    throw ConfigError(path + ": init_freq bounds must satisfy 0 < lower <= upper < 1");
  }
}

}  // namespace

RunConfig parse_config(const json& doc) {
  RunConfig config;
  Strict s(doc, "config");
  if (!s.has("model")) throw ConfigError("config.model: required");
  parse_model(s.at("model"), "config.model", config.model);

  if (s.has("parameters")) {
    const json& params = s.at("parameters");
    if (!params.is_array()) throw ConfigError("config.parameters: expected an array");
    for (std::size_t i = 0; i < params.size(); ++i) {
      ParameterConfig p;
      parse_parameter(params[i], "config.parameters[" + std::to_string(i) + "]", p);
      config.parameters.push_back(std::move(p));
    }
  }

  s.read("method", config.method);
  s.read("pilot_size", config.pilot_size);
  s.read("retain", config.retain);
  s.read("ridge", config.ridge);
  if (s.has("mcmc")) parse_mcmc(s.at("mcmc"), "config.mcmc", config.mcmc);
  if (s.has("observed")) parse_observed(s.at("observed"), "config.observed", config.observed);
  if (s.has("dfe")) parse_dfe(s.at("dfe"), "config.dfe", config.dfe);
  if (s.has("sweep")) parse_sweep(s.at("sweep"), "config.sweep", config.sweep);
  if (s.has("fixture")) parse_fixture(s.at("fixture"), "config.fixture", config.fixture);
  s.read("seed", config.seed);
  s.read("output", config.output);
  s.finish();

  if (config.method != "abc-pass" && config.method != "abc-mcmc") {
    throw ConfigError("config.method: must be abc-pass or abc-mcmc");
  }
  if (config.retain <= 0.0 || config.retain > 1.0) {
    throw ConfigError("config.retain: must lie in (0, 1]");
  }
  if (config.pilot_size < 50) throw ConfigError("config.pilot_size: must be >= 50");
  if (config.model.kind == "wf") {
    if (!config.parameters.empty()) {
      throw ConfigError("config.parameters: the wf model defines its own parameters; "
                        "set priors via the dfe block and defaults");
    }
  } else if (config.parameters.empty()) {
    throw ConfigError("config.parameters: required for toy models");
  }
  return config;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError("config parse error in " + path + ": " + e.what());
  }
  return parse_config(doc);
}

ParameterSpace RunConfig::build_space() const {
  contract_check(model.kind != "wf", "build_space: wf spaces are built from the dataset");
  std::vector<ParameterDef> defs;
  for (const auto& p : parameters) {
    PriorSpec prior;
    prior.kind = p.prior == "log10-uniform" ? PriorKind::kLog10Uniform : PriorKind::kUniform;
    prior.lower = p.lower;
    prior.upper = p.upper;
    const ParamScale scale =
        p.prior == "log10-uniform" ? ParamScale::kLog10 : ParamScale::kLinear;
    if (p.count == 1) {
      defs.push_back({p.name, prior, scale});
    } else {
      for (int i = 1; i <= p.count; ++i) {
        defs.push_back({p.name + "_" + std::to_string(i), prior, scale});
      }
    }
  }
  return ParameterSpace(std::move(defs));
}

WfPriors RunConfig::wf_priors() const {
  WfPriors priors;
  priors.dfe = dfe.enabled;
  priors.chi_lower = dfe.chi_lower;
  priors.chi_upper = dfe.chi_upper;
  priors.log10_sigma_lower = dfe.log10_sigma_lower;
  priors.log10_sigma_upper = dfe.log10_sigma_upper;
  priors.s_max = dfe.s_max;
  return priors;
}

Ploidy RunConfig::ploidy() const {
  return model.ploidy == "diploid" ? Ploidy::kDiploid : Ploidy::kHaploid;
}

json config_to_json(const RunConfig& c) {
  json doc;
  doc["model"] = {{"kind", c.model.kind},       {"sample_size", c.model.sample_size},
                  {"dimension", c.model.dimension}, {"trials", c.model.trials},
                  {"trajectories", c.model.trajectories}, {"window_last", c.model.window_last},
                  {"ploidy", c.model.ploidy}};
  doc["parameters"] = json::array();
  for (const auto& p : c.parameters) {
    doc["parameters"].push_back({{"name", p.name},
                                 {"prior", p.prior},
                                 {"lower", p.lower},
                                 {"upper", p.upper},
                                 {"count", p.count}});
  }
  doc["method"] = c.method;
  doc["pilot_size"] = c.pilot_size;
  doc["retain"] = c.retain;
  doc["ridge"] = c.ridge;
  doc["mcmc"] = {{"iterations_per_parameter", c.mcmc.iterations_per_parameter},
                 {"iterations", c.mcmc.iterations},
                 {"burn_in", c.mcmc.burn_in},
                 {"probe_iterations", c.mcmc.probe_iterations},
                 {"schedule_weights", c.mcmc.schedule_weights}};
  doc["observed"] = {{"values", c.observed.values},
                     {"truth", c.observed.truth},
                     {"seed", c.observed.seed}};
  doc["dfe"] = {{"enabled", c.dfe.enabled},
                {"chi_lower", c.dfe.chi_lower},
                {"chi_upper", c.dfe.chi_upper},
                {"log10_sigma_lower", c.dfe.log10_sigma_lower},
                {"log10_sigma_upper", c.dfe.log10_sigma_upper},
                {"s_max", c.dfe.s_max},
                {"hyper_weight", c.dfe.hyper_weight}};
  doc["sweep"] = {{"tolerances", c.sweep.tolerances},
                  {"widths", c.sweep.widths},
                  {"replicates", c.sweep.replicates},
                  {"projection_source", c.sweep.projection_source},
                  {"start", c.sweep.start},
                  {"start_noise_sd", c.sweep.start_noise_sd}};
  doc["fixture"] = {{"log10_ne", c.fixture.log10_ne},
                    {"s", c.fixture.s},
                    {"n_loci", c.fixture.n_loci},
                    {"n_timepoints", c.fixture.n_timepoints},
                    {"generations_between", c.fixture.generations_between},
                    {"sample_size", c.fixture.sample_size},
                    {"init_freq_lower", c.fixture.init_freq_lower},
                    {"init_freq_upper", c.fixture.init_freq_upper}};
  doc["seed"] = c.seed;
  doc["output"] = c.output;
  return doc;
}

std::string config_hash(const RunConfig& config) {
  // FNV-1a over the canonical dump; stable across runs
  const std::string text = config_to_json(config).dump();
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (const unsigned char ch : text) {
    hash ^= ch;
    hash *= 0x100000001b3ULL;
  }
  char buffer[17];
  std::snprintf(buffer, sizeof(buffer), "%016llx", static_cast<unsigned long long>(hash));
  return std::string(buffer);
}

std::string config_schema_text() {
  RunConfig defaults;
  defaults.model.kind = "normal";
  json doc = config_to_json(defaults);
  std::string out =
      "Configuration schema (JSON). Unknown keys are rejected. Defaults shown:\n";
  out += doc.dump(2);
  out +=
      "\n\nNotes:\n"
      "  model.kind: normal | glm | binomial | wf\n"
      "  parameters[].prior: uniform | log10-uniform (log10-uniform parameters are\n"
      "    stored and proposed in log10 units; simulators receive 10^value)\n"
      "  parameters[].count > 1 expands to name_1..name_count\n"
      "  method: abc-pass | abc-mcmc\n"
      "  mcmc.iterations = 0 means iterations_per_parameter * n_parameters\n"
      "  observed: set either values (statistics) or truth (natural-scale parameters\n"
      "    simulated once with observed.seed)\n"
      "  dfe: hierarchical truncated-GPD prior on wf selection coefficients\n"
      "  wf parameter space: log10Ne[, chi, log10sigma], s_1..s_L from the data\n";
  return out;
}

}  // namespace abcpass
