#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "abcpass/errors.hpp"
#include "abcpass/pipeline.hpp"

namespace {

using namespace abcpass;

struct GlobalArgs {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
  std::optional<std::string> out;
};

RunConfig load(const GlobalArgs& args) {
  if (args.config_path.empty()) throw ConfigError("--config is required for this subcommand");
  return load_config(args.config_path);
}

PipelineOverrides overrides(const GlobalArgs& args) {
  PipelineOverrides o;
  o.seed = args.seed;
  o.output = args.out;
  o.threads = args.threads;
  return o;
}

void print_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::cout << in.rdbuf();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Likelihood-free MCMC inference with parameter-specific statistics"};
  app.require_subcommand(1);

  GlobalArgs args;
  app.add_option("--config", args.config_path, "Run configuration file (JSON)");
  std::uint64_t seed_value = 0;
  auto* seed_opt = app.add_option("--seed", seed_value, "Override the config seed");
  app.add_option("--threads", args.threads, "Worker threads (default: all cores)");
  std::string out_value;
  auto* out_opt = app.add_option("--out", out_value, "Override the output directory");

  auto* cmd_pilot = app.add_subcommand("pilot", "Generate prior-predictive pilot simulations");
  auto* cmd_learn = app.add_subcommand("learn", "Fit Box-Cox and per-parameter projections");
  auto* cmd_calibrate =
      app.add_subcommand("calibrate", "Derive tolerances, proposal widths and the chain start");
  auto* cmd_run = app.add_subcommand("run", "Full pipeline: pilot, learn, calibrate, sample");
  auto* cmd_sweep = app.add_subcommand("sweep", "Tolerance x proposal-width grid for both methods");
  auto* cmd_wf = app.add_subcommand("wf-infer", "Hierarchical Wright-Fisher inference");
  auto* cmd_report = app.add_subcommand("report", "Posterior summary table for a chain CSV");
  auto* cmd_simulate = app.add_subcommand("simulate", "Generate a synthetic trajectory fixture");
  auto* cmd_schema = app.add_subcommand("config-schema", "Print the config schema with defaults");

  std::string report_chain;
  double report_burn_in = 0.1;
  cmd_report->add_option("chain", report_chain, "Chain CSV path")->required();
  cmd_report->add_option("--burn-in", report_burn_in, "Burn-in fraction (default 0.1)");

  try {
    app.parse(argc, argv);
    if (seed_opt->count() > 0) args.seed = seed_value;
    if (out_opt->count() > 0) args.out = out_value;

    if (cmd_schema->parsed()) {
      std::cout << config_schema_text() << '\n';
      return 0;
    }
    if (cmd_pilot->parsed()) {
      pipeline_run(load(args), overrides(args), PipelineStage::kPilot);
      return 0;
    }
    if (cmd_learn->parsed()) {
      pipeline_run(load(args), overrides(args), PipelineStage::kLearn);
      return 0;
    }
    if (cmd_calibrate->parsed()) {
      pipeline_run(load(args), overrides(args), PipelineStage::kCalibrate);
      return 0;
    }
    if (cmd_run->parsed()) {
      pipeline_run(load(args), overrides(args));
      return 0;
    }
    if (cmd_sweep->parsed()) {
      sweep_pipeline(load(args), overrides(args));
      return 0;
    }
    if (cmd_wf->parsed()) {
      wf_infer(load(args), overrides(args));
      return 0;
    }
    if (cmd_simulate->parsed()) {
      simulate_fixture(load(args), overrides(args));
      return 0;
    }
    if (cmd_report->parsed()) {
      const auto out_csv = std::filesystem::path(report_chain).parent_path() / "summary.csv";
      report_pipeline(report_chain, report_burn_in, out_csv);
      print_file(out_csv);
      return 0;
    }
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
