#include "abcpass/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "abcpass/errors.hpp"

namespace abcpass {

namespace {

using nlohmann::json;

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw RunError("cannot write file: " + path.string());
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw RunError("cannot open file: " + path.string());
  return in;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_double(const std::string& text, const std::string& where) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw RunError(where + ": cannot parse number '" + text + "'");
  }
}

long long parse_int(const std::string& text, const std::string& where) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(text, &used);
    if (used != text.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw RunError(where + ": cannot parse integer '" + text + "'");
  }
}

Eigen::VectorXd vector_from_json(const json& node) {
  Eigen::VectorXd out(node.size());
  for (std::size_t i = 0; i < node.size(); ++i) out[static_cast<Eigen::Index>(i)] = node[i];
  return out;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

}  // namespace

std::string format_double(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return std::string(buffer);
}

void write_chain_csv(const Chain& chain, const std::filesystem::path& path) {
  contract_check(!chain.records.empty() || chain.iterations == 0,
                 "write_chain_csv: chain was streamed, not stored");
  auto out = open_out(path);
  out << "iter";
  for (const auto& name : chain.param_names) out << ',' << name;
  out << '\n';
  const std::size_t n = chain.n_params();
  for (std::size_t t = 0; t < chain.iterations; ++t) {
    out << (t + 1);
    for (std::size_t i = 0; i < n; ++i) out << ',' << format_double(chain.records[t * n + i]);
    out << '\n';
  }
}

Chain read_chain_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw RunError(path.string() + ": empty chain file");
  auto header = split_csv_line(line);
  if (header.empty() || header[0] != "iter") {
    throw RunError(path.string() + ": chain header must start with 'iter'");
  }
  Chain chain;
  chain.param_names.assign(header.begin() + 1, header.end());
  const std::size_t n = chain.param_names.size();
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != n + 1) {
      throw RunError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                     std::to_string(n + 1) + " fields");
    }
    for (std::size_t i = 0; i < n; ++i) {
      chain.records.push_back(
          parse_double(fields[i + 1], path.string() + ":" + std::to_string(line_no)));
    }
    ++chain.iterations;
  }
  chain.diagnostics.per_param.resize(n);
  return chain;
}

void write_pilot_csv(const PilotSet& pilot, const std::filesystem::path& path) {
  auto out = open_out(path);
  bool first = true;
  for (const auto& name : pilot.param_names) {
    out << (first ? "" : ",") << name;
    first = false;
  }
  for (const auto& name : pilot.stat_names) out << ',' << name;
  out << '\n';
  for (Eigen::Index r = 0; r < pilot.theta.rows(); ++r) {
    for (Eigen::Index j = 0; j < pilot.theta.cols(); ++j) {
      out << (j == 0 ? "" : ",") << format_double(pilot.theta(r, j));
    }
    for (Eigen::Index j = 0; j < pilot.stats.cols(); ++j) {
      out << ',' << format_double(pilot.stats(r, j));
    }
    out << '\n';
  }
}

PilotSet read_pilot_csv(const std::filesystem::path& path, std::size_t n_params) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw RunError(path.string() + ": empty pilot file");
  const auto header = split_csv_line(line);
  if (header.size() <= n_params) {
    throw RunError(path.string() + ": pilot header shorter than the parameter count");
  }
  PilotSet pilot;
  pilot.param_names.assign(header.begin(), header.begin() + static_cast<long>(n_params));
  pilot.stat_names.assign(header.begin() + static_cast<long>(n_params), header.end());
  std::vector<double> values;
  std::size_t rows = 0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw RunError(path.string() + ":" + std::to_string(line_no) + ": field count mismatch");
    }
    for (const auto& f : fields) {
      values.push_back(parse_double(f, path.string() + ":" + std::to_string(line_no)));
    }
    ++rows;
  }
  const std::size_t m = pilot.stat_names.size();
  pilot.theta.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(n_params));
  pilot.stats.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(m));
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t j = 0; j < n_params; ++j) {
      pilot.theta(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) =
          values[r * (n_params + m) + j];
    }
    for (std::size_t j = 0; j < m; ++j) {
      pilot.stats(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) =
          values[r * (n_params + m) + n_params + j];
    }
  }
  return pilot;
}

json projection_to_json(const LinearProjection& proj) {
  json doc;
  doc["parameter"] = proj.parameter;
  doc["beta"] = vector_to_json(proj.beta);
  doc["lambda"] = vector_to_json(proj.transform.lambda);
  doc["shift"] = vector_to_json(proj.transform.shift);
  doc["floor"] = vector_to_json(proj.transform.floor);
  doc["ref_min"] = vector_to_json(proj.transform.ref_min);
  doc["ref_max"] = vector_to_json(proj.transform.ref_max);
  doc["degenerate"] = proj.transform.degenerate;
  doc["tau_mean"] = proj.tau_mean;
  doc["tau_sd"] = proj.tau_sd;
  return doc;
}

LinearProjection projection_from_json(const json& doc) {
  LinearProjection proj;
  proj.parameter = doc.at("parameter");
  proj.beta = vector_from_json(doc.at("beta"));
  proj.transform.lambda = vector_from_json(doc.at("lambda"));
  proj.transform.shift = vector_from_json(doc.at("shift"));
  proj.transform.floor = vector_from_json(doc.at("floor"));
  proj.transform.ref_min = vector_from_json(doc.at("ref_min"));
  proj.transform.ref_max = vector_from_json(doc.at("ref_max"));
  proj.transform.degenerate = doc.at("degenerate").get<std::vector<std::uint8_t>>();
  proj.tau_mean = doc.at("tau_mean");
  proj.tau_sd = doc.at("tau_sd");
  return proj;
}

void write_projections_json(const std::vector<LinearProjection>& projections,
                            const std::string& stamp, const std::filesystem::path& path) {
  json doc;
  doc["config_hash"] = stamp;
  doc["projections"] = json::array();
  for (const auto& proj : projections) doc["projections"].push_back(projection_to_json(proj));
  write_json_file(doc, path);
}

std::vector<LinearProjection> read_projections_json(const std::filesystem::path& path,
                                                    std::string* stamp) {
  const json doc = read_json_file(path);
  if (stamp != nullptr) *stamp = doc.value("config_hash", "");
  std::vector<LinearProjection> out;
  for (const auto& node : doc.at("projections")) out.push_back(projection_from_json(node));
  return out;
}

void write_calibration_json(const CalibrationResult& calibration,
                            const std::vector<double>& observed_stats,
                            const std::vector<double>& stat_sd, const std::string& stamp,
                            const std::filesystem::path& path) {
  json doc;
  doc["config_hash"] = stamp;
  doc["tolerance"] = calibration.tolerance;
  doc["width"] = calibration.width;
  doc["start"] = calibration.start;
  doc["global_tolerance"] = calibration.global_tolerance;
  doc["width_fallback"] = calibration.width_fallback;
  doc["retained_rows"] = calibration.retained_rows;
  doc["observed_stats"] = observed_stats;
  doc["stat_sd"] = stat_sd;
  write_json_file(doc, path);
}

CalibrationResult read_calibration_json(const std::filesystem::path& path,
                                        std::vector<double>* observed_stats,
                                        std::vector<double>* stat_sd, std::string* stamp) {
  const json doc = read_json_file(path);
  CalibrationResult out;
  doc.at("tolerance").get_to(out.tolerance);
  doc.at("width").get_to(out.width);
  doc.at("start").get_to(out.start);
  out.global_tolerance = doc.at("global_tolerance");
  doc.at("width_fallback").get_to(out.width_fallback);
  doc.at("retained_rows").get_to(out.retained_rows);
  if (observed_stats != nullptr) doc.at("observed_stats").get_to(*observed_stats);
  if (stat_sd != nullptr) doc.at("stat_sd").get_to(*stat_sd);
  if (stamp != nullptr) *stamp = doc.value("config_hash", "");
  return out;
}

void write_diagnostics_json(const Chain& chain, const json& config_echo, const json& extra,
                            const std::filesystem::path& path) {
  json doc;
  doc["seed"] = chain.seed;
  doc["iterations"] = chain.iterations;
  doc["config"] = config_echo;
  json params = json::array();
  for (std::size_t i = 0; i < chain.n_params(); ++i) {
    const auto& c = chain.diagnostics.per_param[i];
    params.push_back({{"parameter", chain.param_names[i]},
                      {"proposals", c.proposals},
                      {"simulations", c.simulations},
                      {"distance_passes", c.distance_passes},
                      {"mh_accepts", c.mh_accepts},
                      {"acceptance_rate",
                       c.proposals == 0 ? 0.0 : double(c.mh_accepts) / double(c.proposals)}});
  }
  doc["parameters"] = params;
  doc["total_simulations"] = chain.diagnostics.total_simulations;
  doc["sim_failures"] = chain.diagnostics.sim_failures;
  doc["uniform_fallback_proposals"] = chain.diagnostics.uniform_fallback_proposals;
  doc["boxcox_clamps"] = chain.diagnostics.boxcox_clamps;
  doc["warm_start_rounds"] = chain.diagnostics.warm_start_rounds;
  if (!extra.is_null()) doc["extra"] = extra;
  write_json_file(doc, path);
}

TrajectoryDataset ingest_trajectories(const std::filesystem::path& path, int window_last) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw RunError(path.string() + ": empty trajectory file");
  const auto header = split_csv_line(line);
  const std::vector<std::string> expected = {"locus", "position", "generation", "sample_size",
                                             "count"};
  if (header != expected) {
    throw RunError(path.string() + ": header must be locus,position,generation,sample_size,count");
  }

  // group rows by locus, keeping first-appearance order
  std::vector<RawLocus> loci;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    const std::string where = path.string() + ":" + std::to_string(line_no);
    if (fields.size() != 5) throw RunError(where + ": expected 5 fields");
    TrajectoryPoint point;
    point.generation = static_cast<int>(parse_int(fields[2], where));
    point.sample_size = static_cast<int>(parse_int(fields[3], where));
    point.count = static_cast<int>(parse_int(fields[4], where));
    if (point.sample_size < 1 || point.count < 0 || point.count > point.sample_size) {
      throw RunError(where + ": count must lie in [0, sample_size]");
    }
    auto it = std::find_if(loci.begin(), loci.end(),
                           [&](const RawLocus& l) { return l.id == fields[0]; });
    if (it == loci.end()) {
      loci.push_back({fields[0], parse_int(fields[1], where), {}});
      it = loci.end() - 1;
    }
    if (!it->points.empty() && point.generation <= it->points.back().generation) {
      throw RunError(where + ": generations must be strictly increasing per locus");
    }
    it->points.push_back(point);
  }

  TrajectoryDataset out;
  for (auto& locus : loci) {
    if (window_last > 0 && locus.points.size() > static_cast<std::size_t>(window_last)) {
      locus.points.erase(locus.points.begin(),
                         locus.points.end() - static_cast<long>(window_last));
    }
    // keep loci with minor-allele frequency >= 2% at >= 2 timepoints
    int informative = 0;
    for (const auto& p : locus.points) {
      if (double(p.count) / double(p.sample_size) >= 0.02) ++informative;
    }
    if (informative >= 2 && locus.points.size() >= 2) {
      out.loci.push_back(std::move(locus));
    } else {
      ++out.dropped;
    }
  }
  if (out.loci.empty()) {
    throw RunError(path.string() + ": no locus passed the 2%-at-2-timepoints filter");
  }
  return out;
}

void write_trajectories(const TrajectoryDataset& dataset, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "locus,position,generation,sample_size,count\n";
  for (const auto& locus : dataset.loci) {
    for (const auto& p : locus.points) {
      out << locus.id << ',' << locus.position << ',' << p.generation << ',' << p.sample_size
          << ',' << p.count << '\n';
    }
  }
}

void write_sweep_csv(const SweepResult& result, const std::vector<std::string>& param_names,
                     const std::filesystem::path& path, bool append) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, append ? std::ios::app : std::ios::out);
  if (!out) throw RunError("cannot write file: " + path.string());
  if (!append) out << "method,n_params,tolerance,width,param,mean_L1,n_failed\n";
  for (const auto& cell : result.cells) {
    for (std::size_t i = 0; i < param_names.size(); ++i) {
      out << method_name(result.method) << ',' << param_names.size() << ','
          << format_double(cell.tolerance_fraction) << ',' << format_double(cell.width_fraction)
          << ',' << param_names[i] << ',' << format_double(cell.mean_l1[i]) << ','
          << cell.n_failed[i] << '\n';
    }
  }
}

json sweep_summary_json(const SweepResult& result, const std::vector<std::string>& param_names) {
  json doc;
  doc["method"] = method_name(result.method);
  json per_param = json::array();
  for (std::size_t i = 0; i < param_names.size(); ++i) {
    per_param.push_back({{"param", param_names[i]},
                         {"min_L1", result.min_l1[i]},
                         {"tolerance", result.argmin[i].first},
                         {"width", result.argmin[i].second},
                         {"prior_baseline_L1", result.prior_baseline[i]}});
  }
  doc["per_param"] = per_param;
  doc["min_mean_L1"] = result.min_mean_l1;
  doc["argmin_mean"] = {{"tolerance", result.argmin_mean.first},
                        {"width", result.argmin_mean.second}};
  return doc;
}

void write_significance_csv(const std::vector<SignificanceEntry>& entries,
                            const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "locus,pos,P_Nes_gt_10,significant\n";
  for (const auto& e : entries) {
    out << e.id << ',' << e.position << ',' << format_double(e.probability) << ','
        << (e.significant ? 1 : 0) << '\n';
  }
}

std::vector<PosteriorSummary> report_posteriors(const Chain& chain, double burn_in_fraction) {
  contract_check(chain.iterations > 0, "report: empty chain");
  std::vector<PosteriorSummary> out;
  for (std::size_t i = 0; i < chain.n_params(); ++i) {
    auto values = chain.column(i, burn_in_fraction);
    contract_check(!values.empty(), "report: no samples after burn-in");
    std::sort(values.begin(), values.end());
    const auto quantile = [&](double q) {
      const double pos = q * double(values.size() - 1);
      const auto lo = static_cast<std::size_t>(pos);
      const auto hi = std::min(lo + 1, values.size() - 1);
      const double w = pos - double(lo);
      return (1.0 - w) * values[lo] + w * values[hi];
    };
    PosteriorSummary s;
    s.parameter = chain.param_names[i];
    s.median = quantile(0.5);
    s.q025 = quantile(0.025);
    s.q975 = quantile(0.975);
    double mean = 0.0;
    for (const double v : values) mean += v;
    s.mean = mean / double(values.size());
    out.push_back(s);
  }
  return out;
}

void write_report_csv(const std::vector<PosteriorSummary>& report,
                      const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "param,median,mean,q025,q975\n";
  for (const auto& r : report) {
    out << r.parameter << ',' << format_double(r.median) << ',' << format_double(r.mean) << ','
        << format_double(r.q025) << ',' << format_double(r.q975) << '\n';
  }
}

void write_json_file(const json& doc, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << doc.dump(2) << '\n';
}

json read_json_file(const std::filesystem::path& path) {
  auto in = open_in(path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw RunError(path.string() + ": " + e.what());
  }
  return doc;
}

}  // namespace abcpass
