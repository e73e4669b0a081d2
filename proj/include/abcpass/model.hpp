#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "abcpass/gpd.hpp"
#include "abcpass/rng.hpp"

namespace abcpass {

enum class PriorKind { kUniform, kLog10Uniform, kGpdConditional };
enum class ParamScale { kLinear, kLog10 };

/// Prior over one parameter. All priors have finite support [lower, upper] in
/// the parameter's stored coordinate (log10 units for log10-scaled parameters).
/// A gpd-conditional prior additionally references the two hyper-parameters
/// (shape, scale) that define its truncated-GPD density.
struct PriorSpec {
  PriorKind kind = PriorKind::kUniform;
  double lower = 0.0;
  double upper = 1.0;
  std::string shape_ref;  // gpd-conditional only
  std::string scale_ref;  // gpd-conditional only
};

struct ParameterDef {
  std::string name;
  PriorSpec prior;
  ParamScale scale = ParamScale::kLinear;
};

using ParameterVector = std::vector<double>;

/// Ordered parameter definitions; the schema of every theta vector. Parameters
/// with log10 scale are stored and proposed in log10 space; simulators receive
/// the natural-scale value via natural_value().
class ParameterSpace {
 public:
  ParameterSpace(std::vector<ParameterDef> params, double gpd_s_max = 1.0);

  std::size_t size() const { return params_.size(); }
  const ParameterDef& param(std::size_t i) const { return params_[i]; }
  const std::vector<ParameterDef>& params() const { return params_; }
  std::size_t index_of(const std::string& name) const;

  double lower(std::size_t i) const { return params_[i].prior.lower; }
  double upper(std::size_t i) const { return params_[i].prior.upper; }
  double range(std::size_t i) const { return upper(i) - lower(i); }
  double gpd_s_max() const { return gpd_s_max_; }

  bool in_support(std::size_t i, double stored_value) const;
  bool in_support(std::span<const double> theta) const;

  double natural_value(std::size_t i, double stored_value) const;
  void natural(std::span<const double> theta, std::span<double> out) const;
  ParameterVector natural(std::span<const double> theta) const;

  /// Truncated-GPD parameters for a gpd-conditional component, resolved from
  /// the hyper components of theta (or from an explicit {shape, scale} pair).
  GpdParams gpd_params_for(std::size_t i, std::span<const double> theta,
                           std::span<const double> hyper_override = {}) const;

  /// Joint prior density at theta; 0 if any component is outside its support.
  /// hyper_override, when given, supplies {shape, scale} natural values for
  /// every gpd-conditional component instead of reading them from theta.
  double prior_density(std::span<const double> theta,
                       std::span<const double> hyper_override = {}) const;
  double prior_log_density(std::span<const double> theta,
                           std::span<const double> hyper_override = {}) const;

  /// One i.i.d. draw from the prior. gpd-conditional components are drawn by
  /// inverse-CDF from their truncated GPD given the drawn hyper components.
  ParameterVector prior_sample(Engine& engine) const;

  /// log pi(proposed) - log pi(theta) for states already inside the support
  /// box (which reflected proposals guarantee). Uniform terms cancel; only
  /// gpd-conditional densities contribute. -inf when a gpd component falls
  /// outside its conditional support.
  double prior_log_ratio(std::span<const double> theta, std::span<const double> proposed) const;

  /// prior_log_ratio specialized for a proposal differing only in component i:
  /// touches only the gpd-conditional densities that depend on i.
  double prior_log_ratio_component(std::span<const double> theta,
                                   std::span<const double> proposed, std::size_t i) const;

  bool has_conditional_priors() const { return !gpd_indices_.empty(); }
  /// Indices of gpd-conditional components whose density depends on parameter i
  /// (i itself if gpd-conditional, or every component referencing i as a hyper).
  const std::vector<std::size_t>& dependents_of(std::size_t i) const { return dependents_[i]; }

 private:
  std::vector<ParameterDef> params_;
  std::vector<int> shape_index_;  // per param; -1 unless gpd-conditional
  std::vector<int> scale_index_;
  std::vector<std::size_t> gpd_indices_;
  std::vector<std::vector<std::size_t>> dependents_;
  double gpd_s_max_;
};

/// Symmetric per-parameter proposal widths (theta_i' uniform on
/// [theta_i - w_i, theta_i + w_i], reflected at the prior bounds).
struct ProposalKernel {
  std::vector<double> widths;
};

/// Reflects x into [lo, hi] by folding at the bounds.
double reflect_into(double x, double lo, double hi);

struct ProposalDiagnostics {
  std::uint64_t uniform_fallbacks = 0;  // width exceeded the support length
};

/// Proposes a new value for component i only: symmetric uniform window of the
/// kernel width around the current value, reflected at the prior bounds.
/// Reflection preserves q(theta'|theta) = q(theta|theta'). A width larger than
/// the support length falls back to a uniform draw on the support (flagged).
double propose_component(double current, std::size_t i, const ProposalKernel& kernel,
                         const ParameterSpace& space, Engine& engine,
                         ProposalDiagnostics* diag = nullptr);

/// Full-vector form of propose_component: returns theta with component i replaced.
ParameterVector propose_update(std::span<const double> theta, std::size_t i,
                               const ProposalKernel& kernel, const ParameterSpace& space,
                               Engine& engine, ProposalDiagnostics* diag = nullptr);

/// Simulator contract: deterministic given (theta, seed); output length fixed.
/// theta is passed in natural scale (log10 components already exponentiated).
class Simulator {
 public:
  virtual ~Simulator() = default;
  virtual std::size_t stat_count() const = 0;
  virtual std::vector<std::string> stat_names() const = 0;
  virtual void simulate(std::span<const double> theta_natural, RandomSeed seed,
                        std::span<double> out) const = 0;

  std::vector<double> simulate(std::span<const double> theta_natural, RandomSeed seed) const {
    std::vector<double> out(stat_count());
    simulate(theta_natural, seed, out);
    return out;
  }
};

}  // namespace abcpass
