#include "abcpass/model.hpp"

#include <cmath>
#include <limits>
#include <set>

#include "abcpass/errors.hpp"

namespace abcpass {

ParameterSpace::ParameterSpace(std::vector<ParameterDef> params, double gpd_s_max)
    : params_(std::move(params)), gpd_s_max_(gpd_s_max) {
  contract_check(!params_.empty(), "parameter space: at least one parameter required");
  contract_check(gpd_s_max_ > 0.0, "parameter space: gpd s_max must be > 0");

  std::set<std::string> seen;
  for (const auto& p : params_) {
    contract_check(seen.insert(p.name).second,
                   "parameter space: duplicate parameter name '" + p.name + "'");
    contract_check(p.prior.lower <= p.prior.upper,
                   "parameter '" + p.name + "': prior requires lower <= upper");
    if (p.prior.kind == PriorKind::kLog10Uniform) {
      contract_check(p.scale == ParamScale::kLog10,
                     "parameter '" + p.name + "': log10-uniform prior requires log10 scale");
    }
  }

  shape_index_.assign(params_.size(), -1);
  scale_index_.assign(params_.size(), -1);
  dependents_.resize(params_.size());
  for (std::size_t i = 0; i < params_.size(); ++i) {
    const auto& p = params_[i];
    if (p.prior.kind != PriorKind::kGpdConditional) continue;
    contract_check(!p.prior.shape_ref.empty() && !p.prior.scale_ref.empty() &&
                       p.prior.shape_ref != p.prior.scale_ref,
                   "parameter '" + p.name + "': gpd-conditional prior needs distinct shape and "
                   "scale hyper-parameter names");
    shape_index_[i] = static_cast<int>(index_of(p.prior.shape_ref));
    scale_index_[i] = static_cast<int>(index_of(p.prior.scale_ref));
    const auto hyper_ok = [&](int j) {
      return params_[j].prior.kind != PriorKind::kGpdConditional;
    };
    contract_check(hyper_ok(shape_index_[i]) && hyper_ok(scale_index_[i]),
                   "parameter '" + p.name + "': hyper-parameters cannot be gpd-conditional");
    gpd_indices_.push_back(i);
    dependents_[i].push_back(i);
    dependents_[static_cast<std::size_t>(shape_index_[i])].push_back(i);
    dependents_[static_cast<std::size_t>(scale_index_[i])].push_back(i);
  }
}

std::size_t ParameterSpace::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < params_.size(); ++i) {
    if (params_[i].name == name) return i;
  }
  throw ContractError("parameter space: unknown parameter '" + name + "'");
}

bool ParameterSpace::in_support(std::size_t i, double stored_value) const {
  return stored_value >= lower(i) && stored_value <= upper(i);
}

bool ParameterSpace::in_support(std::span<const double> theta) const {
  contract_check(theta.size() == size(), "in_support: theta length mismatch");
  for (std::size_t i = 0; i < size(); ++i) {
    if (!in_support(i, theta[i])) return false;
  }
  return true;
}

double ParameterSpace::natural_value(std::size_t i, double stored_value) const {
  return params_[i].scale == ParamScale::kLog10 ? std::pow(10.0, stored_value) : stored_value;
}

void ParameterSpace::natural(std::span<const double> theta, std::span<double> out) const {
  contract_check(theta.size() == size() && out.size() == size(),
                 "natural: theta length mismatch");
  for (std::size_t i = 0; i < size(); ++i) out[i] = natural_value(i, theta[i]);
}

ParameterVector ParameterSpace::natural(std::span<const double> theta) const {
  ParameterVector out(size());
  natural(theta, out);
  return out;
}

GpdParams ParameterSpace::gpd_params_for(std::size_t i, std::span<const double> theta,
                                         std::span<const double> hyper_override) const {
  contract_check(shape_index_[i] >= 0, "gpd_params_for: parameter is not gpd-conditional");
  GpdParams p;
  p.s_max = gpd_s_max_;
  if (!hyper_override.empty()) {
    contract_check(hyper_override.size() == 2, "gpd hyper override must be {shape, scale}");
    p.chi = hyper_override[0];
    p.sigma = hyper_override[1];
  } else {
    const auto si = static_cast<std::size_t>(shape_index_[i]);
    const auto ci = static_cast<std::size_t>(scale_index_[i]);
    p.chi = natural_value(si, theta[si]);
    p.sigma = natural_value(ci, theta[ci]);
  }
  return p;
}

double ParameterSpace::prior_log_density(std::span<const double> theta,
                                         std::span<const double> hyper_override) const {
  contract_check(theta.size() == size(), "prior density: theta length mismatch");
  double log_density = 0.0;
  for (std::size_t i = 0; i < size(); ++i) {
    if (!in_support(i, theta[i])) return -std::numeric_limits<double>::infinity();
    switch (params_[i].prior.kind) {
      case PriorKind::kUniform:
      case PriorKind::kLog10Uniform:
        // degenerate point support contributes a unit point mass
        if (range(i) > 0.0) log_density -= std::log(range(i));
        break;
      case PriorKind::kGpdConditional: {
        const double lf = gpd_log_density(theta[i], gpd_params_for(i, theta, hyper_override));
        if (std::isinf(lf)) return -std::numeric_limits<double>::infinity();
        log_density += lf;
        break;
      }
    }
  }
  return log_density;
}

double ParameterSpace::prior_density(std::span<const double> theta,
                                     std::span<const double> hyper_override) const {
  const double lf = prior_log_density(theta, hyper_override);
  return std::isinf(lf) ? 0.0 : std::exp(lf);
}

namespace {

double truncated_gpd_quantile(double u, const GpdParams& p) {
  // invert the untruncated CDF at u * F(support_end)
  const double q = u * gpd_cdf_untruncated(p.support_end(), p);
  double s;
  if (std::abs(p.chi) < kGpdShapeEpsilon) {
    s = -p.sigma * std::log1p(-q);
  } else {
    s = p.sigma / p.chi * std::expm1(-p.chi * std::log1p(-q));
  }
  return std::clamp(s, 0.0, p.support_end());
}

}  // namespace

ParameterVector ParameterSpace::prior_sample(Engine& engine) const {
  ParameterVector theta(size());
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  // two passes so gpd-conditional components see their hyper draws
  for (std::size_t i = 0; i < size(); ++i) {
    if (params_[i].prior.kind == PriorKind::kGpdConditional) continue;
    theta[i] = lower(i) + range(i) * unit(engine);
  }
  for (std::size_t i = 0; i < size(); ++i) {
    if (params_[i].prior.kind != PriorKind::kGpdConditional) continue;
    theta[i] = truncated_gpd_quantile(unit(engine), gpd_params_for(i, theta));
  }
  return theta;
}

double ParameterSpace::prior_log_ratio(std::span<const double> theta,
                                       std::span<const double> proposed) const {
  if (gpd_indices_.empty()) return 0.0;
  double ratio = 0.0;
  for (const std::size_t i : gpd_indices_) {
    const double lf_new = gpd_log_density(proposed[i], gpd_params_for(i, proposed));
    if (std::isinf(lf_new)) return -std::numeric_limits<double>::infinity();
    ratio += lf_new - gpd_log_density(theta[i], gpd_params_for(i, theta));
  }
  return ratio;
}

double ParameterSpace::prior_log_ratio_component(std::span<const double> theta,
                                                 std::span<const double> proposed,
                                                 std::size_t i) const {
  double ratio = 0.0;
  for (const std::size_t j : dependents_[i]) {
    const double lf_new = gpd_log_density(proposed[j], gpd_params_for(j, proposed));
    if (std::isinf(lf_new)) return -std::numeric_limits<double>::infinity();
    ratio += lf_new - gpd_log_density(theta[j], gpd_params_for(j, theta));
  }
  return ratio;
}

double reflect_into(double x, double lo, double hi) {
  const double range = hi - lo;
  double y = std::fmod(x - lo, 2.0 * range);
  if (y < 0.0) y += 2.0 * range;
  if (y > range) y = 2.0 * range - y;
  return lo + y;
}

double propose_component(double current, std::size_t i, const ProposalKernel& kernel,
                         const ParameterSpace& space, Engine& engine,
                         ProposalDiagnostics* diag) {
  contract_check(i < space.size() && kernel.widths.size() == space.size(),
                 "propose: index or kernel width length invalid");
  const double width = kernel.widths[i];
  contract_check(width >= 0.0, "propose: kernel width must be >= 0");
  if (width == 0.0) return current;
  const double lo = space.lower(i);
  const double hi = space.upper(i);
  if (width > hi - lo) {
    if (diag != nullptr) ++diag->uniform_fallbacks;
    return lo + (hi - lo) * std::uniform_real_distribution<double>(0.0, 1.0)(engine);
  }
  const double step = std::uniform_real_distribution<double>(-width, width)(engine);
  return reflect_into(current + step, lo, hi);
}

ParameterVector propose_update(std::span<const double> theta, std::size_t i,
                               const ProposalKernel& kernel, const ParameterSpace& space,
                               Engine& engine, ProposalDiagnostics* diag) {
  contract_check(theta.size() == space.size(), "propose_update: theta length mismatch");
  ParameterVector out(theta.begin(), theta.end());
  out[i] = propose_component(theta[i], i, kernel, space, engine, diag);
  return out;
}

}  // namespace abcpass
