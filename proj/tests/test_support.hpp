#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

#include "abcpass/statlearn.hpp"

namespace abcpass::test {

inline double mean_of(std::span<const double> values) {
  return std::accumulate(values.begin(), values.end(), 0.0) / double(values.size());
}

inline double sd_of(std::span<const double> values) {
  const double mean = mean_of(values);
  double ss = 0.0;
  for (const double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / double(values.size() - 1));
}

/// One-sample Kolmogorov-Smirnov statistic against U[lo, hi].
inline double ks_uniform(std::vector<double> samples, double lo, double hi) {
  std::sort(samples.begin(), samples.end());
  const double n = double(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double cdf = (samples[i] - lo) / (hi - lo);
    d = std::max(d, std::abs(cdf - double(i) / n));
    d = std::max(d, std::abs(cdf - double(i + 1) / n));
  }
  return d;
}

/// Two-sample Kolmogorov-Smirnov statistic.
inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double d = 0.0;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j]) {
      ++i;
    } else {
      ++j;
    }
    d = std::max(d, std::abs(double(i) / double(a.size()) - double(j) / double(b.size())));
  }
  return d;
}

/// Projection that reads one raw statistic (tau = s[index] + shift - 1); the
/// shift keeps the Box-Cox clamp away for non-negative statistics.
inline LinearProjection identity_projection(std::size_t index, std::size_t m, double shift = 1.0,
                                            double tau_sd = 1.0) {
  LinearProjection proj;
  proj.parameter = "identity_" + std::to_string(index);
  proj.beta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
  proj.beta[static_cast<Eigen::Index>(index)] = 1.0;
  proj.transform.lambda = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(m));
  proj.transform.shift = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(m), shift);
  proj.transform.floor = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(m), 1e-12);
  proj.transform.ref_min = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
  proj.transform.ref_max = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(m));
  proj.transform.degenerate.assign(m, 0);
  proj.tau_mean = 0.0;
  proj.tau_sd = tau_sd;
  return proj;
}

}  // namespace abcpass::test
