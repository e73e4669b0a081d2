#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "abcpass/errors.hpp"
#include "abcpass/wf.hpp"
#include "test_support.hpp"

using namespace abcpass;
using abcpass::test::mean_of;
using abcpass::test::sd_of;

namespace {

SamplingPlan plan_every(int points, int step, int sample_size) {
  SamplingPlan plan;
  for (int t = 0; t < points; ++t) plan.points.push_back({t * step, sample_size});
  return plan;
}

}  // namespace

// frozen values computed independently with exact rational arithmetic
TEST_CASE("fsprime pair: hand-evaluated oracle values") {
  // zero change: Fs = 0, so Fs' = (1/t) * (-2/nh) / (1 - 1/n_y) = -2/12987
  CHECK(fsprime_pair(0.5, 0.5, 13, 1000, 1000) ==
        doctest::Approx(-2.0 / 12987.0).epsilon(1e-14));
  CHECK(fsprime_pair(0.5, 0.5, 13, 1000, 1000) ==
        doctest::Approx(-1.5400015400015400e-4).epsilon(1e-12));

  // x=0.1, y=0.2: Fs = 4/51
  CHECK(fsprime_pair(0.1, 0.2, 13, 1000, 1000) ==
        doctest::Approx(5.7690826921596152e-3).epsilon(1e-12));

  // asymmetric sample sizes pin the harmonic mean and the [1 - 1/n_y] factor
  CHECK(fsprime_pair(0.3, 0.4, 5, 500, 2000) ==
        doctest::Approx(8.1997520499380125e-3).epsilon(1e-12));

  // harmonic mean of equal sizes reduces to n
  const double direct = fsprime_pair(0.1, 0.3, 7, 800, 800);
  const double fs = 0.04 / (0.2 * 0.8);
  const double expected = (fs * (1.0 - 1.0 / 1600.0) - 2.0 / 800.0) /
                          (7.0 * (1.0 + fs / 4.0) * (1.0 - 1.0 / 800.0));
  CHECK(direct == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("fsprime pair: domain guards") {
  CHECK_THROWS_AS(fsprime_pair(0.0, 0.0, 13, 1000, 1000), ContractError);  // z = 0
  CHECK_THROWS_AS(fsprime_pair(1.0, 1.0, 13, 1000, 1000), ContractError);  // z = 1
  CHECK_THROWS_AS(fsprime_pair(0.2, 0.4, 0, 1000, 1000), ContractError);
  CHECK_THROWS_AS(fsprime_pair(0.2, 0.4, 13, 1, 1000), ContractError);
  CHECK_NOTHROW(fsprime_pair(0.0, 0.3, 13, 1000, 1000));  // one fixed endpoint is fine
}

TEST_CASE("wf simulation: neutral infinite-population limit") {
  const auto plan = plan_every(10, 13, 1000);
  const auto traj = wf_simulate_locus(1000000000ull, 0.0, 0.3, plan, 81);
  REQUIRE(traj.counts.size() == 10);
  for (std::size_t t = 0; t < 10; ++t) {
    // only observation noise: 5 sigma around 0.3 with n = 1000
    CHECK(std::abs(traj.frequency(t) - 0.3) < 5.0 * std::sqrt(0.3 * 0.7 / 1000.0));
  }
}

TEST_CASE("wf simulation: boundary initial frequency is rejected") {
  const auto plan = plan_every(3, 13, 100);
  CHECK_THROWS_AS(wf_simulate_locus(100, 0.0, 0.0, plan, 82), ContractError);
  CHECK_THROWS_AS(wf_simulate_locus(100, 0.0, 1.0, plan, 82), ContractError);
  CHECK_THROWS_AS(wf_simulate_locus(1, 0.0, 0.5, plan, 82), ContractError);
}

TEST_CASE("wf simulation: one-generation drift variance matches p(1-p)/Ne") {
  const std::uint64_t ne = 100;
  const double p0 = 0.3;
  const int big_sample = 100000;  // observation noise negligible against drift
  SamplingPlan plan;
  plan.points = {{0, big_sample}, {1, big_sample}};
  const std::size_t reps = 100000;
  std::vector<double> deltas;
  for (std::size_t r = 0; r < reps; ++r) {
    const auto traj = wf_simulate_locus(ne, 0.0, p0, plan, derive_seed(83, r));
    deltas.push_back(traj.frequency(1) - traj.frequency(0));
  }
  const double expected = p0 * (1.0 - p0) / double(ne);
  const double sd = sd_of(deltas);
  const double variance = sd * sd;
  // MC error of a variance estimate: var * sqrt(2/(R-1))
  CHECK(std::abs(variance - expected) < 3.0 * expected * std::sqrt(2.0 / double(reps - 1)));
}

TEST_CASE("wf simulation: neutral mean frequency is a martingale") {
  const auto plan = plan_every(10, 13, 1000);
  const std::size_t reps = 100000;
  std::vector<double> finals;
  for (std::size_t r = 0; r < reps; ++r) {
    finals.push_back(wf_simulate_locus(200, 0.0, 0.35, plan, derive_seed(84, r)).frequency(9));
  }
  const double se = sd_of(finals) / std::sqrt(double(reps));
  CHECK(std::abs(mean_of(finals) - 0.35) < 3.0 * se);
}

TEST_CASE("wf simulation: selection drives the focal allele upward") {
  const auto plan = plan_every(10, 13, 1000);
  const std::size_t reps = 2000;
  std::vector<double> finals;
  for (std::size_t r = 0; r < reps; ++r) {
    finals.push_back(wf_simulate_locus(1000, 0.1, 0.1, plan, derive_seed(85, r)).frequency(9));
  }
  CHECK(mean_of(finals) > 0.9);  // 117 generations at s = 0.1 from 10%
}

TEST_CASE("larger Ne shrinks the Monte Carlo variance of the summed statistic") {
  const auto plan = plan_every(10, 13, 1000);
  std::vector<double> variances;
  for (const std::uint64_t ne : {100ull, 1000ull, 10000ull}) {
    std::vector<double> sums;
    for (std::size_t r = 0; r < 10000; ++r) {
      const auto traj = wf_simulate_locus(ne, 0.0, 0.3, plan, derive_seed(86 + ne, r));
      const auto stats = locus_stats(traj);
      sums.push_back(stats.fsi + stats.fsd);
    }
    const double sd = sd_of(sums);
    variances.push_back(sd * sd);
  }
  CHECK(variances[0] > variances[1]);
  CHECK(variances[1] > variances[2]);
}

TEST_CASE("locus stats: oracle sums and the tie rule") {
  SamplingPlan plan = plan_every(3, 13, 1000);

  // up then down: 0.1 -> 0.25 -> 0.15 (frozen independent evaluation)
  LocusTrajectory traj{plan, {100, 250, 150}};
  const LocusStats stats = locus_stats(traj);
  CHECK(stats.usable);
  CHECK(stats.fsi == doctest::Approx(1.1396011396011396e-2).epsilon(1e-12));
  CHECK(stats.fsd == doctest::Approx(4.5844661229276614e-3).epsilon(1e-12));
  const auto v = stats.values();
  CHECK(v[2] == doctest::Approx(stats.fsi * stats.fsi).epsilon(1e-15));
  CHECK(v[3] == doctest::Approx(stats.fsd * stats.fsd).epsilon(1e-15));
  CHECK(v[4] == doctest::Approx(stats.fsi * stats.fsd).epsilon(1e-15));

  // monotone increasing: no decreasing term, cross term zero
  const LocusStats rising = locus_stats(LocusTrajectory{plan, {100, 200, 400}});
  CHECK(rising.fsd == 0.0);
  CHECK(rising.values()[4] == 0.0);
  CHECK(rising.fsi > 0.0);

  // constant at 0.5: every pair ties, nothing accumulates
  const LocusStats flat = locus_stats(LocusTrajectory{plan, {500, 500, 500}});
  CHECK(flat.fsi == 0.0);
  CHECK(flat.fsd == 0.0);
  CHECK_FALSE(flat.usable);

  // all-fixed trajectory: no defined pair, flagged unusable with zero stats
  const LocusStats absorbed = locus_stats(LocusTrajectory{plan, {0, 0, 0}});
  CHECK_FALSE(absorbed.usable);
  CHECK(absorbed.fsi == 0.0);
  CHECK(absorbed.fsd == 0.0);
}

TEST_CASE("locus stats: sample-size scaling enters only through the formula") {
  SamplingPlan small = plan_every(4, 13, 500);
  SamplingPlan large = plan_every(4, 13, 1500);
  const std::vector<int> counts_small{50, 120, 80, 200};
  std::vector<int> counts_large;
  for (const int c : counts_small) counts_large.push_back(3 * c);

  const LocusStats a = locus_stats(LocusTrajectory{small, counts_small});
  const LocusStats b = locus_stats(LocusTrajectory{large, counts_large});

  // same frequencies, different n: recompute b directly from fsprime_pair
  double fsi = 0.0;
  double fsd = 0.0;
  for (int t = 0; t + 1 < 4; ++t) {
    const double x = counts_large[static_cast<std::size_t>(t)] / 1500.0;
    const double y = counts_large[static_cast<std::size_t>(t + 1)] / 1500.0;
    const double value = fsprime_pair(x, y, 13, 1500, 1500);
    (y > x ? fsi : fsd) += value;
  }
  CHECK(b.fsi == doctest::Approx(fsi).epsilon(1e-14));
  CHECK(b.fsd == doctest::Approx(fsd).epsilon(1e-14));
  CHECK(a.fsi != doctest::Approx(b.fsi).epsilon(1e-6));  // n enters the correction terms
}

TEST_CASE("diploid switch doubles the gene copies") {
  SamplingPlan plan;
  plan.points = {{0, 2000000}, {1, 2000000}};
  // with 2Ne copies the one-generation drift variance halves
  const std::size_t reps = 60000;
  std::vector<double> hap;
  std::vector<double> dip;
  for (std::size_t r = 0; r < reps; ++r) {
    hap.push_back(wf_simulate_locus(50, 0.0, 0.4, plan, derive_seed(87, r), Ploidy::kHaploid)
                      .frequency(1));
    dip.push_back(wf_simulate_locus(50, 0.0, 0.4, plan, derive_seed(88, r), Ploidy::kDiploid)
                      .frequency(1));
  }
  const double var_h = sd_of(hap) * sd_of(hap);
  const double var_d = sd_of(dip) * sd_of(dip);
  CHECK(var_h / var_d == doctest::Approx(2.0).epsilon(0.1));
}
