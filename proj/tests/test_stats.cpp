#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "stochtumor/stats.hpp"

using namespace stochtumor;

namespace {

// Inverse-CDF transform of the midpoint grid (i - 1/2)/n.
std::vector<double> quantile_grid(const StationaryLaw& law, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = law.quantile((static_cast<double>(i) + 0.5) / static_cast<double>(n));
  }
  return v;
}

std::vector<State> final_states(const ModelParams& p, std::size_t n, double horizon,
                                std::uint64_t seed) {
  EnsembleSpec spec;
  spec.n_paths = n;
  spec.horizon = horizon;
  spec.burn_in = 0.2 * horizon;
  spec.master_seed = seed;
  std::vector<State> out;
  for (const auto& o : observe_ensemble(p, {5.0, 50.0}, spec, ObservationPlan{})) {
    out.push_back(o.final.state);
  }
  return out;
}

// x(T) over 300 extinction-preset paths, shared by several tests.
const std::vector<double>& extinction_x_sample() {
  static const std::vector<double> xs = [] {
    std::vector<double> v;
    for (State s : final_states(oracle::example_51(), 300, 60.0, 31)) v.push_back(s.x);
    return v;
  }();
  return xs;
}

}  // namespace

TEST(Sample, RejectsNonPositiveOrNonFinite) {
  EXPECT_THROW(Sample({1.0, 0.0}), std::invalid_argument);
  EXPECT_THROW(Sample({1.0, -2.0}), std::invalid_argument);
  EXPECT_THROW(Sample({1.0, std::nan("")}), std::invalid_argument);
  const Sample s({2.0, 4.0}, "x at T");
  EXPECT_EQ(s.origin(), "x at T");
  EXPECT_EQ(s.reciprocal().values(), (std::vector<double>{0.5, 0.25}));
}

TEST(Ecdf, SinglePointStep) {
  const EmpiricalCdf F = ecdf(Sample({3.0}));
  EXPECT_EQ(F(2.999), 0.0);
  EXPECT_EQ(F(3.0), 1.0);
  EXPECT_EQ(F(10.0), 1.0);
}

TEST(Ecdf, JumpsOfOneOverN) {
  const EmpiricalCdf F = ecdf(Sample({5.0, 1.0, 4.0, 2.0, 3.0}));
  EXPECT_EQ(F.sorted(), (std::vector<double>{1.0, 2.0, 3.0, 4.0, 5.0}));
  for (int k = 1; k <= 5; ++k) {
    EXPECT_DOUBLE_EQ(F(k), k / 5.0);
    EXPECT_DOUBLE_EQ(F(k - 0.5), (k - 1) / 5.0);
  }
}

TEST(Ks, QuantileGridIsWithinOneOverN) {
  for (const StationaryLaw& law :
       {StationaryLaw::gamma(19.715, 5.905), StationaryLaw::inverse_gamma(19.715, 5.905),
        StationaryLaw::gamma(51.352, 0.104704)}) {
    for (std::size_t n : {20u, 100u, 1000u}) {
      const Sample s(quantile_grid(law, n));
      const KSResult r = ks_test(s, law);
      EXPECT_LE(r.statistic, 1.0 / static_cast<double>(n) + 1e-12);
      EXPECT_FALSE(r.reject);
      // sup |F_n - F| of the ecdf itself, sampled on and around the atoms
      const EmpiricalCdf F = ecdf(s);
      double sup = 0.0;
      for (double v : F.sorted()) {
        sup = std::max({sup, std::abs(F(v) - law.cdf(v)),
                        std::abs(F(std::nextafter(v, 0.0)) - law.cdf(v))});
      }
      EXPECT_LE(sup, 1.0 / static_cast<double>(n) + 1e-12);
    }
  }
}

TEST(Ks, StatisticEqualsDirectFormula) {
  std::mt19937_64 rng(19);
  std::gamma_distribution<double> g(3.0, 1.0);
  const StationaryLaw law = StationaryLaw::gamma(3.2, 1.1);
  std::vector<double> v(200);
  for (double& x : v) x = g(rng);
  std::sort(v.begin(), v.end());
  const double n = static_cast<double>(v.size());
  double direct = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double F = law.cdf(v[i]);
    direct = std::max({direct, (i + 1) / n - F, F - i / n});
  }
  EXPECT_EQ(ks_statistic(ecdf(Sample(v)).sorted(), [&](double x) { return law.cdf(x); }), direct);
  EXPECT_EQ(ks_test(Sample(v), law).statistic, direct);
}

TEST(Ks, CriticalValueAndRejectRule) {
  EXPECT_NEAR(ks_critical_constant(0.05), 1.358, 5e-4);
  EXPECT_NEAR(ks_critical_constant(0.05), std::sqrt(-0.5 * std::log(0.025)), 1e-15);
  std::vector<double> v(25, 1.0);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = 1.0 + static_cast<double>(i);
  const KSResult r = ks_test(Sample(v), StationaryLaw::gamma(2.0, 1.0));
  EXPECT_NEAR(r.critical_value, ks_critical_constant(0.05) / 5.0, 1e-15);
  EXPECT_EQ(r.reject, r.statistic > r.critical_value);
  EXPECT_EQ(r.n, 25u);
  EXPECT_EQ(r.level, 0.05);
  EXPECT_GE(r.statistic, 0.0);
  EXPECT_LE(r.statistic, 1.0);
}

TEST(Ks, TooFewValues) {
  EXPECT_THROW(ks_test(Sample(std::vector<double>(19, 1.0)), StationaryLaw::gamma(2.0, 1.0)),
               InsufficientSample);
}

TEST(Ks, DualityGivesIdenticalStatistic) {
  std::mt19937_64 rng(21);
  std::gamma_distribution<double> g(19.715, 1.0 / 5.905);
  std::vector<double> v(150);
  for (double& x : v) x = g(rng);
  const Sample s(v);
  const StationaryLaw law = StationaryLaw::gamma(19.715, 5.905);
  EXPECT_NEAR(ks_test(s, law).statistic, ks_test(s.reciprocal(), law.dual()).statistic, 1e-12);
}

TEST(Ks, ExtinctionPresetReciprocalAgainstGamma) {
  const Sample x(extinction_x_sample(), "x(60), extinction preset");
  const StationaryLaw gamma = StationaryLaw::gamma(19.715, 5.905);
  const KSResult right = ks_test(x.reciprocal(), gamma);
  EXPECT_FALSE(right.reject) << right.statistic << " vs " << right.critical_value;
  const KSResult wrong = ks_test(x.reciprocal(), StationaryLaw::gamma(10.0, 5.905));
  EXPECT_TRUE(wrong.reject) << wrong.statistic;
  EXPECT_NEAR(right.statistic, ks_test(x, gamma.dual()).statistic, 1e-12);
}

TEST(Kde, IntegratesToOneAndNonnegative) {
  std::mt19937_64 rng(23);
  std::lognormal_distribution<double> ln(0.0, 0.5);
  for (std::size_t n : {50u, 500u}) {
    std::vector<double> v(n);
    for (double& x : v) x = ln(rng);
    const DensityCurve c = empirical_density(Sample(v));
    EXPECT_EQ(c.grid.size(), 512u);
    EXPECT_NEAR(c.integral(), 1.0, 1e-3);
    for (double d : c.density) EXPECT_GE(d, 0.0);
    EXPECT_NEAR(c.bandwidth, silverman_bandwidth(v), 1e-15);
  }
}

TEST(Kde, SilvermanRule) {
  std::vector<double> v;
  for (int i = 1; i <= 100; ++i) v.push_back(i);
  // sd = 29.0115, IQR/1.34 = 49.5/1.34 = 36.94
  const double sd = std::sqrt(100.0 * 101.0 / 12.0);
  EXPECT_NEAR(silverman_bandwidth(v), 0.9 * sd * std::pow(100.0, -0.2), 1e-9);
}

TEST(Kde, ShiftMovesMode) {
  std::mt19937_64 rng(29);
  std::gamma_distribution<double> g(5.0, 1.0);
  std::vector<double> v(300), w(300);
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] = g(rng);
    w[i] = v[i] + 7.0;
  }
  const DensityCurve a = empirical_density(Sample(v));
  const DensityCurve b = empirical_density(Sample(w));
  EXPECT_NEAR(b.mode() - a.mode(), 7.0, 1e-9);
  EXPECT_NEAR(a.bandwidth, b.bandwidth, 1e-12);
}

TEST(Kde, Errors) {
  EXPECT_THROW(empirical_density(Sample(std::vector<double>(49, 1.0))), InsufficientSample);
  EXPECT_THROW(empirical_density(Sample(std::vector<double>(60, 2.0))), std::invalid_argument);
}

TEST(Kde, ExtinctionPresetModeNearInverseGammaMode) {
  const double mode = StationaryLaw::inverse_gamma(19.715, 5.905).mode();
  EXPECT_NEAR(mode, 0.2851, 1e-4);
  const DensityCurve c = empirical_density(Sample(extinction_x_sample()));
  EXPECT_LE(std::abs(c.mode() - mode), 0.15 * mode) << c.mode();
}

TEST(LawDensity, MatchesPdf) {
  const StationaryLaw law = StationaryLaw::inverse_gamma(19.715, 5.905);
  const std::vector<double> grid = {0.1, 0.2, 0.3, 0.5};
  const DensityCurve c = law_density(law, grid);
  EXPECT_EQ(c.grid, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) EXPECT_EQ(c.density[i], law.pdf(grid[i]));
}

TEST(Histogram, IntegratesToOneAndCountsPairs) {
  const std::vector<double> xs = {1.0, 2.0, 2.0, 3.0};
  const std::vector<double> ys = {1.0, 1.0, 2.0, 3.0};
  const Histogram2D h = histogram2d(xs, ys, 2, 2);
  EXPECT_EQ(h.count, 4u);
  EXPECT_EQ(h.nx(), 2u);
  double total = 0.0;
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      total += h.at(i, j) * (h.x_edges[i + 1] - h.x_edges[i]) * (h.y_edges[j + 1] - h.y_edges[j]);
    }
  }
  EXPECT_NEAR(total, 1.0, 1e-12);
  EXPECT_THROW(histogram2d(xs, {1.0}, 2, 2), std::invalid_argument);
}

TEST(Histogram, PermanencePresetAwayFromAxes) {
  std::vector<double> xs, ys;
  for (State s : final_states(oracle::example_52(), 200, 100.0, 37)) {
    xs.push_back(s.x);
    ys.push_back(s.y);
  }
  const Histogram2D h = histogram2d(xs, ys, 40, 40);
  EXPECT_EQ(h.count, 200u);
  // no mass within 1e-3 of either axis
  for (std::size_t i = 0; i < h.nx(); ++i) {
    for (std::size_t j = 0; j < h.ny(); ++j) {
      if (h.x_edges[i] < 1e-3 || h.y_edges[j] < 1e-3) EXPECT_EQ(h.at(i, j), 0.0);
    }
  }
  EXPECT_GE(h.x_edges.front(), 1e-3);
  EXPECT_GE(h.y_edges.front(), 1e-3);
  EXPECT_LT(h.y_edges.back(), 1e4);
}

TEST(Csv, Headers) {
  std::ostringstream a;
  write_density_csv(a, DensityCurve{{1.0, 2.0}, {0.5, 0.25}, 0.1});
  const std::string da = a.str();
  EXPECT_EQ(da.substr(0, da.find('\n')), "grid,density");
  EXPECT_EQ(std::count(da.begin(), da.end(), '\n'), 3);
  std::ostringstream b;
  write_histogram_csv(b, histogram2d({1.0, 2.0}, {1.0, 2.0}, 2, 3));
  const std::string db = b.str();
  EXPECT_EQ(db.substr(0, db.find('\n')), "x,y,density");
  EXPECT_EQ(std::count(db.begin(), db.end(), '\n'), 7);
}
