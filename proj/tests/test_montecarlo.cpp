#include <cmath>
#include <cstdlib>
#include <limits>
#include <set>
#include <string>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "stochtumor/io.hpp"
#include "stochtumor/montecarlo.hpp"

using namespace stochtumor;

namespace {

EnsembleSpec spec_of(std::size_t n, double horizon, double burn_in, std::uint64_t seed = 1) {
  EnsembleSpec s;
  s.n_paths = n;
  s.horizon = horizon;
  s.burn_in = burn_in;
  s.master_seed = seed;
  return s;
}

class ScopedThreads {
 public:
  explicit ScopedThreads(const char* v) {
    if (const char* old = std::getenv("STOCHTUMOR_THREADS")) old_ = old;
    ::setenv("STOCHTUMOR_THREADS", v, 1);
  }
  ~ScopedThreads() {
    if (old_.empty()) {
      ::unsetenv("STOCHTUMOR_THREADS");
    } else {
      ::setenv("STOCHTUMOR_THREADS", old_.c_str(), 1);
    }
  }

 private:
  std::string old_;
};

}  // namespace

TEST(MeanEstimate, PairwiseSumAndStdError) {
  const std::vector<double> v = {1.0, 2.0, 3.0, 4.0};
  EXPECT_EQ(pairwise_sum(v), 10.0);
  const EstimateWithCI e = mean_estimate(v);
  EXPECT_EQ(e.point, 2.5);
  EXPECT_NEAR(e.std_error, std::sqrt((2.25 * 2 + 0.25 * 2) / 3.0 / 4.0), 1e-15);
  EXPECT_NEAR(e.half_width(), 1.96 * e.std_error, 1e-15);
  EXPECT_EQ(e.n, 4u);
  std::vector<double> bad = {1.0, std::numeric_limits<double>::infinity()};
  EXPECT_THROW(mean_estimate(bad), EstimationError);
  EXPECT_THROW(mean_estimate(std::vector<double>{}), EstimationError);
}

TEST(MeanEstimate, PairwiseSumIsAccurate) {
  std::vector<double> v(1 << 20, 0.1);
  EXPECT_NEAR(pairwise_sum(v), 0.1 * (1 << 20), 1e-9);
}

TEST(EnsembleSpec, Validation) {
  EXPECT_NO_THROW(validate(spec_of(1, 1.0, 0.0)));
  EXPECT_THROW(validate(spec_of(0, 1.0, 0.0)), DomainError);
  EXPECT_THROW(validate(spec_of(1, 1.0, 1.0)), DomainError);
  EXPECT_THROW(validate(spec_of(1, 0.0, 0.0)), DomainError);
  EnsembleSpec s = spec_of(1, 1.0, 0.0);
  s.record_stride = 0;
  EXPECT_THROW(validate(s), DomainError);
}

TEST(EnsembleSpec, PathSeedsDistinct) {
  const EnsembleSpec s = spec_of(1000, 1.0, 0.0, 42);
  std::set<std::uint64_t> seeds;
  for (std::size_t i = 0; i < 1000; ++i) seeds.insert(path_seed(s, i));
  EXPECT_EQ(seeds.size(), 1000u);
}

TEST(EstimateMoment, ZerothPowerIsExactlyOne) {
  const EstimateWithCI e =
      estimate_moment(oracle::example_52(), {5.0, 50.0}, spec_of(7, 1.0, 0.0), Coordinate::kY, 0.0, 1.0);
  EXPECT_EQ(e.point, 1.0);
  EXPECT_EQ(e.std_error, 0.0);
  EXPECT_EQ(e.n, 7u);
}

TEST(TimeAverage, IndicatorOfWholeQuadrantIsOne) {
  const double big = std::numeric_limits<double>::max();
  const EstimateWithCI e = time_average(oracle::example_52(), {5.0, 50.0}, spec_of(8, 5.0, 1.0),
                                        Functional::indicator({0.0, big, 0.0, big}));
  EXPECT_EQ(e.point, 1.0);
  EXPECT_EQ(e.std_error, 0.0);
}

TEST(Ensemble, DeterministicAcrossThreadCounts) {
  const ModelParams p = oracle::example_52();
  const EnsembleSpec s = spec_of(12, 5.0, 1.0, 9);
  EstimateWithCI one, four;
  {
    ScopedThreads t("1");
    EXPECT_EQ(thread_count(), 1u);
    one = time_average(p, {5.0, 50.0}, s, {FunctionalKind::kInvX, {}});
  }
  {
    ScopedThreads t("4");
    EXPECT_EQ(thread_count(), 4u);
    four = time_average(p, {5.0, 50.0}, s, {FunctionalKind::kInvX, {}});
  }
  EXPECT_EQ(one.point, four.point);
  EXPECT_EQ(one.std_error, four.std_error);
  const EstimateWithCI again = time_average(p, {5.0, 50.0}, s, {FunctionalKind::kInvX, {}});
  EXPECT_EQ(one.point, again.point);
}

TEST(Ensemble, StdErrorShrinksBySqrtTwo) {
  const ModelParams p = oracle::example_52();
  const EstimateWithCI a = estimate_moment(p, {5.0, 50.0}, spec_of(400, 1.0, 0.0, 3), Coordinate::kX, 1.0, 1.0);
  const EstimateWithCI b = estimate_moment(p, {5.0, 50.0}, spec_of(800, 1.0, 0.0, 4), Coordinate::kX, 1.0, 1.0);
  const double ratio = a.std_error / b.std_error;
  EXPECT_NEAR(ratio, std::sqrt(2.0), 0.2 * std::sqrt(2.0));
}

TEST(Ensemble, PsiMeanDominatesYMean) {
  const ModelParams p = oracle::example_52();
  ObservationPlan plan;
  plan.aux.psi = true;
  plan.snapshot_times = {0.5, 1.0, 2.0, 5.0, 10.0, 20.0};
  const auto obs = observe_ensemble(p, {5.0, 50.0}, spec_of(100, 20.0, 0.0, 17), plan);
  for (std::size_t k = 0; k < plan.snapshot_times.size(); ++k) {
    std::vector<double> ys, psis;
    for (const auto& o : obs) {
      ys.push_back(o.snapshots[k].state.y);
      psis.push_back(o.snapshots[k].psi);
    }
    EXPECT_GE(mean_estimate(psis).point, mean_estimate(ys).point) << plan.snapshot_times[k];
  }
}

TEST(EstimateMoment, PsiMeanApproachesGammaMean) {
  const ModelParams p = oracle::example_52();
  const EstimateWithCI e =
      estimate_moment(p, {5.0, 50.0}, spec_of(200, 100.0, 0.0, 23), Coordinate::kPsi, 1.0, 100.0);
  const double mean = stationary_laws(p).psi->mean();
  EXPECT_NEAR(mean, 490.4, 0.05);
  EXPECT_LE(std::abs(e.point - mean), 3.0 * e.std_error)
      << e.point << " +- " << e.std_error;
}

TEST(DecayRate, DeterministicLimitMatchesOde) {
  ModelParams p = oracle::example_51();
  p.sigma = 1.0;
  p.delta = 0.5;
  p.alpha = 1.0;
  p.sigma1 = 0.0;
  p.sigma2 = 0.0;
  // y -> 0 while x -> sigma/delta = 2, so ln y decays at alpha - 2 = -1
  const EstimateWithCI e = decay_rate(p, {2.0, 1.0}, spec_of(2, 100.0, 20.0));
  EXPECT_NEAR(e.point, p.alpha - p.sigma / p.delta, 2e-3);
  EXPECT_EQ(e.std_error, 0.0);
}

TEST(DecayRate, ExtinctionPresetBelowMinusLambda1) {
  const ModelParams p = oracle::example_51();
  const EstimateWithCI e = decay_rate(p, {5.0, 50.0}, spec_of(60, 200.0, 40.0, 5));
  EXPECT_LE(e.point, -0.364 + 3.0 * e.std_error);
}

TEST(DecayRate, PsiSlopeVanishesWhenPersistent) {
  const ModelParams p = oracle::example_52();
  const EstimateWithCI e = decay_rate(p, {5.0, 50.0}, spec_of(40, 200.0, 40.0, 6), Coordinate::kPsi);
  EXPECT_LE(std::abs(e.point), 3.0 * e.std_error) << e.point << " +- " << e.std_error;
}

TEST(Occupation, ShrinkingBoxParameterExhaustsQuadrant) {
  const ModelParams p = oracle::example_52();
  const EstimateWithCI e = permanence_occupation(p, {5.0, 50.0}, spec_of(20, 20.0, 4.0, 7), 1e-12);
  EXPECT_EQ(e.point, 1.0);
  EXPECT_THROW(permanence_occupation(p, {5.0, 50.0}, spec_of(2, 1.0, 0.0), 1.0), DomainError);
}

TEST(Occupation, ExtinctionPresetLeavesBox) {
  const EstimateWithCI e =
      permanence_occupation(oracle::example_51(), {5.0, 50.0}, spec_of(30, 100.0, 20.0, 8), 1e-3);
  EXPECT_EQ(e.point, 0.0);
}

TEST(Functional, Names) {
  EXPECT_EQ((Functional{FunctionalKind::kInvX, {}}).name(), "1/x");
  EXPECT_EQ((Functional{FunctionalKind::kY, {}}).name(), "y");
  EXPECT_EQ((Functional{FunctionalKind::kY, {}})({2.0, 3.0}), 3.0);
  EXPECT_EQ((Functional{FunctionalKind::kInvX, {}})({2.0, 3.0}), 0.5);
  EXPECT_EQ((Functional{FunctionalKind::kXSquared, {}})({2.0, 3.0}), 4.0);
  EXPECT_EQ(Functional::indicator({1.0, 3.0, 1.0, 3.0})({2.0, 2.0}), 1.0);
  EXPECT_EQ(Functional::indicator({1.0, 3.0, 1.0, 3.0})({4.0, 2.0}), 0.0);
}

TEST(EstimateJson, Fields) {
  const EstimateWithCI e{2.5, 0.1, 40};
  const Json j = estimate_json("y", e, 500.0, 77);
  EXPECT_EQ(j.at("functional"), "y");
  EXPECT_EQ(j.at("point"), 2.5);
  EXPECT_EQ(j.at("std_error"), 0.1);
  EXPECT_EQ(j.at("n"), 40);
  EXPECT_EQ(j.at("horizon"), 500.0);
  EXPECT_EQ(j.at("seed"), 77);
  const Json k = estimate_json("y", {std::nan(""), 0.0, 1}, 1.0, 1);
  EXPECT_TRUE(k.at("point").is_null());
}
