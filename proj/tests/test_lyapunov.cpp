#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "stochtumor/lyapunov.hpp"

using namespace stochtumor;

namespace {

void expect_rel(double got, double want, double tol) {
  EXPECT_NEAR(got, want, tol * std::max(1.0, std::abs(want))) << "got " << got << " want " << want;
}

}  // namespace

TEST(Suprema, QuadraticAgainstGrid) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 50; ++i) {
    const double a = std::exp(u(rng));
    const double b = 4.0 * u(rng);
    const double c = u(rng);
    const double grid = oracle::grid_sup([&](double x) { return (-a * x + b) * x + c; }, 1e-14,
                                         1e4, 100000);
    EXPECT_NEAR(sup_quadratic_halfline(a, b, c), grid, 1e-8 * std::max(1.0, std::abs(grid)));
  }
  EXPECT_THROW(sup_quadratic_halfline(0.0, 1.0, 1.0), DomainError);
}

TEST(Suprema, CubicAgainstGrid) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 30; ++i) {
    const double a = std::exp(u(rng));
    const double b = 3.0 * u(rng);
    const double c = std::exp(u(rng));
    const double d = u(rng);
    const double grid = oracle::grid_sup(
        [&](double x) { return ((-a * x + b) * x + c) * x + d; }, 1e-9, 1e4, 100000);
    EXPECT_NEAR(sup_cubic_halfline(a, b, c, d), grid, 1e-8 * std::max(1.0, std::abs(grid)));
  }
}

TEST(Suprema, InverseMomentExpressionAgainstGrid) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 30; ++i) {
    const double s = 0.05 + std::abs(u(rng));
    const double m = 0.5 * std::abs(u(rng));
    const double k2 = u(rng);
    const double k1 = std::abs(u(rng));
    const double k0 = u(rng);
    auto f = [&](double w) {
      return -s * w * w * w + 0.8 * m * std::pow(w, 2.5) - k2 * w * w + k1 * w + k0;
    };
    const double grid = oracle::grid_sup(f, 1e-10, 1e4, 200000);
    EXPECT_NEAR(sup_inverse_moment_expression(s, m, k2, k1, k0), grid,
                1e-6 * std::max(1.0, std::abs(grid)));
  }
}

TEST(BoundConstants, GridOraclesOnPermanencePreset) {
  const ModelParams p = oracle::example_52();
  const double theta = 0.5;
  const double c = 0.2;
  const BoundConstants bc = lyapunov_constants(p, theta, c);
  const double s1 = p.sigma1 * p.sigma1;
  const double s2 = p.sigma2 * p.sigma2;
  const double kt = bc.kappa / theta;

  EXPECT_NEAR(bc.kappa, 0.5 * theta * (p.delta + 0.5 * (1 - theta) * s1), 1e-15);
  EXPECT_NEAR(bc.L1, p.delta + 0.5 * (1 - theta) * s1 - kt, 1e-15);
  EXPECT_GT(bc.L1, 0.0);

  const double L2 = oracle::grid_sup(
      [&](double y) {
        return -c * (p.beta + p.mu + c) * y * y +
               (c * p.alpha + c * p.rho - c * p.delta - p.mu - c + 2 * c * kt) * y + p.rho -
               p.delta + std::max(p.alpha, p.sigma) + 2 * kt;
      },
      1e-9, 1e6);
  expect_rel(bc.L2, L2, 1e-6);

  const double L3 = oracle::grid_sup(
      [&](double y) {
        return -c * c * p.beta * y * y * y +
               (c * c * p.alpha - c * p.beta + 0.5 * (theta - 1) * c * c * s2 + c * c * kt) * y * y +
               c * (p.alpha + p.sigma + 2 * kt) * y + p.sigma + kt;
      },
      1e-9, 1e6);
  expect_rel(bc.L3, L3, 1e-6);

  const double L4 = std::max(
      1.0, oracle::grid_sup([&](double x) { return -bc.L1 * x * x + bc.L2 * x + bc.L3; }, 1e-9, 1e6));
  expect_rel(bc.L4, L4, 1e-6);
  EXPECT_NEAR(bc.L, bc.L4 / bc.kappa, 1e-12 * bc.L);

  ASSERT_TRUE(bc.L6 && bc.L7 && bc.inverse_moment_bound);
  const double C = p.sigma - p.delta - 0.5 * (theta + 1) * s1 - kt - 0.5 * p.mu;
  const double D = p.delta + s1 + 2 * kt;
  const double L6 = oracle::grid_sup(
      [&](double w) {
        return -p.sigma * w * w * w + 0.8 * p.mu * std::pow(w, 2.5) - C * w * w + D * w + kt;
      },
      1e-9, 1e6);
  expect_rel(*bc.L6, L6, 1e-6);
  EXPECT_NEAR(*bc.L7, *bc.L6 + 0.2 * p.mu * rho_k(p, 5) + 0.5 * p.mu * rho_k(p, 2),
              1e-9 * *bc.L7);

  for (int k = 2; k <= 5; ++k) EXPECT_EQ(bc.rho_k.at(k), rho_k(p, k));
  ASSERT_TRUE(bc.Mbar1 && bc.M1 && bc.lambda3);
  EXPECT_NEAR(*bc.Mbar1, 490.4, 0.05);
  EXPECT_NEAR(bc.zeta, recurrence_zeta(p), 1e-15);
}

TEST(BoundConstants, AllFiniteAndNonnegativeUnderPremises) {
  for (const ModelParams& p : {oracle::example_51(), oracle::example_52()}) {
    for (double theta : {0.2, 0.9, 1.5, 3.0}) {
      const BoundConstants bc = lyapunov_constants(p, theta, 0.5);
      for (double v : {bc.kappa, bc.L1, bc.L2, bc.L3, bc.L4, bc.L}) {
        EXPECT_TRUE(std::isfinite(v));
        EXPECT_GE(v, 0.0);
      }
      EXPECT_EQ(bc.L6.has_value(), theta < 2.0);
    }
  }
}

TEST(BoundConstants, PremiseChecks) {
  const ModelParams p = oracle::example_52();
  EXPECT_THROW(lyapunov_constants(p, 0.0, 0.5), DomainError);
  EXPECT_THROW(lyapunov_constants(p, 1.0 + 2.0 * p.delta / (p.sigma1 * p.sigma1), 0.5),
               DomainError);
  EXPECT_THROW(lyapunov_constants(p, 0.5, p.rho / p.eta - p.mu), DomainError);
  const double theta = 0.01;
  // kappa at or above theta (delta + (1-theta) sigma1^2/2) is rejected
  EXPECT_THROW(
      lyapunov_constants(p, theta, 0.5, theta * (p.delta + 0.5 * (1 - theta) * 0.04)),
      DomainError);
  EXPECT_NO_THROW(lyapunov_constants(p, theta, 0.5, 0.99 * theta * p.delta));
}

TEST(RecurrenceU, ZetaAndAdmissibleC) {
  const ModelParams p = oracle::example_52();
  // 0.09089 * 1.60475 - 0.1181 with the rounded inputs
  EXPECT_NEAR(2.0 * recurrence_zeta(p), 0.09089 * 1.60475 - 0.1181, 2e-5);
  EXPECT_NEAR(2.0 * recurrence_zeta(p), 0.027757, 1e-6);
  EXPECT_NEAR(recurrence_zeta(p), 0.013878, 1e-6);
  EXPECT_NEAR(max_recurrence_c(p), 0.1181 * recurrence_zeta(p) / 0.4143, 1e-12);
  EXPECT_NEAR(max_recurrence_c(p), 3.956e-3, 1e-6);
  EXPECT_NEAR(default_recurrence_c(p), 0.9 * max_recurrence_c(p), 1e-18);
}

TEST(RecurrenceU, PremiseViolationsNamed) {
  const ModelParams p51 = oracle::example_51();
  EXPECT_THROW(lyapunov_U(p51, 1e-3, {1.0, 1.0}), DomainError);
  const ModelParams p = oracle::example_52();
  try {
    lyapunov_U(p, 1.01 * max_recurrence_c(p), {1.0, 1.0});
    FAIL();
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("sigma zeta"), std::string::npos);
  }
}

TEST(RecurrenceU, ExpansionEqualsGeneratorOfTestFunction) {
  const ModelParams p = oracle::example_52();
  const double c = default_recurrence_c(p);
  const TestFunction u = test_functions::recurrence(p, c);
  for (double x : {0.01, 0.3, 1.0, 4.0, 60.0}) {
    for (double y : {0.02, 1.0, 90.0, 480.0, 3000.0}) {
      const UEvaluation ev = lyapunov_U(p, c, {x, y});
      const double direct = generator_apply(p, u, {x, y});
      EXPECT_NEAR(ev.generator, direct, 1e-9 * std::max(1.0, std::abs(direct))) << x << "," << y;
      EXPECT_NEAR(ev.value, u.value({x, y}), 1e-12 * std::abs(ev.value));
      EXPECT_LE(ev.generator, ev.generator_bound + 1e-9 * std::max(1.0, std::abs(direct)));
    }
  }
}

TEST(RecurrenceU, RadiallyUnbounded) {
  const ModelParams p = oracle::example_52();
  const double c = default_recurrence_c(p);
  double prev_small = 0.0, prev_large = 0.0, prev_y = 0.0;
  for (double t = 1e2; t < 1e12; t *= 10.0) {
    const double small_x = lyapunov_U(p, c, {1.0 / t, 1.0}).value;
    const double large_x = lyapunov_U(p, c, {t, 1.0}).value;
    const double large_y = lyapunov_U(p, c, {1.0, t}).value;
    EXPECT_GT(small_x, prev_small);
    EXPECT_GT(large_x, prev_large);
    EXPECT_GT(large_y, prev_y);
    prev_small = small_x;
    prev_large = large_x;
    prev_y = large_y;
  }
  EXPECT_GT(prev_small, 1e6);
  EXPECT_GT(prev_large, 1e6);
}

TEST(RecurrenceDomain, FoundForPermanencePreset) {
  const ModelParams p = oracle::example_52();
  const RecurrenceDomain d = find_recurrence_domain(p, default_recurrence_c(p), 1e-6, 1e6, 300, 3);
  EXPECT_TRUE(d.verified);
  EXPECT_LE(d.worst_outside, -d.zeta);
  EXPECT_GT(d.box.x_lo, 1e-6);
  EXPECT_LT(d.box.x_hi, 1e6);
  EXPECT_GT(d.box.y_lo, 1e-6);
  EXPECT_LT(d.box.y_hi, 1e6);
  EXPECT_GT(d.points_checked, 0u);
  // spot-check: random points outside the box
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> lg(-6.0, 6.0);
  int outside = 0;
  for (int i = 0; i < 20000; ++i) {
    const State s{std::pow(10.0, lg(rng)), std::pow(10.0, lg(rng))};
    if (d.box.contains(s)) continue;
    ++outside;
    EXPECT_LE(lyapunov_U(p, d.c, s).generator, -d.zeta) << s.x << "," << s.y;
  }
  EXPECT_GT(outside, 1000);
}
