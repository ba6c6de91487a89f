#include "stochtumor/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace stochtumor {

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw DomainError(std::string(name) + " must be finite and > 0, got " +
                      std::to_string(v));
  }
}

void require_nonnegative(double v, const char* name) {
  if (!(v >= 0.0) || !std::isfinite(v)) {
    throw DomainError(std::string(name) + " must be finite and >= 0, got " +
                      std::to_string(v));
  }
}

}  // namespace

void validate(const ModelParams& p) {
  require_positive(p.sigma, "sigma");
  require_positive(p.eta, "eta");
  require_positive(p.delta, "delta");
  require_positive(p.alpha, "alpha");
  require_positive(p.beta, "beta");
  require_nonnegative(p.rho, "rho");
  require_nonnegative(p.mu, "mu");
  require_nonnegative(p.sigma1, "sigma1");
  require_nonnegative(p.sigma2, "sigma2");
}

ModelParams nondimensionalize(const DimensionalParams& dp) {
  require_positive(dp.a, "a");
  require_positive(dp.b, "b");
  require_positive(dp.s, "s");
  require_positive(dp.d, "d");
  require_positive(dp.g, "g");
  require_positive(dp.q, "q");
  require_positive(dp.r1, "r1");
  require_positive(dp.r2, "r2");
  require_positive(dp.E0, "E0");
  require_positive(dp.T0, "T0");

  ModelParams p;
  p.sigma = dp.s / (dp.r2 * dp.E0 * dp.T0);
  p.rho = dp.q / (dp.r2 * dp.T0);
  p.mu = dp.r1 / dp.r2;
  p.delta = dp.d / (dp.r2 * dp.T0);
  p.alpha = dp.a / (dp.r2 * dp.T0);
  p.eta = dp.g / dp.T0;
  p.beta = dp.a * dp.b / dp.r2;
  return p;
}

Rates drift(const ModelParams& p, State s) {
  const double xy = s.x * s.y;
  return {p.sigma + p.rho * xy / (p.eta + s.y) - p.mu * xy - p.delta * s.x,
          p.alpha * s.y - p.beta * s.y * s.y - xy};
}

NoiseCoefficients diffusion(const ModelParams& p, State s) {
  return {p.sigma1 * s.x, p.sigma2 * s.y};
}

double response_f2(const ModelParams& p, double y) {
  if (!(y >= 0.0)) {
    throw DomainError("response_f2: y must be >= 0");
  }
  return p.rho * y / (p.eta + y) - p.mu * y;
}

double threshold_h(const ModelParams& p) {
  return std::max(std::sqrt(p.rho) - std::sqrt(p.mu * p.eta), 0.0);
}

double generator_apply(const ModelParams& p, const TestFunction& f, State s) {
  const Rates b = drift(p, s);
  const Gradient g = f.gradient(s);
  const HessianDiagonal h = f.hessian_diagonal(s);
  const double vx = p.sigma1 * s.x;
  const double vy = p.sigma2 * s.y;
  return g.dx * b.dx + g.dy * b.dy + 0.5 * (h.dxx * vx * vx + h.dyy * vy * vy);
}

double derivative_mismatch(const TestFunction& f, State s) {
  const double hx1 = 1e-5 * s.x;
  const double hy1 = 1e-5 * s.y;
  const double hx2 = 1e-4 * s.x;
  const double hy2 = 1e-4 * s.y;
  const double f0 = f.value(s);
  // errors are measured against |f| / coord^order as well as the derivative
  auto rel = [&](double analytic, double numeric, double coord, int order) {
    const double natural = std::abs(f0) / std::pow(coord, order);
    const double scale = std::max({std::abs(analytic), std::abs(numeric), natural, 1e-300});
    return std::abs(analytic - numeric) / scale;
  };

  const double fx = (f.value({s.x + hx1, s.y}) - f.value({s.x - hx1, s.y})) / (2 * hx1);
  const double fy = (f.value({s.x, s.y + hy1}) - f.value({s.x, s.y - hy1})) / (2 * hy1);
  const double fxx =
      (f.value({s.x + hx2, s.y}) - 2 * f0 + f.value({s.x - hx2, s.y})) / (hx2 * hx2);
  const double fyy =
      (f.value({s.x, s.y + hy2}) - 2 * f0 + f.value({s.x, s.y - hy2})) / (hy2 * hy2);

  const Gradient g = f.gradient(s);
  const HessianDiagonal h = f.hessian_diagonal(s);
  return std::max({rel(g.dx, fx, s.x, 1), rel(g.dy, fy, s.y, 1), rel(h.dxx, fxx, s.x, 2),
                   rel(h.dyy, fyy, s.y, 2)});
}

namespace test_functions {

TestFunction positivity() {
  TestFunction f;
  f.name = "V";
  f.value = [](State s) {
    return (s.x + 1.0 - std::log(s.x)) + (s.y + 1.0 - std::log(s.y));
  };
  f.gradient = [](State s) { return Gradient{1.0 - 1.0 / s.x, 1.0 - 1.0 / s.y}; };
  f.hessian_diagonal = [](State s) {
    return HessianDiagonal{1.0 / (s.x * s.x), 1.0 / (s.y * s.y)};
  };
  return f;
}

TestFunction moment(double c, double theta) {
  TestFunction f;
  f.name = "V1";
  f.value = [=](State s) { return std::pow(1.0 + s.x + c * s.y, theta); };
  f.gradient = [=](State s) {
    const double d = theta * std::pow(1.0 + s.x + c * s.y, theta - 1.0);
    return Gradient{d, c * d};
  };
  f.hessian_diagonal = [=](State s) {
    const double d2 = theta * (theta - 1.0) * std::pow(1.0 + s.x + c * s.y, theta - 2.0);
    return HessianDiagonal{d2, c * c * d2};
  };
  return f;
}

TestFunction inverse_moment(double theta) {
  TestFunction f;
  f.name = "V2";
  f.value = [=](State s) { return std::pow(1.0 + 1.0 / s.x, theta); };
  f.gradient = [=](State s) {
    const double u = 1.0 + 1.0 / s.x;
    return Gradient{-theta * std::pow(u, theta - 1.0) / (s.x * s.x), 0.0};
  };
  f.hessian_diagonal = [=](State s) {
    const double u = 1.0 + 1.0 / s.x;
    const double x2 = s.x * s.x;
    const double d2 = theta * (theta - 1.0) * std::pow(u, theta - 2.0) / (x2 * x2) +
                      2.0 * theta * std::pow(u, theta - 1.0) / (x2 * s.x);
    return HessianDiagonal{d2, 0.0};
  };
  return f;
}

TestFunction recurrence(const ModelParams& p, double c) {
  const double h = threshold_h(p);
  const double k = p.delta - h * h;
  TestFunction f;
  f.name = "U";
  f.value = [=](State s) {
    return s.x + c / s.x + s.y * s.y + k * std::log1p(1.0 / s.y);
  };
  f.gradient = [=](State s) {
    return Gradient{1.0 - c / (s.x * s.x), 2.0 * s.y - k / (s.y * (s.y + 1.0))};
  };
  f.hessian_diagonal = [=](State s) {
    const double yy1 = s.y * (s.y + 1.0);
    return HessianDiagonal{2.0 * c / (s.x * s.x * s.x),
                           2.0 + k * (2.0 * s.y + 1.0) / (yy1 * yy1)};
  };
  return f;
}

TestFunction quadratic_in_log(double cx, double cy, double wx, double wy) {
  const double lcx = std::log(cx);
  const double lcy = std::log(cy);
  TestFunction f;
  f.name = "quadratic_in_log";
  f.value = [=](State s) {
    const double u = std::log(s.x) - lcx;
    const double v = std::log(s.y) - lcy;
    return wx * u * u + wy * v * v;
  };
  f.gradient = [=](State s) {
    return Gradient{2.0 * wx * (std::log(s.x) - lcx) / s.x,
                    2.0 * wy * (std::log(s.y) - lcy) / s.y};
  };
  f.hessian_diagonal = [=](State s) {
    return HessianDiagonal{2.0 * wx * (1.0 - (std::log(s.x) - lcx)) / (s.x * s.x),
                           2.0 * wy * (1.0 - (std::log(s.y) - lcy)) / (s.y * s.y)};
  };
  return f;
}

TestFunction polynomial_xy(double px, double py) {
  TestFunction f;
  f.name = "polynomial_xy";
  f.value = [=](State s) { return std::pow(s.x, px) + std::pow(s.y, py); };
  f.gradient = [=](State s) {
    return Gradient{px * std::pow(s.x, px - 1.0), py * std::pow(s.y, py - 1.0)};
  };
  f.hessian_diagonal = [=](State s) {
    return HessianDiagonal{px * (px - 1.0) * std::pow(s.x, px - 2.0),
                           py * (py - 1.0) * std::pow(s.y, py - 2.0)};
  };
  return f;
}

}  // namespace test_functions

}  // namespace stochtumor
