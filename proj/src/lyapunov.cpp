#include "stochtumor/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <unsupported/Eigen/Polynomials>

#include "stochtumor/analytic.hpp"

namespace stochtumor {

double sup_quadratic_halfline(double a, double b, double c) {
  if (!(a > 0.0)) throw DomainError("sup_quadratic_halfline needs a > 0");
  // Vertex at b / (2a); for b <= 0 the supremum is the limit at u -> 0+.
  return b > 0.0 ? c + b * b / (4.0 * a) : c;
}

double sup_cubic_halfline(double a, double b, double c, double d) {
  if (!(a > 0.0)) throw DomainError("sup_cubic_halfline needs a > 0");
  if (c < 0.0) throw DomainError("sup_cubic_halfline needs c >= 0");
  // Positive root of -3a u^2 + 2b u + c = 0.
  const double disc = std::sqrt(b * b + 3.0 * a * c);
  const double u = b >= 0.0 ? (b + disc) / (3.0 * a) : c / (disc - b);
  if (!(u > 0.0)) return d;
  const double value = ((-a * u + b) * u + c) * u + d;
  return std::max(value, d);
}

double sup_inverse_moment_expression(double s, double m, double k2, double k1, double k0) {
  if (!(s > 0.0)) throw DomainError("sup_inverse_moment_expression needs s > 0");
  auto g = [&](double v) {
    const double v2 = v * v;
    return ((((-s * v + 0.8 * m) * v - k2) * v) * v + k1) * v2 + k0;
  };
  // g'(v) = v * q(v), q(v) = -6s v^4 + 4m v^3 - 4 k2 v^2 + 2 k1.
  auto q = [&](double v) { return (((-6.0 * s * v + 4.0 * m) * v - 4.0 * k2) * v) * v + 2.0 * k1; };
  auto dq = [&](double v) { return ((-24.0 * s * v + 12.0 * m) * v - 8.0 * k2) * v; };

  Eigen::Matrix<double, 5, 1> coeffs;
  coeffs << 2.0 * k1, 0.0, -4.0 * k2, 4.0 * m, -6.0 * s;
  Eigen::PolynomialSolver<double, 4> solver(coeffs);

  double best = k0;  // limit v -> 0+
  for (const auto& root : solver.roots()) {
    if (std::abs(root.imag()) > 1e-7 * (1.0 + std::abs(root.real()))) continue;
    double v = root.real();
    if (!(v > 0.0)) continue;
    for (int it = 0; it < 4; ++it) {
      const double d = dq(v);
      if (d == 0.0) break;
      const double next = v - q(v) / d;
      if (!(next > 0.0)) break;
      v = next;
    }
    best = std::max(best, g(v));
  }
  return best;
}

namespace {

double kappa_ceiling(const ModelParams& p, double theta) {
  return theta * (p.delta + 0.5 * (1.0 - theta) * p.sigma1 * p.sigma1);
}

}  // namespace

BoundConstants lyapunov_constants(const ModelParams& p, double theta, double c) {
  return lyapunov_constants(p, theta, c, 0.5 * kappa_ceiling(p, theta));
}

BoundConstants lyapunov_constants(const ModelParams& p, double theta, double c,
                                  double kappa) {
  validate(p);
  const double s1 = p.sigma1 * p.sigma1;
  const double s2 = p.sigma2 * p.sigma2;
  if (!(theta > 0.0)) throw DomainError("theta must be > 0");
  if (s1 > 0.0 && !(theta < 1.0 + 2.0 * p.delta / s1)) {
    throw DomainError("theta must be < 1 + 2 delta / sigma1^2");
  }
  if (!(c > std::max(p.rho / p.eta - p.mu, 0.0))) {
    throw DomainError("c must exceed max(rho/eta - mu, 0)");
  }
  if (!(kappa > 0.0)) throw DomainError("kappa must be > 0");
  if (!(kappa < kappa_ceiling(p, theta))) {
    throw DomainError(
        "kappa must be < theta (delta + (1 - theta) sigma1^2 / 2) so that L1 > 0");
  }

  BoundConstants bc;
  bc.theta = theta;
  bc.c = c;
  bc.kappa = kappa;
  const double kt = kappa / theta;
  bc.L1 = p.delta + 0.5 * (1.0 - theta) * s1 - kt;

  // The constant term is printed with +alpha in the definition and +sigma in
  // the line it bounds; the larger of the two keeps the bound valid.
  bc.L2 = sup_quadratic_halfline(
      c * (p.beta + p.mu + c),
      c * p.alpha + c * p.rho - c * p.delta - p.mu - c + 2.0 * c * kt,
      p.rho - p.delta + std::max(p.alpha, p.sigma) + 2.0 * kt);

  bc.L3 = sup_cubic_halfline(c * c * p.beta,
                             c * c * p.alpha - c * p.beta + 0.5 * (theta - 1.0) * c * c * s2 +
                                 c * c * kt,
                             c * (p.alpha + p.sigma + 2.0 * kt), p.sigma + kt);

  bc.L4 = std::max(1.0, sup_quadratic_halfline(bc.L1, bc.L2, bc.L3));
  bc.L = bc.L4 / kappa;

  for (int k = 2; k <= 5; ++k) bc.rho_k[k] = rho_k(p, k);

  if (theta < 2.0) {
    bc.L6 = sup_inverse_moment_expression(
        p.sigma, p.mu, p.sigma - p.delta - 0.5 * (theta + 1.0) * s1 - kt - 0.5 * p.mu,
        p.delta + s1 + 2.0 * kt, kt);
    // sup_t E[y^k] is replaced by its limsup bound rho_k.
    bc.L7 = *bc.L6 + 0.2 * p.mu * bc.rho_k[5] + 0.5 * p.mu * bc.rho_k[2];
    bc.inverse_moment_bound = *bc.L7 / kappa;
  }

  const StationaryLaws laws = stationary_laws(p);
  if (laws.phi) bc.M1 = laws.phi->moment(1.0);
  if (laws.psi) {
    bc.Mbar1 = laws.psi->moment(1.0);
    bc.Mbar2 = laws.psi->moment(2.0);
  }
  const Thresholds th = thresholds(p);
  bc.lambda1 = th.lambda1;
  bc.lambda2 = th.lambda2;
  bc.lambda3 = th.lambda3;
  bc.zeta = recurrence_zeta(p);
  return bc;
}

double recurrence_zeta(const ModelParams& p) {
  const double h = threshold_h(p);
  return 0.5 * ((p.delta - h * h) * (p.alpha - 0.5 * p.sigma2 * p.sigma2) - p.sigma);
}

double max_recurrence_c(const ModelParams& p) {
  return p.sigma * recurrence_zeta(p) / (p.delta + p.sigma1 * p.sigma1);
}

double default_recurrence_c(const ModelParams& p) { return 0.9 * max_recurrence_c(p); }

namespace {

void check_u_premises(const ModelParams& p, double c) {
  const double h = threshold_h(p);
  if (!(p.delta - h * h > 0.0)) throw DomainError("U needs delta - h^2 > 0");
  const double zeta = recurrence_zeta(p);
  if (!(zeta > 0.0)) {
    throw DomainError("U needs 2 zeta = (delta - h^2)(alpha - sigma2^2/2) - sigma > 0");
  }
  if (!(c > 0.0)) throw DomainError("U needs c > 0");
  if (c * (p.delta + p.sigma1 * p.sigma1) > p.sigma * zeta) {
    throw DomainError("U needs c (delta + sigma1^2) <= sigma zeta");
  }
}

UEvaluation evaluate_u(const ModelParams& p, double c, double k, State s) {
  const double x = s.x;
  const double y = s.y;
  const double s1 = p.sigma1 * p.sigma1;
  const double s2 = p.sigma2 * p.sigma2;
  const double y1 = y + 1.0;

  const double log_term = k * (-s2 / (2.0 * y1 * y1) - (p.alpha - s2 - x) / y1 + p.beta * y / y1);
  const double drift_x = p.sigma + p.rho * x * y / (p.eta + y) - p.mu * x * y - p.delta * x;

  UEvaluation u;
  u.value = x + c / x + y * y + k * std::log1p(1.0 / y);
  u.generator = drift_x -
                c * (p.sigma / (x * x) + p.rho * y / (x * (p.eta + y)) - p.mu * y / x -
                     (p.delta + s1) / x) +
                ((2.0 * p.alpha + s2) * y * y - 2.0 * p.beta * y * y * y - 2.0 * x * y * y) +
                log_term;
  u.generator_bound = (p.sigma - k * x) - c * p.sigma / (2.0 * x * x) + c * (p.delta + s1) / x +
                      (2.0 * p.alpha + s2 + c * p.mu * p.mu / (2.0 * p.sigma)) * y * y -
                      2.0 * p.beta * y * y * y + log_term;
  return u;
}

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  std::vector<double> g(n);
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (std::size_t i = 0; i < n; ++i) {
    g[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  return g;
}

}  // namespace

UEvaluation lyapunov_U(const ModelParams& p, double c, State s) {
  check_u_premises(p, c);
  const double h = threshold_h(p);
  return evaluate_u(p, c, p.delta - h * h, s);
}

RecurrenceDomain find_recurrence_domain(const ModelParams& p, double c, double lo,
                                        double hi, std::size_t grid, std::size_t refine) {
  check_u_premises(p, c);
  if (!(lo > 0.0) || !(hi > lo) || grid < 4 || refine < 1) {
    throw DomainError("find_recurrence_domain: bad grid specification");
  }
  const double h = threshold_h(p);
  const double k = p.delta - h * h;
  const double zeta = recurrence_zeta(p);

  const std::vector<double> coarse = log_grid(lo, hi, grid);
  std::size_t ix_min = grid, ix_max = 0, iy_min = grid, iy_max = 0;
  for (std::size_t i = 0; i < grid; ++i) {
    for (std::size_t j = 0; j < grid; ++j) {
      if (evaluate_u(p, c, k, {coarse[i], coarse[j]}).generator > -zeta) {
        ix_min = std::min(ix_min, i);
        ix_max = std::max(ix_max, i);
        iy_min = std::min(iy_min, j);
        iy_max = std::max(iy_max, j);
      }
    }
  }

  RecurrenceDomain dom;
  dom.zeta = zeta;
  dom.c = c;
  if (ix_min == grid) {
    // L U <= -zeta everywhere on the grid; any small box works.
    dom.box = {coarse[grid / 2 - 1], coarse[grid / 2], coarse[grid / 2 - 1], coarse[grid / 2]};
  } else {
    const bool interior = ix_min > 0 && iy_min > 0 && ix_max + 1 < grid && iy_max + 1 < grid;
    if (!interior) {
      dom.box = {coarse[ix_min], coarse[ix_max], coarse[iy_min], coarse[iy_max]};
      dom.worst_outside = std::numeric_limits<double>::infinity();
      return dom;
    }
    dom.box = {coarse[ix_min - 1], coarse[ix_max + 1], coarse[iy_min - 1], coarse[iy_max + 1]};
  }

  const std::vector<double> fine = log_grid(lo, hi, grid * refine);
  double worst = -std::numeric_limits<double>::infinity();
  std::size_t checked = 0;
  for (double x : fine) {
    for (double y : fine) {
      if (dom.box.contains({x, y})) continue;
      worst = std::max(worst, evaluate_u(p, c, k, {x, y}).generator);
      ++checked;
    }
  }
  dom.worst_outside = worst;
  dom.points_checked = checked;
  dom.verified = worst <= -zeta;
  return dom;
}

}  // namespace stochtumor
