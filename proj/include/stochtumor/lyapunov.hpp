// Constants of the Lyapunov moment bounds and the recurrence Lyapunov
// function U used for uniqueness of the invariant measure.

#ifndef STOCHTUMOR_LYAPUNOV_HPP_
#define STOCHTUMOR_LYAPUNOV_HPP_

#include <cstddef>
#include <map>
#include <optional>

#include "stochtumor/model.hpp"

namespace stochtumor {

// sup over u > 0 of -a u^2 + b u + c, for a > 0.
double sup_quadratic_halfline(double a, double b, double c);

// sup over u > 0 of -a u^3 + b u^2 + c u + d, for a > 0 and c >= 0.
double sup_cubic_halfline(double a, double b, double c, double d);

// sup over w > 0 of -s w^3 + (4/5) m w^{5/2} - k2 w^2 + k1 w + k0, s > 0.
// Solved through w = v^2, which turns it into a degree-6 polynomial whose
// stationary points are the positive roots of a quartic.
double sup_inverse_moment_expression(double s, double m, double k2, double k1, double k0);

struct BoundConstants {
  double theta = 0.0;
  double c = 0.0;
  double kappa = 0.0;
  double L1 = 0.0;
  double L2 = 0.0;
  double L3 = 0.0;
  double L4 = 0.0;
  double L = 0.0;  // L4 / kappa, limsup bound on E[(1 + x + c y)^theta]
  // Inverse-moment constants, present when theta < 2.
  std::optional<double> L6;
  std::optional<double> L7;
  std::optional<double> inverse_moment_bound;  // L7 / kappa
  std::map<int, double> rho_k;                 // k = 2..5
  std::optional<double> M1;                    // phi stationary mean
  std::optional<double> Mbar1;                 // psi stationary mean
  std::optional<double> Mbar2;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  std::optional<double> lambda3;
  double zeta = 0.0;
};

// Uses kappa = theta (delta + (1 - theta) sigma1^2 / 2) / 2.
// Requires 0 < theta < 1 + 2 delta / sigma1^2 and c > max(rho/eta - mu, 0).
BoundConstants lyapunov_constants(const ModelParams& p, double theta, double c);

// Same with an explicit kappa; rejects kappa >= theta (delta + (1-theta) sigma1^2/2).
BoundConstants lyapunov_constants(const ModelParams& p, double theta, double c,
                                  double kappa);

// zeta with 2 zeta = (delta - h^2)(alpha - sigma2^2/2) - sigma.
double recurrence_zeta(const ModelParams& p);

// Largest admissible c, sigma zeta / (delta + sigma1^2).
double max_recurrence_c(const ModelParams& p);

// 0.9 of the largest admissible c.
double default_recurrence_c(const ModelParams& p);

struct UEvaluation {
  double value = 0.0;
  double generator = 0.0;        // L U from its term-by-term expansion
  double generator_bound = 0.0;  // upper bound used to exhibit the domain D
};

// U(x, y) = x + c/x + y^2 + (delta - h^2) log(1 + 1/y).
// Throws DomainError unless delta > h^2, zeta > 0 and 0 < c (delta + sigma1^2)
// <= sigma zeta.
UEvaluation lyapunov_U(const ModelParams& p, double c, State s);

struct RecurrenceDomain {
  Box box;
  double zeta = 0.0;
  double c = 0.0;
  double worst_outside = 0.0;  // max of L U over checked points outside the box
  std::size_t points_checked = 0;
  bool verified = false;       // worst_outside <= -zeta and box is interior
};

// Locates a box D outside which L U <= -zeta by scanning a log-spaced grid
// over [lo, hi]^2, then re-checks a grid `refine` times finer outside D.
RecurrenceDomain find_recurrence_domain(const ModelParams& p, double c,
                                        double lo = 1e-6, double hi = 1e6,
                                        std::size_t grid = 600, std::size_t refine = 3);

}  // namespace stochtumor

#endif  // STOCHTUMOR_LYAPUNOV_HPP_
