// Stochastic Kuznetsov-Taylor tumor-immune model: parameters, drift,
// diffusion and the infinitesimal generator.
//
//   dx = (sigma + rho*x*y/(eta+y) - mu*x*y - delta*x) dt + sigma1*x dB1
//   dy = (alpha*y - beta*y^2 - x*y) dt                  + sigma2*y dB2
//
// x is the effector-cell density, y the tumor-cell density, both
// nondimensional.

#ifndef STOCHTUMOR_MODEL_HPP_
#define STOCHTUMOR_MODEL_HPP_

#include <functional>
#include <stdexcept>
#include <string>

namespace stochtumor {

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Raw dimensional rates. Only ingested, then converted with nondimensionalize().
struct DimensionalParams {
  double a = 0.0;   // TC intrinsic growth rate, 1/day
  double b = 0.0;   // reciprocal TC carrying capacity, 1/cell
  double s = 0.0;   // EC inflow rate, cells/day
  double d = 0.0;   // EC destruction/migration coefficient, 1/day
  double g = 0.0;   // response-functional constant, cells
  double q = 0.0;   // q = fK, 1/day
  double r1 = 0.0;  // EC inactivation rate, 1/(day*cell)
  double r2 = 0.0;  // TC lysis-programming rate, 1/(day*cell)
  double E0 = 0.0;  // EC population scale, cells
  double T0 = 0.0;  // TC population scale, cells

  friend bool operator==(const DimensionalParams&, const DimensionalParams&) = default;
};

struct ModelParams {
  double sigma = 0.0;   // EC baseline inflow
  double rho = 0.0;     // immune-response strength
  double eta = 0.0;     // response half-saturation
  double mu = 0.0;      // EC inactivation rate
  double delta = 0.0;   // EC death rate
  double alpha = 0.0;   // TC growth rate
  double beta = 0.0;    // TC self-limitation
  double sigma1 = 0.0;  // EC noise intensity
  double sigma2 = 0.0;  // TC noise intensity

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

// Throws DomainError unless sigma, eta, delta, alpha, beta > 0 and
// rho, mu, sigma1, sigma2 >= 0 (all finite).
void validate(const ModelParams& p);

struct State {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const State&, const State&) = default;
};

// Open rectangle (x_lo, x_hi) x (y_lo, y_hi) of the state space.
struct Box {
  double x_lo = 0.0;
  double x_hi = 0.0;
  double y_lo = 0.0;
  double y_hi = 0.0;

  bool contains(State s) const {
    return s.x > x_lo && s.x < x_hi && s.y > y_lo && s.y < y_hi;
  }
};

struct Rates {
  double dx = 0.0;
  double dy = 0.0;
};

struct NoiseCoefficients {
  double gx = 0.0;
  double gy = 0.0;
};

ModelParams nondimensionalize(const DimensionalParams& dp);

Rates drift(const ModelParams& p, State s);
NoiseCoefficients diffusion(const ModelParams& p, State s);

// f2(y) = rho*y/(eta+y) - mu*y, the net per-capita effect of the tumor on
// effector cells. Throws DomainError for y < 0.
double response_f2(const ModelParams& p, double y);

// h = max(sqrt(rho) - sqrt(mu*eta), 0). f2(y) <= h^2 on y >= 0.
double threshold_h(const ModelParams& p);

struct Gradient {
  double dx = 0.0;
  double dy = 0.0;
};

struct HessianDiagonal {
  double dxx = 0.0;
  double dyy = 0.0;
};

// A C^2 function on the open quadrant with caller-supplied derivatives.
// Mixed partials are never needed because the diffusion matrix is diagonal.
struct TestFunction {
  std::string name;
  std::function<double(State)> value;
  std::function<Gradient(State)> gradient;
  std::function<HessianDiagonal(State)> hessian_diagonal;
};

// L f = f_x * drift_x + f_y * drift_y + (f_xx sigma1^2 x^2 + f_yy sigma2^2 y^2) / 2
double generator_apply(const ModelParams& p, const TestFunction& f, State s);

// Compares the analytic derivatives of f against centered finite differences
// at s. Returns the worst relative discrepancy, measured against the larger of
// the derivative and |f| / coordinate^order.
double derivative_mismatch(const TestFunction& f, State s);

// The Lyapunov test functions used by the moment and recurrence arguments.
namespace test_functions {

// V(x, y) = (x + 1 - log x) + (y + 1 - log y); used for global positivity.
TestFunction positivity();

// V1(x, y) = (1 + x + c*y)^theta.
TestFunction moment(double c, double theta);

// V2(x) = (1 + 1/x)^theta.
TestFunction inverse_moment(double theta);

// U(x, y) = x + c/x + y^2 + (delta - h^2) log(1 + 1/y).
TestFunction recurrence(const ModelParams& p, double c);

// wx * (log x - log cx)^2 + wy * (log y - log cy)^2.
TestFunction quadratic_in_log(double cx, double cy, double wx, double wy);

TestFunction polynomial_xy(double px, double py);  // x^px + y^py

}  // namespace test_functions

}  // namespace stochtumor

#endif  // STOCHTUMOR_MODEL_HPP_
