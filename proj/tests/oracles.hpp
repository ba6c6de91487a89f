// Independent reference computations shared by the unit and acceptance tests.

#ifndef STOCHTUMOR_TESTS_ORACLES_HPP_
#define STOCHTUMOR_TESTS_ORACLES_HPP_

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iterator>
#include <limits>
#include <utility>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/tools/minima.hpp>

#include "stochtumor/analytic.hpp"
#include "stochtumor/integrators.hpp"
#include "stochtumor/model.hpp"
#include "stochtumor/montecarlo.hpp"

namespace oracle {

using stochtumor::ModelParams;
using stochtumor::State;

inline ModelParams example_51() {
  ModelParams p;
  p.sigma = 0.1181;
  p.rho = 1.131;
  p.eta = 20.19;
  p.mu = 0.00311;
  p.delta = 0.3743;
  p.alpha = 1.636;
  p.beta = 3.272e-3;
  p.sigma1 = 0.2;
  p.sigma2 = 2.0;
  return p;
}

inline ModelParams example_52() {
  ModelParams p = example_51();
  p.sigma2 = 0.25;
  p.rho = 0.613;
  return p;
}

// sup of f over (lo, hi): dense log grid, then Brent refinement around the
// best grid cell. The supremum may sit at the lower end (returned as f(lo)).
inline double grid_sup(const std::function<double(double)>& f, double lo, double hi,
                       std::size_t n = 1000000) {
  const double a = std::log(lo);
  const double b = std::log(hi);
  std::size_t best = 0;
  double best_v = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double u = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
    const double v = f(u);
    if (v > best_v) {
      best_v = v;
      best = i;
    }
  }
  auto at = [&](std::size_t i) {
    return std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
  };
  const double l = at(best == 0 ? 0 : best - 1);
  const double r = at(std::min(best + 1, n - 1));
  const auto res = boost::math::tools::brent_find_minima(
      [&](double u) { return -f(u); }, l, r, std::numeric_limits<double>::digits / 2);
  return std::max(best_v, -res.second);
}

// Integral over (0, inf), split into pieces around `scale` (where the mass
// sits). Endpoint evaluations at 0 and inf count as 0.
inline double integrate_halfline(const std::function<double(double)>& f, double scale = 1.0) {
  auto g = [&](double x) {
    if (!(x > 0.0) || std::isinf(x)) return 0.0;
    return f(x);
  };
  boost::math::quadrature::tanh_sinh<double> ts;
  boost::math::quadrature::exp_sinh<double> es;
  const double cuts[] = {0.0, scale / 16.0, scale / 4.0, scale / 2.0, scale, 2.0 * scale,
                         4.0 * scale, 16.0 * scale};
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < std::size(cuts); ++i) total += ts.integrate(g, cuts[i], cuts[i + 1]);
  return total + es.integrate(g, cuts[std::size(cuts) - 1], std::numeric_limits<double>::infinity());
}

struct DynkinEstimate {
  double mean = 0.0;
  double std_error = 0.0;
};

// (E f(X_h) - f(s)) / h by Monte-Carlo with n_sub Milstein sub-steps per path.
inline DynkinEstimate dynkin(const ModelParams& p, const std::function<double(State)>& f,
                             State s, double h, std::size_t n_paths, std::size_t n_sub,
                             std::uint64_t seed) {
  stochtumor::StepPolicy pol;
  pol.dt = h / static_cast<double>(n_sub);
  std::vector<double> d(n_paths);
  const double f0 = f(s);
  for (std::size_t i = 0; i < n_paths; ++i) {
    stochtumor::CoupledStepper st(p, s, pol, stochtumor::derive_seed(seed, i));
    for (std::size_t k = 0; k < n_sub; ++k) st.advance(pol.dt);
    d[i] = (f(st.current().state) - f0) / h;
  }
  const auto e = stochtumor::mean_estimate(d);
  return {e.point, e.std_error};
}

}  // namespace oracle

#endif  // STOCHTUMOR_TESTS_ORACLES_HPP_
