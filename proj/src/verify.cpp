#include "stochtumor/verify.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "stochtumor/analytic.hpp"
#include "stochtumor/montecarlo.hpp"
#include "stochtumor/stats.hpp"

namespace stochtumor {

std::string to_string(Suite s) {
  switch (s) {
    case Suite::kMoments:
      return "moments";
    case Suite::kComparison:
      return "comparison";
    case Suite::kExtinction:
      return "extinction";
    case Suite::kPermanence:
      return "permanence";
    case Suite::kKs:
      return "ks";
    case Suite::kOrder:
      break;
  }
  return "order";
}

std::vector<std::string> suite_names() {
  return {"moments", "comparison", "extinction", "permanence", "ks", "order"};
}

Suite parse_suite(const std::string& name) {
  for (Suite s : {Suite::kMoments, Suite::kComparison, Suite::kExtinction, Suite::kPermanence,
                  Suite::kKs, Suite::kOrder}) {
    if (to_string(s) == name) return s;
  }
  throw std::invalid_argument("unknown suite \"" + name + "\"");
}

Assertion check_le(std::string name, double measured, double bound, double slack) {
  return {std::move(name), measured, bound, slack, "<=", measured <= bound + slack};
}

Assertion check_ge(std::string name, double measured, double bound, double slack) {
  return {std::move(name), measured, bound, slack, ">=", measured >= bound - slack};
}

bool SuiteResult::passed() const {
  return std::all_of(assertions.begin(), assertions.end(),
                     [](const Assertion& a) { return a.passed; });
}

namespace {

EnsembleSpec make_spec(const VerifyOptions& opt, std::size_t n_paths, double horizon,
                       std::uint64_t stream) {
  EnsembleSpec spec;
  spec.n_paths = opt.n_paths.value_or(n_paths);
  spec.horizon = opt.horizon.value_or(horizon);
  spec.burn_in = opt.burn_in.value_or(0.2 * spec.horizon);
  spec.policy.dt = opt.dt.value_or(1e-3);
  // Each ensemble inside a suite gets its own stream of path seeds.
  spec.master_seed = derive_seed(opt.master_seed, stream);
  return spec;
}

void require_regime(const ModelParams& p, Regime wanted, Suite suite) {
  const RegimeReport rep = regime_classify(p);
  if (rep.regime != wanted) {
    throw PremiseError("suite \"" + to_string(suite) + "\" needs the " + to_string(wanted) +
                       " regime; parameters classify as " + to_string(rep.regime));
  }
}

Json spec_json(const EnsembleSpec& s) {
  return {{"n_paths", s.n_paths}, {"horizon", s.horizon}, {"burn_in", s.burn_in},
          {"dt", s.policy.dt},    {"master_seed", s.master_seed}};
}

Json estimate_fields(const EstimateWithCI& e) {
  return {{"point", e.point}, {"std_error", e.std_error}, {"n", e.n}};
}

// Cross-path sample of x at the horizon; shared by the extinction and ks suites.
struct TerminalSample {
  EnsembleSpec spec;
  std::vector<PathObservation> obs;
  std::vector<double> x_final;
};

TerminalSample terminal_sample(const ModelParams& p, State s0, const VerifyOptions& opt,
                               bool with_slope) {
  TerminalSample ts;
  ts.spec = make_spec(opt, 100, 200.0, 0);
  ObservationPlan plan;
  plan.decay_slope = with_slope;
  ts.obs = observe_ensemble(p, s0, ts.spec, plan);
  ts.x_final.reserve(ts.obs.size());
  for (const auto& o : ts.obs) ts.x_final.push_back(o.final.state.x);
  return ts;
}

SuiteResult extinction_suite(const ModelParams& p, State s0, const VerifyOptions& opt) {
  require_regime(p, Regime::kExtinction, Suite::kExtinction);
  const Thresholds th = thresholds(p);
  const StationaryLaw boundary = *stationary_laws(p).z;

  TerminalSample ts = terminal_sample(p, s0, opt, true);
  std::vector<double> slopes;
  std::size_t truncated = 0;
  for (const auto& o : ts.obs) {
    if (o.decay_truncated) ++truncated;
    if (std::isfinite(o.decay_slope)) slopes.push_back(o.decay_slope);
  }
  const EstimateWithCI slope = mean_estimate(slopes);

  const Sample inv_x = Sample(ts.x_final, "x(T)").reciprocal();
  const KSResult ks = ks_test(inv_x, boundary.dual(), 0.05);

  SuiteResult r;
  r.suite = Suite::kExtinction;
  r.assertions.push_back(check_le("mean slope of ln y <= -lambda1", slope.point, -th.lambda1,
                                  3.0 * slope.std_error));
  r.assertions.push_back(check_le("KS statistic of 1/x(T) against the boundary Gamma law", ks.statistic,
                                  ks.critical_value));
  r.details = {{"ensemble", spec_json(ts.spec)},
               {"lambda1", th.lambda1},
               {"slope", estimate_fields(slope)},
               {"truncated_paths", truncated},
               {"boundary_law_of_1_over_x", to_json(boundary.dual())},
               {"ks", to_json(ks)}};
  return r;
}

SuiteResult ks_suite(const ModelParams& p, State s0, const VerifyOptions& opt) {
  require_regime(p, Regime::kExtinction, Suite::kKs);
  const StationaryLaw boundary = *stationary_laws(p).z;
  TerminalSample ts = terminal_sample(p, s0, opt, false);

  const Sample x(ts.x_final, "x(T)");
  const KSResult direct = ks_test(x, boundary, 0.05);
  const KSResult dual = ks_test(x.reciprocal(), boundary.dual(), 0.05);
  const StationaryLaw wrong = StationaryLaw::gamma(10.0, boundary.rate());
  const KSResult misspecified = ks_test(x.reciprocal(), wrong, 0.05);

  SuiteResult r;
  r.suite = Suite::kKs;
  r.assertions.push_back(check_le("KS statistic of 1/x(T) against the boundary Gamma law",
                                  dual.statistic, dual.critical_value));
  r.assertions.push_back(check_le("KS statistic of x(T) against the boundary inverse-Gamma law",
                                  direct.statistic, direct.critical_value));
  r.assertions.push_back(check_le("|D_n(x, IG) - D_n(1/x, G)|",
                                  std::abs(direct.statistic - dual.statistic), 1e-12));
  r.assertions.push_back(check_ge("KS statistic against mis-specified Gamma(10, rate) exceeds critical",
                                  misspecified.statistic, misspecified.critical_value));
  r.details = {{"ensemble", spec_json(ts.spec)},
               {"law", to_json(boundary)},
               {"ks_x_vs_inverse_gamma", to_json(direct)},
               {"ks_inverse_x_vs_gamma", to_json(dual)},
               {"ks_misspecified", to_json(misspecified)}};
  return r;
}

SuiteResult permanence_suite(const ModelParams& p, State s0, const VerifyOptions& opt) {
  require_regime(p, Regime::kPermanence, Suite::kPermanence);
  const Thresholds th = thresholds(p);
  const double mbar1 = stationary_laws(p).psi->mean();
  constexpr double kBox = 1e-3;

  VerifyOptions o = opt;
  if (!o.burn_in && !o.horizon) o.burn_in = 100.0;
  const EnsembleSpec spec = make_spec(o, 200, 500.0, 0);
  ObservationPlan plan;
  plan.time_averages = {Functional{FunctionalKind::kY, {}}, Functional{FunctionalKind::kInvX, {}}};
  const auto obs = observe_ensemble(p, s0, spec, plan);

  std::vector<double> avg_y(obs.size()), avg_inv_x(obs.size()), inside(obs.size());
  const Box box{kBox, 1.0 / kBox, kBox, 1.0 / kBox};
  for (std::size_t i = 0; i < obs.size(); ++i) {
    avg_y[i] = obs[i].time_averages[0];
    avg_inv_x[i] = obs[i].time_averages[1];
    const State s = obs[i].final.state;
    inside[i] = (s.x >= box.x_lo && s.x <= box.x_hi && s.y >= box.y_lo && s.y <= box.y_hi);
  }
  const EstimateWithCI ey = mean_estimate(avg_y);
  const EstimateWithCI einv = mean_estimate(avg_inv_x);
  const EstimateWithCI occ = mean_estimate(inside);

  SuiteResult r;
  r.suite = Suite::kPermanence;
  r.assertions.push_back(
      check_ge("time average of y >= lambda3", ey.point, *th.lambda3, 3.0 * ey.std_error));
  r.assertions.push_back(
      check_le("time average of y <= Mbar1", ey.point, mbar1, 3.0 * ey.std_error));
  r.assertions.push_back(check_le("time average of 1/x <= lambda2", einv.point, th.lambda2,
                                  3.0 * einv.std_error));
  r.assertions.push_back(check_ge("occupation of [1e-3, 1e3]^2 at T", occ.point, 0.95));
  r.details = {{"ensemble", spec_json(spec)},
               {"lambda2", th.lambda2},
               {"lambda3", *th.lambda3},
               {"Mbar1", mbar1},
               {"time_average_y", estimate_fields(ey)},
               {"time_average_inv_x", estimate_fields(einv)},
               {"occupation", estimate_fields(occ)}};
  return r;
}

SuiteResult comparison_suite(const ModelParams& p, State s0, const VerifyOptions& opt) {
  const EnsembleSpec spec = make_spec(opt, 50, 100.0, 0);
  const bool with_z = p.rho <= p.mu * p.eta;
  ObservationPlan plan;
  plan.aux = {true, true, with_z};
  plan.comparison = true;
  const auto obs = observe_ensemble(p, s0, spec, plan);

  std::size_t psi_v = 0, phi_v = 0, z_v = 0, points = 0;
  for (const auto& o : obs) {
    psi_v += o.psi_violations;
    phi_v += o.phi_violations;
    z_v += o.z_violations;
    points += o.grid_points;
  }
  SuiteResult r;
  r.suite = Suite::kComparison;
  r.assertions.push_back(check_le("grid points with y > psi", static_cast<double>(psi_v), 0.0));
  r.assertions.push_back(check_le("grid points with x > phi", static_cast<double>(phi_v), 0.0));
  if (with_z) {
    r.assertions.push_back(check_le("grid points with x > z", static_cast<double>(z_v), 0.0));
  }
  r.details = {{"ensemble", spec_json(spec)}, {"grid_points", points}, {"z_checked", with_z}};
  return r;
}

SuiteResult moments_suite(const ModelParams& p, State s0, const VerifyOptions& opt) {
  SuiteResult r;
  r.suite = Suite::kMoments;

  const double rho2 = rho_k(p, 2.0);
  const EnsembleSpec y_spec = make_spec(opt, 200, 400.0, 0);
  const EstimateWithCI ey2 = estimate_moment(p, s0, y_spec, Coordinate::kY, 2.0, y_spec.horizon);
  r.assertions.push_back(
      check_le("E[y^2] at T <= rho_2", ey2.point, rho2, 3.0 * ey2.std_error));

  VerifyOptions po = opt;
  po.horizon.reset();
  if (opt.n_paths) po.n_paths = 2 * *opt.n_paths;
  const EnsembleSpec psi_spec = make_spec(po, 400, 100.0, 1);
  std::vector<double> times = {1.0, 10.0, 100.0};
  ObservationPlan plan;
  plan.aux.psi = true;
  plan.snapshot_times = times;
  const auto obs = observe_ensemble(p, s0, psi_spec, plan);
  Json psi_rows = Json::array();
  for (std::size_t k = 0; k < times.size(); ++k) {
    std::vector<double> v(obs.size());
    for (std::size_t i = 0; i < obs.size(); ++i) {
      const double u = obs[i].snapshots[k].psi;
      v[i] = u * u;
    }
    const EstimateWithCI e = mean_estimate(v);
    const double bound = psi_moment_bound(p, 2.0, times[k], s0.y);
    r.assertions.push_back(check_le("E[psi^2] at t = " + std::to_string(static_cast<int>(times[k])) +
                                        " <= finite-time bound",
                                    e.point, bound, 3.0 * e.std_error));
    psi_rows.push_back({{"t", times[k]}, {"estimate", estimate_fields(e)}, {"bound", bound}});
  }
  r.details = {{"y_ensemble", spec_json(y_spec)},
               {"rho_2", rho2},
               {"y_second_moment", estimate_fields(ey2)},
               {"psi_ensemble", spec_json(psi_spec)},
               {"psi_second_moment", psi_rows}};
  return r;
}

double lsq_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  const double n = static_cast<double>(xs.size());
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
  }
  const double mx = sx / n;
  const double my = sy / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxy / sxx;
}

SuiteResult order_suite(const VerifyOptions& opt) {
  constexpr double kDelta = 0.5;
  constexpr double kSigma1 = 1.0;
  const std::size_t n = opt.n_paths.value_or(5000);
  const OrderFit fit = strong_order_fit(kDelta, kSigma1, n, derive_seed(opt.master_seed, 0));
  SuiteResult r;
  r.suite = Suite::kOrder;
  r.assertions.push_back(check_ge("Milstein strong-error slope >= 0.85", fit.milstein_slope, 0.85));
  r.assertions.push_back(check_le("Milstein strong-error slope <= 1.15", fit.milstein_slope, 1.15));
  r.assertions.push_back(check_ge("Euler-Maruyama strong-error slope >= 0.35", fit.em_slope, 0.35));
  r.assertions.push_back(check_le("Euler-Maruyama strong-error slope <= 0.65", fit.em_slope, 0.65));
  r.details = {{"delta", kDelta},
               {"sigma1", kSigma1},
               {"n_paths", n},
               {"dt", fit.dts},
               {"milstein_errors", fit.milstein_errors},
               {"em_errors", fit.em_errors}};
  return r;
}

}  // namespace

OrderFit strong_order_fit(double delta, double sigma1, std::size_t n_paths, std::uint64_t seed,
                          int coarsest, int finest) {
  if (coarsest < 1 || finest <= coarsest || finest > 24) {
    throw DomainError("strong_order_fit: need 1 <= coarsest < finest <= 24");
  }
  if (n_paths == 0) throw DomainError("strong_order_fit: need n_paths >= 1");
  ModelParams gbm;
  gbm.delta = delta;
  gbm.sigma1 = sigma1;
  gbm.eta = 1.0;

  const std::size_t n_fine = std::size_t{1} << finest;
  const double dt_fine = 1.0 / static_cast<double>(n_fine);
  const std::size_t levels = static_cast<std::size_t>(finest - coarsest + 1);
  std::vector<std::vector<double>> err_m(levels, std::vector<double>(n_paths));
  std::vector<std::vector<double>> err_e(levels, std::vector<double>(n_paths));
  std::vector<double> dW(n_fine);

  for (std::size_t path = 0; path < n_paths; ++path) {
    BrownianSource noise(derive_seed(seed, path));
    double w = 0.0;
    for (auto& d : dW) {
      d = std::sqrt(dt_fine) * noise.next_xi();
      w += d;
    }
    const double exact = std::exp((-delta - 0.5 * sigma1 * sigma1) + sigma1 * w);
    for (std::size_t l = 0; l < levels; ++l) {
      const int level = coarsest + static_cast<int>(l);
      const std::size_t steps = std::size_t{1} << level;
      const std::size_t block = n_fine / steps;
      const double dt = 1.0 / static_cast<double>(steps);
      double xm = 1.0, xe = 1.0;
      for (std::size_t k = 0; k < steps; ++k) {
        double inc = 0.0;
        for (std::size_t j = 0; j < block; ++j) inc += dW[k * block + j];
        xm = scalar_step(Scheme::kMilstein, xm, drift(gbm, {xm, 1.0}).dx, sigma1, inc, dt);
        xe = scalar_step(Scheme::kEulerMaruyama, xe, drift(gbm, {xe, 1.0}).dx, sigma1, inc, dt);
      }
      err_m[l][path] = std::abs(xm - exact);
      err_e[l][path] = std::abs(xe - exact);
    }
  }

  OrderFit fit;
  std::vector<double> log_dt, log_m, log_e;
  for (std::size_t l = 0; l < levels; ++l) {
    const double dt = std::ldexp(1.0, -(coarsest + static_cast<int>(l)));
    fit.dts.push_back(dt);
    fit.milstein_errors.push_back(mean_estimate(err_m[l]).point);
    fit.em_errors.push_back(mean_estimate(err_e[l]).point);
    log_dt.push_back(std::log(dt));
    log_m.push_back(std::log(fit.milstein_errors.back()));
    log_e.push_back(std::log(fit.em_errors.back()));
  }
  fit.milstein_slope = lsq_slope(log_dt, log_m);
  fit.em_slope = lsq_slope(log_dt, log_e);
  return fit;
}

SuiteResult run_suite(Suite suite, const ModelParams& p, State s0, const VerifyOptions& opt) {
  if (suite == Suite::kOrder) return order_suite(opt);
  validate(p);
  switch (suite) {
    case Suite::kMoments:
      return moments_suite(p, s0, opt);
    case Suite::kComparison:
      return comparison_suite(p, s0, opt);
    case Suite::kExtinction:
      return extinction_suite(p, s0, opt);
    case Suite::kPermanence:
      return permanence_suite(p, s0, opt);
    case Suite::kKs:
      return ks_suite(p, s0, opt);
    case Suite::kOrder:
      break;
  }
  return order_suite(opt);
}

Json to_json(const SuiteResult& r) {
  Json rows = Json::array();
  for (const auto& a : r.assertions) {
    rows.push_back({{"name", a.name},
                    {"measured", a.measured},
                    {"relation", a.relation},
                    {"bound", a.bound},
                    {"slack", a.slack},
                    {"passed", a.passed}});
  }
  return {{"suite", to_string(r.suite)},
          {"passed", r.passed()},
          {"assertions", rows},
          {"details", r.details}};
}

}  // namespace stochtumor
