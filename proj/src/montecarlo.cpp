#include "stochtumor/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

namespace stochtumor {

void validate(const EnsembleSpec& spec) {
  validate(spec.policy);
  if (spec.n_paths == 0) throw DomainError("ensemble needs n_paths >= 1");
  if (!(spec.horizon > 0.0) || !std::isfinite(spec.horizon)) {
    throw DomainError("ensemble horizon must be finite and > 0");
  }
  if (!(spec.burn_in >= 0.0) || !(spec.burn_in < spec.horizon)) {
    throw DomainError("burn_in must lie in [0, horizon)");
  }
  if (spec.record_stride == 0) throw DomainError("record_stride must be >= 1");
}

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

EstimateWithCI mean_estimate(std::span<const double> values) {
  EstimateWithCI est;
  est.n = values.size();
  if (values.empty()) throw EstimationError("estimate over an empty sample");
  const double n = static_cast<double>(values.size());
  est.point = pairwise_sum(values) / n;
  if (!std::isfinite(est.point)) {
    throw EstimationError("estimate overflowed: non-finite sample mean");
  }
  if (values.size() > 1) {
    std::vector<double> dev(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double d = values[i] - est.point;
      dev[i] = d * d;
    }
    const double var = pairwise_sum(dev) / (n - 1.0);
    est.std_error = std::sqrt(var / n);
    if (!std::isfinite(est.std_error)) {
      throw EstimationError("estimate overflowed: non-finite standard error");
    }
  }
  return est;
}

std::string to_string(Coordinate c) {
  switch (c) {
    case Coordinate::kX:
      return "x";
    case Coordinate::kY:
      return "y";
    case Coordinate::kPsi:
      return "psi";
    case Coordinate::kPhi:
      return "phi";
    case Coordinate::kZ:
      break;
  }
  return "z";
}

double coordinate_of(const Snapshot& s, Coordinate c) {
  switch (c) {
    case Coordinate::kX:
      return s.state.x;
    case Coordinate::kY:
      return s.state.y;
    case Coordinate::kPsi:
      return s.psi;
    case Coordinate::kPhi:
      return s.phi;
    case Coordinate::kZ:
      break;
  }
  return s.z;
}

std::string Functional::name() const {
  switch (kind) {
    case FunctionalKind::kY:
      return "y";
    case FunctionalKind::kX:
      return "x";
    case FunctionalKind::kInvX:
      return "1/x";
    case FunctionalKind::kYSquared:
      return "y^2";
    case FunctionalKind::kXSquared:
      return "x^2";
    case FunctionalKind::kIndicator:
      break;
  }
  return "1{box}";
}

double Functional::operator()(State s) const {
  switch (kind) {
    case FunctionalKind::kY:
      return s.y;
    case FunctionalKind::kX:
      return s.x;
    case FunctionalKind::kInvX:
      return 1.0 / s.x;
    case FunctionalKind::kYSquared:
      return s.y * s.y;
    case FunctionalKind::kXSquared:
      return s.x * s.x;
    case FunctionalKind::kIndicator:
      break;
  }
  return region.contains(s) ? 1.0 : 0.0;
}

std::size_t thread_count() {
  if (const char* env = std::getenv("STOCHTUMOR_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

AuxSet needed_aux(const ObservationPlan& plan) {
  AuxSet aux = plan.aux;
  if (plan.decay_slope) {
    if (plan.decay_of == Coordinate::kPsi) aux.psi = true;
    if (plan.decay_of == Coordinate::kPhi) aux.phi = true;
    if (plan.decay_of == Coordinate::kZ) aux.z = true;
  }
  return aux;
}

// Least-squares slope of v against t, accumulated on shifted times.
struct SlopeFit {
  double t_shift = 0.0;
  double n = 0.0, st = 0.0, sv = 0.0, stt = 0.0, stv = 0.0;

  void add(double t, double v) {
    const double u = t - t_shift;
    n += 1.0;
    st += u;
    sv += v;
    stt += u * u;
    stv += u * v;
  }
  double slope() const {
    const double den = n * stt - st * st;
    if (!(n >= 2.0) || !(den > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    return (n * stv - st * sv) / den;
  }
};

PathObservation observe_path(const ModelParams& p, State s0, const EnsembleSpec& spec,
                             const ObservationPlan& plan, std::size_t index) {
  const AuxSet aux = needed_aux(plan);
  CoupledStepper stepper(p, s0, spec.policy, path_seed(spec, index), aux, plan.t0_for_z);
  const double dt = spec.policy.dt;
  const std::size_t n = step_count(spec.horizon, dt);

  PathObservation obs;
  std::vector<double> sums(plan.time_averages.size(), 0.0);
  std::size_t averaged = 0;

  // Grid index of each requested snapshot time.
  std::vector<std::size_t> snap_index(plan.snapshot_times.size());
  for (std::size_t i = 0; i < snap_index.size(); ++i) {
    const double t = plan.snapshot_times[i];
    if (!(t >= 0.0) || t > spec.horizon) {
      throw DomainError("snapshot time outside [0, horizon]");
    }
    snap_index[i] = t >= spec.horizon ? n : std::min(n, static_cast<std::size_t>(std::llround(t / dt)));
  }
  obs.snapshots.resize(snap_index.size());

  SlopeFit fit;
  fit.t_shift = spec.burn_in;
  bool fit_open = true;

  auto visit = [&](std::size_t k, double t, const Snapshot& snap) {
    for (std::size_t i = 0; i < snap_index.size(); ++i) {
      if (snap_index[i] == k) {
        obs.snapshots[i] = snap;
        obs.snapshots[i].t = t;
      }
    }
    if (plan.comparison) {
      if (aux.psi && snap.state.y > snap.psi) ++obs.psi_violations;
      if (aux.phi && snap.state.x > snap.phi) ++obs.phi_violations;
      if (aux.z && t >= plan.t0_for_z && snap.state.x > snap.z) ++obs.z_violations;
      ++obs.grid_points;
    }
    if (t + 1e-12 < spec.burn_in) return;
    if (k < n) {
      for (std::size_t i = 0; i < sums.size(); ++i) sums[i] += plan.time_averages[i](snap.state);
      ++averaged;
    }
    if (plan.decay_slope && fit_open) {
      const double u = coordinate_of(snap, plan.decay_of);
      if (u <= kUnderflowFloor) {
        fit_open = false;
        obs.decay_truncated = true;
      } else {
        fit.add(t, std::log(u));
      }
    }
  };

  visit(0, 0.0, stepper.current());
  for (std::size_t k = 1; k <= n; ++k) {
    const double t_prev = static_cast<double>(k - 1) * dt;
    const double t_next = k == n ? spec.horizon : static_cast<double>(k) * dt;
    stepper.advance(t_next - t_prev);
    visit(k, t_next, stepper.current());
  }

  obs.final = stepper.current();
  obs.final.t = spec.horizon;
  obs.events = stepper.events();
  obs.time_averages.resize(sums.size());
  for (std::size_t i = 0; i < sums.size(); ++i) {
    obs.time_averages[i] = averaged > 0 ? sums[i] / static_cast<double>(averaged)
                                        : std::numeric_limits<double>::quiet_NaN();
  }
  if (plan.decay_slope) obs.decay_slope = fit.slope();
  return obs;
}

}  // namespace

std::vector<PathObservation> observe_ensemble(const ModelParams& p, State s0,
                                              const EnsembleSpec& spec,
                                              const ObservationPlan& plan) {
  validate(p);
  validate(spec);
  if (!(s0.x > 0.0) || !(s0.y > 0.0)) throw DomainError("initial state must be positive");

  std::vector<PathObservation> out(spec.n_paths);
  const std::size_t workers = std::min(thread_count(), spec.n_paths);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= spec.n_paths) return;
      try {
        out[i] = observe_path(p, s0, spec, plan, i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(spec.n_paths);
        return;
      }
    }
  };

  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

EstimateWithCI estimate_moment(const ModelParams& p, State s0, const EnsembleSpec& spec,
                               Coordinate which, double power, double at) {
  if (power == 0.0) {
    validate(p);
    validate(spec);
    return {1.0, 0.0, spec.n_paths};
  }
  ObservationPlan plan;
  plan.aux = {which == Coordinate::kPsi, which == Coordinate::kPhi, which == Coordinate::kZ};
  plan.snapshot_times = {at};
  const auto obs = observe_ensemble(p, s0, spec, plan);
  std::vector<double> v(obs.size());
  for (std::size_t i = 0; i < obs.size(); ++i) {
    v[i] = std::pow(coordinate_of(obs[i].snapshots[0], which), power);
  }
  return mean_estimate(v);
}

EstimateWithCI time_average(const ModelParams& p, State s0, const EnsembleSpec& spec,
                            const Functional& f) {
  ObservationPlan plan;
  plan.time_averages = {f};
  const auto obs = observe_ensemble(p, s0, spec, plan);
  std::vector<double> v(obs.size());
  for (std::size_t i = 0; i < obs.size(); ++i) v[i] = obs[i].time_averages[0];
  return mean_estimate(v);
}

EstimateWithCI decay_rate(const ModelParams& p, State s0, const EnsembleSpec& spec,
                          Coordinate which) {
  ObservationPlan plan;
  plan.decay_slope = true;
  plan.decay_of = which;
  const auto obs = observe_ensemble(p, s0, spec, plan);
  std::vector<double> v;
  v.reserve(obs.size());
  for (const auto& o : obs) {
    if (std::isfinite(o.decay_slope)) v.push_back(o.decay_slope);
  }
  if (v.empty()) throw EstimationError("no path produced a decay slope");
  return mean_estimate(v);
}

EstimateWithCI permanence_occupation(const ModelParams& p, State s0,
                                     const EnsembleSpec& spec, double zeta_box) {
  if (!(zeta_box > 0.0) || !(zeta_box < 1.0)) {
    throw DomainError("occupation box parameter must lie in (0, 1)");
  }
  const Box box{zeta_box, 1.0 / zeta_box, zeta_box, 1.0 / zeta_box};
  const auto obs = observe_ensemble(p, s0, spec, ObservationPlan{});
  std::vector<double> v(obs.size());
  for (std::size_t i = 0; i < obs.size(); ++i) {
    const State s = obs[i].final.state;
    v[i] = (s.x >= box.x_lo && s.x <= box.x_hi && s.y >= box.y_lo && s.y <= box.y_hi) ? 1.0 : 0.0;
  }
  return mean_estimate(v);
}

}  // namespace stochtumor
