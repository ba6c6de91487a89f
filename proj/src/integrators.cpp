#include "stochtumor/integrators.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "stochtumor/format.hpp"

namespace stochtumor {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

enum Slot { kX = 0, kY = 1, kPsi = 2, kPhi = 3, kZ = 4 };

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

bool admissible(double before, double after, double eps_pos) {
  return std::isfinite(after) && after > 0.0 && after > eps_pos * before;
}

}  // namespace

void validate(const StepPolicy& policy) {
  if (!(policy.dt > 0.0) || !std::isfinite(policy.dt)) {
    throw DomainError("policy.dt must be finite and > 0");
  }
  if (!(policy.eps_pos > 0.0) || !(policy.eps_pos < 1.0)) {
    throw DomainError("policy.eps_pos must lie in (0, 1)");
  }
  if (policy.max_halvings < 0) {
    throw DomainError("policy.max_halvings must be >= 0");
  }
}

BrownianSource::BrownianSource(std::uint64_t seed)
    : xi_engine_(splitmix64(seed ^ 0x5851f42d4c957f2dULL)),
      eta_engine_(splitmix64(seed ^ 0x14057b7ef767814fULL)),
      bridge_engine_(splitmix64(seed ^ 0x2545f4914f6cdd1dULL)) {}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(splitmix64(master) + index);
}

BrownianIncrements generate_increments(std::uint64_t seed, double dt, std::size_t n) {
  BrownianSource source(seed);
  BrownianIncrements inc;
  inc.dt = dt;
  inc.seed = seed;
  inc.xi.reserve(n);
  inc.eta.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    inc.xi.push_back(source.next_xi());
    inc.eta.push_back(source.next_eta());
  }
  return inc;
}

double scalar_step(Scheme scheme, double u, double drift_rate, double noise,
                   double dW, double dt) {
  double next = u + drift_rate * dt + noise * u * dW;
  if (scheme == Scheme::kMilstein) {
    next += 0.5 * noise * noise * u * (dW * dW - dt);
  }
  return next;
}

namespace {

std::optional<State> main_step(Scheme scheme, const ModelParams& p, State s,
                               double dW1, double dW2, double dt) {
  const Rates b = drift(p, s);
  const State next{scalar_step(scheme, s.x, b.dx, p.sigma1, dW1, dt),
                   scalar_step(scheme, s.y, b.dy, p.sigma2, dW2, dt)};
  if (!(next.x > 0.0) || !(next.y > 0.0) || !std::isfinite(next.x) ||
      !std::isfinite(next.y)) {
    return std::nullopt;
  }
  return next;
}

}  // namespace

std::optional<State> milstein_step(const ModelParams& p, State s, double dW1,
                                   double dW2, double dt) {
  return main_step(Scheme::kMilstein, p, s, dW1, dW2, dt);
}

std::optional<State> em_step(const ModelParams& p, State s, double dW1, double dW2,
                             double dt) {
  return main_step(Scheme::kEulerMaruyama, p, s, dW1, dW2, dt);
}

CoupledStepper::CoupledStepper(const ModelParams& p, State s0, const StepPolicy& policy,
                               std::uint64_t seed, AuxSet aux, double t0_for_z)
    : p_(p),
      policy_(policy),
      aux_(aux),
      t0_for_z_(t0_for_z),
      h2_(threshold_h(p) * threshold_h(p)),
      z_started_(false),
      noise_(seed) {
  validate(policy);
  if (!(s0.x > 0.0) || !(s0.y > 0.0)) {
    throw DomainError("initial state must lie in the open positive quadrant");
  }
  state_.v[kX] = s0.x;
  state_.v[kY] = s0.y;
  state_.v[kPsi] = aux.psi ? s0.y : kNaN;
  state_.v[kPhi] = aux.phi ? s0.x : kNaN;
  state_.v[kZ] = aux.z ? s0.x : kNaN;
  if (aux.z && t0_for_z_ <= 0.0) z_started_ = true;
  current_ = {0.0, s0, state_.v[kPsi], state_.v[kPhi], state_.v[kZ]};
}

bool CoupledStepper::try_step(const Vec& from, double dW1, double dW2, double dt,
                              Vec& to) const {
  const Scheme scheme = policy_.scheme;
  const State s{from.v[kX], from.v[kY]};
  const Rates b = drift(p_, s);
  to.v[kX] = scalar_step(scheme, s.x, b.dx, p_.sigma1, dW1, dt);
  to.v[kY] = scalar_step(scheme, s.y, b.dy, p_.sigma2, dW2, dt);
  if (!admissible(s.x, to.v[kX], policy_.eps_pos) ||
      !admissible(s.y, to.v[kY], policy_.eps_pos)) {
    return false;
  }
  if (aux_.psi) {
    const double u = from.v[kPsi];
    to.v[kPsi] = scalar_step(scheme, u, u * (p_.alpha - p_.beta * u), p_.sigma2, dW2, dt);
    if (!admissible(u, to.v[kPsi], policy_.eps_pos)) return false;
  } else {
    to.v[kPsi] = kNaN;
  }
  if (aux_.phi) {
    const double u = from.v[kPhi];
    to.v[kPhi] = scalar_step(scheme, u, p_.sigma - (p_.delta - h2_) * u, p_.sigma1, dW1, dt);
    if (!admissible(u, to.v[kPhi], policy_.eps_pos)) return false;
  } else {
    to.v[kPhi] = kNaN;
  }
  if (aux_.z && z_started_) {
    const double u = from.v[kZ];
    to.v[kZ] = scalar_step(scheme, u, p_.sigma - p_.delta * u, p_.sigma1, dW1, dt);
    if (!admissible(u, to.v[kZ], policy_.eps_pos)) return false;
  } else if (aux_.z) {
    to.v[kZ] = to.v[kX];
  } else {
    to.v[kZ] = kNaN;
  }
  return true;
}

void CoupledStepper::advance_interval(double dt, double dW1, double dW2, int depth) {
  Vec next;
  if (try_step(state_, dW1, dW2, dt, next)) {
    state_ = next;
    t_ += dt;
    apply_floor();
    return;
  }
  if (depth >= policy_.max_halvings) {
    throw SimulationFailure("positivity could not be restored after " +
                                std::to_string(policy_.max_halvings) +
                                " halvings at t = " + std::to_string(t_),
                            t_);
  }
  ++events_.halvings;
  // Brownian bridge midpoint: W(dt/2) | W(dt) = dW ~ N(dW/2, dt/4).
  const double half_sd = 0.5 * std::sqrt(dt);
  const double a1 = 0.5 * dW1 + half_sd * noise_.next_bridge();
  const double a2 = 0.5 * dW2 + half_sd * noise_.next_bridge();
  advance_interval(0.5 * dt, a1, a2, depth + 1);
  advance_interval(0.5 * dt, dW1 - a1, dW2 - a2, depth + 1);
}

void CoupledStepper::apply_floor() {
  for (double& v : state_.v) {
    if (v < kUnderflowFloor) {  // NaN compares false and stays untouched
      if (!events_.floor_time) events_.floor_time = t_;
      if (&v == &state_.v[kY] && !events_.y_floor_time) events_.y_floor_time = t_;
      v = kUnderflowFloor;
    }
  }
}

void CoupledStepper::advance(double dt) {
  const double sqrt_dt = std::sqrt(dt);
  const double dW1 = sqrt_dt * noise_.next_xi();
  const double dW2 = sqrt_dt * noise_.next_eta();
  const double t_start = t_;
  advance_interval(dt, dW1, dW2, 0);
  t_ = t_start + dt;
  if (aux_.z && !z_started_ && t_ >= t0_for_z_) {
    z_started_ = true;
    state_.v[kZ] = state_.v[kX];
  }
  current_ = {t_, {state_.v[kX], state_.v[kY]}, state_.v[kPsi], state_.v[kPhi],
              state_.v[kZ]};
}

std::size_t step_count(double horizon, double dt) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw DomainError("horizon must be finite and > 0");
  }
  return static_cast<std::size_t>(std::ceil(horizon / dt - 1e-9));
}

namespace {

void record(PathRecord& rec, const Snapshot& snap, double t) {
  rec.times.push_back(t);
  rec.states.push_back(snap.state);
  if (rec.aux_psi) rec.aux_psi->push_back(snap.psi);
  if (rec.aux_phi) rec.aux_phi->push_back(snap.phi);
  if (rec.aux_z) rec.aux_z->push_back(snap.z);
}

}  // namespace

PathRecord simulate_coupled(const ModelParams& p, State s0, const StepPolicy& policy,
                            double horizon, std::uint64_t seed, AuxSet which,
                            double t0_for_z, std::size_t stride) {
  validate(p);
  validate(policy);
  if (stride == 0) throw DomainError("record stride must be >= 1");
  const std::size_t n = step_count(horizon, policy.dt);

  CoupledStepper stepper(p, s0, policy, seed, which, t0_for_z);
  PathRecord rec;
  if (which.psi) rec.aux_psi.emplace();
  if (which.phi) rec.aux_phi.emplace();
  if (which.z) rec.aux_z.emplace();
  const std::size_t expected = n / stride + 2;
  rec.times.reserve(expected);
  rec.states.reserve(expected);

  record(rec, stepper.current(), 0.0);
  for (std::size_t k = 1; k <= n; ++k) {
    const double t_prev = static_cast<double>(k - 1) * policy.dt;
    const double t_next = k == n ? horizon : static_cast<double>(k) * policy.dt;
    stepper.advance(t_next - t_prev);
    if (k % stride == 0 || k == n) record(rec, stepper.current(), t_next);
  }
  rec.events = stepper.events();
  return rec;
}

PathRecord simulate(const ModelParams& p, State s0, const StepPolicy& policy,
                    double horizon, std::uint64_t seed, std::size_t stride) {
  return simulate_coupled(p, s0, policy, horizon, seed, AuxSet{}, 0.0, stride);
}

void write_path_csv(std::ostream& out, const PathRecord& path) {
  out << "t,x,y";
  if (path.aux_psi) out << ",psi";
  if (path.aux_phi) out << ",phi";
  if (path.aux_z) out << ",z";
  out << '\n';
  for (std::size_t i = 0; i < path.times.size(); ++i) {
    out << format_double(path.times[i]) << ',' << format_double(path.states[i].x) << ','
        << format_double(path.states[i].y);
    if (path.aux_psi) out << ',' << format_double((*path.aux_psi)[i]);
    if (path.aux_phi) out << ',' << format_double((*path.aux_phi)[i]);
    if (path.aux_z) out << ',' << format_double((*path.aux_z)[i]);
    out << '\n';
  }
}

}  // namespace stochtumor
