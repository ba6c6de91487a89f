// Time stepping for the tumor-immune SDE and its comparison processes.
//
// Every diffusion in this system is linear in its own coordinate
// (sigma1*x, sigma2*y, sigma2*psi, sigma1*phi, sigma1*z), so one scalar
// update rule serves all five coordinates. With Brownian increment dW over
// a step dt the Milstein update of du = a(u) dt + s*u dB is
//
//   u' = u + a(u) dt + s*u*dW + (s^2 u / 2) (dW^2 - dt),
//
// which, writing dW = sqrt(dt)*xi, is the familiar form with correction
// (s^2 u / 2)(xi^2 - 1) dt. Euler-Maruyama drops the correction.

#ifndef STOCHTUMOR_INTEGRATORS_HPP_
#define STOCHTUMOR_INTEGRATORS_HPP_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include "stochtumor/model.hpp"

namespace stochtumor {

enum class Scheme { kMilstein, kEulerMaruyama };

// A step is rejected when any coordinate becomes non-finite, nonpositive or
// falls to eps_pos times its previous value or below. Rejected steps are
// bisected on a Brownian bridge, at most max_halvings levels deep.
struct StepPolicy {
  Scheme scheme = Scheme::kMilstein;
  double dt = 1e-3;
  double eps_pos = 1e-12;
  int max_halvings = 30;

  friend bool operator==(const StepPolicy&, const StepPolicy&) = default;
};

void validate(const StepPolicy& policy);

// Coordinates that shrink below this value are held there; the crossing is
// recorded in PathEvents. Only reachable deep in the extinction regime.
inline constexpr double kUnderflowFloor = 1e-300;

class SimulationFailure : public std::runtime_error {
 public:
  SimulationFailure(const std::string& what, double time)
      : std::runtime_error(what), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

// Three independent, reproducible N(0,1) streams: xi drives B1, eta drives
// B2 and bridge supplies Brownian-bridge midpoints when a step is bisected.
class BrownianSource {
 public:
  explicit BrownianSource(std::uint64_t seed);

  double next_xi() { return normal_(xi_engine_); }
  double next_eta() { return normal_(eta_engine_); }
  double next_bridge() { return normal_(bridge_engine_); }

 private:
  std::mt19937_64 xi_engine_;
  std::mt19937_64 eta_engine_;
  std::mt19937_64 bridge_engine_;
  std::normal_distribution<double> normal_;
};

// Deterministic, injective-in-practice sub-seed derivation (SplitMix64).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

struct BrownianIncrements {
  double dt = 0.0;
  std::uint64_t seed = 0;
  std::vector<double> xi;
  std::vector<double> eta;
};

BrownianIncrements generate_increments(std::uint64_t seed, double dt, std::size_t n);

// One step of the scalar rule above. No positivity handling.
double scalar_step(Scheme scheme, double u, double drift_rate, double noise,
                   double dW, double dt);

// Single steps of the main system given Brownian increments dW1, dW2 (each
// N(0, dt)). Return nullopt if a coordinate leaves the open quadrant.
std::optional<State> milstein_step(const ModelParams& p, State s, double dW1,
                                   double dW2, double dt);
std::optional<State> em_step(const ModelParams& p, State s, double dW1,
                             double dW2, double dt);

struct AuxSet {
  bool psi = false;
  bool phi = false;
  bool z = false;

  bool any() const { return psi || phi || z; }
  friend bool operator==(const AuxSet&, const AuxSet&) = default;
};

// Values of absent auxiliary processes are NaN.
struct Snapshot {
  double t = 0.0;
  State state;
  double psi = 0.0;
  double phi = 0.0;
  double z = 0.0;
};

struct PathEvents {
  std::size_t halvings = 0;
  std::optional<double> y_floor_time;
  std::optional<double> floor_time;  // first time any coordinate hit the floor
};

// Advances the main system and the requested comparison processes together
// on one set of Brownian increments.
//   psi: dpsi = psi (alpha - beta psi) dt + sigma2 psi dB2, psi(0) = y0
//   phi: dphi = [sigma - (delta - h^2) phi] dt + sigma1 phi dB1, phi(0) = x0
//   z:   dz = (sigma - delta z) dt + sigma1 z dB1, z(t0) = x(t0)
// Before t0 the z coordinate mirrors x.
class CoupledStepper {
 public:
  CoupledStepper(const ModelParams& p, State s0, const StepPolicy& policy,
                 std::uint64_t seed, AuxSet aux = {}, double t0_for_z = 0.0);

  // Advances by dt (<= policy.dt), bisecting on rejection.
  void advance(double dt);

  const Snapshot& current() const { return current_; }
  const PathEvents& events() const { return events_; }

 private:
  struct Vec {
    double v[5];
  };

  bool try_step(const Vec& from, double dW1, double dW2, double dt, Vec& to) const;
  void advance_interval(double dt, double dW1, double dW2, int depth);
  void apply_floor();

  ModelParams p_;
  StepPolicy policy_;
  AuxSet aux_;
  double t0_for_z_;
  double h2_;
  bool z_started_;
  BrownianSource noise_;
  Vec state_;
  double t_ = 0.0;
  Snapshot current_;
  PathEvents events_;
};

struct PathRecord {
  std::vector<double> times;
  std::vector<State> states;
  std::optional<std::vector<double>> aux_psi;
  std::optional<std::vector<double>> aux_phi;
  std::optional<std::vector<double>> aux_z;
  PathEvents events;
};

// Number of base steps covering [0, horizon]; the last one may be shorter.
std::size_t step_count(double horizon, double dt);

PathRecord simulate(const ModelParams& p, State s0, const StepPolicy& policy,
                    double horizon, std::uint64_t seed, std::size_t stride = 1);

PathRecord simulate_coupled(const ModelParams& p, State s0, const StepPolicy& policy,
                            double horizon, std::uint64_t seed, AuxSet which,
                            double t0_for_z = 0.0, std::size_t stride = 1);

// Header t,x,y[,psi][,phi][,z]; values at 17 significant digits.
void write_path_csv(std::ostream& out, const PathRecord& path);

}  // namespace stochtumor

#endif  // STOCHTUMOR_INTEGRATORS_HPP_
