// Ensemble simulation and the estimators used to check the asymptotic
// statements (moment bounds, ergodic averages, decay rates, permanence) at
// finite horizons.

#ifndef STOCHTUMOR_MONTECARLO_HPP_
#define STOCHTUMOR_MONTECARLO_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "stochtumor/integrators.hpp"
#include "stochtumor/model.hpp"

namespace stochtumor {

struct EnsembleSpec {
  std::size_t n_paths = 1;
  double horizon = 1.0;
  double burn_in = 0.0;
  StepPolicy policy;
  std::uint64_t master_seed = 1;
  std::size_t record_stride = 1;

  friend bool operator==(const EnsembleSpec&, const EnsembleSpec&) = default;
};

void validate(const EnsembleSpec& spec);

// Seed of path i. Distinct for distinct i.
inline std::uint64_t path_seed(const EnsembleSpec& spec, std::size_t i) {
  return derive_seed(spec.master_seed, i);
}

// point +/- 1.96 * std_error is the 95% normal-approximation interval.
struct EstimateWithCI {
  double point = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;

  double half_width() const { return 1.96 * std_error; }
};

class EstimationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Cross-sample mean and standard error, reduced by pairwise summation so the
// result is independent of how paths were scheduled.
EstimateWithCI mean_estimate(std::span<const double> values);
double pairwise_sum(std::span<const double> values);

enum class Coordinate { kX, kY, kPsi, kPhi, kZ };
std::string to_string(Coordinate c);
double coordinate_of(const Snapshot& s, Coordinate c);

enum class FunctionalKind { kY, kX, kInvX, kYSquared, kXSquared, kIndicator };

struct Functional {
  FunctionalKind kind = FunctionalKind::kY;
  Box region;  // used by kIndicator only

  static Functional indicator(Box region) { return {FunctionalKind::kIndicator, region}; }
  std::string name() const;
  double operator()(State s) const;
};

// What to record per path while streaming through an ensemble. Paths are
// never stored in full.
struct ObservationPlan {
  AuxSet aux;
  double t0_for_z = 0.0;
  std::vector<Functional> time_averages;  // over [burn_in, horizon)
  std::vector<double> snapshot_times;     // nearest grid points
  bool decay_slope = false;               // LSQ slope of ln u over [burn_in, horizon]
  Coordinate decay_of = Coordinate::kY;
  bool comparison = false;                // count y > psi, x > phi, x > z (after t0)
};

struct PathObservation {
  std::vector<double> time_averages;
  std::vector<Snapshot> snapshots;
  Snapshot final;
  double decay_slope = 0.0;
  bool decay_truncated = false;
  std::size_t psi_violations = 0;
  std::size_t phi_violations = 0;
  std::size_t z_violations = 0;
  std::size_t grid_points = 0;
  PathEvents events;
};

// Runs spec.n_paths independent paths (concurrently, see thread_count()) and
// returns their observations in path order.
std::vector<PathObservation> observe_ensemble(const ModelParams& p, State s0,
                                              const EnsembleSpec& spec,
                                              const ObservationPlan& plan);

// Worker count: STOCHTUMOR_THREADS if set, else hardware concurrency.
std::size_t thread_count();

EstimateWithCI estimate_moment(const ModelParams& p, State s0, const EnsembleSpec& spec,
                               Coordinate which, double power, double at);

EstimateWithCI time_average(const ModelParams& p, State s0, const EnsembleSpec& spec,
                            const Functional& f);

// Per-path slope of ln u(t) against t on [burn_in, horizon], u = y by
// default. A path whose u reaches kUnderflowFloor is truncated there.
EstimateWithCI decay_rate(const ModelParams& p, State s0, const EnsembleSpec& spec,
                          Coordinate which = Coordinate::kY);

// Fraction of paths inside [zeta, 1/zeta]^2 at the horizon.
EstimateWithCI permanence_occupation(const ModelParams& p, State s0,
                                     const EnsembleSpec& spec, double zeta_box);

}  // namespace stochtumor

#endif  // STOCHTUMOR_MONTECARLO_HPP_
