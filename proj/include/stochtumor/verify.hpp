// Verification suites: finite-horizon Monte-Carlo checks of the extinction,
// permanence, comparison and moment statements, plus the strong order of the
// time-stepping schemes.

#ifndef STOCHTUMOR_VERIFY_HPP_
#define STOCHTUMOR_VERIFY_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "stochtumor/integrators.hpp"
#include "stochtumor/io.hpp"
#include "stochtumor/model.hpp"

namespace stochtumor {

enum class Suite { kMoments, kComparison, kExtinction, kPermanence, kKs, kOrder };

std::string to_string(Suite s);
// Throws std::invalid_argument for an unknown name.
Suite parse_suite(const std::string& name);
std::vector<std::string> suite_names();

// Suite run against parameters outside its regime.
class PremiseError : public DomainError {
 public:
  using DomainError::DomainError;
};

// One checked inequality: measured <= bound + slack ("<=") or
// measured >= bound - slack (">=").
struct Assertion {
  std::string name;
  double measured = 0.0;
  double bound = 0.0;
  double slack = 0.0;
  std::string relation = "<=";
  bool passed = false;
};

Assertion check_le(std::string name, double measured, double bound, double slack = 0.0);
Assertion check_ge(std::string name, double measured, double bound, double slack = 0.0);

struct SuiteResult {
  Suite suite = Suite::kMoments;
  std::vector<Assertion> assertions;
  Json details = Json::object();

  bool passed() const;
};

// Unset fields take the suite's own defaults.
struct VerifyOptions {
  std::uint64_t master_seed = 1;
  std::optional<std::size_t> n_paths;
  std::optional<double> horizon;
  std::optional<double> burn_in;
  std::optional<double> dt;
};

SuiteResult run_suite(Suite suite, const ModelParams& p, State s0,
                      const VerifyOptions& opt = {});

struct OrderFit {
  std::vector<double> dts;
  std::vector<double> milstein_errors;  // E|X_N - X(T)|
  std::vector<double> em_errors;
  double milstein_slope = 0.0;
  double em_slope = 0.0;
};

// Strong errors at dt = 2^-coarsest .. 2^-finest on the GBM sub-case
// dx = -delta x dt + sigma1 x dB (sigma = rho = mu = 0) over [0, 1], driven by
// the full-system step functions and compared with the exact solution.
OrderFit strong_order_fit(double delta, double sigma1, std::size_t n_paths,
                          std::uint64_t seed, int coarsest = 6, int finest = 12);

Json to_json(const SuiteResult& r);

}  // namespace stochtumor

#endif  // STOCHTUMOR_VERIFY_HPP_
