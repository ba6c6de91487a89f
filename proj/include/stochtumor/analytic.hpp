// Closed-form stationary laws of the comparison processes, moment bounds and
// the regime thresholds separating tumor extinction from permanence.

#ifndef STOCHTUMOR_ANALYTIC_HPP_
#define STOCHTUMOR_ANALYTIC_HPP_

#include <optional>
#include <string>
#include <vector>

#include "stochtumor/model.hpp"

namespace stochtumor {

enum class LawKind { kGamma, kInverseGamma };

// Gamma(a, b):        density b^a / Gamma(a) x^(a-1) exp(-b x)
// InverseGamma(a, b): density b^a / Gamma(a) x^-(a+1) exp(-b / x)
// X ~ Gamma(a, b) iff 1/X ~ InverseGamma(a, b).
class StationaryLaw {
 public:
  StationaryLaw(LawKind kind, double shape, double rate);

  static StationaryLaw gamma(double shape, double rate) {
    return {LawKind::kGamma, shape, rate};
  }
  static StationaryLaw inverse_gamma(double shape, double rate) {
    return {LawKind::kInverseGamma, shape, rate};
  }

  LawKind kind() const { return kind_; }
  double shape() const { return shape_; }
  double rate() const { return rate_; }

  double pdf(double x) const;
  double log_pdf(double x) const;
  double cdf(double x) const;
  double quantile(double u) const;

  bool has_moment(double p) const;
  // E[X^p] through log-Gamma. Throws DomainError when the moment diverges.
  double moment(double p) const;
  double mean() const { return moment(1.0); }
  double mode() const;

  // Law of 1/X.
  StationaryLaw dual() const;

  friend bool operator==(const StationaryLaw&, const StationaryLaw&) = default;

 private:
  LawKind kind_;
  double shape_;
  double rate_;
};

std::string to_string(LawKind kind);

// rho_k = ((2 alpha + (k - 1) sigma2^2) / (2 beta))^k, the limsup bound on
// E[psi^k] and hence on E[y^k].
double rho_k(const ModelParams& p, double k);

// Finite-time bound on E[psi(t)^k] for the stochastic logistic process started
// at y0:
//   [ e^{-r t} / y0 + 2 beta / (2 alpha + (k-1) sigma2^2) (1 - e^{-r t}) ]^{-k},
//   r = alpha + (k-1) sigma2^2 / 2.
// Equals y0^k at t = 0 and tends to rho_k. Requires k > 1.
double psi_moment_bound(const ModelParams& p, double k, double t, double y0);

struct StationaryLaws {
  std::optional<StationaryLaw> phi;  // IG(a1, b1), needs delta > h^2, sigma1 > 0
  std::optional<StationaryLaw> psi;  // G(a2, b2), needs 2 alpha > sigma2^2
  std::optional<StationaryLaw> z;    // IG(a3, b3), needs sigma1 > 0
  std::string phi_absent_reason;
  std::string psi_absent_reason;
  std::string z_absent_reason;
};

StationaryLaws stationary_laws(const ModelParams& p);

// Time-average limit of the p-th power of the process with stationary law
// `law` (M_p for phi, Mbar_p for psi).
double ergodic_moment(const StationaryLaw& law, double p);

struct Thresholds {
  double lambda1 = 0.0;                // sigma2^2/2 - alpha
  double lambda2 = 0.0;                // limsup bound on time average of 1/x
  std::optional<double> lambda3;       // liminf bound on time average of y
  double h = 0.0;
  double delta_minus_h2 = 0.0;
  double permanence_margin = 0.0;      // alpha - sigma2^2/2 - sigma/(delta - h^2)
};

Thresholds thresholds(const ModelParams& p);

enum class Regime { kExtinction, kPermanence, kIndeterminate };
enum class PsiFate { kExtinct, kStationaryGamma };

std::string to_string(Regime r);
std::string to_string(PsiFate f);

struct Certificate {
  std::string condition;
  double value = 0.0;
  bool satisfied = false;
};

struct RegimeReport {
  Regime regime = Regime::kIndeterminate;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  std::optional<double> lambda3;
  double h = 0.0;
  double delta_minus_h2 = 0.0;
  PsiFate aux_psi_fate = PsiFate::kExtinct;
  std::optional<StationaryLaw> aux_psi_law;
  std::optional<StationaryLaw> aux_phi_law;
  std::optional<StationaryLaw> boundary_z_law;
  std::vector<Certificate> certificates;
};

// Extinction iff lambda1 > 0; Permanence iff delta > h^2 and
// alpha - sigma2^2/2 - sigma/(delta - h^2) > 0; otherwise Indeterminate.
RegimeReport regime_classify(const ModelParams& p);

}  // namespace stochtumor

#endif  // STOCHTUMOR_ANALYTIC_HPP_
