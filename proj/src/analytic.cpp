#include "stochtumor/analytic.hpp"

#include <cmath>
#include <limits>

#include <boost/math/special_functions/gamma.hpp>

namespace stochtumor {

StationaryLaw::StationaryLaw(LawKind kind, double shape, double rate)
    : kind_(kind), shape_(shape), rate_(rate) {
  if (!(shape > 0.0) || !(rate > 0.0) || !std::isfinite(shape) || !std::isfinite(rate)) {
    throw DomainError("stationary law needs finite shape > 0 and rate > 0");
  }
}

double StationaryLaw::log_pdf(double x) const {
  if (!(x > 0.0)) return -std::numeric_limits<double>::infinity();
  const double a = shape_;
  const double b = rate_;
  const double norm = a * std::log(b) - std::lgamma(a);
  if (kind_ == LawKind::kGamma) {
    return norm + (a - 1.0) * std::log(x) - b * x;
  }
  return norm - (a + 1.0) * std::log(x) - b / x;
}

double StationaryLaw::pdf(double x) const {
  if (!(x > 0.0)) return 0.0;
  return std::exp(log_pdf(x));
}

double StationaryLaw::cdf(double x) const {
  if (!(x > 0.0)) return 0.0;
  if (std::isinf(x)) return 1.0;
  if (kind_ == LawKind::kGamma) {
    return boost::math::gamma_p(shape_, rate_ * x);
  }
  return boost::math::gamma_q(shape_, rate_ / x);
}

double StationaryLaw::quantile(double u) const {
  if (!(u > 0.0) || !(u < 1.0)) {
    throw DomainError("quantile level must lie in (0, 1)");
  }
  if (kind_ == LawKind::kGamma) {
    return boost::math::gamma_p_inv(shape_, u) / rate_;
  }
  return rate_ / boost::math::gamma_q_inv(shape_, u);
}

bool StationaryLaw::has_moment(double p) const {
  return kind_ == LawKind::kGamma ? p > -shape_ : p < shape_;
}

double StationaryLaw::moment(double p) const {
  if (p == 0.0) return 1.0;
  if (!has_moment(p)) {
    throw DomainError(kind_ == LawKind::kGamma
                          ? "Gamma moment of order p needs p > -shape"
                          : "inverse-Gamma moment of order p needs p < shape");
  }
  const double a = shape_;
  const double b = rate_;
  if (kind_ == LawKind::kGamma) {
    return std::exp(std::lgamma(a + p) - std::lgamma(a) - p * std::log(b));
  }
  return std::exp(p * std::log(b) + std::lgamma(a - p) - std::lgamma(a));
}

double StationaryLaw::mode() const {
  if (kind_ == LawKind::kGamma) {
    return shape_ >= 1.0 ? (shape_ - 1.0) / rate_ : 0.0;
  }
  return rate_ / (shape_ + 1.0);
}

StationaryLaw StationaryLaw::dual() const {
  return {kind_ == LawKind::kGamma ? LawKind::kInverseGamma : LawKind::kGamma, shape_,
          rate_};
}

std::string to_string(LawKind kind) {
  return kind == LawKind::kGamma ? "Gamma" : "InverseGamma";
}

double rho_k(const ModelParams& p, double k) {
  return std::pow((2.0 * p.alpha + (k - 1.0) * p.sigma2 * p.sigma2) / (2.0 * p.beta), k);
}

double psi_moment_bound(const ModelParams& p, double k, double t, double y0) {
  if (!(k > 1.0)) throw DomainError("psi_moment_bound needs k > 1");
  if (!(y0 > 0.0)) throw DomainError("psi_moment_bound needs y0 > 0");
  if (!(t >= 0.0)) throw DomainError("psi_moment_bound needs t >= 0");
  const double s2 = p.sigma2 * p.sigma2;
  const double r = p.alpha + 0.5 * (k - 1.0) * s2;
  if (r == 0.0) throw DomainError("psi_moment_bound: alpha + (k-1) sigma2^2 / 2 = 0");
  const double decay = std::exp(-r * t);
  const double bracket =
      decay / y0 + 2.0 * p.beta / (2.0 * p.alpha + (k - 1.0) * s2) * (1.0 - decay);
  return std::pow(bracket, -k);
}

StationaryLaws stationary_laws(const ModelParams& p) {
  StationaryLaws laws;
  const double s1 = p.sigma1 * p.sigma1;
  const double s2 = p.sigma2 * p.sigma2;
  const double h = threshold_h(p);
  const double gap = p.delta - h * h;

  if (!(p.sigma1 > 0.0)) {
    laws.phi_absent_reason = "sigma1 = 0: phi is deterministic";
    laws.z_absent_reason = "sigma1 = 0: z is deterministic";
  } else {
    if (gap > 0.0) {
      laws.phi = StationaryLaw::inverse_gamma(2.0 * gap / s1 + 1.0, 2.0 * p.sigma / s1);
    } else {
      laws.phi_absent_reason = "delta - h^2 <= 0: phi has no stationary law";
    }
    laws.z = StationaryLaw::inverse_gamma(2.0 * p.delta / s1 + 1.0, 2.0 * p.sigma / s1);
  }

  if (!(p.sigma2 > 0.0)) {
    laws.psi_absent_reason = "sigma2 = 0: psi is deterministic";
  } else if (2.0 * p.alpha > s2) {
    laws.psi = StationaryLaw::gamma(2.0 * p.alpha / s2 - 1.0, 2.0 * p.beta / s2);
  } else {
    laws.psi_absent_reason = "2 alpha <= sigma2^2: psi tends to 0";
  }
  return laws;
}

double ergodic_moment(const StationaryLaw& law, double p) { return law.moment(p); }

Thresholds thresholds(const ModelParams& p) {
  Thresholds th;
  const double s2 = p.sigma2 * p.sigma2;
  th.h = threshold_h(p);
  th.delta_minus_h2 = p.delta - th.h * th.h;
  th.lambda1 = 0.5 * s2 - p.alpha;
  th.lambda2 = ((p.mu / p.beta) * (p.alpha - 0.5 * s2) + p.delta +
                0.5 * p.sigma1 * p.sigma1) /
               p.sigma;
  th.permanence_margin = p.alpha - 0.5 * s2 - p.sigma / th.delta_minus_h2;
  if (th.delta_minus_h2 > 0.0) {
    th.lambda3 = th.permanence_margin / p.beta;
  }
  return th;
}

std::string to_string(Regime r) {
  switch (r) {
    case Regime::kExtinction:
      return "Extinction";
    case Regime::kPermanence:
      return "Permanence";
    case Regime::kIndeterminate:
      break;
  }
  return "Indeterminate";
}

std::string to_string(PsiFate f) {
  return f == PsiFate::kExtinct ? "Extinct" : "StationaryGamma";
}

RegimeReport regime_classify(const ModelParams& p) {
  validate(p);
  const Thresholds th = thresholds(p);
  const StationaryLaws laws = stationary_laws(p);
  const double s2 = p.sigma2 * p.sigma2;

  RegimeReport rep;
  rep.lambda1 = th.lambda1;
  rep.lambda2 = th.lambda2;
  rep.lambda3 = th.lambda3;
  rep.h = th.h;
  rep.delta_minus_h2 = th.delta_minus_h2;
  rep.aux_psi_fate = 2.0 * p.alpha > s2 ? PsiFate::kStationaryGamma : PsiFate::kExtinct;
  rep.aux_psi_law = laws.psi;
  rep.aux_phi_law = laws.phi;
  rep.boundary_z_law = laws.z;

  const double two_alpha_minus_s2 = 2.0 * p.alpha - s2;
  const bool gap_ok = th.delta_minus_h2 > 0.0;
  const bool margin_ok = gap_ok && th.permanence_margin > 0.0;

  rep.certificates = {
      {"2*alpha - sigma2^2 < 0", two_alpha_minus_s2, two_alpha_minus_s2 < 0.0},
      {"lambda1 = sigma2^2/2 - alpha > 0", th.lambda1, th.lambda1 > 0.0},
      {"delta - h^2 > 0", th.delta_minus_h2, gap_ok},
      {"alpha - sigma2^2/2 - sigma/(delta - h^2) > 0", th.permanence_margin, margin_ok},
      {"rho <= mu*eta", p.rho - p.mu * p.eta, p.rho <= p.mu * p.eta},
  };

  if (th.lambda1 > 0.0) {
    rep.regime = Regime::kExtinction;
  } else if (margin_ok) {
    rep.regime = Regime::kPermanence;
  } else {
    rep.regime = Regime::kIndeterminate;
  }
  return rep;
}

}  // namespace stochtumor
