#include "stochtumor/io.hpp"

#include <cmath>

namespace stochtumor {

namespace {

// NaN and inf have no JSON spelling; they become null.
Json num(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

template <class T>
Json opt(const std::optional<T>& v) {
  return v ? to_json(*v) : Json(nullptr);
}

Json opt(const std::optional<double>& v) { return v ? num(*v) : Json(nullptr); }

}  // namespace

Json to_json(const ModelParams& p) {
  return Json{{"sigma", p.sigma}, {"rho", p.rho},       {"eta", p.eta},
              {"mu", p.mu},       {"delta", p.delta},   {"alpha", p.alpha},
              {"beta", p.beta},   {"sigma1", p.sigma1}, {"sigma2", p.sigma2}};
}

Json to_json(const DimensionalParams& dp) {
  return Json{{"a", dp.a},   {"b", dp.b},   {"s", dp.s},   {"d", dp.d},   {"g", dp.g},
              {"q", dp.q},   {"r1", dp.r1}, {"r2", dp.r2}, {"E0", dp.E0}, {"T0", dp.T0}};
}

Json to_json(const StationaryLaw& law) {
  return Json{{"family", to_string(law.kind())},
              {"shape", law.shape()},
              {"rate", law.rate()},
              {"mean", law.has_moment(1.0) ? num(law.mean()) : Json(nullptr)},
              {"mode", law.mode()}};
}

Json to_json(const RegimeReport& r) {
  Json certs = Json::array();
  for (const auto& c : r.certificates) {
    certs.push_back({{"condition", c.condition}, {"value", num(c.value)}, {"satisfied", c.satisfied}});
  }
  return Json{{"regime", to_string(r.regime)},
              {"lambda1", num(r.lambda1)},
              {"lambda2", num(r.lambda2)},
              {"lambda3", opt(r.lambda3)},
              {"h", num(r.h)},
              {"delta_minus_h2", num(r.delta_minus_h2)},
              {"aux_psi_fate", to_string(r.aux_psi_fate)},
              {"aux_psi_law", opt(r.aux_psi_law)},
              {"aux_phi_law", opt(r.aux_phi_law)},
              {"boundary_z_law", opt(r.boundary_z_law)},
              {"certificates", certs}};
}

Json to_json(const KSResult& r) {
  return Json{{"statistic", r.statistic},
              {"n", r.n},
              {"critical_value", r.critical_value},
              {"reject", r.reject},
              {"level", r.level}};
}

Json to_json(const BoundConstants& bc) {
  Json rho = Json::object();
  for (const auto& [k, v] : bc.rho_k) rho[std::to_string(k)] = num(v);
  return Json{{"theta", bc.theta},
              {"c", bc.c},
              {"kappa", bc.kappa},
              {"L1", num(bc.L1)},
              {"L2", num(bc.L2)},
              {"L3", num(bc.L3)},
              {"L4", num(bc.L4)},
              {"L", num(bc.L)},
              {"L6", opt(bc.L6)},
              {"L7", opt(bc.L7)},
              {"inverse_moment_bound", opt(bc.inverse_moment_bound)},
              {"rho_k", rho},
              {"M1", opt(bc.M1)},
              {"Mbar1", opt(bc.Mbar1)},
              {"Mbar2", opt(bc.Mbar2)},
              {"lambda1", num(bc.lambda1)},
              {"lambda2", num(bc.lambda2)},
              {"lambda3", opt(bc.lambda3)},
              {"zeta", num(bc.zeta)}};
}

Json to_json(const PathEvents& ev) {
  return Json{{"halvings", ev.halvings},
              {"y_floor_time", opt(ev.y_floor_time)},
              {"floor_time", opt(ev.floor_time)}};
}

Json estimate_json(const std::string& functional, const EstimateWithCI& e, double horizon,
                   std::uint64_t seed) {
  return Json{{"functional", functional}, {"point", num(e.point)}, {"std_error", num(e.std_error)},
              {"n", e.n},                 {"horizon", horizon},     {"seed", seed}};
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace stochtumor
