#include "stochtumor/config.hpp"

#include <fstream>
#include <functional>
#include <initializer_list>
#include <limits>
#include <set>

namespace stochtumor {

namespace {

std::string join(const std::string& base, const std::string& key) {
  return base.empty() ? key : base + "." + key;
}

void reject_unknown(const Json& obj, const std::string& path,
                    std::initializer_list<const char*> allowed) {
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : obj.items()) {
    if (!ok.count(key)) throw ConfigError(join(path, key), "unknown key");
  }
}

const Json& object_at(const Json& parent, const std::string& key, const std::string& path) {
  const Json& v = parent.at(key);
  if (!v.is_object()) throw ConfigError(path, "must be an object");
  return v;
}

void read_number(const Json& obj, const char* key, const std::string& base, double& out) {
  if (!obj.contains(key)) return;
  const Json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(join(base, key), "must be a number");
  out = v.get<double>();
  if (!std::isfinite(out)) throw ConfigError(join(base, key), "must be finite");
}

template <class Int>
void read_unsigned(const Json& obj, const char* key, const std::string& base, Int& out) {
  if (!obj.contains(key)) return;
  const Json& v = obj.at(key);
  if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
    throw ConfigError(join(base, key), "must be a non-negative integer");
  }
  const auto raw = v.get<std::uint64_t>();
  if (raw > static_cast<std::uint64_t>(std::numeric_limits<Int>::max())) {
    throw ConfigError(join(base, key), "out of range");
  }
  out = static_cast<Int>(raw);
}

// Rethrows library validation failures against the section that caused them.
void checked(const std::string& path, const std::function<void()>& fn) {
  try {
    fn();
  } catch (const DomainError& e) {
    throw ConfigError(path, e.what());
  }
}

}  // namespace

std::string to_string(Scheme s) {
  return s == Scheme::kMilstein ? "milstein" : "euler-maruyama";
}

Scheme parse_scheme(const std::string& s) {
  if (s == "milstein") return Scheme::kMilstein;
  if (s == "euler-maruyama" || s == "em") return Scheme::kEulerMaruyama;
  throw ConfigError("policy.scheme", "expected \"milstein\" or \"euler-maruyama\", got \"" + s + "\"");
}

bool operator==(const RunConfig& a, const RunConfig& b) {
  return a.preset == b.preset && a.dimensional == b.dimensional && a.noise == b.noise &&
         a.params == b.params && a.initial == b.initial && a.ensemble == b.ensemble &&
         a.aux == b.aux && a.t0_for_z == b.t0_for_z && a.outputs == b.outputs;
}

std::vector<std::string> preset_names() { return {"example-5.1", "example-5.2"}; }

RunConfig preset_config(const std::string& name) {
  RunConfig cfg;
  cfg.preset = name;
  ModelParams& p = cfg.params;
  p.sigma = 0.1181;
  p.rho = 1.131;
  p.eta = 20.19;
  p.mu = 0.00311;
  p.delta = 0.3743;
  p.alpha = 1.636;
  p.beta = 3.272e-3;
  p.sigma1 = 0.2;
  cfg.initial = {5.0, 50.0};
  if (name == "example-5.1") {
    p.sigma2 = 2.0;
    cfg.ensemble.horizon = 200.0;
  } else if (name == "example-5.2") {
    p.sigma2 = 0.25;
    p.rho = 0.613;
    cfg.ensemble.horizon = 500.0;
  } else {
    throw ConfigError("preset", "unknown preset \"" + name + "\"");
  }
  cfg.ensemble.burn_in = 0.2 * cfg.ensemble.horizon;
  return cfg;
}

RunConfig parse_config(const Json& j) {
  if (!j.is_object()) throw ConfigError("", "config must be a JSON object");
  reject_unknown(j, "", {"preset", "dimensional", "noise", "params", "initial", "policy",
                         "ensemble", "aux", "t0_for_z", "outputs"});

  RunConfig cfg;
  if (j.contains("preset")) {
    if (!j.at("preset").is_string()) throw ConfigError("preset", "must be a string");
    cfg = preset_config(j.at("preset").get<std::string>());
  }

  if (j.contains("dimensional")) {
    const Json& d = object_at(j, "dimensional", "dimensional");
    reject_unknown(d, "dimensional", {"a", "b", "s", "d", "g", "q", "r1", "r2", "E0", "T0"});
    DimensionalParams dp;
    for (const char* k : {"a", "b", "s", "d", "g", "q", "r1", "r2", "E0", "T0"}) {
      if (!d.contains(k)) throw ConfigError(join("dimensional", k), "missing");
    }
    read_number(d, "a", "dimensional", dp.a);
    read_number(d, "b", "dimensional", dp.b);
    read_number(d, "s", "dimensional", dp.s);
    read_number(d, "d", "dimensional", dp.d);
    read_number(d, "g", "dimensional", dp.g);
    read_number(d, "q", "dimensional", dp.q);
    read_number(d, "r1", "dimensional", dp.r1);
    read_number(d, "r2", "dimensional", dp.r2);
    read_number(d, "E0", "dimensional", dp.E0);
    read_number(d, "T0", "dimensional", dp.T0);
    NoiseIntensities noise;
    if (j.contains("noise")) {
      const Json& n = object_at(j, "noise", "noise");
      reject_unknown(n, "noise", {"sigma1", "sigma2"});
      read_number(n, "sigma1", "noise", noise.sigma1);
      read_number(n, "sigma2", "noise", noise.sigma2);
    }
    ModelParams p;
    checked("dimensional", [&] { p = nondimensionalize(dp); });
    p.sigma1 = noise.sigma1;
    p.sigma2 = noise.sigma2;
    cfg.params = p;
    cfg.dimensional = dp;
    cfg.noise = noise;
  } else if (j.contains("noise")) {
    throw ConfigError("noise", "only meaningful together with \"dimensional\"");
  }

  if (j.contains("params")) {
    const Json& pj = object_at(j, "params", "params");
    reject_unknown(pj, "params", {"sigma", "rho", "eta", "mu", "delta", "alpha", "beta",
                                  "sigma1", "sigma2"});
    ModelParams& p = cfg.params;
    read_number(pj, "sigma", "params", p.sigma);
    read_number(pj, "rho", "params", p.rho);
    read_number(pj, "eta", "params", p.eta);
    read_number(pj, "mu", "params", p.mu);
    read_number(pj, "delta", "params", p.delta);
    read_number(pj, "alpha", "params", p.alpha);
    read_number(pj, "beta", "params", p.beta);
    read_number(pj, "sigma1", "params", p.sigma1);
    read_number(pj, "sigma2", "params", p.sigma2);
  }
  if (!cfg.preset && !cfg.dimensional && !j.contains("params")) {
    throw ConfigError("params", "one of \"preset\", \"dimensional\" or \"params\" is required");
  }
  checked("params", [&] { validate(cfg.params); });

  if (j.contains("initial")) {
    const Json& ij = object_at(j, "initial", "initial");
    reject_unknown(ij, "initial", {"x", "y"});
    read_number(ij, "x", "initial", cfg.initial.x);
    read_number(ij, "y", "initial", cfg.initial.y);
  }
  if (!(cfg.initial.x > 0.0)) throw ConfigError("initial.x", "must be > 0");
  if (!(cfg.initial.y > 0.0)) throw ConfigError("initial.y", "must be > 0");

  StepPolicy& pol = cfg.ensemble.policy;
  if (j.contains("policy")) {
    const Json& pj = object_at(j, "policy", "policy");
    reject_unknown(pj, "policy", {"scheme", "dt", "eps_pos", "max_halvings"});
    if (pj.contains("scheme")) {
      if (!pj.at("scheme").is_string()) throw ConfigError("policy.scheme", "must be a string");
      pol.scheme = parse_scheme(pj.at("scheme").get<std::string>());
    }
    read_number(pj, "dt", "policy", pol.dt);
    read_number(pj, "eps_pos", "policy", pol.eps_pos);
    read_unsigned(pj, "max_halvings", "policy", pol.max_halvings);
  }
  checked("policy", [&] { validate(pol); });

  EnsembleSpec& ens = cfg.ensemble;
  if (j.contains("ensemble")) {
    const Json& ej = object_at(j, "ensemble", "ensemble");
    reject_unknown(ej, "ensemble", {"n_paths", "horizon", "burn_in", "master_seed", "record_stride"});
    read_unsigned(ej, "n_paths", "ensemble", ens.n_paths);
    const double old_horizon = ens.horizon;
    read_number(ej, "horizon", "ensemble", ens.horizon);
    if (ej.contains("burn_in")) {
      read_number(ej, "burn_in", "ensemble", ens.burn_in);
    } else if (ens.horizon != old_horizon || !cfg.preset) {
      ens.burn_in = 0.2 * ens.horizon;
    }
    read_unsigned(ej, "master_seed", "ensemble", ens.master_seed);
    read_unsigned(ej, "record_stride", "ensemble", ens.record_stride);
  } else if (!cfg.preset) {
    ens.burn_in = 0.2 * ens.horizon;
  }
  if (!(ens.horizon > 0.0)) throw ConfigError("ensemble.horizon", "must be > 0");
  checked("ensemble", [&] { validate(ens); });

  if (j.contains("aux")) {
    const Json& aj = j.at("aux");
    if (!aj.is_array()) throw ConfigError("aux", "must be an array of \"psi\", \"phi\", \"z\"");
    cfg.aux = {};
    for (std::size_t i = 0; i < aj.size(); ++i) {
      const std::string path = "aux[" + std::to_string(i) + "]";
      if (!aj[i].is_string()) throw ConfigError(path, "must be a string");
      const std::string name = aj[i].get<std::string>();
      if (name == "psi") {
        cfg.aux.psi = true;
      } else if (name == "phi") {
        cfg.aux.phi = true;
      } else if (name == "z") {
        cfg.aux.z = true;
      } else {
        throw ConfigError(path, "unknown auxiliary process \"" + name + "\"");
      }
    }
  }
  read_number(j, "t0_for_z", "", cfg.t0_for_z);
  if (!(cfg.t0_for_z >= 0.0)) throw ConfigError("t0_for_z", "must be >= 0");

  if (j.contains("outputs")) {
    if (!j.at("outputs").is_string()) throw ConfigError("outputs", "must be a string");
    cfg.outputs = j.at("outputs").get<std::string>();
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError("", std::string("invalid JSON: ") + e.what());
  }
  return parse_config(j);
}

Json serialize(const RunConfig& cfg) {
  Json j = Json::object();
  if (cfg.preset) j["preset"] = *cfg.preset;
  if (cfg.dimensional) {
    j["dimensional"] = to_json(*cfg.dimensional);
    const NoiseIntensities n = cfg.noise.value_or(NoiseIntensities{});
    j["noise"] = {{"sigma1", n.sigma1}, {"sigma2", n.sigma2}};
  }
  j["params"] = to_json(cfg.params);
  j["initial"] = {{"x", cfg.initial.x}, {"y", cfg.initial.y}};
  const StepPolicy& pol = cfg.ensemble.policy;
  j["policy"] = {{"scheme", to_string(pol.scheme)},
                 {"dt", pol.dt},
                 {"eps_pos", pol.eps_pos},
                 {"max_halvings", pol.max_halvings}};
  j["ensemble"] = {{"n_paths", cfg.ensemble.n_paths},
                   {"horizon", cfg.ensemble.horizon},
                   {"burn_in", cfg.ensemble.burn_in},
                   {"master_seed", cfg.ensemble.master_seed},
                   {"record_stride", cfg.ensemble.record_stride}};
  Json aux = Json::array();
  if (cfg.aux.psi) aux.push_back("psi");
  if (cfg.aux.phi) aux.push_back("phi");
  if (cfg.aux.z) aux.push_back("z");
  j["aux"] = aux;
  j["t0_for_z"] = cfg.t0_for_z;
  j["outputs"] = cfg.outputs;
  return j;
}

}  // namespace stochtumor
