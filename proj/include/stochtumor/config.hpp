// Run configuration: one JSON document, optionally seeded from a preset.
//
//   {
//     "preset": "example-5.1" | "example-5.2",
//     "dimensional": {a, b, s, d, g, q, r1, r2, E0, T0},   // nondimensionalized
//     "noise": {sigma1, sigma2},                           // with "dimensional"
//     "params": {sigma, rho, eta, mu, delta, alpha, beta, sigma1, sigma2},
//     "initial": {x, y},
//     "policy": {scheme: "milstein" | "euler-maruyama", dt, eps_pos, max_halvings},
//     "ensemble": {n_paths, horizon, burn_in, master_seed, record_stride},
//     "aux": ["psi", "phi", "z"],
//     "t0_for_z": 0,
//     "outputs": "out"
//   }
//
// Precedence: preset, then dimensional + noise, then individual params keys.
// burn_in defaults to 20% of the horizon.

#ifndef STOCHTUMOR_CONFIG_HPP_
#define STOCHTUMOR_CONFIG_HPP_

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "stochtumor/integrators.hpp"
#include "stochtumor/io.hpp"
#include "stochtumor/model.hpp"
#include "stochtumor/montecarlo.hpp"

namespace stochtumor {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& key_path, const std::string& message)
      : std::runtime_error(key_path.empty() ? message : key_path + ": " + message),
        key_path_(key_path) {}
  const std::string& key_path() const { return key_path_; }

 private:
  std::string key_path_;
};

struct NoiseIntensities {
  double sigma1 = 0.0;
  double sigma2 = 0.0;
  friend bool operator==(const NoiseIntensities&, const NoiseIntensities&) = default;
};

struct RunConfig {
  std::optional<std::string> preset;
  std::optional<DimensionalParams> dimensional;
  std::optional<NoiseIntensities> noise;
  ModelParams params;
  State initial{5.0, 50.0};
  EnsembleSpec ensemble;  // carries the step policy
  AuxSet aux;
  double t0_for_z = 0.0;
  std::string outputs = "out";
};

bool operator==(const RunConfig& a, const RunConfig& b);

std::vector<std::string> preset_names();

// Expanded preset; throws ConfigError for an unknown name.
RunConfig preset_config(const std::string& name);

RunConfig parse_config(const Json& j);
RunConfig load_config(const std::string& path);
Json serialize(const RunConfig& cfg);

std::string to_string(Scheme s);
Scheme parse_scheme(const std::string& s);

}  // namespace stochtumor

#endif  // STOCHTUMOR_CONFIG_HPP_
