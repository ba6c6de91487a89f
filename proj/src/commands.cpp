#include "stochtumor/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "stochtumor/analytic.hpp"
#include "stochtumor/format.hpp"
#include "stochtumor/io.hpp"
#include "stochtumor/montecarlo.hpp"
#include "stochtumor/stats.hpp"

namespace stochtumor {

namespace fs = std::filesystem;

namespace {

class OutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

fs::path prepare_dir(const RunConfig& cfg) {
  const fs::path dir(cfg.outputs);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw OutputError("cannot create output directory " + dir.string() + ": " + ec.message());
  }
  return dir;
}

// Writes via a string buffer so a failed write leaves no partial file.
void write_file(const fs::path& file, const std::string& content, std::ostream& log) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw OutputError("cannot write " + file.string());
  out << content;
  out.close();
  if (!out) throw OutputError("write failed for " + file.string());
  log << "wrote " << file.string() << '\n';
}

std::string path_csv(const PathRecord& rec) {
  std::ostringstream s;
  write_path_csv(s, rec);
  return s.str();
}

PathRecord run_path(const RunConfig& cfg, std::size_t index) {
  return simulate_coupled(cfg.params, cfg.initial, cfg.ensemble.policy, cfg.ensemble.horizon,
                          path_seed(cfg.ensemble, index), cfg.aux, cfg.t0_for_z,
                          cfg.ensemble.record_stride);
}

// Least-squares slope of ln y over recorded points with t >= burn_in,
// stopping at the underflow floor.
std::optional<double> log_y_slope(const PathRecord& rec, double burn_in) {
  double n = 0.0, st = 0.0, sv = 0.0, stt = 0.0, stv = 0.0;
  for (std::size_t i = 0; i < rec.times.size(); ++i) {
    const double t = rec.times[i];
    if (t < burn_in) continue;
    const double y = rec.states[i].y;
    if (y <= kUnderflowFloor) break;
    const double u = t - burn_in;
    const double v = std::log(y);
    n += 1.0;
    st += u;
    sv += v;
    stt += u * u;
    stv += u * v;
  }
  const double den = n * stt - st * st;
  if (n < 2.0 || !(den > 0.0)) return std::nullopt;
  return (n * stv - st * sv) / den;
}

Json echo(const RunConfig& cfg) { return serialize(cfg); }

}  // namespace

std::string to_string(Figure f) {
  switch (f) {
    case Figure::kPaths:
      return "paths";
    case Figure::kPhase:
      return "phase";
    case Figure::kDensity:
      return "density";
    case Figure::kJointDensity:
      break;
  }
  return "joint-density";
}

Figure parse_figure(const std::string& name) {
  for (Figure f : {Figure::kPaths, Figure::kPhase, Figure::kDensity, Figure::kJointDensity}) {
    if (to_string(f) == name) return f;
  }
  throw ConfigError("which", "unknown figure \"" + name + "\"");
}

void cmd_simulate(const RunConfig& cfg, std::ostream& log) {
  const PathRecord rec = run_path(cfg, 0);
  const fs::path dir = prepare_dir(cfg);

  double x_min = rec.states[0].x, x_max = x_min, y_min = rec.states[0].y, y_max = y_min;
  for (const State& s : rec.states) {
    x_min = std::min(x_min, s.x);
    x_max = std::max(x_max, s.x);
    y_min = std::min(y_min, s.y);
    y_max = std::max(y_max, s.y);
  }
  const std::optional<double> slope = log_y_slope(rec, cfg.ensemble.burn_in);
  Json summary = {
      {"config", echo(cfg)},
      {"seed", path_seed(cfg.ensemble, 0)},
      {"regime", to_string(regime_classify(cfg.params).regime)},
      {"final", {{"t", rec.times.back()}, {"x", rec.states.back().x}, {"y", rec.states.back().y}}},
      {"min", {{"x", x_min}, {"y", y_min}}},
      {"max", {{"x", x_max}, {"y", y_max}}},
      {"events", to_json(rec.events)},
      {"log_y_slope_after_burn_in", slope ? Json(*slope) : Json(nullptr)},
      {"burn_in", cfg.ensemble.burn_in},
      {"recorded_points", rec.times.size()}};
  write_file(dir / "path.csv", path_csv(rec), log);
  write_file(dir / "summary.json", dump(summary), log);
}

void cmd_classify(const RunConfig& cfg, std::ostream& log) {
  Json j = to_json(regime_classify(cfg.params));
  j["params"] = to_json(cfg.params);
  if (cfg.dimensional) j["dimensional"] = to_json(*cfg.dimensional);
  const std::string text = dump(j);
  const fs::path dir = prepare_dir(cfg);
  write_file(dir / "classify.json", text, log);
  log << text;
}

bool cmd_verify(const RunConfig& cfg, Suite suite, std::ostream& log) {
  VerifyOptions opt;
  opt.master_seed = cfg.ensemble.master_seed;
  const SuiteResult r = run_suite(suite, cfg.params, cfg.initial, opt);
  Json j = to_json(r);
  j["params"] = to_json(cfg.params);
  j["initial"] = {{"x", cfg.initial.x}, {"y", cfg.initial.y}};
  j["master_seed"] = cfg.ensemble.master_seed;
  const fs::path dir = prepare_dir(cfg);
  write_file(dir / ("verify_" + to_string(suite) + ".json"), dump(j), log);
  for (const auto& a : r.assertions) {
    log << (a.passed ? "PASS " : "FAIL ") << a.name << ": measured " << std::setprecision(6)
        << a.measured << ' ' << a.relation << ' ' << a.bound;
    if (a.slack != 0.0) log << (a.relation == "<=" ? " + " : " - ") << a.slack;
    log << '\n';
  }
  return r.passed();
}

void cmd_figures(const RunConfig& cfg, Figure which, std::ostream& log) {
  const std::size_t n = cfg.ensemble.n_paths;
  switch (which) {
    case Figure::kPaths: {
      std::vector<std::string> csv(n);
      for (std::size_t i = 0; i < n; ++i) csv[i] = path_csv(run_path(cfg, i));
      RunConfig quiet = cfg;
      quiet.params.sigma1 = 0.0;
      quiet.params.sigma2 = 0.0;
      const std::string det = path_csv(run_path(quiet, 0));
      const fs::path dir = prepare_dir(cfg);
      for (std::size_t i = 0; i < n; ++i) {
        std::ostringstream name;
        name << "path_" << std::setw(4) << std::setfill('0') << i << ".csv";
        write_file(dir / name.str(), csv[i], log);
      }
      write_file(dir / "path_deterministic.csv", det, log);
      return;
    }
    case Figure::kPhase: {
      std::ostringstream s;
      s << "path,t,x,y\n";
      for (std::size_t i = 0; i < n; ++i) {
        const PathRecord rec = run_path(cfg, i);
        for (std::size_t k = 0; k < rec.times.size(); ++k) {
          s << i << ',' << format_double(rec.times[k]) << ',' << format_double(rec.states[k].x)
            << ',' << format_double(rec.states[k].y) << '\n';
        }
      }
      write_file(prepare_dir(cfg) / "phase.csv", s.str(), log);
      return;
    }
    case Figure::kDensity: {
      if (n < 50) throw ConfigError("ensemble.n_paths", "density figure needs at least 50 paths");
      const auto obs = observe_ensemble(cfg.params, cfg.initial, cfg.ensemble, ObservationPlan{});
      std::vector<double> xs;
      xs.reserve(obs.size());
      for (const auto& o : obs) xs.push_back(o.final.state.x);
      const DensityCurve kde = empirical_density(Sample(xs, "x(T)"));
      std::ostringstream emp;
      write_density_csv(emp, kde);
      std::string analytic;
      const RegimeReport rep = regime_classify(cfg.params);
      if (rep.regime == Regime::kExtinction && rep.boundary_z_law) {
        std::ostringstream a;
        write_density_csv(a, law_density(*rep.boundary_z_law, kde.grid));
        analytic = a.str();
      }
      const fs::path dir = prepare_dir(cfg);
      write_file(dir / "density_empirical.csv", emp.str(), log);
      if (!analytic.empty()) write_file(dir / "density_analytic.csv", analytic, log);
      return;
    }
    case Figure::kJointDensity: {
      const auto obs = observe_ensemble(cfg.params, cfg.initial, cfg.ensemble, ObservationPlan{});
      std::vector<double> xs, ys;
      for (const auto& o : obs) {
        xs.push_back(o.final.state.x);
        ys.push_back(o.final.state.y);
      }
      std::ostringstream s;
      write_histogram_csv(s, histogram2d(xs, ys, 40, 40));
      write_file(prepare_dir(cfg) / "joint_density.csv", s.str(), log);
      return;
    }
  }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Stochastic tumor-immune model: simulation, regime analysis, verification"};
  app.require_subcommand(1);

  std::string config_path, preset, out_dir, suite_name, which_name;
  std::uint64_t seed = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON run configuration");
    sub->add_option("--preset", preset, "example-5.1 or example-5.2");
    sub->add_option("--seed", seed, "master seed");
    sub->add_option("--out", out_dir, "output directory");
  };
  CLI::App* simulate = app.add_subcommand("simulate", "one path: path.csv + summary.json");
  CLI::App* classify = app.add_subcommand("classify", "regime report");
  CLI::App* verify = app.add_subcommand("verify", "run a verification suite");
  CLI::App* figures = app.add_subcommand("figures", "plot-ready CSV bundles");
  for (CLI::App* sub : {simulate, classify, verify, figures}) add_common(sub);
  verify->add_option("--suite", suite_name, "moments|comparison|extinction|permanence|ks|order")
      ->required();
  figures->add_option("--which", which_name, "paths|phase|density|joint-density")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitPass : kExitConfigError;
  }

  try {
    Json j = Json::object();
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw ConfigError("--config", "cannot open " + config_path);
      try {
        j = Json::parse(in);
      } catch (const Json::parse_error& e) {
        throw ConfigError("--config", std::string("invalid JSON: ") + e.what());
      }
    }
    if (!preset.empty()) j["preset"] = preset;
    if (!j.contains("preset") && !j.contains("params") && !j.contains("dimensional")) {
      // verify --suite order needs no model parameters of its own
      if (verify->parsed() && suite_name == "order") {
        j["preset"] = "example-5.1";
      } else {
        throw ConfigError("", "give --preset or --config");
      }
    }
    RunConfig cfg = parse_config(j);
    if (app.get_subcommands().front()->count("--seed") > 0) cfg.ensemble.master_seed = seed;
    if (!out_dir.empty()) cfg.outputs = out_dir;

    if (simulate->parsed()) {
      cmd_simulate(cfg, out);
    } else if (classify->parsed()) {
      cmd_classify(cfg, out);
    } else if (verify->parsed()) {
      Suite suite;
      try {
        suite = parse_suite(suite_name);
      } catch (const std::invalid_argument& e) {
        throw ConfigError("--suite", e.what());
      }
      return cmd_verify(cfg, suite, out) ? kExitPass : kExitVerificationFailure;
    } else {
      cmd_figures(cfg, parse_figure(which_name), out);
    }
    return kExitPass;
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const PremiseError& e) {
    err << "premise error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const InsufficientSample& e) {
    err << "configuration error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const SimulationFailure& e) {
    err << "simulation failure at t = " << e.time() << ": " << e.what() << '\n';
    return kExitRuntimeFailure;
  } catch (const std::exception& e) {
    err << "runtime failure: " << e.what() << '\n';
    return kExitRuntimeFailure;
  }
}

}  // namespace stochtumor
