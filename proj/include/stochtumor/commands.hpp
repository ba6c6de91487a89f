// Command-line front end. Exit codes: 0 pass, 1 verification failure,
// 2 configuration error, 3 runtime or simulation failure.

#ifndef STOCHTUMOR_COMMANDS_HPP_
#define STOCHTUMOR_COMMANDS_HPP_

#include <iosfwd>
#include <string>
#include <vector>

#include "stochtumor/config.hpp"
#include "stochtumor/verify.hpp"

namespace stochtumor {

inline constexpr int kExitPass = 0;
inline constexpr int kExitVerificationFailure = 1;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitRuntimeFailure = 3;

enum class Figure { kPaths, kPhase, kDensity, kJointDensity };
std::string to_string(Figure f);
Figure parse_figure(const std::string& name);

// Each writes into cfg.outputs and reports what it wrote on `log`.
// path.csv + summary.json
void cmd_simulate(const RunConfig& cfg, std::ostream& log);
// classify.json; also printed to `log`
void cmd_classify(const RunConfig& cfg, std::ostream& log);
// verify_<suite>.json; returns true iff every assertion passed
bool cmd_verify(const RunConfig& cfg, Suite suite, std::ostream& log);
void cmd_figures(const RunConfig& cfg, Figure which, std::ostream& log);

// Full CLI: parses args, dispatches, maps failures to exit codes.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace stochtumor

#endif  // STOCHTUMOR_COMMANDS_HPP_
