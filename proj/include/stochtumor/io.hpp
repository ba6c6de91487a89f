// JSON views of the library's result types.

#ifndef STOCHTUMOR_IO_HPP_
#define STOCHTUMOR_IO_HPP_

#include <cstdint>
#include <string>

#include "json.hpp"
#include "stochtumor/analytic.hpp"
#include "stochtumor/lyapunov.hpp"
#include "stochtumor/model.hpp"
#include "stochtumor/montecarlo.hpp"
#include "stochtumor/stats.hpp"

namespace stochtumor {

using Json = nlohmann::ordered_json;

Json to_json(const ModelParams& p);
Json to_json(const DimensionalParams& dp);
Json to_json(const StationaryLaw& law);
Json to_json(const RegimeReport& r);
Json to_json(const KSResult& r);
Json to_json(const BoundConstants& bc);
Json to_json(const PathEvents& ev);

// {functional, point, std_error, n, horizon, seed}
Json estimate_json(const std::string& functional, const EstimateWithCI& e, double horizon,
                   std::uint64_t seed);

// Pretty-printed with a trailing newline. Doubles keep 17 significant digits.
std::string dump(const Json& j);

}  // namespace stochtumor

#endif  // STOCHTUMOR_IO_HPP_
