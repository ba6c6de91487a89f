// Empirical distributions: ecdf, Kolmogorov-Smirnov against the analytic
// stationary laws, Gaussian KDE and 2-D histograms.

#ifndef STOCHTUMOR_STATS_HPP_
#define STOCHTUMOR_STATS_HPP_

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "stochtumor/analytic.hpp"

namespace stochtumor {

class InsufficientSample : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Finite, strictly positive values plus a free-form note on where they came
// from (coordinate, time, seed).
class Sample {
 public:
  Sample(std::vector<double> values, std::string origin = {});

  const std::vector<double>& values() const { return values_; }
  const std::string& origin() const { return origin_; }
  std::size_t size() const { return values_.size(); }

  // Same values mapped through v -> 1/v.
  Sample reciprocal() const;

 private:
  std::vector<double> values_;
  std::string origin_;
};

// Right-continuous F_n(v) = #{v_i <= v} / n.
class EmpiricalCdf {
 public:
  explicit EmpiricalCdf(const Sample& s);
  explicit EmpiricalCdf(std::vector<double> values);

  double operator()(double v) const;
  const std::vector<double>& sorted() const { return sorted_; }

 private:
  std::vector<double> sorted_;
};

EmpiricalCdf ecdf(const Sample& s);

// sup |F_n - F| from the sorted sample: max_i max(i/n - F(v_i), F(v_i) - (i-1)/n).
double ks_statistic(const std::vector<double>& sorted, const std::function<double(double)>& cdf);

// Asymptotic two-sided constant sqrt(-ln(level/2)/2); 1.358 at 0.05.
double ks_critical_constant(double level);

struct KSResult {
  double statistic = 0.0;
  std::size_t n = 0;
  double critical_value = 0.0;
  bool reject = false;
  double level = 0.0;
};

KSResult ks_test(const Sample& s, const StationaryLaw& law, double level = 0.05);
KSResult ks_test(const Sample& s, const std::function<double(double)>& cdf, double level = 0.05);

// 0.9 min(sd, IQR/1.34) n^{-1/5}.
double silverman_bandwidth(const std::vector<double>& values);

struct DensityCurve {
  std::vector<double> grid;
  std::vector<double> density;
  double bandwidth = 0.0;

  // Trapezoidal integral over the grid.
  double integral() const;
  // Grid point of largest density.
  double mode() const;
};

// Gaussian KDE on an even grid over [min - 4h, max + 4h]. Needs n >= 50 and a
// non-degenerate sample.
DensityCurve empirical_density(const Sample& s, std::optional<double> bandwidth = {},
                               std::size_t grid_points = 512);

// Analytic density of `law` evaluated on `grid`.
DensityCurve law_density(const StationaryLaw& law, const std::vector<double>& grid);

struct Histogram2D {
  std::vector<double> x_edges;
  std::vector<double> y_edges;
  std::vector<double> density;  // row-major, x index outer; integrates to 1
  std::size_t count = 0;

  std::size_t nx() const { return x_edges.size() - 1; }
  std::size_t ny() const { return y_edges.size() - 1; }
  double at(std::size_t i, std::size_t j) const { return density[i * ny() + j]; }
};

// Even bins over the sample's bounding box.
Histogram2D histogram2d(const std::vector<double>& xs, const std::vector<double>& ys,
                        std::size_t nx = 50, std::size_t ny = 50);

// grid,density
void write_density_csv(std::ostream& out, const DensityCurve& curve);
// x,y,density at bin centres
void write_histogram_csv(std::ostream& out, const Histogram2D& h);

}  // namespace stochtumor

#endif  // STOCHTUMOR_STATS_HPP_
