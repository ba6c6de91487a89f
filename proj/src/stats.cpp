#include "stochtumor/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "stochtumor/format.hpp"

namespace stochtumor {

Sample::Sample(std::vector<double> values, std::string origin)
    : values_(std::move(values)), origin_(std::move(origin)) {
  for (double v : values_) {
    if (!std::isfinite(v) || !(v > 0.0)) {
      throw std::invalid_argument("sample values must be finite and positive");
    }
  }
}

Sample Sample::reciprocal() const {
  std::vector<double> inv(values_.size());
  std::transform(values_.begin(), values_.end(), inv.begin(), [](double v) { return 1.0 / v; });
  return Sample(std::move(inv), origin_.empty() ? "1/v" : "1/(" + origin_ + ")");
}

EmpiricalCdf::EmpiricalCdf(const Sample& s) : EmpiricalCdf(s.values()) {}

EmpiricalCdf::EmpiricalCdf(std::vector<double> values) : sorted_(std::move(values)) {
  if (sorted_.empty()) throw InsufficientSample("ecdf needs at least one value");
  std::sort(sorted_.begin(), sorted_.end());
}

double EmpiricalCdf::operator()(double v) const {
  const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), v);
  return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

EmpiricalCdf ecdf(const Sample& s) { return EmpiricalCdf(s); }

double ks_statistic(const std::vector<double>& sorted,
                    const std::function<double(double)>& cdf) {
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    const double upper = static_cast<double>(i + 1) / n - f;
    const double lower = f - static_cast<double>(i) / n;
    d = std::max(d, std::max(upper, lower));
  }
  return d;
}

double ks_critical_constant(double level) {
  if (!(level > 0.0) || !(level < 1.0)) {
    throw std::invalid_argument("KS level must lie in (0, 1)");
  }
  return std::sqrt(-0.5 * std::log(0.5 * level));
}

KSResult ks_test(const Sample& s, const std::function<double(double)>& cdf, double level) {
  if (s.size() < 20) throw InsufficientSample("KS test needs at least 20 values");
  std::vector<double> sorted = s.values();
  std::sort(sorted.begin(), sorted.end());
  KSResult r;
  r.n = sorted.size();
  r.level = level;
  r.statistic = ks_statistic(sorted, cdf);
  r.critical_value = ks_critical_constant(level) / std::sqrt(static_cast<double>(r.n));
  r.reject = r.statistic > r.critical_value;
  return r;
}

KSResult ks_test(const Sample& s, const StationaryLaw& law, double level) {
  return ks_test(s, [&law](double v) { return law.cdf(v); }, level);
}

namespace {

double quantile_sorted(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

double silverman_bandwidth(const std::vector<double>& values) {
  if (values.size() < 2) throw InsufficientSample("bandwidth needs at least 2 values");
  const double n = static_cast<double>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  const double iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
  double spread = sd;
  if (iqr > 0.0) spread = std::min(sd, iqr / 1.34);
  if (!(spread > 0.0)) throw std::invalid_argument("degenerate sample: zero variance");
  return 0.9 * spread * std::pow(n, -0.2);
}

double DensityCurve::integral() const {
  double s = 0.0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    s += 0.5 * (density[i] + density[i - 1]) * (grid[i] - grid[i - 1]);
  }
  return s;
}

double DensityCurve::mode() const {
  const auto it = std::max_element(density.begin(), density.end());
  return grid[static_cast<std::size_t>(it - density.begin())];
}

DensityCurve empirical_density(const Sample& s, std::optional<double> bandwidth,
                               std::size_t grid_points) {
  if (s.size() < 50) throw InsufficientSample("density estimate needs at least 50 values");
  if (grid_points < 2) throw std::invalid_argument("density grid needs >= 2 points");
  const auto& v = s.values();
  const auto [lo_it, hi_it] = std::minmax_element(v.begin(), v.end());
  if (*lo_it == *hi_it) throw std::invalid_argument("degenerate sample: zero variance");
  const double h = bandwidth ? *bandwidth : silverman_bandwidth(v);
  if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("bandwidth must be > 0");

  DensityCurve c;
  c.bandwidth = h;
  const double lo = *lo_it - 4.0 * h;
  const double hi = *hi_it + 4.0 * h;
  c.grid.resize(grid_points);
  c.density.assign(grid_points, 0.0);
  const double step = (hi - lo) / static_cast<double>(grid_points - 1);
  const double norm = 1.0 / (static_cast<double>(v.size()) * h * std::sqrt(2.0 * std::numbers::pi));
  for (std::size_t g = 0; g < grid_points; ++g) {
    const double x = lo + step * static_cast<double>(g);
    c.grid[g] = x;
    double acc = 0.0;
    for (double vi : v) {
      const double u = (x - vi) / h;
      acc += std::exp(-0.5 * u * u);
    }
    c.density[g] = acc * norm;
  }
  return c;
}

DensityCurve law_density(const StationaryLaw& law, const std::vector<double>& grid) {
  DensityCurve c;
  c.grid = grid;
  c.density.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) c.density[i] = law.pdf(grid[i]);
  return c;
}

Histogram2D histogram2d(const std::vector<double>& xs, const std::vector<double>& ys,
                        std::size_t nx, std::size_t ny) {
  if (xs.size() != ys.size()) throw std::invalid_argument("histogram needs paired samples");
  if (xs.empty()) throw InsufficientSample("histogram needs at least one pair");
  if (nx == 0 || ny == 0) throw std::invalid_argument("histogram needs >= 1 bin per axis");

  auto edges = [](const std::vector<double>& v, std::size_t bins) {
    auto [lo_it, hi_it] = std::minmax_element(v.begin(), v.end());
    double lo = *lo_it;
    double hi = *hi_it;
    if (lo == hi) {
      const double pad = lo == 0.0 ? 0.5 : 0.5 * std::abs(lo) * 1e-6;
      lo -= pad;
      hi += pad;
    }
    std::vector<double> e(bins + 1);
    for (std::size_t i = 0; i <= bins; ++i) {
      e[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(bins);
    }
    e.back() = hi;
    return e;
  };

  Histogram2D h;
  h.x_edges = edges(xs, nx);
  h.y_edges = edges(ys, ny);
  h.density.assign(nx * ny, 0.0);
  h.count = xs.size();

  auto bin_of = [](const std::vector<double>& e, double v) {
    auto it = std::upper_bound(e.begin(), e.end(), v);
    std::size_t i = static_cast<std::size_t>(it - e.begin());
    i = i == 0 ? 0 : i - 1;
    return std::min(i, e.size() - 2);
  };
  for (std::size_t k = 0; k < xs.size(); ++k) {
    h.density[bin_of(h.x_edges, xs[k]) * ny + bin_of(h.y_edges, ys[k])] += 1.0;
  }
  const double n = static_cast<double>(xs.size());
  for (std::size_t i = 0; i < nx; ++i) {
    for (std::size_t j = 0; j < ny; ++j) {
      const double area =
          (h.x_edges[i + 1] - h.x_edges[i]) * (h.y_edges[j + 1] - h.y_edges[j]);
      h.density[i * ny + j] /= n * area;
    }
  }
  return h;
}

void write_density_csv(std::ostream& out, const DensityCurve& curve) {
  out << "grid,density\n";
  for (std::size_t i = 0; i < curve.grid.size(); ++i) {
    out << format_double(curve.grid[i]) << ',' << format_double(curve.density[i]) << '\n';
  }
}

void write_histogram_csv(std::ostream& out, const Histogram2D& h) {
  out << "x,y,density\n";
  for (std::size_t i = 0; i < h.nx(); ++i) {
    const double xc = 0.5 * (h.x_edges[i] + h.x_edges[i + 1]);
    for (std::size_t j = 0; j < h.ny(); ++j) {
      const double yc = 0.5 * (h.y_edges[j] + h.y_edges[j + 1]);
      out << format_double(xc) << ',' << format_double(yc) << ',' << format_double(h.at(i, j))
          << '\n';
    }
  }
}

}  // namespace stochtumor
