#include "hbc/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hbc/errors.hpp"

namespace hbc::stats {
namespace {

void require_nonempty(std::span<const double> x) {
  if (x.empty()) throw DomainError("statistic of an empty series");
}

std::vector<double> sorted(std::span<const double> x) {
  std::vector<double> v(x.begin(), x.end());
  std::sort(v.begin(), v.end());
  return v;
}

double quantile_sorted(const std::vector<double>& v, double q) {
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return v[lo] + frac * (v[hi] - v[lo]);
}

double central_moment(std::span<const double> x, double m, int power) {
  double acc = 0.0;
  for (double v : x) acc += std::pow(v - m, power);
  return acc / static_cast<double>(x.size());
}

}  // namespace

double mean(std::span<const double> x) {
  require_nonempty(x);
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double stddev(std::span<const double> x) {
  const double m = mean(x);
  return std::sqrt(central_moment(x, m, 2));
}

double min(std::span<const double> x) {
  require_nonempty(x);
  return *std::min_element(x.begin(), x.end());
}

double max(std::span<const double> x) {
  require_nonempty(x);
  return *std::max_element(x.begin(), x.end());
}

double median(std::span<const double> x) { return quantile(x, 0.5); }

double mad(std::span<const double> x) {
  const double med = median(x);
  std::vector<double> dev(x.size());
  std::transform(x.begin(), x.end(), dev.begin(), [med](double v) { return std::abs(v - med); });
  return median(dev);
}

double quantile(std::span<const double> x, double q) {
  require_nonempty(x);
  if (!(q >= 0.0 && q <= 1.0)) throw DomainError("quantile outside [0, 1]");
  return quantile_sorted(sorted(x), q);
}

double iqr(std::span<const double> x) {
  require_nonempty(x);
  const auto v = sorted(x);
  return quantile_sorted(v, 0.75) - quantile_sorted(v, 0.25);
}

double energy(std::span<const double> x) {
  require_nonempty(x);
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return acc / static_cast<double>(x.size());
}

double sma(std::span<const double> x) {
  require_nonempty(x);
  double acc = 0.0;
  for (double v : x) acc += std::abs(v);
  return acc / static_cast<double>(x.size());
}

double skewness(std::span<const double> x) {
  const double m = mean(x);
  const double m2 = central_moment(x, m, 2);
  if (m2 <= 1e-300) return 0.0;
  return central_moment(x, m, 3) / std::pow(m2, 1.5);
}

double kurtosis(std::span<const double> x) {
  const double m = mean(x);
  const double m2 = central_moment(x, m, 2);
  if (m2 <= 1e-300) return 0.0;
  return central_moment(x, m, 4) / (m2 * m2) - 3.0;
}

double correlation(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DomainError("correlation of series with different lengths");
  const double mx = mean(x);
  const double my = mean(y);
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) return 0.0;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double shannon_entropy(std::span<const double> x) {
  const double total = std::accumulate(x.begin(), x.end(), 0.0);
  if (!(total > 0.0)) return 0.0;
  double h = 0.0;
  for (double v : x) {
    if (v <= 0.0) continue;
    const double p = v / total;
    h -= p * std::log(p);
  }
  return h;
}

std::size_t argmax(std::span<const double> x) {
  require_nonempty(x);
  return static_cast<std::size_t>(std::max_element(x.begin(), x.end()) - x.begin());
}

std::vector<double> burg_ar(std::span<const double> x, std::size_t order) {
  std::vector<double> coeffs(order, 0.0);
  if (x.size() <= order || order == 0) return coeffs;
  const double m = mean(x);
  std::vector<double> f(x.size());
  std::transform(x.begin(), x.end(), f.begin(), [m](double v) { return v - m; });
  std::vector<double> b = f;

  // a holds the error-filter polynomial 1 + a_1 z^-1 + ... (a[0] = 1).
  std::vector<double> a(order + 1, 0.0);
  a[0] = 1.0;
  const std::size_t n = x.size();
  for (std::size_t k = 1; k <= order; ++k) {
    double num = 0.0;
    double den = 0.0;
    for (std::size_t t = k; t < n; ++t) {
      num += f[t] * b[t - 1];
      den += f[t] * f[t] + b[t - 1] * b[t - 1];
    }
    if (!(den > 1e-300)) break;
    const double reflection = -2.0 * num / den;

    std::vector<double> prev = a;
    for (std::size_t i = 1; i <= k; ++i) a[i] = prev[i] + reflection * prev[k - i];

    for (std::size_t t = n - 1; t >= k; --t) {
      const double ft = f[t];
      f[t] = ft + reflection * b[t - 1];
      b[t] = b[t - 1] + reflection * ft;
      if (t == k) break;
    }
  }
  for (std::size_t i = 0; i < order; ++i) coeffs[i] = -a[i + 1];
  return coeffs;
}

}  // namespace hbc::stats
