#include "hbc/balance.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "hbc/errors.hpp"
#include "hbc/rng.hpp"

namespace hbc {

void SmoteConfig::validate() const {
  if (k_neighbors < 1) throw DomainError("smote: k_neighbors must be >= 1");
}

namespace {

double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d += (a[i] - b[i]) * (a[i] - b[i]);
  return d;
}

}  // namespace

SmoteResult smote(const std::vector<std::vector<double>>& X, const std::vector<LabelId>& y,
                  const SmoteConfig& cfg) {
  cfg.validate();
  if (X.size() != y.size()) throw DomainError("smote: X and y differ in length");
  SmoteResult out;
  out.X = X;
  out.y = y;
  out.n_original = X.size();
  if (X.empty()) return out;

  std::map<LabelId, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < y.size(); ++i) members[y[i]].push_back(i);
  std::size_t majority = 0;
  for (const auto& [c, idx] : members) majority = std::max(majority, idx.size());

  Rng rng = make_rng(cfg.seed, "smote");
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  for (const auto& [c, idx] : members) {
    const std::size_t n_c = idx.size();
    if (n_c == majority) continue;
    const std::size_t need = majority - n_c;
    if (n_c == 1) {
      out.warnings.push_back("class " + std::to_string(c) +
                             " has a single sample; duplicated instead of interpolated");
      for (std::size_t j = 0; j < need; ++j) {
        out.X.push_back(X[idx[0]]);
        out.y.push_back(c);
        out.origins.push_back({idx[0], idx[0], 0.0});
      }
      continue;
    }
    const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(cfg.k_neighbors), n_c - 1);
    // k nearest same-class neighbours per member; ties by index.
    std::vector<std::vector<std::size_t>> nn(n_c);
    for (std::size_t i = 0; i < n_c; ++i) {
      std::vector<std::pair<double, std::size_t>> d;
      d.reserve(n_c - 1);
      for (std::size_t j = 0; j < n_c; ++j)
        if (j != i) d.emplace_back(sq_dist(X[idx[i]], X[idx[j]]), idx[j]);
      std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k), d.end());
      for (std::size_t m = 0; m < k; ++m) nn[i].push_back(d[m].second);
    }
    std::uniform_int_distribution<std::size_t> pick(0, k - 1);
    for (std::size_t j = 0; j < need; ++j) {
      const std::size_t base = j % n_c;
      const std::size_t a = idx[base];
      const std::size_t b = nn[base][pick(rng)];
      const double u = unit(rng);
      std::vector<double> row(X[a].size());
      for (std::size_t f = 0; f < row.size(); ++f) row[f] = X[a][f] + u * (X[b][f] - X[a][f]);
      out.X.push_back(std::move(row));
      out.y.push_back(c);
      out.origins.push_back({a, b, u});
    }
  }
  return out;
}

}  // namespace hbc
