#include <algorithm>
#include <cmath>
#include <numeric>

#include "hbc/errors.hpp"
#include "hbc/models.hpp"
#include "hbc/rng.hpp"

namespace hbc {

void ForestConfig::validate() const {
  if (n_trees < 1) throw DomainError("forest: n_trees must be >= 1");
  if (max_depth < 1) throw DomainError("forest: max_depth must be >= 1");
  if (features_per_split < 0) throw DomainError("forest: features_per_split must be >= 0");
  if (min_samples_split < 2) throw DomainError("forest: min_samples_split must be >= 2");
}

int DecisionTree::predict(std::span<const double> x) const {
  int n = 0;
  while (nodes[n].feature >= 0) {
    const TreeNode& node = nodes[n];
    n = x[node.feature] <= node.threshold ? node.left : node.right;
  }
  return nodes[n].leaf_class;
}

int DecisionTree::depth() const {
  std::vector<int> d(nodes.size(), 0);
  int best = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {  // children always follow parents
    best = std::max(best, d[i]);
    if (nodes[i].feature >= 0) {
      d[nodes[i].left] = d[i] + 1;
      d[nodes[i].right] = d[i] + 1;
    }
  }
  return best;
}

namespace {

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double impurity = 0.0;
  std::size_t n_left = 0;
};

double gini_sum(const std::vector<double>& counts, double n) {
  // n * gini = n - sum c^2 / n; comparable across splits of the same node.
  if (n <= 0.0) return 0.0;
  double sq = 0.0;
  for (double c : counts) sq += c * c;
  return n - sq / n;
}

class TreeBuilder {
 public:
  TreeBuilder(const Matrix& X, const std::vector<int>& y, std::size_t n_classes, const ForestConfig& cfg,
              std::size_t mtry, Rng& rng)
      : X_(X), y_(y), k_(n_classes), cfg_(cfg), mtry_(mtry), rng_(rng) {}

  DecisionTree build(std::vector<std::size_t> rows) {
    tree_.nodes.clear();
    tree_.nodes.emplace_back();
    grow(0, rows, 0);
    return std::move(tree_);
  }

 private:
  int majority(const std::vector<std::size_t>& rows) const {
    std::vector<std::size_t> c(k_, 0);
    for (std::size_t r : rows) ++c[static_cast<std::size_t>(y_[r])];
    return static_cast<int>(std::max_element(c.begin(), c.end()) - c.begin());
  }

  bool pure(const std::vector<std::size_t>& rows) const {
    for (std::size_t r : rows)
      if (y_[r] != y_[rows[0]]) return false;
    return true;
  }

  // Best split on one feature; nullopt-like (feature -1) when constant.
  Split best_on(int f, std::vector<std::size_t>& rows) const {
    std::sort(rows.begin(), rows.end(), [&](std::size_t a, std::size_t b) {
      const double va = X_[a][f];
      const double vb = X_[b][f];
      return va < vb || (va == vb && a < b);
    });
    std::vector<double> left(k_, 0.0);
    std::vector<double> right(k_, 0.0);
    for (std::size_t r : rows) right[static_cast<std::size_t>(y_[r])] += 1.0;
    const double n = static_cast<double>(rows.size());
    Split best;
    for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
      const auto c = static_cast<std::size_t>(y_[rows[i]]);
      left[c] += 1.0;
      right[c] -= 1.0;
      const double a = X_[rows[i]][f];
      const double b = X_[rows[i + 1]][f];
      if (!(a < b)) continue;
      const double nl = static_cast<double>(i + 1);
      const double imp = gini_sum(left, nl) + gini_sum(right, n - nl);
      // Threshold at the lower value, not the midpoint: the split then
      // depends on value order alone, so any strictly increasing transform
      // of a feature sends every query row (seen or not) the same way.
      if (best.feature < 0 || imp < best.impurity) best = {f, a, imp, i + 1};
    }
    return best;
  }

  void grow(int node, std::vector<std::size_t>& rows, int depth) {
    tree_.nodes[node].leaf_class = majority(rows);
    if (depth >= cfg_.max_depth || rows.size() < static_cast<std::size_t>(cfg_.min_samples_split) || pure(rows))
      return;

    const std::size_t d = X_[rows[0]].size();
    std::vector<int> order(d);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng_);

    Split best;
    std::vector<std::size_t> scratch = rows;
    // Like common CART implementations, keep drawing features past mtry
    // only while no valid split has been found.
    for (std::size_t i = 0; i < d; ++i) {
      if (i >= mtry_ && best.feature >= 0) break;
      Split s = best_on(order[i], scratch);
      if (s.feature >= 0 && (best.feature < 0 || s.impurity < best.impurity)) best = s;
    }
    if (best.feature < 0) return;

    std::vector<std::size_t> lrows;
    std::vector<std::size_t> rrows;
    for (std::size_t r : rows) (X_[r][best.feature] <= best.threshold ? lrows : rrows).push_back(r);
    if (lrows.empty() || rrows.empty()) return;

    const int l = static_cast<int>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    const int r = static_cast<int>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    tree_.nodes[node].feature = best.feature;
    tree_.nodes[node].threshold = best.threshold;
    tree_.nodes[node].left = l;
    tree_.nodes[node].right = r;
    rows.clear();
    rows.shrink_to_fit();
    grow(l, lrows, depth + 1);
    grow(r, rrows, depth + 1);
  }

  const Matrix& X_;
  const std::vector<int>& y_;
  std::size_t k_;
  const ForestConfig& cfg_;
  std::size_t mtry_;
  Rng& rng_;
  DecisionTree tree_;
};

}  // namespace

TrainedModel train_random_forest(const Matrix& X, const std::vector<LabelId>& y, const ForestConfig& cfg,
                                 std::uint64_t manifest_hash) {
  cfg.validate();
  detail::check_matrix(X, y.size());
  TrainedModel m;
  m.kind = ModelKind::kRandomForest;
  m.classes = detail::class_list(y);
  m.n_features = X.empty() ? 0 : X[0].size();
  m.manifest_hash = manifest_hash;
  if (m.n_features == 0) throw TrainingError("forest: no features");
  const std::vector<int> enc = detail::encode(y, m.classes);

  std::size_t mtry = cfg.features_per_split > 0
                         ? static_cast<std::size_t>(cfg.features_per_split)
                         : static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(m.n_features))));
  mtry = std::clamp<std::size_t>(mtry, 1, m.n_features);

  RandomForest forest;
  const std::uint64_t base = substream_seed(cfg.seed, "bootstrap");
  const std::size_t n = X.size();
  for (int t = 0; t < cfg.n_trees; ++t) {
    Rng rng(splitmix64(base + static_cast<std::uint64_t>(t)));
    std::vector<std::size_t> rows(n);
    if (cfg.bootstrap) {
      std::uniform_int_distribution<std::size_t> pick(0, n - 1);
      for (auto& r : rows) r = pick(rng);
    } else {
      std::iota(rows.begin(), rows.end(), 0);
    }
    TreeBuilder builder(X, enc, m.classes.size(), cfg, mtry, rng);
    forest.trees.push_back(builder.build(std::move(rows)));
  }
  m.params = std::move(forest);
  return m;
}

}  // namespace hbc
