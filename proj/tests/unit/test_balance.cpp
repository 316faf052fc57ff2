#include <gtest/gtest.h>

#include <map>
#include <random>

#include "hbc/balance.hpp"
#include "hbc/errors.hpp"

using namespace hbc;

namespace {

std::map<LabelId, std::size_t> counts(const std::vector<LabelId>& y) {
  std::map<LabelId, std::size_t> c;
  for (auto l : y) ++c[l];
  return c;
}

// Brute force: does p lie on a segment between two same-class originals?
bool on_some_segment(const std::vector<double>& p, const std::vector<std::vector<double>>& X,
                     const std::vector<LabelId>& y, LabelId cls) {
  for (std::size_t a = 0; a < X.size(); ++a) {
    if (y[a] != cls) continue;
    for (std::size_t b = 0; b < X.size(); ++b) {
      if (y[b] != cls) continue;
      // u from the longest axis, then check every coordinate.
      std::size_t ax = 0;
      for (std::size_t d = 0; d < p.size(); ++d)
        if (std::abs(X[b][d] - X[a][d]) > std::abs(X[b][ax] - X[a][ax])) ax = d;
      const double span = X[b][ax] - X[a][ax];
      const double u = span == 0.0 ? 0.0 : (p[ax] - X[a][ax]) / span;
      if (u < -1e-9 || u > 1 + 1e-9) continue;
      bool ok = true;
      for (std::size_t d = 0; d < p.size() && ok; ++d)
        ok = std::abs(X[a][d] + u * (X[b][d] - X[a][d]) - p[d]) <= 1e-9;
      if (ok) return true;
    }
  }
  return false;
}

}  // namespace

TEST(Smote, EqualizesCounts) {
  std::vector<std::vector<double>> X;
  std::vector<LabelId> y;
  std::mt19937_64 rng(1);
  std::normal_distribution<double> nd;
  for (int i = 0; i < 10; ++i) X.push_back({nd(rng), nd(rng)}), y.push_back(0);
  for (int i = 0; i < 4; ++i) X.push_back({5 + nd(rng), nd(rng)}), y.push_back(1);
  auto r = smote(X, y, {5, 3});
  auto c = counts(r.y);
  EXPECT_EQ(c[0], 10u);
  EXPECT_EQ(c[1], 10u);
  EXPECT_EQ(r.origins.size(), 6u);
  EXPECT_EQ(r.n_original, 14u);
  for (std::size_t i = 0; i < X.size(); ++i) EXPECT_EQ(r.X[i], X[i]);
}

TEST(Smote, ColinearPairStaysOnSegment) {
  std::vector<std::vector<double>> X{{0, 0}, {1, 1}, {2, 2}, {3, 3}, {4, 0}, {10, 5}, {11, 7}};
  std::vector<LabelId> y{0, 0, 0, 0, 0, 1, 1};
  auto r = smote(X, y, {5, 9});
  ASSERT_EQ(r.X.size(), 10u);
  for (std::size_t j = r.n_original; j < r.X.size(); ++j) {
    const auto& p = r.X[j];
    // Line through (10,5) and (11,7): y = 5 + 2 (x - 10), x in [10, 11].
    EXPECT_NEAR(p[1], 5 + 2 * (p[0] - 10), 1e-9);
    EXPECT_GE(p[0], 10 - 1e-9);
    EXPECT_LE(p[0], 11 + 1e-9);
    EXPECT_EQ(r.y[j], 1);
  }
}

TEST(Smote, BalancedInputIsNoOp) {
  std::vector<std::vector<double>> X{{0}, {1}, {2}, {3}};
  std::vector<LabelId> y{0, 1, 0, 1};
  auto r = smote(X, y, {});
  EXPECT_EQ(r.X, X);
  EXPECT_EQ(r.y, y);
  EXPECT_TRUE(r.origins.empty());
}

TEST(Smote, ConvexCombinationPropertyRandom) {
  std::mt19937_64 rng(44);
  std::normal_distribution<double> nd(0.0, 3.0);
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<std::vector<double>> X;
    std::vector<LabelId> y;
    const int classes = 2 + trial % 3;
    for (int c = 0; c < classes; ++c) {
      const int n = 2 + static_cast<int>(rng() % 12);
      for (int i = 0; i < n; ++i) X.push_back({nd(rng) + 10 * c, nd(rng), nd(rng)}), y.push_back(c);
    }
    auto r = smote(X, y, {1 + trial % 6, static_cast<std::uint64_t>(trial)});
    auto c = counts(r.y);
    for (auto [l, n] : c) EXPECT_EQ(n, c.begin()->second);
    for (std::size_t j = r.n_original; j < r.X.size(); ++j) {
      const auto& o = r.origins[j - r.n_original];
      EXPECT_EQ(y[o.a], r.y[j]);
      EXPECT_EQ(y[o.b], r.y[j]);
      EXPECT_GE(o.u, 0.0);
      EXPECT_LE(o.u, 1.0);
      for (std::size_t d = 0; d < 3; ++d) EXPECT_NEAR(r.X[j][d], X[o.a][d] + o.u * (X[o.b][d] - X[o.a][d]), 1e-9);
      EXPECT_TRUE(on_some_segment(r.X[j], X, y, r.y[j]));
    }
  }
}

TEST(Smote, DeterministicUnderSeed) {
  std::vector<std::vector<double>> X{{0, 1}, {1, 0}, {2, 2}, {5, 5}, {6, 5}, {9, 9}, {9, 8}, {8, 8}};
  std::vector<LabelId> y{0, 0, 0, 0, 0, 1, 1, 1};
  auto a = smote(X, y, {5, 7});
  auto b = smote(X, y, {5, 7});
  EXPECT_EQ(a.X, b.X);
  auto c = smote(X, y, {5, 8});
  EXPECT_NE(a.X, c.X);
}

TEST(Smote, SingleSampleClassDuplicates) {
  std::vector<std::vector<double>> X{{0}, {1}, {2}, {7}};
  std::vector<LabelId> y{0, 0, 0, 1};
  auto r = smote(X, y, {});
  ASSERT_EQ(r.X.size(), 6u);
  EXPECT_EQ(r.X[4], X[3]);
  EXPECT_EQ(r.X[5], X[3]);
  EXPECT_FALSE(r.warnings.empty());
}

TEST(Smote, Validation) {
  SmoteConfig c;
  c.k_neighbors = 0;
  EXPECT_THROW(c.validate(), DomainError);
  std::vector<std::vector<double>> X{{0}};
  std::vector<LabelId> y{0, 1};
  EXPECT_THROW(smote(X, y, {}), DomainError);
}
