#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "hbc/errors.hpp"
#include "hbc/models.hpp"

using namespace hbc;

namespace {

struct Data {
  Matrix X;
  std::vector<LabelId> y;
};

Data blobs(std::uint64_t seed, int n = 200, double sep = 10.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Data d;
  for (int i = 0; i < n; ++i) {
    const int c = i % 2;
    d.X.push_back({c * sep + nd(rng), c * sep + nd(rng)});
    d.y.push_back(c);
  }
  return d;
}

double train_accuracy(const TrainedModel& m, const Data& d) {
  int ok = 0;
  for (std::size_t i = 0; i < d.X.size(); ++i) ok += predict(m, d.X[i]) == d.y[i];
  return static_cast<double>(ok) / d.X.size();
}

Data xor_grid() {
  Data d;
  for (int qx : {-1, 1})
    for (int qy : {-1, 1})
      for (int a = 0; a < 5; ++a)
        for (int b = 0; b < 5; ++b) {
          d.X.push_back({qx * (1 + a * 0.2), qy * (1 + b * 0.2)});
          d.y.push_back((qx > 0) != (qy > 0));
        }
  return d;
}

TrainedModel leaf_forest(const std::vector<int>& leaf_classes) {
  TrainedModel m;
  m.kind = ModelKind::kRandomForest;
  m.classes = {0, 1};
  m.n_features = 1;
  RandomForest f;
  for (int c : leaf_classes) {
    DecisionTree t;
    TreeNode leaf;
    leaf.leaf_class = c;
    t.nodes.push_back(leaf);
    f.trees.push_back(t);
  }
  m.params = f;
  return m;
}

}  // namespace

TEST(Forest, SeparatedBlobs) {
  auto d = blobs(1);
  ForestConfig cfg;
  cfg.n_trees = 20;
  cfg.seed = 3;
  EXPECT_GE(train_accuracy(train_random_forest(d.X, d.y, cfg), d), 0.99);
}

TEST(Forest, StumpsCannotLearnXor) {
  // Best single stump on this grid is 0.5 (tests/oracles/derive.py); an
  // additive vote of stumps gets at most three quadrants right.
  auto d = xor_grid();
  ForestConfig cfg;
  cfg.n_trees = 25;
  cfg.max_depth = 1;
  cfg.seed = 1;
  EXPECT_LE(train_accuracy(train_random_forest(d.X, d.y, cfg), d), 0.8);
  cfg.max_depth = 4;
  EXPECT_GE(train_accuracy(train_random_forest(d.X, d.y, cfg), d), 0.99);
}

TEST(Forest, DepthBound) {
  auto d = blobs(2, 300, 1.0);
  ForestConfig cfg;
  cfg.n_trees = 5;
  cfg.max_depth = 3;
  auto m = train_random_forest(d.X, d.y, cfg);
  for (const auto& t : std::get<RandomForest>(m.params).trees) EXPECT_LE(t.depth(), 3);
}

TEST(Forest, SeedDeterminism) {
  auto d = blobs(4, 200, 1.5);
  ForestConfig cfg;
  cfg.n_trees = 15;
  cfg.seed = 99;
  auto a = train_random_forest(d.X, d.y, cfg);
  auto b = train_random_forest(d.X, d.y, cfg);
  EXPECT_EQ(a.to_json().dump(), b.to_json().dump());
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ud(-3, 5);
  for (int i = 0; i < 100; ++i) {
    std::vector<double> probe{ud(rng), ud(rng)};
    EXPECT_EQ(predict_proba_row(a, probe), predict_proba_row(b, probe));
  }
}

TEST(Forest, MonotoneTransformInvariance) {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 20; ++trial) {
    Data d;
    for (int i = 0; i < 60; ++i) {
      d.X.push_back({nd(rng), nd(rng), nd(rng)});
      d.y.push_back(static_cast<int>(rng() % 3));
    }
    ForestConfig cfg;
    cfg.n_trees = 10;
    cfg.seed = trial;
    auto base = train_random_forest(d.X, d.y, cfg);
    Data t = d;
    for (auto& r : t.X) r[1] = std::exp(2.0 * r[1]) + 3.0;
    auto moved = train_random_forest(t.X, t.y, cfg);
    for (std::size_t i = 0; i < d.X.size(); ++i) EXPECT_EQ(predict(base, d.X[i]), predict(moved, t.X[i]));
  }
}

TEST(Forest, SingleClassRejected) {
  Matrix X{{0}, {1}};
  std::vector<LabelId> y{2, 2};
  EXPECT_THROW(train_random_forest(X, y, {}), TrainingError);
  Matrix bad{{0}, {std::nan("")}};
  std::vector<LabelId> y2{0, 1};
  EXPECT_THROW(train_random_forest(bad, y2, {}), DomainError);
}

TEST(PredictProba, VoteFractions) {
  auto all_a = leaf_forest({0, 0, 0});
  std::vector<double> x{0.0};
  EXPECT_EQ(predict_proba_row(all_a, x), (std::vector<double>{1.0, 0.0}));
  auto split = leaf_forest({0, 1});
  EXPECT_EQ(predict_proba_row(split, x), (std::vector<double>{0.5, 0.5}));
  EXPECT_EQ(predict(split, x), 0);  // tie goes to the lower class
}

TEST(PredictProba, ZeroLogisticIsUniform) {
  TrainedModel m;
  m.kind = ModelKind::kLogisticOvR;
  m.classes = {0, 1, 2};
  m.n_features = 2;
  LogisticOvR p;
  p.coef.assign(3, std::vector<double>(3, 0.0));
  m.params = p;
  std::vector<double> x{4.0, -2.0};
  for (double v : predict_proba_row(m, x)) EXPECT_DOUBLE_EQ(v, 1.0 / 3.0);
}

TEST(PredictProba, SumsToOneAndRefusesForeignManifest) {
  auto d = blobs(8, 120, 1.0);
  ForestConfig cfg;
  cfg.n_trees = 7;
  auto m = train_random_forest(d.X, d.y, cfg, 0xabc);
  for (const auto& r : d.X) {
    auto p = predict_proba_row(m, r);
    double s = 0;
    for (double v : p) {
      EXPECT_GE(v, 0.0);
      s += v;
    }
    EXPECT_NEAR(s, 1.0, 1e-9);
  }
  FeatureVector fv;
  fv.manifest = leg_manifest();
  fv.values = {0.0, 0.0};
  EXPECT_THROW(predict_proba(m, fv), SchemaError);
  std::vector<double> wrong{1.0};
  EXPECT_THROW(predict_proba_row(m, wrong), SchemaError);
}

TEST(ModelJson, RoundTrip) {
  auto d = blobs(9, 80, 2.0);
  ForestConfig cfg;
  cfg.n_trees = 4;
  auto m = train_random_forest(d.X, d.y, cfg, 77);
  auto back = TrainedModel::from_json(nlohmann::json::parse(m.to_json().dump()));
  EXPECT_EQ(back.to_json().dump(), m.to_json().dump());
  std::vector<double> w(d.X.size(), 1.0);
  auto lr = train_weighted_ovr_logistic(d.X, d.y, w, {}, 77);
  auto lback = TrainedModel::from_json(lr.to_json());
  for (const auto& r : d.X) EXPECT_EQ(predict_proba_row(lr, r), predict_proba_row(lback, r));
}

TEST(Logistic, SeparableData) {
  auto d = blobs(10, 200, 6.0);
  std::vector<double> w(d.X.size(), 1.0);
  auto m = train_weighted_ovr_logistic(d.X, d.y, w, {});
  EXPECT_GE(train_accuracy(m, d), 0.99);
}

TEST(Logistic, DuplicateEqualsDoubleWeight) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> nd;
  Data d;
  for (int i = 0; i < 60; ++i) {
    const int c = i % 3;
    d.X.push_back({nd(rng) + c, nd(rng) - c});
    d.y.push_back(c);
  }
  std::vector<double> w(d.X.size(), 1.0);
  w[5] = 2.0;
  Data dup = d;
  dup.X.push_back(d.X[5]);
  dup.y.push_back(d.y[5]);
  std::vector<double> w1(dup.X.size(), 1.0);
  auto a = std::get<LogisticOvR>(train_weighted_ovr_logistic(d.X, d.y, w, {}).params);
  auto b = std::get<LogisticOvR>(train_weighted_ovr_logistic(dup.X, dup.y, w1, {}).params);
  for (std::size_t c = 0; c < a.coef.size(); ++c)
    for (std::size_t j = 0; j < a.coef[c].size(); ++j) EXPECT_NEAR(a.coef[c][j], b.coef[c][j], 1e-6);
}

TEST(Logistic, DegenerateClassFallsBackToPrior) {
  Matrix X{{0}, {1}, {2}, {3}, {4}, {5}};
  std::vector<LabelId> y{0, 0, 1, 1, 2, 2};
  std::vector<double> w{1, 1, 0, 0, 0, 0};  // all weight on class 0
  auto m = train_weighted_ovr_logistic(X, y, w, {});
  const auto& p = std::get<LogisticOvR>(m.params);
  for (int c = 0; c < 3; ++c) {
    EXPECT_TRUE(p.degenerate[c]);
    EXPECT_EQ(p.coef[c][1], 0.0);
  }
  EXPECT_GT(p.coef[0][0], 10.0);
  EXPECT_LT(p.coef[1][0], -10.0);
  std::vector<double> probe{4.0};
  EXPECT_EQ(predict(m, probe), 0);
}

TEST(Logistic, BadWeights) {
  Matrix X{{0}, {1}};
  std::vector<LabelId> y{0, 1};
  EXPECT_THROW(train_weighted_ovr_logistic(X, y, {0.0, 0.0}, {}), DomainError);
  EXPECT_THROW(train_weighted_ovr_logistic(X, y, {-1.0, 1.0}, {}), DomainError);
  LogRegConfig c;
  c.learning_rate = 0.0;
  EXPECT_THROW(c.validate(), DomainError);
}

TEST(WindowWeight, Examples) {
  ClassCounts half{{{0, 500.0}, {1, 250.0}, {2, 250.0}}, 1000.0};
  std::vector<LabelId> all_a(80, 0);
  EXPECT_DOUBLE_EQ(window_weight(all_a, half), 160.0);
  std::vector<LabelId> mixed(40, 0);
  mixed.insert(mixed.end(), 40, 1);
  EXPECT_DOUBLE_EQ(window_weight(mixed, half), 240.0);
  std::vector<LabelId> unknown{3};
  EXPECT_THROW(window_weight(unknown, half), DomainError);
}

TEST(WindowWeight, MatchesBruteForceAndIsAdditive) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::vector<LabelId>> windows(5);
    for (auto& w : windows)
      for (int i = 0; i < 20; ++i) w.push_back(static_cast<LabelId>(rng() % 4));
    auto cc = count_frames(windows);
    EXPECT_EQ(cc.total, 100.0);
    double concat = 0.0;
    std::vector<LabelId> joined;
    for (const auto& w : windows) {
      double brute = 0.0;
      for (auto l : w) {
        double n = 0;
        for (const auto& v : windows)
          for (auto m : v) n += m == l;
        brute += 100.0 / n;
      }
      EXPECT_NEAR(window_weight(w, cc), brute, 1e-9);
      concat += window_weight(w, cc);
      joined.insert(joined.end(), w.begin(), w.end());
    }
    EXPECT_NEAR(window_weight(joined, cc), concat, 1e-9);
  }
}

TEST(SoftVote, RadiusZeroIsArgmax) {
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> ud;
  std::vector<std::vector<double>> probs(50, std::vector<double>(4));
  for (auto& p : probs)
    for (double& v : p) v = ud(rng);
  probs[3] = {0.4, 0.4, 0.1, 0.1};
  auto out = soft_vote_smooth(probs, 0);
  for (std::size_t i = 0; i < probs.size(); ++i) EXPECT_EQ(out[i], argmax_lower(probs[i]));
  EXPECT_EQ(out[3], 0u);
}

TEST(SoftVote, OutlierOverruled) {
  std::vector<std::vector<double>> probs(7, {0.8, 0.2});
  probs[3] = {0.1, 0.9};
  // Mean at index 3: (6 * 0.8 + 0.1) / 7 = 0.7 for class 0.
  auto out = soft_vote_smooth(probs, 3);
  for (auto l : out) EXPECT_EQ(l, 0u);
  EXPECT_EQ(soft_vote_smooth(probs, 0)[3], 1u);
}

TEST(SoftVote, EdgeCases) {
  std::vector<std::vector<double>> none;
  EXPECT_TRUE(soft_vote_smooth(none, 3).empty());
  std::vector<std::vector<double>> constant(9, {0.1, 0.6, 0.3});
  for (auto l : soft_vote_smooth(constant, 3)) EXPECT_EQ(l, 1u);
  EXPECT_THROW(soft_vote_smooth(constant, -1), DomainError);
}
