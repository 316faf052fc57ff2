#include <gtest/gtest.h>

#include <random>

#include "helpers.hpp"
#include "hbc/errors.hpp"
#include "hbc/features.hpp"

using namespace hbc;

namespace {
double feature(const FeatureVector& fv, const std::string& name) {
  for (std::size_t i = 0; i < fv.manifest->size(); ++i)
    if (fv.manifest->name(i) == name) return fv.values[i];
  ADD_FAILURE() << "no feature " << name;
  return 0.0;
}
}  // namespace

TEST(Windows, CountExamples) {
  EXPECT_EQ(window_count(2000, 80, 40), 49u);
  EXPECT_EQ(window_count(80, 80, 40), 1u);
  EXPECT_EQ(window_count(79, 80, 40), 0u);
}

TEST(Windows, CountFormulaProperty) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 2000; ++i) {
    std::size_t w = 1 + rng() % 100, s = 1 + rng() % w, len = w + rng() % 1000;
    EXPECT_EQ(window_count(len, w, s), (len - w) / s + 1);
  }
}

TEST(Windows, SlideSessionOf2000Frames) {
  auto s = test::flat_session(2000);
  auto ws = slide_windows(s, {});
  ASSERT_EQ(ws.size(), 49u);
  EXPECT_EQ(ws[1].start_index, 40u);
  for (const auto& w : ws) {
    EXPECT_EQ(w.length_samples, 80u);
    for (const auto& [name, series] : w.channels) EXPECT_EQ(series.size(), 80u) << name;
  }
  EXPECT_TRUE(slide_windows(test::flat_session(60), {}).empty());
}

TEST(Windows, MajorityLabel) {
  auto s = test::flat_session(80);
  for (std::size_t i = 41; i < 80; ++i) s.labels[i] = 2;
  auto ws = slide_windows(s, {});
  ASSERT_EQ(ws.size(), 1u);
  EXPECT_EQ(ws[0].label, 0);
  std::vector<LabelId> tie{3, 3, 1, 1};
  EXPECT_EQ(majority_label(tie), 1);
}

TEST(Windows, DiscardFramesDropWindows) {
  auto s = test::flat_session(200);
  s.labels[50] = kDiscard;
  auto ws = slide_windows(s, {});
  // Windows start at 0, 40, 80, 120; the first two cover frame 50.
  ASSERT_EQ(ws.size(), 2u);
  EXPECT_EQ(ws[0].start_index, 80u);
}

TEST(Windows, ConfigValidation) {
  WindowingConfig c;
  c.step_seconds = 5.0;
  EXPECT_THROW(c.validate(), DomainError);
  c.step_seconds = 0.0;
  EXPECT_THROW(c.validate(), DomainError);
}

TEST(Jerk, Examples) {
  std::vector<double> a{1, 3, 6};
  EXPECT_EQ(jerk(a, 20.0), (std::vector<double>{40, 60}));
  std::vector<double> c(10, 4.2);
  for (double v : jerk(c, 20.0)) EXPECT_EQ(v, 0.0);
  std::vector<double> ramp;
  for (int i = 0; i < 10; ++i) ramp.push_back(0.25 * i);
  for (double v : jerk(ramp, 20.0)) EXPECT_DOUBLE_EQ(v, 5.0);
  std::vector<double> one{1};
  EXPECT_THROW(jerk(one, 20.0), DomainError);
}

TEST(Magnitude, Examples) {
  std::vector<double> x{3, 0, -7}, y{4, 0, 0}, z{12, 0, 0};
  EXPECT_EQ(magnitude(x, y, z), (std::vector<double>{13, 0, 7}));
  std::vector<double> short_z{1};
  EXPECT_THROW(magnitude(x, y, short_z), DomainError);
}

TEST(LegFeatures, ManifestShape) {
  auto m = leg_manifest();
  EXPECT_EQ(m->size(), 126u);
  EXPECT_EQ(m->columns_for(Modality::kHbc).size(), 18u);
  EXPECT_EQ(m->columns_for(Modality::kImu).size(), 108u);
  EXPECT_EQ(m->columns_for(Modality::kBoth).size(), 126u);
}

TEST(LegFeatures, ConstantChannel) {
  auto w = test::oracle_window();
  w.channels["cap"].assign(80, 7.0);
  auto fv = extract_features_leg(w, 20.0);
  EXPECT_EQ(feature(fv, "Cap_std"), 0.0);
  EXPECT_EQ(feature(fv, "Cap_range"), 0.0);
  EXPECT_EQ(feature(fv, "Cap_mad"), 0.0);
  EXPECT_EQ(feature(fv, "Cap_mean"), 7.0);
  EXPECT_EQ(feature(fv, "Cap_minPeakDistance"), 4.0);
}

TEST(LegFeatures, TwoPeaksTenSamplesApart) {
  std::vector<double> x(80, 0.0);
  x[20] = 1.0;
  x[30] = 1.0;
  EXPECT_DOUBLE_EQ(min_neighbor_peak_distance(x, 20.0, 4.0), 0.5);
  std::vector<double> one(80, 0.0);
  one[40] = 1.0;
  EXPECT_DOUBLE_EQ(min_neighbor_peak_distance(one, 20.0, 4.0), 4.0);
}

TEST(LegFeatures, EnergyExample) {
  auto w = test::oracle_window();
  for (std::size_t i = 0; i < 80; ++i) w.channels["cap"][i] = i % 2 ? -1.0 : 1.0;
  EXPECT_DOUBLE_EQ(feature(extract_features_leg(w, 20.0), "Cap_energy"), 1.0);
}

// Reference values from tests/oracles/derive.py (numpy + scipy.signal.find_peaks).
TEST(LegFeatures, MatchesOracleWindow) {
  auto fv = extract_features_leg(test::oracle_window(), 20.0);
  const std::pair<const char*, double> expected[] = {
      {"Cap_mean", 159.1048317544543},      {"Cap_std", 159.69885920012746},
      {"Cap_range", 749.4119283000275},     {"Cap_mad", 120.64586573944081},
      {"Cap_energy", 50818.07311743534},    {"Cap_iqr", 242.23888390423986},
      {"Cap_minPeakDistance", 0.35},        {"Gyro_X_minPeakDistance", 0.8},
      {"Acc_Jerk_Y_std", 6.078971634783443},
  };
  for (auto [name, v] : expected) EXPECT_LT(test::rel_err(feature(fv, name), v), 1e-9) << name;
}

TEST(LegFeatures, MissingChannel) {
  auto w = test::oracle_window();
  w.channels.erase("gyro_y");
  EXPECT_THROW(extract_features_leg(w, 20.0), SchemaError);
}

TEST(LegFeatures, TranslationConsistency) {
  auto w = test::oracle_window();
  auto base = extract_features_leg(w, 20.0);
  for (double& v : w.channels["acc_y"]) v += 3.5;
  auto moved = extract_features_leg(w, 20.0);
  EXPECT_NEAR(feature(moved, "Acc_Y_mean"), feature(base, "Acc_Y_mean") + 3.5, 1e-9);
  EXPECT_NEAR(feature(moved, "Acc_Y_max"), feature(base, "Acc_Y_max") + 3.5, 1e-9);
  EXPECT_NEAR(feature(moved, "Acc_Y_min"), feature(base, "Acc_Y_min") + 3.5, 1e-9);
  for (auto n : {"Acc_Y_std", "Acc_Y_mad", "Acc_Y_iqr", "Acc_Y_range", "Acc_Jerk_Y_energy", "Acc_Jerk_Y_std"})
    EXPECT_NEAR(feature(moved, n), feature(base, n), 1e-9) << n;
}

TEST(LegFeatures, FiniteOnRandomWindows) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> nd(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    auto w = test::oracle_window();
    for (auto& [name, series] : w.channels)
      for (double& v : series) v = trial % 5 == 0 ? 0.0 : nd(rng) * 100.0;
    for (double v : extract_features_leg(w, 20.0).values) EXPECT_TRUE(std::isfinite(v));
  }
}

TEST(FeatureScaler, Examples) {
  std::vector<std::vector<double>> X;
  for (int i = 0; i <= 10; ++i) X.push_back({static_cast<double>(i), 3.0});
  auto sc = FeatureScaler::fit(X, 0.0, 1.0);
  std::vector<double> probe{5.0, 3.0};
  auto t = sc.transform(probe);
  EXPECT_DOUBLE_EQ(t[0], 0.5);
  EXPECT_DOUBLE_EQ(t[1], 0.5);
  std::vector<double> high{25.0, -4.0};
  auto h = sc.transform(high);
  EXPECT_EQ(h[0], 1.0);
  EXPECT_EQ(h[1], 0.5);
  std::vector<double> low{-1.0, 3.0};
  EXPECT_EQ(sc.transform(low)[0], 0.0);
}

TEST(FeatureScaler, ClipQuantilesSaturate) {
  std::vector<std::vector<double>> X;
  for (int i = 0; i <= 100; ++i) X.push_back({static_cast<double>(i)});
  auto sc = FeatureScaler::fit(X, 0.01, 0.99);
  auto out = normalize_features(X, sc);
  EXPECT_EQ(out.front()[0], 0.0);
  EXPECT_EQ(out.back()[0], 1.0);
  EXPECT_DOUBLE_EQ(out[50][0], 0.5);
  for (const auto& r : out) EXPECT_TRUE(r[0] >= 0.0 && r[0] <= 1.0);
}

TEST(Manifest, SubsetAndHash) {
  auto m = leg_manifest();
  auto cols = m->columns_for(Modality::kHbc);
  auto sub = m->subset(cols, "hbc");
  EXPECT_EQ(sub->size(), 18u);
  EXPECT_NE(sub->hash(), m->hash());
  EXPECT_EQ(leg_manifest()->hash(), m->hash());
  EXPECT_EQ(m->to_json()["features"].size(), 126u);
}
