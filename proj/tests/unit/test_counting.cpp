#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hbc/counting.hpp"
#include "hbc/errors.hpp"
#include "hbc/presets.hpp"
#include "hbc/simulate.hpp"

using namespace hbc;

namespace {
std::vector<double> sine(double hz, std::size_t n, double fs = 20.0, double amp = 1.0) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = amp * std::sin(2 * std::numbers::pi * hz * i / fs);
  return x;
}
double peak_abs(const std::vector<double>& x) {
  double m = 0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}
}  // namespace

TEST(FftSmooth, PassbandPreserved) {
  auto x = sine(1.0, 200);
  auto y = fft_smooth(x, 3.0, 20.0);
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(y[i], x[i], 1e-9);
}

TEST(FftSmooth, StopbandRemoved) {
  auto x = sine(8.0, 200);
  EXPECT_LT(peak_abs(fft_smooth(x, 3.0, 20.0)), 1e-9 * peak_abs(x));
}

TEST(FftSmooth, ConstantAndProjection) {
  std::vector<double> c(64, 3.25);
  for (double v : fft_smooth(c, 2.0, 20.0)) EXPECT_NEAR(v, 3.25, 1e-12);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> nd;
  for (std::size_t n : {4u, 7u, 64u, 81u, 200u}) {
    std::vector<double> x(n);
    for (double& v : x) v = nd(rng);
    auto once = fft_smooth(x, 2.5, 20.0);
    auto twice = fft_smooth(once, 2.5, 20.0);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(twice[i], once[i], 1e-9);
  }
}

TEST(FftSmooth, Errors) {
  std::vector<double> x(64, 1.0);
  EXPECT_THROW(fft_smooth(x, 10.0, 20.0), DomainError);
  std::vector<double> tiny(3, 1.0);
  EXPECT_THROW(fft_smooth(tiny, 2.0, 20.0), DomainError);
}

TEST(DetectPeaks, Examples) {
  std::vector<double> x{0, 1, 0, 2, 0, 3, 0};
  PeakConfig c{0.3, 0.0, 2.5};
  EXPECT_EQ(detect_peaks(x, c, 20.0), (std::vector<std::size_t>{1, 3, 5}));
  c.rel_threshold = 0.8;
  EXPECT_EQ(detect_peaks(x, c, 20.0), (std::vector<std::size_t>{5}));
  std::vector<double> ramp{0, 1, 2, 3, 4, 5};
  EXPECT_TRUE(detect_peaks(ramp, c, 20.0).empty());
  std::vector<double> flat(10, 2.0);
  EXPECT_TRUE(detect_peaks(flat, c, 20.0).empty());
}

TEST(DetectPeaks, PlateauMiddleAndThinning) {
  std::vector<double> plateau{0, 2, 2, 2, 0};
  PeakConfig c{0.3, 0.0, 2.5};
  EXPECT_EQ(detect_peaks(plateau, c, 20.0), (std::vector<std::size_t>{2}));
  // Peaks at 2 (h 5), 4 (h 9), 9 (h 6); min distance 0.25 s = 5 samples.
  std::vector<double> x{0, 1, 5, 1, 9, 1, 0, 0, 1, 6, 0};
  c.min_distance_s = 0.25;
  EXPECT_EQ(detect_peaks(x, c, 20.0), (std::vector<std::size_t>{4, 9}));
}

TEST(DetectPeaks, GapPropertyRandom) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<double> x(50 + trial);
    for (double& v : x) v = nd(rng);
    PeakConfig c{0.1 * (trial % 8), 0.05 * (trial % 11), 2.5};
    auto p = detect_peaks(x, c, 20.0);
    for (std::size_t i = 1; i < p.size(); ++i) {
      EXPECT_GT(p[i], p[i - 1]);
      EXPECT_GE(static_cast<double>(p[i] - p[i - 1]), c.min_distance_s * 20.0 - 1e-9);
    }
  }
}

TEST(CountingAccuracy, Examples) {
  EXPECT_NEAR(counting_accuracy(29, 30), 0.9667, 1e-4);
  EXPECT_EQ(counting_accuracy(30, 30), 1.0);
  EXPECT_EQ(counting_accuracy(60, 30), 0.0);
  EXPECT_EQ(counting_accuracy(90, 30), -1.0);
  EXPECT_EQ(counting_accuracy(27, 30), counting_accuracy(33, 30));
  EXPECT_THROW(counting_accuracy(3, 0), DomainError);
}

TEST(FuseCounts, Examples) {
  std::vector<LabeledCount> two{{"acc", 10}, {"gyro", 12}};
  EXPECT_EQ(fuse_counts(two, FusionStrategy::kImuMean), 11);
  std::vector<LabeledCount> odd{{"acc", 10}, {"gyro", 11}};
  EXPECT_EQ(fuse_counts(odd, FusionStrategy::kImuMean), 11);  // 10.5 rounds up
  std::vector<LabeledCount> three{{"acc", 10}, {"gyro", 12}, {"cap", 20}};
  EXPECT_EQ(fuse_counts(three, FusionStrategy::kClosestTwoMean), 11);
  // |10-12| == |14-12|: both closest pairs contain cap -> earlier (acc,cap).
  std::vector<LabeledCount> tie{{"acc", 10}, {"gyro", 14}, {"cap", 12}};
  EXPECT_EQ(fuse_counts(tie, FusionStrategy::kClosestTwoMean), 11);
  // (acc,gyro) ties (gyro,cap): the cap pair wins.
  std::vector<LabeledCount> tie2{{"acc", 10}, {"gyro", 12}, {"cap", 14}};
  EXPECT_EQ(fuse_counts(tie2, FusionStrategy::kClosestTwoMean), 13);
  EXPECT_THROW(fuse_counts(two, FusionStrategy::kClosestTwoMean), DomainError);
}

TEST(Presets, FastClasses) {
  EXPECT_EQ(peak_preset("Running").smoothing_cutoff_hz, 5.0);
  EXPECT_EQ(peak_preset("Ropeskipping").min_distance_s, 0.2);
  EXPECT_EQ(peak_preset("Squat").smoothing_cutoff_hz, 2.5);
  EXPECT_EQ(peak_preset("Squat").min_distance_s, 0.5);
}

TEST(CountSource, ZeroNoiseCapIsExactAndImuNoiseIsNot) {
  double cap_acc = 0, imu_acc = 0;
  const int seeds = 50;
  for (int seed = 0; seed < seeds; ++seed) {
    ExerciseScript s;
    s.repetitions = 10;
    s.period_s = 2.0;
    s.cap_amplitude_uV = 400;
    s.noise = {0.0, 0.3, 3.0};  // lift: IMU uncoupled, noise only
    std::vector<ExerciseScript> scripts{s};
    auto sess = generate_session(scripts, {}, seed);
    const auto& seg = sess.segments[0];
    int cap = count_source(sess, seg.begin, seg.end, {CountSource::kCapRaw, 0}, {}, CountingMode::kLeg);
    EXPECT_EQ(cap, 10);
    cap_acc += counting_accuracy(cap, 10);
    int acc = count_source(sess, seg.begin, seg.end, {CountSource::kAccAxis, 2}, {}, CountingMode::kLeg);
    imu_acc += counting_accuracy(acc, 10);
  }
  EXPECT_EQ(cap_acc / seeds, 1.0);
  EXPECT_LT(imu_acc / seeds, 0.8);
}

TEST(CountSource, TenDecibelCap) {
  double total = 0;
  for (int seed = 0; seed < 20; ++seed) {
    ExerciseScript s;
    s.repetitions = 10;
    s.period_s = 2.0;
    s.cap_amplitude_uV = 400;
    std::vector<ExerciseScript> scripts{s};
    auto clean = generate_session(scripts, {}, seed);
    const auto& seg = clean.segments[0];
    double power = 0;
    for (std::size_t k = seg.begin; k < seg.end; ++k) power += clean.frames[k].cap_uV * clean.frames[k].cap_uV;
    power /= static_cast<double>(seg.end - seg.begin);
    scripts[0].noise.cap_uV = std::sqrt(power / 10.0);  // 10 dB
    auto noisy = generate_session(scripts, {}, seed);
    int n = count_source(noisy, seg.begin, seg.end, {CountSource::kCapRaw, 0}, {}, CountingMode::kLeg);
    total += counting_accuracy(n, 10);
  }
  EXPECT_GE(total / 20, 0.9);
}

TEST(CountSession, LegPresetNoiseFree) {
  LegPreset p;
  p.users = 1;
  p.sessions_per_user = 2;
  p.cap_snr_db.reset();
  p.seed = 4;
  for (const auto& s : simulate_leg7(p))
    for (const auto& c : count_session(s, default_counting(LabelSetId::kLeg7))) {
      EXPECT_EQ(c.cap, c.real) << c.class_name;
      EXPECT_EQ(c.accuracy_cap(), 1.0);
    }
}

TEST(CountReport, JsonCarriesAccuracies) {
  GymPreset p;
  p.users = 1;
  p.seed = 2;
  auto s = simulate_gym12(p).front();
  CountReport r;
  r.config = default_counting(LabelSetId::kGym12);
  r.segments = count_session(s, r.config);
  auto j = r.to_json();
  ASSERT_EQ(j["segments"].size(), 11u);
  for (auto key : {"cap", "acc", "gyro", "imu", "cap+imu"}) EXPECT_TRUE(j["segments"][0]["accuracy"].contains(key));
}

TEST(SourceNames, RoundTrip) {
  for (auto s : {"cap_raw", "acc_mag", "gyro_mag"}) EXPECT_EQ(to_string(source_from_string(s)), s);
  EXPECT_EQ(to_string(source_from_string("acc_z")), "acc_z");
}
