#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hbc/types.hpp"
#include "json.hpp"

namespace hbc {

struct PeakConfig {
  double rel_threshold = 0.3;    // fraction of the series maximum
  double min_distance_s = 0.5;
  double smoothing_cutoff_hz = 2.5;

  void validate() const;
};

// Low-pass by zeroing every DFT bin above cutoff_hz, then inverting. DC is
// kept. Throws DomainError for cutoff >= fs / 2 or fewer than 4 samples.
std::vector<double> fft_smooth(std::span<const double> x, double cutoff_hz, double fs);

// Local maxima (plateaus resolved to their middle sample) at or above
// rel_threshold * max(x), thinned greedily from the highest down so that
// kept peaks are at least min_distance_s * fs samples apart. Indices are
// returned in increasing order.
std::vector<std::size_t> detect_peaks(std::span<const double> x, const PeakConfig& cfg, double fs);

// 1 - |detected - real| / real. Throws DomainError for real <= 0.
double counting_accuracy(double detected, double real);

enum class CountSource { kCapRaw, kAccAxis, kGyroAxis, kAccMag, kGyroMag };
enum class CountingMode { kLeg, kGym };

struct SourceSpec {
  CountSource kind = CountSource::kCapRaw;
  int axis = 0;  // for the axis sources
};
std::string to_string(const SourceSpec& s);
SourceSpec source_from_string(std::string_view s);

// Counts repetitions of frames [begin, end): optional magnitude, FFT
// smoothing (skipped for the raw cap source in leg mode), mean removal for
// IMU sources, then peaks.
int count_source(const Session& s, std::size_t begin, std::size_t end, const SourceSpec& source,
                 const PeakConfig& cfg, CountingMode mode);

enum class FusionStrategy { kImuMean, kClosestTwoMean };

struct LabeledCount {
  std::string source;  // "acc", "gyro" or "cap"
  int count = 0;
};

// imu_mean: mean of the acc and gyro counts. closest_two_mean: mean of the
// pair with the smallest gap; ties prefer pairs containing cap, then the
// earlier pair in (acc,gyro), (acc,cap), (gyro,cap) order. Half-up rounding.
int fuse_counts(std::span<const LabeledCount> counts, FusionStrategy strategy);

// Class-dependent smoothing/spacing presets. Fast classes (Running,
// Walking, Ropeskipping, Riding) use 5 Hz and 0.2 s; all others 2.5 Hz and
// 0.5 s.
PeakConfig peak_preset(std::string_view class_name, double rel_threshold = 0.3);

struct CountingConfig {
  CountingMode mode = CountingMode::kLeg;
  SourceSpec acc{CountSource::kAccAxis, 2};
  SourceSpec gyro{CountSource::kGyroAxis, 1};
  double rel_threshold = 0.3;
  // Per-class overrides keyed by class name.
  std::map<std::string, PeakConfig, std::less<>> overrides;

  PeakConfig peak_config_for(std::string_view class_name) const;
};

// Leg mode counts raw cap, acc Z and gyro Y; gym mode counts smoothed cap
// and the acc/gyro magnitudes.
CountingConfig default_counting(LabelSetId id);

struct SegmentCount {
  std::string session_id;
  std::string class_name;
  std::size_t begin = 0;
  std::size_t end = 0;
  int real = 0;
  int cap = 0;
  int acc = 0;
  int gyro = 0;
  int imu_fused = 0;
  int all_fused = 0;
  PeakConfig peak;

  double accuracy_cap() const { return counting_accuracy(cap, real); }
  double accuracy_acc() const { return counting_accuracy(acc, real); }
  double accuracy_gyro() const { return counting_accuracy(gyro, real); }
  double accuracy_imu() const { return counting_accuracy(imu_fused, real); }
  double accuracy_all() const { return counting_accuracy(all_fused, real); }
};

struct CountReport {
  std::vector<SegmentCount> segments;
  CountingConfig config;

  nlohmann::json to_json() const;
};

// Counts every annotated segment of the session.
std::vector<SegmentCount> count_session(const Session& s, const CountingConfig& cfg);

}  // namespace hbc
