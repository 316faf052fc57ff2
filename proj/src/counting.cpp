#include "hbc/counting.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hbc/errors.hpp"
#include "hbc/stats.hpp"
#include "hbc/features.hpp"
#include "hbc/spectrum.hpp"

namespace hbc {

void PeakConfig::validate() const {
  if (!(rel_threshold >= 0.0 && rel_threshold <= 1.0)) throw DomainError("rel_threshold must be in [0, 1]");
  if (!(min_distance_s >= 0.0)) throw DomainError("min_distance must be non-negative");
  if (!(smoothing_cutoff_hz > 0.0)) throw DomainError("smoothing cutoff must be positive");
}

std::vector<double> fft_smooth(std::span<const double> x, double cutoff_hz, double fs) {
  if (!(fs > 0.0)) throw DomainError("sample rate must be positive");
  if (!(cutoff_hz > 0.0) || cutoff_hz >= fs / 2.0) throw DomainError("smoothing cutoff must be below Nyquist");
  if (x.size() < 4) throw DomainError("fft_smooth needs at least 4 samples");
  auto bins = rfft(x);
  const double resolution = fs / static_cast<double>(x.size());
  for (std::size_t k = 1; k < bins.size(); ++k) {
    if (static_cast<double>(k) * resolution > cutoff_hz) bins[k] = 0.0;
  }
  return irfft(bins, x.size());
}

std::vector<std::size_t> detect_peaks(std::span<const double> x, const PeakConfig& cfg, double fs) {
  if (x.empty()) throw DomainError("detect_peaks on an empty series");
  cfg.validate();
  const std::size_t n = x.size();
  std::vector<std::size_t> candidates;
  if (n < 3) return candidates;

  const double threshold = cfg.rel_threshold * *std::max_element(x.begin(), x.end());
  std::size_t i = 1;
  while (i + 1 < n) {
    if (x[i] > x[i - 1]) {
      std::size_t j = i;
      while (j + 1 < n && x[j + 1] == x[i]) ++j;
      if (j + 1 < n && x[j + 1] < x[i]) {
        const std::size_t mid = (i + j) / 2;
        if (x[mid] >= threshold) candidates.push_back(mid);
      }
      i = j + 1;
    } else {
      ++i;
    }
  }

  const double min_gap = cfg.min_distance_s * fs;
  if (min_gap <= 0.0 || candidates.size() < 2) return candidates;

  std::vector<std::size_t> order(candidates.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return x[candidates[a]] > x[candidates[b]]; });
  std::vector<bool> removed(candidates.size(), false);
  for (std::size_t oi : order) {
    if (removed[oi]) continue;
    for (std::size_t k = 0; k < candidates.size(); ++k) {
      if (k == oi || removed[k]) continue;
      const double gap = std::abs(static_cast<double>(candidates[k]) - static_cast<double>(candidates[oi]));
      if (gap < min_gap) removed[k] = true;
    }
  }
  std::vector<std::size_t> kept;
  for (std::size_t k = 0; k < candidates.size(); ++k)
    if (!removed[k]) kept.push_back(candidates[k]);
  return kept;
}

double counting_accuracy(double detected, double real) {
  if (!(real > 0.0)) throw DomainError("real repetition count must be positive");
  return 1.0 - std::abs(detected - real) / real;
}

std::string to_string(const SourceSpec& s) {
  static constexpr const char* kAxes = "xyz";
  switch (s.kind) {
    case CountSource::kCapRaw: return "cap_raw";
    case CountSource::kAccAxis: return std::string("acc_") + kAxes[s.axis];
    case CountSource::kGyroAxis: return std::string("gyro_") + kAxes[s.axis];
    case CountSource::kAccMag: return "acc_mag";
    case CountSource::kGyroMag: return "gyro_mag";
  }
  return "?";
}

SourceSpec source_from_string(std::string_view s) {
  if (s == "cap_raw" || s == "cap") return {CountSource::kCapRaw, 0};
  if (s == "acc_mag") return {CountSource::kAccMag, 0};
  if (s == "gyro_mag") return {CountSource::kGyroMag, 0};
  auto axis_of = [&](std::string_view rest) {
    if (rest == "x") return 0;
    if (rest == "y") return 1;
    if (rest == "z") return 2;
    throw SchemaError("unknown counting source '" + std::string(s) + "'");
  };
  if (s.starts_with("acc_")) return {CountSource::kAccAxis, axis_of(s.substr(4))};
  if (s.starts_with("gyro_")) return {CountSource::kGyroAxis, axis_of(s.substr(5))};
  throw SchemaError("unknown counting source '" + std::string(s) + "'");
}

int count_source(const Session& s, std::size_t begin, std::size_t end, const SourceSpec& source,
                 const PeakConfig& cfg, CountingMode mode) {
  static constexpr std::array<std::string_view, 3> kAcc = {channel::kAccX, channel::kAccY, channel::kAccZ};
  static constexpr std::array<std::string_view, 3> kGyro = {channel::kGyroX, channel::kGyroY, channel::kGyroZ};
  if (source.axis < 0 || source.axis > 2) throw DomainError("axis must be 0, 1 or 2");

  std::vector<double> series;
  switch (source.kind) {
    case CountSource::kCapRaw: series = extract_channel(s, channel::kCap, begin, end); break;
    case CountSource::kAccAxis: series = extract_channel(s, kAcc[source.axis], begin, end); break;
    case CountSource::kGyroAxis: series = extract_channel(s, kGyro[source.axis], begin, end); break;
    case CountSource::kAccMag:
    case CountSource::kGyroMag: {
      const auto& names = source.kind == CountSource::kAccMag ? kAcc : kGyro;
      series = magnitude(extract_channel(s, names[0], begin, end), extract_channel(s, names[1], begin, end),
                         extract_channel(s, names[2], begin, end));
      break;
    }
  }
  if (series.empty()) throw DomainError("empty counting segment");
  const bool raw = source.kind == CountSource::kCapRaw && mode == CountingMode::kLeg;
  if (!raw) series = fft_smooth(series, cfg.smoothing_cutoff_hz, s.sample_rate_hz);
  // IMU series ride on gravity or a static offset, which would make the
  // threshold relative to the maximum meaningless; count around the mean.
  if (source.kind != CountSource::kCapRaw) {
    const double m = stats::mean(series);
    for (double& v : series) v -= m;
  }
  return static_cast<int>(detect_peaks(series, cfg, s.sample_rate_hz).size());
}

int fuse_counts(std::span<const LabeledCount> counts, FusionStrategy strategy) {
  auto find = [&](std::string_view name) -> std::optional<int> {
    for (const auto& c : counts)
      if (c.source == name) return c.count;
    return std::nullopt;
  };
  auto half_up_mean = [](int a, int b) { return static_cast<int>(std::floor((a + b) / 2.0 + 0.5)); };

  if (strategy == FusionStrategy::kImuMean) {
    auto acc = find("acc");
    auto gyro = find("gyro");
    if (counts.size() < 2 || !acc || !gyro) throw DomainError("imu_mean needs acc and gyro counts");
    return half_up_mean(*acc, *gyro);
  }

  auto acc = find("acc");
  auto gyro = find("gyro");
  auto cap = find("cap");
  if (counts.size() != 3 || !acc || !gyro || !cap)
    throw DomainError("closest_two_mean needs exactly acc, gyro and cap counts");
  struct Pair {
    int a, b;
    bool has_cap;
  };
  const std::array<Pair, 3> pairs = {Pair{*acc, *gyro, false}, Pair{*acc, *cap, true}, Pair{*gyro, *cap, true}};
  const Pair* best = &pairs[0];
  for (const Pair& p : pairs) {
    const int gap = std::abs(p.a - p.b);
    const int best_gap = std::abs(best->a - best->b);
    if (gap < best_gap || (gap == best_gap && p.has_cap && !best->has_cap)) best = &p;
  }
  return half_up_mean(best->a, best->b);
}

PeakConfig peak_preset(std::string_view class_name, double rel_threshold) {
  static constexpr std::array<std::string_view, 4> kFast = {"Running", "Walking", "Ropeskipping", "Riding"};
  const bool fast = std::find(kFast.begin(), kFast.end(), class_name) != kFast.end();
  PeakConfig cfg;
  cfg.rel_threshold = rel_threshold;
  cfg.smoothing_cutoff_hz = fast ? 5.0 : 2.5;
  cfg.min_distance_s = fast ? 0.2 : 0.5;
  return cfg;
}

PeakConfig CountingConfig::peak_config_for(std::string_view class_name) const {
  if (auto it = overrides.find(class_name); it != overrides.end()) return it->second;
  return peak_preset(class_name, rel_threshold);
}

CountingConfig default_counting(LabelSetId id) {
  CountingConfig cfg;
  if (id != LabelSetId::kLeg7) {
    cfg.mode = CountingMode::kGym;
    cfg.acc = {CountSource::kAccMag, 0};
    cfg.gyro = {CountSource::kGyroMag, 0};
  }
  return cfg;
}

std::vector<SegmentCount> count_session(const Session& s, const CountingConfig& cfg) {
  const LabelSet& ls = label_set(s.label_set);
  std::vector<SegmentCount> out;
  for (const Segment& seg : s.segments) {
    if (seg.repetitions <= 0) continue;
    SegmentCount c;
    c.session_id = s.id;
    c.class_name = std::string(ls.name_of(seg.label));
    c.begin = seg.begin;
    c.end = seg.end;
    c.real = seg.repetitions;
    c.peak = cfg.peak_config_for(c.class_name);
    c.cap = count_source(s, seg.begin, seg.end, {CountSource::kCapRaw, 0}, c.peak, cfg.mode);
    c.acc = count_source(s, seg.begin, seg.end, cfg.acc, c.peak, cfg.mode);
    c.gyro = count_source(s, seg.begin, seg.end, cfg.gyro, c.peak, cfg.mode);
    const std::array<LabeledCount, 3> all = {LabeledCount{"acc", c.acc}, LabeledCount{"gyro", c.gyro},
                                             LabeledCount{"cap", c.cap}};
    c.imu_fused = fuse_counts(std::span(all).first(2), FusionStrategy::kImuMean);
    c.all_fused = fuse_counts(all, FusionStrategy::kClosestTwoMean);
    out.push_back(c);
  }
  return out;
}

namespace {

nlohmann::json summary(const std::vector<double>& v) {
  if (v.empty()) return {{"n", 0}};
  const double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return {{"n", v.size()}, {"mean", m}, {"std", std::sqrt(ss / static_cast<double>(v.size()))}};
}

}  // namespace

nlohmann::json CountReport::to_json() const {
  nlohmann::json j;
  j["kind"] = "count_report";
  j["config"] = {{"mode", config.mode == CountingMode::kLeg ? "leg" : "gym"},
                 {"acc_source", to_string(config.acc)},
                 {"gyro_source", to_string(config.gyro)},
                 {"rel_threshold", config.rel_threshold},
                 {"note",
                  "peak threshold, minimum distance and smoothing cutoffs are engineering defaults, "
                  "not published settings"}};
  std::map<std::string, std::map<std::string, std::vector<double>>> per_class;
  std::map<std::string, std::vector<double>> overall;
  nlohmann::json segs = nlohmann::json::array();
  for (const auto& c : segments) {
    const std::map<std::string, double> acc = {{"cap", c.accuracy_cap()},
                                               {"acc", c.accuracy_acc()},
                                               {"gyro", c.accuracy_gyro()},
                                               {"imu", c.accuracy_imu()},
                                               {"cap+imu", c.accuracy_all()}};
    for (const auto& [k, v] : acc) {
      per_class[c.class_name][k].push_back(v);
      overall[k].push_back(v);
    }
    segs.push_back({{"session_id", c.session_id},
                    {"class", c.class_name},
                    {"begin", c.begin},
                    {"end", c.end},
                    {"real", c.real},
                    {"counts", {{"cap", c.cap}, {"acc", c.acc}, {"gyro", c.gyro}}},
                    {"fused", {{"imu_mean", c.imu_fused}, {"closest_two_mean", c.all_fused}}},
                    {"accuracy", acc},
                    {"peak_config",
                     {{"rel_threshold", c.peak.rel_threshold},
                      {"min_distance_s", c.peak.min_distance_s},
                      {"smoothing_cutoff_hz", c.peak.smoothing_cutoff_hz}}}});
  }
  j["segments"] = segs;
  nlohmann::json by_class = nlohmann::json::object();
  for (const auto& [cls, m] : per_class) {
    for (const auto& [k, v] : m) by_class[cls][k] = summary(v);
  }
  j["per_class"] = by_class;
  nlohmann::json tot = nlohmann::json::object();
  for (const auto& [k, v] : overall) tot[k] = summary(v);
  j["overall"] = tot;
  return j;
}

}  // namespace hbc
