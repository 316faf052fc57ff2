#include "hbc/features.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>

#include "hbc/counting.hpp"
#include "hbc/errors.hpp"
#include "hbc/rng.hpp"
#include "hbc/stats.hpp"

namespace hbc {

void WindowingConfig::validate() const {
  if (!(step_seconds > 0.0 && step_seconds <= window_seconds))
    throw DomainError("windowing requires 0 < step <= window");
}

std::size_t WindowingConfig::window_samples(double fs) const {
  return static_cast<std::size_t>(std::lround(window_seconds * fs));
}

std::size_t WindowingConfig::step_samples(double fs) const {
  return static_cast<std::size_t>(std::lround(step_seconds * fs));
}

std::size_t window_count(std::size_t len, std::size_t window, std::size_t step) {
  if (window == 0 || step == 0) throw DomainError("window and step must be positive");
  if (len < window) return 0;
  return (len - window) / step + 1;
}

LabelId majority_label(std::span<const LabelId> labels) {
  std::map<LabelId, std::size_t> counts;
  for (LabelId l : labels) ++counts[l];
  LabelId best = kDiscard;
  std::size_t best_count = 0;
  for (const auto& [label, n] : counts) {
    if (n > best_count) {
      best = label;
      best_count = n;
    }
  }
  return best;
}

std::vector<Window> slide_windows(const Session& s, const WindowingConfig& cfg) {
  cfg.validate();
  const std::size_t w = cfg.window_samples(s.sample_rate_hz);
  const std::size_t step = cfg.step_samples(s.sample_rate_hz);
  if (w == 0 || step == 0) throw DomainError("window shorter than one sample");
  std::vector<Window> out;
  const std::size_t n = window_count(s.size(), w, step);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t start = k * step;
    std::span<const LabelId> labels(s.labels.data() + start, w);
    if (std::find(labels.begin(), labels.end(), kDiscard) != labels.end()) continue;
    Window win;
    win.session_id = s.id;
    win.start_index = start;
    win.length_samples = w;
    win.frame_labels.assign(labels.begin(), labels.end());
    win.label = majority_label(labels);
    for (std::string_view name : channel::kAll)
      win.channels.emplace(std::string(name), extract_channel(s, name, start, start + w));
    out.push_back(std::move(win));
  }
  return out;
}

std::vector<double> jerk(std::span<const double> x, double fs) {
  if (x.size() < 2) throw DomainError("jerk needs at least two samples");
  std::vector<double> out(x.size() - 1);
  for (std::size_t i = 0; i + 1 < x.size(); ++i) out[i] = (x[i + 1] - x[i]) * fs;
  return out;
}

std::vector<double> magnitude(std::span<const double> x, std::span<const double> y,
                              std::span<const double> z) {
  if (x.size() != y.size() || x.size() != z.size()) throw DomainError("magnitude of series with different lengths");
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = std::sqrt(x[i] * x[i] + y[i] * y[i] + z[i] * z[i]);
  return out;
}

Modality modality_from_string(std::string_view s) {
  if (s == "hbc") return Modality::kHbc;
  if (s == "imu") return Modality::kImu;
  if (s == "both") return Modality::kBoth;
  throw SchemaError("unknown modality '" + std::string(s) + "'");
}

std::string_view to_string(Modality m) {
  switch (m) {
    case Modality::kHbc: return "hbc";
    case Modality::kImu: return "imu";
    case Modality::kBoth: return "both";
  }
  return "?";
}

FeatureManifest::FeatureManifest(std::string version, std::vector<FeatureSpec> specs)
    : version_(std::move(version)), specs_(std::move(specs)) {
  std::uint64_t h = fnv1a64(version_);
  for (const auto& s : specs_) {
    h = fnv1a64("\n", h);
    h = fnv1a64(s.name, h);
  }
  hash_ = h;
}

std::string FeatureManifest::hash_hex() const { return to_hex(hash_); }

std::vector<std::size_t> FeatureManifest::columns_for(Modality m) const {
  std::vector<std::size_t> cols;
  for (std::size_t i = 0; i < specs_.size(); ++i) {
    if (m == Modality::kBoth || specs_[i].source == m) cols.push_back(i);
  }
  return cols;
}

std::shared_ptr<const FeatureManifest> FeatureManifest::subset(std::span<const std::size_t> columns,
                                                               const std::string& version_suffix) const {
  std::vector<FeatureSpec> specs;
  for (std::size_t c : columns) specs.push_back(specs_.at(c));
  return std::make_shared<const FeatureManifest>(version_ + version_suffix, std::move(specs));
}

nlohmann::json FeatureManifest::to_json() const {
  nlohmann::json j;
  j["version"] = version_;
  j["hash"] = hash_hex();
  j["count"] = specs_.size();
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& s : specs_)
    arr.push_back({{"name", s.name}, {"formula", s.formula}, {"source", std::string(to_string(s.source))}});
  j["features"] = arr;
  return j;
}

// ---------------------------------------------------------------------------
// Leg pipeline

namespace {

struct LegChannel {
  std::string name;
  std::string_view raw;
  bool is_jerk;
  Modality source;
};

const std::vector<LegChannel>& leg_channels() {
  static const std::vector<LegChannel> chans = {
      {"Cap", channel::kCap, false, Modality::kHbc},
      {"Cap_Jerk", channel::kCap, true, Modality::kHbc},
      {"Acc_X", channel::kAccX, false, Modality::kImu},
      {"Acc_Y", channel::kAccY, false, Modality::kImu},
      {"Acc_Z", channel::kAccZ, false, Modality::kImu},
      {"Gyro_X", channel::kGyroX, false, Modality::kImu},
      {"Gyro_Y", channel::kGyroY, false, Modality::kImu},
      {"Gyro_Z", channel::kGyroZ, false, Modality::kImu},
      {"Acc_Jerk_X", channel::kAccX, true, Modality::kImu},
      {"Acc_Jerk_Y", channel::kAccY, true, Modality::kImu},
      {"Acc_Jerk_Z", channel::kAccZ, true, Modality::kImu},
      {"Gyro_Jerk_X", channel::kGyroX, true, Modality::kImu},
      {"Gyro_Jerk_Y", channel::kGyroY, true, Modality::kImu},
      {"Gyro_Jerk_Z", channel::kGyroZ, true, Modality::kImu},
  };
  return chans;
}

constexpr std::array<std::string_view, 9> kLegStats = {"mean", "std", "max", "min", "range",
                                                       "mad", "energy", "iqr", "minPeakDistance"};

}  // namespace

ManifestPtr leg_manifest() {
  static const ManifestPtr m = [] {
    std::vector<FeatureSpec> specs;
    for (const auto& ch : leg_channels())
      for (std::string_view st : kLegStats)
        specs.push_back({ch.name + "_" + std::string(st), std::string(st) + "(" + ch.name + ")", ch.source});
    return std::make_shared<const FeatureManifest>("leg-126-v1", std::move(specs));
  }();
  return m;
}

double min_neighbor_peak_distance(std::span<const double> x, double fs, double window_seconds) {
  PeakConfig cfg;
  cfg.rel_threshold = 0.5;
  cfg.min_distance_s = 5.0 / fs;
  const auto peaks = detect_peaks(x, cfg, fs);
  if (peaks.size() < 2) return window_seconds;
  std::size_t best = peaks[1] - peaks[0];
  for (std::size_t i = 2; i < peaks.size(); ++i) best = std::min(best, peaks[i] - peaks[i - 1]);
  return static_cast<double>(best) / fs;
}

FeatureVector extract_features_leg(const Window& w, double fs) {
  FeatureVector fv;
  fv.manifest = leg_manifest();
  fv.label = w.label;
  fv.weight = w.weight;
  fv.session_id = w.session_id;
  fv.window_start = w.start_index;
  fv.values.reserve(fv.manifest->size());
  const double duration = static_cast<double>(w.length_samples) / fs;
  for (const auto& ch : leg_channels()) {
    const auto& raw = w.channel(ch.raw);
    const std::vector<double> x = ch.is_jerk ? jerk(raw, fs) : raw;
    const double mx = stats::max(x);
    const double mn = stats::min(x);
    fv.values.push_back(stats::mean(x));
    fv.values.push_back(stats::stddev(x));
    fv.values.push_back(mx);
    fv.values.push_back(mn);
    fv.values.push_back(mx - mn);
    fv.values.push_back(stats::mad(x));
    fv.values.push_back(stats::energy(x));
    fv.values.push_back(stats::iqr(x));
    fv.values.push_back(min_neighbor_peak_distance(x, fs, duration));
  }
  return fv;
}

// ---------------------------------------------------------------------------
// Dataset and scaling

void Dataset::push_back(const FeatureVector& fv, RowInfo ri) {
  if (!manifest) manifest = fv.manifest;
  if (fv.manifest->hash() != manifest->hash()) throw SchemaError("feature vector manifest does not match dataset");
  X.push_back(fv.values);
  y.push_back(fv.label);
  weights.push_back(fv.weight);
  info.push_back(std::move(ri));
}

void Dataset::push_back(const FeatureVector& fv, RowInfo ri, std::vector<LabelId> frames) {
  if (frame_labels.size() != X.size()) throw SchemaError("dataset mixes rows with and without frame labels");
  push_back(fv, std::move(ri));
  frame_labels.push_back(std::move(frames));
}

Dataset Dataset::select_rows(std::span<const std::size_t> rows) const {
  Dataset d;
  d.manifest = manifest;
  for (std::size_t r : rows) {
    d.X.push_back(X.at(r));
    d.y.push_back(y.at(r));
    d.weights.push_back(weights.at(r));
    d.info.push_back(info.at(r));
    if (!frame_labels.empty()) d.frame_labels.push_back(frame_labels.at(r));
  }
  return d;
}

Dataset Dataset::select_columns(Modality m) const {
  if (m == Modality::kBoth) return *this;
  const auto cols = manifest->columns_for(m);
  Dataset d;
  d.manifest = manifest->subset(cols, std::string("/") + std::string(to_string(m)));
  d.y = y;
  d.weights = weights;
  d.info = info;
  d.frame_labels = frame_labels;
  d.X.reserve(X.size());
  for (const auto& row : X) {
    std::vector<double> r;
    r.reserve(cols.size());
    for (std::size_t c : cols) r.push_back(row[c]);
    d.X.push_back(std::move(r));
  }
  return d;
}

std::string dataset_to_csv(const Dataset& d, const std::vector<std::string>& class_names) {
  std::string out = "session_id,user_id,group_id,window_start,label,weight";
  for (const auto& s : d.manifest->specs()) out += "," + s.name;
  out += "\n";
  std::array<char, 32> buf{};
  auto num = [&](double v) {
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), ptr);
  };
  for (std::size_t r = 0; r < d.size(); ++r) {
    const auto& ri = d.info[r];
    const LabelId l = d.y[r];
    const std::string label = l >= 0 && static_cast<std::size_t>(l) < class_names.size()
                                  ? class_names[static_cast<std::size_t>(l)]
                                  : std::to_string(l);
    out += ri.session_id + "," + ri.user_id + "," + ri.group_id + "," + std::to_string(ri.window_start) + "," +
           label + "," + num(d.weights[r]);
    for (double v : d.X[r]) out += "," + num(v);
    out += "\n";
  }
  return out;
}

FeatureScaler FeatureScaler::fit(const std::vector<std::vector<double>>& X, double lo_q, double hi_q) {
  if (X.empty()) throw DomainError("cannot fit a feature scaler on no rows");
  if (!(lo_q >= 0.0 && lo_q < hi_q && hi_q <= 1.0)) throw DomainError("invalid clip quantiles");
  FeatureScaler s;
  const std::size_t d = X.front().size();
  s.lo_.resize(d);
  s.hi_.resize(d);
  std::vector<double> col(X.size());
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t i = 0; i < X.size(); ++i) col[i] = X[i][j];
    s.lo_[j] = stats::quantile(col, lo_q);
    s.hi_[j] = stats::quantile(col, hi_q);
  }
  return s;
}

std::vector<double> FeatureScaler::transform(std::span<const double> row) const {
  if (row.size() != lo_.size()) throw SchemaError("feature row width does not match the scaler");
  std::vector<double> out(row.size());
  for (std::size_t j = 0; j < row.size(); ++j) {
    const double span = hi_[j] - lo_[j];
    out[j] = span > 0.0 ? std::clamp((row[j] - lo_[j]) / span, 0.0, 1.0) : 0.5;
  }
  return out;
}

void FeatureScaler::transform_inplace(std::vector<std::vector<double>>& X) const {
  for (auto& row : X) row = transform(row);
}

std::vector<std::vector<double>> normalize_features(const std::vector<std::vector<double>>& X,
                                                    const FeatureScaler& scaler) {
  auto out = X;
  scaler.transform_inplace(out);
  return out;
}

}  // namespace hbc
