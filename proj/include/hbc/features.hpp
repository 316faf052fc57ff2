#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "hbc/types.hpp"
#include "json.hpp"

namespace hbc {

struct WindowingConfig {
  double window_seconds = 4.0;
  double step_seconds = 2.0;

  void validate() const;
  std::size_t window_samples(double fs) const;
  std::size_t step_samples(double fs) const;
};

// floor((len - window) / step) + 1 for len >= window, else 0.
std::size_t window_count(std::size_t len, std::size_t window, std::size_t step);

// Majority label of a frame sequence; ties go to the lower class id.
// Returns kDiscard for an empty span.
LabelId majority_label(std::span<const LabelId> labels);

// Fixed-stride windows over the seven raw channels, labeled by majority
// vote. Windows touching a DISCARD frame are dropped.
std::vector<Window> slide_windows(const Session& s, const WindowingConfig& cfg);

// (x[i+1] - x[i]) * fs. Throws DomainError for fewer than two samples.
std::vector<double> jerk(std::span<const double> x, double fs);
// Elementwise Euclidean norm. Throws DomainError on length mismatch.
std::vector<double> magnitude(std::span<const double> x, std::span<const double> y,
                              std::span<const double> z);

// Which sensor a feature is computed from.
enum class Modality { kHbc, kImu, kBoth };
Modality modality_from_string(std::string_view s);
std::string_view to_string(Modality m);

struct FeatureSpec {
  std::string name;
  std::string formula;
  Modality source;
};

// Ordered, versioned list of feature definitions. The hash fingerprints the
// version and the ordered names; models refuse inputs with another hash.
class FeatureManifest {
 public:
  FeatureManifest(std::string version, std::vector<FeatureSpec> specs);

  const std::string& version() const { return version_; }
  const std::vector<FeatureSpec>& specs() const { return specs_; }
  std::size_t size() const { return specs_.size(); }
  const std::string& name(std::size_t i) const { return specs_[i].name; }
  std::uint64_t hash() const { return hash_; }
  std::string hash_hex() const;

  // Column indices whose source is compatible with `m` (kBoth keeps all).
  std::vector<std::size_t> columns_for(Modality m) const;
  // Sub-manifest over the given columns, with version suffix.
  std::shared_ptr<const FeatureManifest> subset(std::span<const std::size_t> columns,
                                                const std::string& version_suffix) const;

  nlohmann::json to_json() const;

 private:
  std::string version_;
  std::vector<FeatureSpec> specs_;
  std::uint64_t hash_;
};

using ManifestPtr = std::shared_ptr<const FeatureManifest>;

struct FeatureVector {
  ManifestPtr manifest;
  std::vector<double> values;
  LabelId label = kDiscard;
  double weight = 1.0;
  std::string session_id;
  std::string user_id;
  std::size_t window_start = 0;
};

// 14 channels (Cap, Acc XYZ, Gyro XYZ and their jerks) x 9 statistics.
ManifestPtr leg_manifest();
// The 615-feature time/frequency manifest.
ManifestPtr gym_manifest();
inline constexpr std::size_t kGymFeatureCount = 615;

FeatureVector extract_features_leg(const Window& w, double fs);
FeatureVector extract_features_gym(const Window& w, double fs);

// Minimum spacing (seconds) between neighbouring peaks; the window duration
// when fewer than two peaks are found.
double min_neighbor_peak_distance(std::span<const double> x, double fs, double window_seconds);

// Row provenance, used for fold construction and the leakage guard.
struct RowInfo {
  std::string session_id;
  std::string user_id;
  std::string group_id;
  int session_index = 0;
  std::size_t window_start = 0;
};

struct Dataset {
  ManifestPtr manifest;
  std::vector<std::vector<double>> X;
  std::vector<LabelId> y;
  std::vector<double> weights;
  std::vector<RowInfo> info;
  // Per-frame labels of each row's window; empty when not tracked.
  std::vector<std::vector<LabelId>> frame_labels;

  std::size_t size() const { return X.size(); }
  void push_back(const FeatureVector& fv, RowInfo ri);
  void push_back(const FeatureVector& fv, RowInfo ri, std::vector<LabelId> frames);
  Dataset select_rows(std::span<const std::size_t> rows) const;
  Dataset select_columns(Modality m) const;
};

// CSV with a header of provenance columns followed by the manifest names.
std::string dataset_to_csv(const Dataset& d, const std::vector<std::string>& class_names);

// Per-feature affine map onto [0, 1] between training-set quantiles.
// Values outside saturate; a constant training feature maps to 0.5.
class FeatureScaler {
 public:
  static FeatureScaler fit(const std::vector<std::vector<double>>& X, double lo_q, double hi_q);
  std::vector<double> transform(std::span<const double> row) const;
  void transform_inplace(std::vector<std::vector<double>>& X) const;
  const std::vector<double>& lo() const { return lo_; }
  const std::vector<double>& hi() const { return hi_; }

 private:
  std::vector<double> lo_;
  std::vector<double> hi_;
};

std::vector<std::vector<double>> normalize_features(const std::vector<std::vector<double>>& X,
                                                    const FeatureScaler& scaler);

}  // namespace hbc
