#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hbc/balance.hpp"
#include "hbc/eval.hpp"
#include "hbc/features.hpp"
#include "hbc/ingest.hpp"
#include "hbc/models.hpp"
#include "hbc/pairwise.hpp"

namespace hbc {

enum class FeatureKind { kLeg126, kGym615 };
std::string_view to_string(FeatureKind k);
FeatureKind feature_kind_from_string(std::string_view s);

struct FeaturizeConfig {
  FeatureKind kind = FeatureKind::kLeg126;
  WindowingConfig windowing;
  PreprocessConfig preprocess;
};

ManifestPtr manifest_for(FeatureKind k);
FeatureVector extract_features(const Window& w, double fs, FeatureKind k);

// Preprocesses each session, relabels it through `mapping` when given,
// then windows and featurizes. Rows keep their per-frame labels.
Dataset build_dataset(std::span<const Session> sessions, const FeaturizeConfig& cfg,
                      const ClassMapping* mapping = nullptr);

// Window over arbitrary frame indices of a session (all seven channels).
Window window_at(const Session& s, std::span<const std::size_t> frames);

// One row per window over each pair's aligned timeline: both users' windows
// are featurized and fused with pair_features; the label is the majority
// joint label. Windows touching a DISCARD joint label are dropped.
Dataset build_pair_dataset(std::span<const Session> sessions, std::span<const SessionPair> pairs,
                           const FeaturizeConfig& cfg, const ClassMapping& pairwise);

struct ModelSpec {
  ModelKind kind = ModelKind::kRandomForest;
  ForestConfig forest;
  LogRegConfig logistic;
};

struct HarnessConfig {
  FoldScheme scheme;
  Modality modality = Modality::kBoth;
  bool scale = true;
  std::pair<double, double> scale_quantiles{0.01, 0.99};
  std::optional<SmoteConfig> smote;
  bool window_weights = false;  // inverse label-frequency weights (logistic)
  int soft_vote_radius = -1;    // < 0 disables smoothing
  ModelSpec model;
  std::vector<std::string> class_names;
  std::string title;
  std::string config_hash;
  std::uint64_t seed = 0;
};

// Cross-validates `d` under cfg.scheme. Scaling, balancing, weighting and
// fitting see training rows only; `observer` (if set) receives every
// dataset row id that reaches a fit routine, and the harness itself throws
// Error if a test row ever does.
EvalReport cross_validate(const Dataset& d, const HarnessConfig& cfg, const FitObserver& observer = {});

// Trains one model on all rows (scaler included) for the `train` command.
struct FittedPipeline {
  TrainedModel model;
  std::optional<FeatureScaler> scaler;
  Modality modality = Modality::kBoth;
  nlohmann::json to_json() const;
};
FittedPipeline fit_pipeline(const Dataset& d, const HarnessConfig& cfg);

struct GridPoint {
  int n_trees = 0;
  int max_depth = 0;
  double hamming_loss = 0.0;
  double macro_f = 0.0;
  double accuracy = 0.0;
};
// Cross-validated forest sweep over n_trees x max_depth.
std::vector<GridPoint> forest_grid_search(const Dataset& d, const HarnessConfig& base, const std::vector<int>& n_trees,
                                          const std::vector<int>& depths);

}  // namespace hbc
