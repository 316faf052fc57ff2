#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "hbc/features.hpp"
#include "hbc/types.hpp"
#include "json.hpp"

namespace hbc {

using Matrix = std::vector<std::vector<double>>;

struct ForestConfig {
  int n_trees = 100;
  int max_depth = 15;
  int features_per_split = 0;  // 0: floor(sqrt(n_features))
  bool bootstrap = true;
  int min_samples_split = 2;
  std::uint64_t seed = 0;

  void validate() const;
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;  // go left when x[feature] <= threshold
  int left = -1;
  int right = -1;
  int leaf_class = 0;  // index into the model's class list
};

struct DecisionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root
  int predict(std::span<const double> x) const;
  int depth() const;
};

struct RandomForest {
  std::vector<DecisionTree> trees;
};

struct LogRegConfig {
  double learning_rate = 1.0;  // damping of the Newton step
  int max_iters = 100;
  double l2_penalty = 1e-4;
  double convergence_tol = 1e-6;
  std::uint64_t seed = 0;  // the solver is deterministic; kept for provenance

  void validate() const;
};

// One binary classifier per class: coef[c] holds the bias followed by one
// weight per feature.
struct LogisticOvR {
  std::vector<std::vector<double>> coef;
  std::vector<int> iterations;
  std::vector<bool> converged;
  std::vector<bool> degenerate;
};

enum class ModelKind { kRandomForest, kLogisticOvR };
std::string_view to_string(ModelKind k);
ModelKind model_kind_from_string(std::string_view s);

struct TrainedModel {
  ModelKind kind = ModelKind::kRandomForest;
  std::vector<LabelId> classes;  // ascending label ids seen in training
  std::size_t n_features = 0;
  std::uint64_t manifest_hash = 0;
  std::variant<RandomForest, LogisticOvR> params;

  std::size_t n_classes() const { return classes.size(); }
  nlohmann::json to_json() const;
  static TrainedModel from_json(const nlohmann::json& j);
};

// Called with the rows passed to a fit routine before any fitting happens.
// The evaluation harness uses it to prove test rows never reach training.
using FitObserver = std::function<void(std::span<const std::size_t> row_ids)>;

// Grows cfg.n_trees Gini CART trees on bootstrap resamples. Throws
// TrainingError for fewer than two classes and DomainError for non-finite
// inputs.
TrainedModel train_random_forest(const Matrix& X, const std::vector<LabelId>& y, const ForestConfig& cfg,
                                 std::uint64_t manifest_hash = 0);

// Weighted one-vs-rest logistic regression, each binary problem solved by
// damped Newton iterations on
//   (1 / sum w) * sum_i w_i * CE_i + (l2 / 2) * |beta|^2   (bias unpenalized).
// A class with weighted positive fraction 0 or 1 degenerates to its prior:
// zero weights and the clipped logit of that fraction as bias. Throws
// TrainingError when the loss turns non-finite.
TrainedModel train_weighted_ovr_logistic(const Matrix& X, const std::vector<LabelId>& y,
                                         const std::vector<double>& weights, const LogRegConfig& cfg,
                                         std::uint64_t manifest_hash = 0);

// Probabilities over model.classes. Forest: fraction of tree votes.
// Logistic: per-class sigmoids normalized to sum 1.
std::vector<double> predict_proba_row(const TrainedModel& m, std::span<const double> x);
// As above, refusing a vector built from another manifest (SchemaError).
std::vector<double> predict_proba(const TrainedModel& m, const FeatureVector& x);
LabelId predict(const TrainedModel& m, std::span<const double> x);

// First index of the largest entry.
std::size_t argmax_lower(std::span<const double> p);

struct ClassCounts {
  std::map<LabelId, double> counts;  // frames per class in training windows
  double total = 0.0;                // N, all frames in training windows
};
ClassCounts count_frames(const std::vector<std::vector<LabelId>>& window_frame_labels);

// Sum over frames of N / count(label). Throws DomainError when a present
// class has no (or zero) count.
double window_weight(std::span<const LabelId> window_labels, const ClassCounts& counts);

// label[i] = argmax of the mean probability vector over [i - radius,
// i + radius] clipped to the sequence; returns indices into the probability
// vectors. Throws DomainError for negative radius.
std::vector<std::size_t> soft_vote_smooth(const std::vector<std::vector<double>>& probs, int radius);

namespace detail {
// Sorted distinct labels; TrainingError with fewer than two.
std::vector<LabelId> class_list(const std::vector<LabelId>& y);
std::vector<int> encode(const std::vector<LabelId>& y, const std::vector<LabelId>& classes);
// DomainError on shape mismatch or non-finite entries.
void check_matrix(const Matrix& X, std::size_t n_rows);
}  // namespace detail

}  // namespace hbc
