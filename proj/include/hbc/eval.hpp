#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hbc/features.hpp"
#include "hbc/types.hpp"
#include "json.hpp"

namespace hbc {

enum class FoldKind { kRandomSplit, kLeaveOneUserOut, kLeaveOneSessionOut, kLeaveOneGroupOut };
std::string_view to_string(FoldKind k);
FoldKind fold_kind_from_string(std::string_view s);

struct FoldScheme {
  FoldKind kind = FoldKind::kLeaveOneUserOut;
  // Random split only: portion sizes; each portion but the last is the test
  // set of one fold, and everything else trains.
  std::vector<double> ratios{0.3, 0.3, 0.3, 0.1};
  std::uint64_t seed = 0;

  void validate() const;
};

struct Fold {
  std::string held_out;  // user, session or group id; "split-<i>" for random
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// Folds over dataset rows. Leave-one-X-out schemes produce one fold per
// distinct key, in order of first appearance; throws SchemaError when a row
// lacks the key.
std::vector<Fold> make_folds(std::span<const RowInfo> rows, const FoldScheme& scheme);
// Same over whole sessions (row i = session i).
std::vector<Fold> make_folds(std::span<const Session> sessions, const FoldScheme& scheme);

using ConfusionMatrix = std::vector<std::vector<std::size_t>>;

// M[i][j] = #(true = classes[i], pred = classes[j]). Throws DomainError for
// unequal lengths or labels outside `classes`.
ConfusionMatrix confusion_matrix(std::span<const LabelId> y_true, std::span<const LabelId> y_pred,
                                 std::span<const LabelId> classes);

struct ClassScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;    // row sum
  std::size_t predicted = 0;  // column sum
};
std::vector<ClassScores> per_class_scores(const ConfusionMatrix& m);

// Unweighted mean F1; a class with zero support and zero predictions is
// left out of the mean. 0 for an empty matrix.
double macro_f_score(const ConfusionMatrix& m);
// Mean F1 over a subset of class indices (same exclusion rule).
double macro_f_score(const ConfusionMatrix& m, std::span<const std::size_t> class_indices);
double accuracy(const ConfusionMatrix& m);
// Throws DomainError for empty or unequal inputs.
double hamming_loss(std::span<const LabelId> y_true, std::span<const LabelId> y_pred);

void add_into(ConfusionMatrix& acc, const ConfusionMatrix& m);

struct FoldResult {
  std::string held_out;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  ConfusionMatrix confusion;
  double macro_f = 0.0;
  double accuracy = 0.0;
  double hamming = 0.0;
};

struct EvalReport {
  std::string title;
  std::string scheme;
  std::string modality;
  std::vector<std::string> class_names;
  std::vector<FoldResult> folds;
  ConfusionMatrix pooled;  // sum over folds
  std::string config_hash;
  std::uint64_t seed = 0;
  std::vector<std::string> notes;

  double pooled_macro_f() const { return macro_f_score(pooled); }
  double mean_fold_macro_f() const;
  nlohmann::json to_json() const;
  static EvalReport from_json(const nlohmann::json& j);
  // Pooled confusion matrix with a header row and column of class names.
  std::string confusion_csv() const;
};

// Volunteer recognition: keeps the rows of one exercise class and relabels
// them by user (label = index into the returned user list, first-seen order).
struct Relabeled {
  Dataset data;
  std::vector<std::string> class_names;
};
Relabeled relabel_by_user(const Dataset& d, LabelId exercise_class);

}  // namespace hbc
