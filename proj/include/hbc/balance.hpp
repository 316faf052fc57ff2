#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hbc/types.hpp"

namespace hbc {

struct SmoteConfig {
  int k_neighbors = 5;
  std::uint64_t seed = 0;

  void validate() const;
};

// Where a synthetic row came from: row = X[a] + u * (X[b] - X[a]).
struct SyntheticOrigin {
  std::size_t a = 0;
  std::size_t b = 0;
  double u = 0.0;
};

struct SmoteResult {
  std::vector<std::vector<double>> X;
  std::vector<LabelId> y;
  // Parallel to the rows appended after the originals.
  std::vector<SyntheticOrigin> origins;
  std::vector<std::string> warnings;
  std::size_t n_original = 0;
};

// Oversamples every class up to the majority count. The input rows come
// first and unchanged; synthetic rows follow, minority classes in ascending
// id. k is clamped to class size - 1; a single-sample class is duplicated
// (u = 0) and reported in `warnings`.
SmoteResult smote(const std::vector<std::vector<double>>& X, const std::vector<LabelId>& y,
                  const SmoteConfig& cfg);

}  // namespace hbc
