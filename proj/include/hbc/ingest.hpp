#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "hbc/types.hpp"

namespace hbc {

enum class DetrendMode { kNone, kMean, kLinear };
DetrendMode detrend_mode_from_string(std::string_view s);
std::string_view to_string(DetrendMode m);

struct PreprocessConfig {
  DetrendMode detrend = DetrendMode::kNone;
  // Class whose cap range is mapped onto hbc_norm_range. nullopt uses the
  // whole session as the anchor.
  std::optional<LabelId> hbc_anchor_class;
  bool normalize_hbc = true;
  std::pair<double, double> hbc_norm_range{-500.0, 500.0};
  // Quantiles used by normalize_features.
  std::pair<double, double> feature_clip{0.01, 0.99};

  // Throws DomainError unless lo < hi and 0 <= lo_q < hi_q <= 1.
  void validate() const;
};

// Defaults per label set: LEG7 anchors on leg-front-lift; GYM12 anchors on
// the whole session; COLLAB anchors on the whole session with linear detrend.
PreprocessConfig default_preprocess(LabelSetId id);

// Reads <path> and its sidecar JSON, then validates. Throws ParseError,
// FormatError or ValidationError.
Session load_session(const std::filesystem::path& csv_path);
// Writes CSV and sidecar atomically.
void save_session(const Session& s, const std::filesystem::path& csv_path);

std::vector<double> detrend(std::span<const double> series, DetrendMode mode);

struct AffineMap {
  double scale = 1.0;
  double offset = 0.0;
  double operator()(double x) const { return scale * x + offset; }
};

// Affine map taking the anchor frames' cap min/max onto cfg.hbc_norm_range.
AffineMap hbc_normalization_map(const Session& s, const PreprocessConfig& cfg);
Session normalize_session_hbc(const Session& s, const PreprocessConfig& cfg);

// Detrends cap and accelerometer channels per cfg.detrend, then applies the
// HBC normalization when enabled.
Session preprocess_session(const Session& s, const PreprocessConfig& cfg);

}  // namespace hbc
