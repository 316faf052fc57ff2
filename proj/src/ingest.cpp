#include "hbc/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "hbc/errors.hpp"
#include "hbc/session_io.hpp"

namespace hbc {

DetrendMode detrend_mode_from_string(std::string_view s) {
  if (s == "none") return DetrendMode::kNone;
  if (s == "mean") return DetrendMode::kMean;
  if (s == "linear") return DetrendMode::kLinear;
  throw SchemaError("unknown detrend mode '" + std::string(s) + "'");
}

std::string_view to_string(DetrendMode m) {
  switch (m) {
    case DetrendMode::kNone: return "none";
    case DetrendMode::kMean: return "mean";
    case DetrendMode::kLinear: return "linear";
  }
  return "?";
}

void PreprocessConfig::validate() const {
  if (!(hbc_norm_range.first < hbc_norm_range.second))
    throw DomainError("hbc_norm_range requires lo < hi");
  if (!(feature_clip.first >= 0.0 && feature_clip.first < feature_clip.second && feature_clip.second <= 1.0))
    throw DomainError("feature_clip requires 0 <= lo_q < hi_q <= 1");
}

PreprocessConfig default_preprocess(LabelSetId id) {
  PreprocessConfig cfg;
  switch (id) {
    case LabelSetId::kLeg7:
      cfg.hbc_anchor_class = 0;  // leg-front-lift
      break;
    case LabelSetId::kGym12:
      break;
    case LabelSetId::kCollab:
      cfg.detrend = DetrendMode::kLinear;
      break;
  }
  return cfg;
}

Session load_session(const std::filesystem::path& csv_path) {
  const std::string csv = read_file(csv_path);
  const auto side = sidecar_path(csv_path);
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(read_file(side));
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError("sidecar " + side.string() + " is not valid JSON: " + e.what());
  }
  Session s = parse_session(csv, meta);
  auto violations = validate_session(s);
  if (!violations.empty()) {
    std::vector<std::string> msgs;
    for (auto& v : violations) msgs.push_back(v.message);
    throw ValidationError(std::move(msgs));
  }
  return s;
}

void save_session(const Session& s, const std::filesystem::path& csv_path) {
  write_file_atomic(csv_path, serialize_session_csv(s));
  write_file_atomic(sidecar_path(csv_path), session_sidecar(s).dump(2) + "\n");
}

std::vector<double> detrend(std::span<const double> series, DetrendMode mode) {
  std::vector<double> out(series.begin(), series.end());
  if (mode == DetrendMode::kNone || out.empty()) return out;
  const auto n = static_cast<double>(out.size());
  if (mode == DetrendMode::kMean) {
    const double mean = std::accumulate(out.begin(), out.end(), 0.0) / n;
    for (double& v : out) v -= mean;
    return out;
  }
  if (out.size() < 2) throw DomainError("linear detrend needs at least two samples");
  // Least squares on centred abscissa.
  const double t_mean = (n - 1.0) / 2.0;
  const double y_mean = std::accumulate(out.begin(), out.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double dt = static_cast<double>(i) - t_mean;
    sxy += dt * (out[i] - y_mean);
    sxx += dt * dt;
  }
  const double slope = sxy / sxx;
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] -= y_mean + slope * (static_cast<double>(i) - t_mean);
  return out;
}

AffineMap hbc_normalization_map(const Session& s, const PreprocessConfig& cfg) {
  cfg.validate();
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  std::size_t anchors = 0;
  for (std::size_t i = 0; i < s.frames.size(); ++i) {
    if (cfg.hbc_anchor_class && s.labels[i] != *cfg.hbc_anchor_class) continue;
    lo = std::min(lo, s.frames[i].cap_uV);
    hi = std::max(hi, s.frames[i].cap_uV);
    ++anchors;
  }
  if (anchors == 0) throw DomainError("session " + s.id + " has no frames of the HBC anchor class");
  if (!(hi > lo)) throw DomainError("session " + s.id + " has a constant HBC anchor segment");
  const auto [target_lo, target_hi] = cfg.hbc_norm_range;
  AffineMap m;
  m.scale = (target_hi - target_lo) / (hi - lo);
  m.offset = target_lo - m.scale * lo;
  return m;
}

Session normalize_session_hbc(const Session& s, const PreprocessConfig& cfg) {
  const AffineMap m = hbc_normalization_map(s, cfg);
  Session out = s;
  for (auto& f : out.frames) f.cap_uV = m(f.cap_uV);
  return out;
}

Session preprocess_session(const Session& s, const PreprocessConfig& cfg) {
  Session out = s;
  if (cfg.detrend != DetrendMode::kNone) {
    auto apply = [&](auto getter) {
      std::vector<double> v;
      v.reserve(out.frames.size());
      for (auto& f : out.frames) v.push_back(getter(f));
      v = detrend(v, cfg.detrend);
      for (std::size_t i = 0; i < v.size(); ++i) getter(out.frames[i]) = v[i];
    };
    apply([](SampleFrame& f) -> double& { return f.cap_uV; });
    for (int a = 0; a < 3; ++a) apply([a](SampleFrame& f) -> double& { return f.acc[a]; });
  }
  if (cfg.normalize_hbc) out = normalize_session_hbc(out, cfg);
  return out;
}

}  // namespace hbc
