#include "hbc/types.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include "hbc/errors.hpp"

namespace hbc {

std::string_view to_string(LabelSetId id) {
  switch (id) {
    case LabelSetId::kLeg7: return "LEG7";
    case LabelSetId::kGym12: return "GYM12";
    case LabelSetId::kCollab: return "COLLAB";
  }
  return "?";
}

std::string_view to_string(SensorPosition p) {
  switch (p) {
    case SensorPosition::kWrist: return "wrist";
    case SensorPosition::kCalf: return "calf";
    case SensorPosition::kPocket: return "pocket";
  }
  return "?";
}

std::string_view to_string(AccUnit u) {
  return u == AccUnit::kG ? "g" : "m/s2";
}

LabelSetId label_set_id_from_string(std::string_view s) {
  if (s == "LEG7") return LabelSetId::kLeg7;
  if (s == "GYM12") return LabelSetId::kGym12;
  if (s == "COLLAB") return LabelSetId::kCollab;
  throw SchemaError("unknown label set '" + std::string(s) + "'");
}

SensorPosition sensor_position_from_string(std::string_view s) {
  if (s == "wrist") return SensorPosition::kWrist;
  if (s == "calf") return SensorPosition::kCalf;
  if (s == "pocket") return SensorPosition::kPocket;
  throw SchemaError("unknown sensor position '" + std::string(s) + "'");
}

AccUnit acc_unit_from_string(std::string_view s) {
  if (s == "g") return AccUnit::kG;
  if (s == "m/s2") return AccUnit::kMetersPerSecond2;
  throw SchemaError("unknown accelerometer unit '" + std::string(s) + "'");
}

std::optional<LabelId> LabelSet::find(std::string_view name) const {
  if (name == kDiscardName) return kDiscard;
  for (std::size_t i = 0; i < class_names.size(); ++i)
    if (class_names[i] == name) return static_cast<LabelId>(i);
  return std::nullopt;
}

LabelId LabelSet::id_of(std::string_view name) const {
  if (auto id = find(name)) return *id;
  throw SchemaError("label '" + std::string(name) + "' is not in label set " + std::string(to_string(id)));
}

std::string_view LabelSet::name_of(LabelId l) const {
  if (l == kDiscard) return kDiscardName;
  if (!contains(l)) throw SchemaError("label id " + std::to_string(l) + " out of range");
  return class_names[static_cast<std::size_t>(l)];
}

const LabelSet& label_set(LabelSetId id) {
  static const LabelSet leg7{LabelSetId::kLeg7,
                             {"leg-front-lift", "leg-side-lift", "leg-back-lift", "standard-squat",
                              "cross-squat", "jump-squat", "side-squat"},
                             std::nullopt};
  static const LabelSet gym12{LabelSetId::kGym12,
                              {"Adductor", "Armcurl", "Benchpress", "Legcurl", "Legpress", "Riding",
                               "Ropeskipping", "Running", "Squat", "Stairsclimber", "Walking", "Null"},
                              11};
  static const LabelSet collab_set{LabelSetId::kCollab,
                                   {"A1", "A2", "A3", "A4", "A5", "A6", "A7", "A8", "A9", "A10"},
                                   std::nullopt};
  switch (id) {
    case LabelSetId::kLeg7: return leg7;
    case LabelSetId::kGym12: return gym12;
    case LabelSetId::kCollab: return collab_set;
  }
  throw SchemaError("unknown label set");
}

std::vector<Violation> validate_session(const Session& s) {
  std::vector<Violation> out;
  if (!(s.sample_rate_hz > 0.0) || !std::isfinite(s.sample_rate_hz))
    out.push_back({"sample_rate_hz must be positive", std::nullopt});
  if (s.labels.size() != s.frames.size()) {
    out.push_back({"length mismatch: " + std::to_string(s.labels.size()) + " labels vs " +
                       std::to_string(s.frames.size()) + " frames",
                   std::min(s.labels.size(), s.frames.size())});
  }

  const auto finite = [](const SampleFrame& f) {
    if (!std::isfinite(f.t) || !std::isfinite(f.cap_uV)) return false;
    for (double v : f.acc)
      if (!std::isfinite(v)) return false;
    for (double v : f.gyro)
      if (!std::isfinite(v)) return false;
    return true;
  };
  for (std::size_t i = 0; i < s.frames.size(); ++i) {
    if (!finite(s.frames[i])) {
      out.push_back({"non-finite value at " + std::to_string(i), i});
      break;
    }
  }
  for (std::size_t i = 1; i < s.frames.size(); ++i) {
    if (!(s.frames[i].t > s.frames[i - 1].t)) {
      out.push_back({"non-monotonic time at " + std::to_string(i), i});
      break;
    }
  }

  const LabelSet& ls = label_set(s.label_set);
  for (std::size_t i = 0; i < s.labels.size(); ++i) {
    LabelId l = s.labels[i];
    if (l != kDiscard && !ls.contains(l)) {
      out.push_back({"label " + std::to_string(l) + " not in " + std::string(to_string(s.label_set)) +
                         " at " + std::to_string(i),
                     i});
      break;
    }
  }

  for (std::size_t k = 0; k < s.segments.size(); ++k) {
    const Segment& seg = s.segments[k];
    if (seg.begin >= seg.end || seg.end > s.frames.size() || !ls.contains(seg.label)) {
      out.push_back({"invalid segment " + std::to_string(k), seg.begin});
      break;
    }
  }
  return out;
}

std::vector<double> extract_channel(const Session& s, std::string_view name, std::size_t begin,
                                    std::size_t end) {
  if (begin > end || end > s.frames.size()) throw DomainError("channel range out of bounds");
  std::vector<double> out;
  out.reserve(end - begin);
  auto pick = [&](auto fn) {
    for (std::size_t i = begin; i < end; ++i) out.push_back(fn(s.frames[i]));
  };
  if (name == channel::kCap) pick([](const SampleFrame& f) { return f.cap_uV; });
  else if (name == channel::kAccX) pick([](const SampleFrame& f) { return f.acc[0]; });
  else if (name == channel::kAccY) pick([](const SampleFrame& f) { return f.acc[1]; });
  else if (name == channel::kAccZ) pick([](const SampleFrame& f) { return f.acc[2]; });
  else if (name == channel::kGyroX) pick([](const SampleFrame& f) { return f.gyro[0]; });
  else if (name == channel::kGyroY) pick([](const SampleFrame& f) { return f.gyro[1]; });
  else if (name == channel::kGyroZ) pick([](const SampleFrame& f) { return f.gyro[2]; });
  else throw SchemaError("unknown channel '" + std::string(name) + "'");
  return out;
}

const std::vector<double>& Window::channel(std::string_view name) const {
  auto it = channels.find(name);
  if (it == channels.end()) throw SchemaError("window is missing channel '" + std::string(name) + "'");
  return it->second;
}

}  // namespace hbc
