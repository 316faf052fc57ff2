#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hbc {

// Per-frame label id. Non-negative ids index into the session's LabelSet.
using LabelId = int;

// Frames with missing or out-of-scope data. Never part of a window.
inline constexpr LabelId kDiscard = -1;
inline constexpr std::string_view kDiscardName = "DISCARD";

enum class LabelSetId { kLeg7, kGym12, kCollab };
enum class SensorPosition { kWrist, kCalf, kPocket };
enum class AccUnit { kMetersPerSecond2, kG };

std::string_view to_string(LabelSetId id);
std::string_view to_string(SensorPosition p);
std::string_view to_string(AccUnit u);
LabelSetId label_set_id_from_string(std::string_view s);
SensorPosition sensor_position_from_string(std::string_view s);
AccUnit acc_unit_from_string(std::string_view s);

struct LabelSet {
  LabelSetId id;
  std::vector<std::string> class_names;
  std::optional<LabelId> null_class;

  std::size_t size() const { return class_names.size(); }
  bool contains(LabelId l) const { return l >= 0 && static_cast<std::size_t>(l) < class_names.size(); }
  // Throws SchemaError for unknown names. "DISCARD" maps to kDiscard.
  LabelId id_of(std::string_view name) const;
  std::optional<LabelId> find(std::string_view name) const;
  // "DISCARD" for kDiscard.
  std::string_view name_of(LabelId l) const;
};

const LabelSet& label_set(LabelSetId id);

// Collaboration activity ids, in table order (A1 = 0).
namespace collab {
inline constexpr LabelId kStartStop = 0;     // A1
inline constexpr LabelId kDoingNothing = 1;  // A2
inline constexpr LabelId kWalkAlone = 2;     // A3
inline constexpr LabelId kCarryAlone = 3;    // A4
inline constexpr LabelId kCarryTogether = 4; // A5
inline constexpr LabelId kLift = 5;          // A6
inline constexpr LabelId kDrop = 6;          // A7
inline constexpr LabelId kTurnScrew = 7;     // A8
inline constexpr LabelId kNoDefinition = 8;  // A9
inline constexpr LabelId kOutOfCamera = 9;   // A10
}  // namespace collab

struct SampleFrame {
  double t = 0.0;                    // seconds
  std::array<double, 3> acc{};       // unit declared by Session::acc_unit
  std::array<double, 3> gyro{};      // deg/s
  double cap_uV = 0.0;               // body-potential deviation
};

// Annotated exercise segment with its ground-truth repetition count,
// frame range [begin, end).
struct Segment {
  LabelId label = kDiscard;
  std::size_t begin = 0;
  std::size_t end = 0;
  int repetitions = 0;
};

struct Session {
  std::string id;
  std::string user_id;
  int session_index = 0;
  std::string group_id;  // collaboration group, empty otherwise
  SensorPosition position = SensorPosition::kWrist;
  double sample_rate_hz = 20.0;
  AccUnit acc_unit = AccUnit::kMetersPerSecond2;
  LabelSetId label_set = LabelSetId::kLeg7;
  std::vector<SampleFrame> frames;
  std::vector<LabelId> labels;
  std::vector<Segment> segments;

  std::size_t size() const { return frames.size(); }
};

struct Violation {
  std::string message;
  std::optional<std::size_t> frame;
};

// Empty iff every Session invariant holds.
std::vector<Violation> validate_session(const Session& s);

// Raw channel names shared by windows, features and counting.
namespace channel {
inline constexpr std::string_view kCap = "cap";
inline constexpr std::string_view kAccX = "acc_x";
inline constexpr std::string_view kAccY = "acc_y";
inline constexpr std::string_view kAccZ = "acc_z";
inline constexpr std::string_view kGyroX = "gyro_x";
inline constexpr std::string_view kGyroY = "gyro_y";
inline constexpr std::string_view kGyroZ = "gyro_z";
inline constexpr std::array<std::string_view, 7> kAll = {kCap, kAccX, kAccY, kAccZ, kGyroX, kGyroY, kGyroZ};
}  // namespace channel

// Copies one raw channel of frames [begin, end) out of a session.
std::vector<double> extract_channel(const Session& s, std::string_view name, std::size_t begin,
                                    std::size_t end);
inline std::vector<double> extract_channel(const Session& s, std::string_view name) {
  return extract_channel(s, name, 0, s.size());
}

struct Window {
  std::string session_id;
  std::size_t start_index = 0;
  std::size_t length_samples = 0;
  std::map<std::string, std::vector<double>, std::less<>> channels;
  std::vector<LabelId> frame_labels;
  LabelId label = kDiscard;
  double weight = 1.0;

  const std::vector<double>& channel(std::string_view name) const;
};

}  // namespace hbc
