#pragma once

#include <map>
#include <string>
#include <vector>

#include "hbc/features.hpp"
#include "hbc/types.hpp"
#include "json.hpp"

namespace hbc {

// Frame-level pairing of two users' sessions on a common time base. The
// timeline follows a's sample grid over the overlap of both recordings.
struct PairTimeline {
  std::string session_a, session_b;
  std::string user_a, user_b;
  std::vector<std::size_t> a_index;
  std::vector<std::ptrdiff_t> b_index;  // -1: no b frame within one period
  std::vector<LabelId> labels_a;        // source labels per aligned frame
  std::vector<LabelId> labels_b;        // DISCARD where unmatched

  std::size_t size() const { return a_index.size(); }
};

// Nearest-timestamp pairing within +-1 sample period of a; exact ties go to
// the earlier b frame. Throws DomainError when the recordings do not overlap.
PairTimeline align_sessions(const Session& a, const Session& b);

enum class MappingMode { kIdentity, kSingleUser, kPairwise };

// Total mapping from source label ids to a target label space.
struct ClassMapping {
  MappingMode mode = MappingMode::kIdentity;
  bool hard_lift_drop = true;
  LabelSet target;
  std::map<LabelId, LabelId> table;  // DISCARD always maps to DISCARD
};

ClassMapping identity_mapping(const LabelSet& set);
// A2, A8 -> Null; A3..A7 kept (A6, A7 -> Null unless hard_lift_drop);
// A1, A9, A10 -> DISCARD.
ClassMapping single_user_mapping(bool hard_lift_drop);
// Target classes Null, CarryTogether, LiftTogether, DropTogether (the last
// two folded into Null unless hard_lift_drop). Source labels are the
// collaboration ids; the table maps the joint classes onto themselves so
// remap_labels can fold them.
ClassMapping pairwise_mapping(bool hard_lift_drop);

namespace pair_class {
inline constexpr LabelId kNull = 0;
inline constexpr LabelId kCarryTogether = 1;
inline constexpr LabelId kLiftTogether = 2;
inline constexpr LabelId kDropTogether = 3;
}  // namespace pair_class

// Throws SchemaError for a label the mapping does not cover.
std::vector<LabelId> remap_labels(std::span<const LabelId> labels, const ClassMapping& m);

// Joint label of one frame from the two users' collaboration labels:
// both A5 -> CarryTogether, both A6 -> LiftTogether, both A7 ->
// DropTogether; either user DISCARD, A1, A9 or A10 -> DISCARD; otherwise
// Null. Lift/Drop Together fold into Null unless hard_lift_drop.
LabelId joint_label(LabelId a, LabelId b, bool hard_lift_drop);
std::vector<LabelId> derive_pair_labels(const PairTimeline& t, const ClassMapping& pairwise);

// [u1 | u2 | (u1+u2)/2 | |u1-u2|] with users ordered by user id (then
// session id, then values), so argument order never matters. Throws
// SchemaError when the manifests differ.
FeatureVector pair_features(const FeatureVector& fa, const FeatureVector& fb);
ManifestPtr pair_manifest(const ManifestPtr& base);

struct SessionPair {
  std::string session_a;
  std::string session_b;
  std::string group_id;
};

// All unordered pairs of sessions sharing (group id, session index),
// ordered by user id within a pair.
std::vector<SessionPair> enumerate_pairs(std::span<const Session> sessions);
nlohmann::json pairs_to_json(const std::vector<SessionPair>& pairs);
std::vector<SessionPair> pairs_from_json(const nlohmann::json& j);

}  // namespace hbc
