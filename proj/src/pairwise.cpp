#include "hbc/pairwise.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <tuple>

#include "hbc/errors.hpp"

namespace hbc {

PairTimeline align_sessions(const Session& a, const Session& b) {
  if (a.frames.empty() || b.frames.empty()) throw DomainError("alignment: empty session");
  const double period = 1.0 / a.sample_rate_hz;
  const double tol = period * (1.0 + 1e-9);
  const double lo = std::max(a.frames.front().t, b.frames.front().t);
  const double hi = std::min(a.frames.back().t, b.frames.back().t);
  if (lo > hi + tol)
    throw DomainError("alignment: sessions '" + a.id + "' and '" + b.id + "' do not overlap in time");

  std::vector<double> tb(b.frames.size());
  for (std::size_t i = 0; i < tb.size(); ++i) tb[i] = b.frames[i].t;

  PairTimeline t;
  t.session_a = a.id;
  t.session_b = b.id;
  t.user_a = a.user_id;
  t.user_b = b.user_id;
  for (std::size_t i = 0; i < a.frames.size(); ++i) {
    const double ta = a.frames[i].t;
    if (ta < lo - tol || ta > hi + tol) continue;
    auto it = std::lower_bound(tb.begin(), tb.end(), ta);
    std::ptrdiff_t best = -1;
    double best_d = tol;
    // Earlier candidate first so exact ties keep it.
    if (it != tb.begin()) {
      const auto j = (it - tb.begin()) - 1;
      const double d = ta - tb[static_cast<std::size_t>(j)];
      if (d <= best_d) {
        best = j;
        best_d = d;
      }
    }
    if (it != tb.end()) {
      const auto j = it - tb.begin();
      const double d = tb[static_cast<std::size_t>(j)] - ta;
      // Distances equal up to rounding count as a tie.
      if (d <= tol && (best < 0 || d < best_d - period * 1e-9)) best = j;
    }
    t.a_index.push_back(i);
    t.b_index.push_back(best);
    t.labels_a.push_back(a.labels[i]);
    t.labels_b.push_back(best < 0 ? kDiscard : b.labels[static_cast<std::size_t>(best)]);
  }
  if (t.a_index.empty()) throw DomainError("alignment: no overlapping frames");
  return t;
}

ClassMapping identity_mapping(const LabelSet& set) {
  ClassMapping m;
  m.mode = MappingMode::kIdentity;
  m.target = set;
  for (std::size_t i = 0; i < set.size(); ++i) m.table[static_cast<LabelId>(i)] = static_cast<LabelId>(i);
  return m;
}

ClassMapping single_user_mapping(bool hard) {
  using namespace collab;
  ClassMapping m;
  m.mode = MappingMode::kSingleUser;
  m.hard_lift_drop = hard;
  m.target.id = LabelSetId::kCollab;
  m.target.class_names = {"Null", "A3", "A4", "A5"};
  if (hard) {
    m.target.class_names.push_back("A6");
    m.target.class_names.push_back("A7");
  }
  m.target.null_class = 0;
  m.table = {{kStartStop, kDiscard}, {kDoingNothing, 0},    {kWalkAlone, 1},     {kCarryAlone, 2},
             {kCarryTogether, 3},    {kLift, hard ? 4 : 0}, {kDrop, hard ? 5 : 0}, {kTurnScrew, 0},
             {kNoDefinition, kDiscard}, {kOutOfCamera, kDiscard}};
  return m;
}

ClassMapping pairwise_mapping(bool hard) {
  ClassMapping m;
  m.mode = MappingMode::kPairwise;
  m.hard_lift_drop = hard;
  m.target.id = LabelSetId::kCollab;
  m.target.class_names = {"Null", "CarryTogether"};
  if (hard) {
    m.target.class_names.push_back("LiftTogether");
    m.target.class_names.push_back("DropTogether");
  }
  m.target.null_class = pair_class::kNull;
  m.table = {{pair_class::kNull, pair_class::kNull},
             {pair_class::kCarryTogether, pair_class::kCarryTogether},
             {pair_class::kLiftTogether, hard ? pair_class::kLiftTogether : pair_class::kNull},
             {pair_class::kDropTogether, hard ? pair_class::kDropTogether : pair_class::kNull}};
  return m;
}

std::vector<LabelId> remap_labels(std::span<const LabelId> labels, const ClassMapping& m) {
  std::vector<LabelId> out;
  out.reserve(labels.size());
  for (LabelId l : labels) {
    if (l == kDiscard) {
      out.push_back(kDiscard);
      continue;
    }
    auto it = m.table.find(l);
    if (it == m.table.end()) throw SchemaError("class mapping does not cover label " + std::to_string(l));
    out.push_back(it->second);
  }
  return out;
}

LabelId joint_label(LabelId a, LabelId b, bool hard) {
  using namespace collab;
  auto excluded = [](LabelId l) { return l == kDiscard || l == kStartStop || l == kNoDefinition || l == kOutOfCamera; };
  if (excluded(a) || excluded(b)) return kDiscard;
  if (a == kCarryTogether && b == kCarryTogether) return pair_class::kCarryTogether;
  if (hard && a == kLift && b == kLift) return pair_class::kLiftTogether;
  if (hard && a == kDrop && b == kDrop) return pair_class::kDropTogether;
  return pair_class::kNull;
}

std::vector<LabelId> derive_pair_labels(const PairTimeline& t, const ClassMapping& pairwise) {
  std::vector<LabelId> out(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) out[i] = joint_label(t.labels_a[i], t.labels_b[i], pairwise.hard_lift_drop);
  return out;
}

ManifestPtr pair_manifest(const ManifestPtr& base) {
  static std::mutex mu;
  static std::map<std::uint64_t, ManifestPtr> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(base->hash());
  if (it != cache.end()) return it->second;
  std::vector<FeatureSpec> specs;
  specs.reserve(base->size() * 4);
  for (const char* block : {"u1_", "u2_", "mean_", "absdiff_"})
    for (const auto& s : base->specs()) specs.push_back({block + s.name, std::string(block) + "(" + s.formula + ")", s.source});
  auto m = std::make_shared<const FeatureManifest>("pair4x-" + base->version(), std::move(specs));
  cache.emplace(base->hash(), m);
  return m;
}

FeatureVector pair_features(const FeatureVector& fa, const FeatureVector& fb) {
  if (!fa.manifest || !fb.manifest || fa.manifest->hash() != fb.manifest->hash())
    throw SchemaError("pair_features: feature manifests differ");
  if (fa.values.size() != fb.values.size()) throw SchemaError("pair_features: vector sizes differ");
  const bool swap = std::tie(fb.user_id, fb.session_id, fb.values) < std::tie(fa.user_id, fa.session_id, fa.values);
  const FeatureVector& u1 = swap ? fb : fa;
  const FeatureVector& u2 = swap ? fa : fb;
  FeatureVector out;
  out.manifest = pair_manifest(fa.manifest);
  const std::size_t d = fa.values.size();
  out.values.resize(4 * d);
  for (std::size_t i = 0; i < d; ++i) {
    out.values[i] = u1.values[i];
    out.values[d + i] = u2.values[i];
    out.values[2 * d + i] = (u1.values[i] + u2.values[i]) / 2.0;
    out.values[3 * d + i] = std::abs(u1.values[i] - u2.values[i]);
  }
  out.label = fa.label;
  out.weight = fa.weight;
  out.session_id = u1.session_id + "+" + u2.session_id;
  out.user_id = u1.user_id + "+" + u2.user_id;
  out.window_start = fa.window_start;
  return out;
}

std::vector<SessionPair> enumerate_pairs(std::span<const Session> sessions) {
  std::map<std::pair<std::string, int>, std::vector<const Session*>> groups;
  for (const auto& s : sessions) {
    if (s.group_id.empty()) throw SchemaError("enumerate_pairs: session '" + s.id + "' has no group id");
    groups[{s.group_id, s.session_index}].push_back(&s);
  }
  std::vector<SessionPair> out;
  for (auto& [key, members] : groups) {
    std::sort(members.begin(), members.end(),
              [](const Session* x, const Session* y) { return std::tie(x->user_id, x->id) < std::tie(y->user_id, y->id); });
    for (std::size_t i = 0; i < members.size(); ++i)
      for (std::size_t j = i + 1; j < members.size(); ++j) out.push_back({members[i]->id, members[j]->id, key.first});
  }
  return out;
}

nlohmann::json pairs_to_json(const std::vector<SessionPair>& pairs) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& p : pairs) arr.push_back({{"session_a", p.session_a}, {"session_b", p.session_b}, {"group", p.group_id}});
  return {{"format_version", 1}, {"pairs", arr}};
}

std::vector<SessionPair> pairs_from_json(const nlohmann::json& j) {
  try {
    std::vector<SessionPair> out;
    for (const auto& p : j.at("pairs"))
      out.push_back({p.at("session_a").get<std::string>(), p.at("session_b").get<std::string>(),
                     p.at("group").get<std::string>()});
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("malformed pair manifest: ") + e.what());
  }
}

}  // namespace hbc
