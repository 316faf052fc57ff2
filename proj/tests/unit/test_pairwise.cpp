#include <gtest/gtest.h>

#include <random>

#include "helpers.hpp"
#include "hbc/errors.hpp"
#include "hbc/pairwise.hpp"

using namespace hbc;
namespace cl = hbc::collab;

namespace {

Session collab_session(std::size_t n, double t0, const std::string& user, LabelId fill = cl::kWalkAlone) {
  auto s = test::flat_session(n, fill, 20.0, LabelSetId::kCollab);
  for (std::size_t i = 0; i < n; ++i) s.frames[i].t = t0 + i / 20.0;
  s.user_id = user;
  s.id = "sess-" + user;
  return s;
}

}  // namespace

TEST(Align, IdenticalGrids) {
  auto a = collab_session(100, 0.0, "a");
  auto b = collab_session(100, 0.0, "b");
  auto t = align_sessions(a, b);
  ASSERT_EQ(t.size(), 100u);
  for (std::size_t i = 0; i < t.size(); ++i) {
    EXPECT_EQ(t.a_index[i], i);
    EXPECT_EQ(t.b_index[i], static_cast<std::ptrdiff_t>(i));
  }
}

TEST(Align, HalfPeriodShiftBruteForce) {
  auto a = collab_session(100, 0.0, "a");
  auto b = collab_session(100, 0.025, "b");
  auto t = align_sessions(a, b);
  for (std::size_t i = 0; i < t.size(); ++i) {
    ASSERT_GE(t.b_index[i], 0) << i;
    // Brute force nearest b frame, earliest on ties.
    const double ta = a.frames[t.a_index[i]].t;
    std::size_t best = 0;
    for (std::size_t j = 1; j < b.size(); ++j)
      if (std::abs(b.frames[j].t - ta) < std::abs(b.frames[best].t - ta) - 1e-12) best = j;
    EXPECT_EQ(t.b_index[i], static_cast<std::ptrdiff_t>(best));
  }
}

TEST(Align, DisjointRangesFail) {
  auto a = collab_session(50, 0.0, "a");
  auto b = collab_session(50, 100.0, "b");
  EXPECT_THROW(align_sessions(a, b), DomainError);
}

TEST(JointLabels, Definitions) {
  EXPECT_EQ(joint_label(cl::kCarryTogether, cl::kCarryTogether, true), pair_class::kCarryTogether);
  EXPECT_EQ(joint_label(cl::kLift, cl::kLift, true), pair_class::kLiftTogether);
  EXPECT_EQ(joint_label(cl::kDrop, cl::kDrop, true), pair_class::kDropTogether);
  EXPECT_EQ(joint_label(cl::kLift, cl::kLift, false), pair_class::kNull);
  EXPECT_EQ(joint_label(cl::kLift, cl::kWalkAlone, true), pair_class::kNull);
  EXPECT_EQ(joint_label(cl::kCarryTogether, cl::kCarryAlone, true), pair_class::kNull);
  EXPECT_EQ(joint_label(cl::kStartStop, cl::kWalkAlone, true), kDiscard);
  EXPECT_EQ(joint_label(cl::kWalkAlone, kDiscard, true), kDiscard);
}

TEST(JointLabels, LiftOverlapInterval) {
  auto a = collab_session(200, 0.0, "a");
  auto b = collab_session(200, 0.0, "b");
  for (std::size_t i = 100; i <= 140; ++i) a.labels[i] = cl::kLift;
  for (std::size_t i = 120; i <= 160; ++i) b.labels[i] = cl::kLift;
  auto labels = derive_pair_labels(align_sessions(a, b), pairwise_mapping(true));
  for (std::size_t i = 0; i < 200; ++i)
    EXPECT_EQ(labels[i], (i >= 120 && i <= 140) ? pair_class::kLiftTogether : pair_class::kNull) << i;
}

TEST(JointLabels, SymmetricAndCarrySubset) {
  std::mt19937_64 rng(3);
  const LabelId pool[] = {kDiscard, cl::kStartStop, cl::kDoingNothing, cl::kWalkAlone, cl::kCarryAlone,
                          cl::kCarryTogether, cl::kLift, cl::kDrop, cl::kTurnScrew, cl::kNoDefinition};
  for (int i = 0; i < 5000; ++i) {
    LabelId a = pool[rng() % 10], b = pool[rng() % 10];
    for (bool hard : {true, false}) {
      auto j = joint_label(a, b, hard);
      EXPECT_EQ(j, joint_label(b, a, hard));
      if (j == pair_class::kCarryTogether) EXPECT_TRUE(a == cl::kCarryTogether && b == cl::kCarryTogether);
    }
  }
}

TEST(Remap, Examples) {
  auto soft = single_user_mapping(false);
  std::vector<LabelId> in{cl::kWalkAlone, cl::kLift, cl::kCarryTogether};
  auto out = remap_labels(in, soft);
  const auto& t = soft.target;
  EXPECT_EQ(t.name_of(out[0]), "A3");
  EXPECT_EQ(t.name_of(out[1]), "Null");
  EXPECT_EQ(t.name_of(out[2]), "A5");
  std::vector<LabelId> idle{cl::kDoingNothing, cl::kTurnScrew};
  for (auto l : remap_labels(idle, single_user_mapping(true))) EXPECT_EQ(single_user_mapping(true).target.name_of(l), "Null");
  std::vector<LabelId> drop{cl::kStartStop, cl::kOutOfCamera};
  for (auto l : remap_labels(drop, soft)) EXPECT_EQ(l, kDiscard);
  auto id = identity_mapping(label_set(LabelSetId::kCollab));
  EXPECT_EQ(remap_labels(in, id), in);
  std::vector<LabelId> unknown{42};
  EXPECT_THROW(remap_labels(unknown, soft), SchemaError);
}

TEST(Remap, LengthPreservedAndIdempotent) {
  auto pw = pairwise_mapping(false);
  std::vector<LabelId> pairs{pair_class::kNull, pair_class::kLiftTogether, pair_class::kCarryTogether,
                             pair_class::kDropTogether, kDiscard};
  auto once = remap_labels(pairs, pw);
  ASSERT_EQ(once.size(), pairs.size());
  EXPECT_EQ(once[1], pair_class::kNull);
  EXPECT_EQ(once[3], pair_class::kNull);
  EXPECT_EQ(once[4], kDiscard);
  EXPECT_EQ(remap_labels(once, pw), once);
}

TEST(PairFeatures, Contract) {
  FeatureVector fa, fb;
  fa.manifest = fb.manifest = leg_manifest();
  fa.values.assign(126, 1.0);
  fb.values.assign(126, 3.0);
  fa.user_id = "zed";
  fb.user_id = "amy";
  auto ab = pair_features(fa, fb);
  auto ba = pair_features(fb, fa);
  EXPECT_EQ(ab.values, ba.values);
  ASSERT_EQ(ab.values.size(), 4u * 126);
  EXPECT_EQ(ab.values[0], 3.0);  // amy first
  EXPECT_EQ(ab.values[2 * 126], 2.0);
  EXPECT_EQ(ab.values[3 * 126], 2.0);
  EXPECT_EQ(ab.manifest->size(), 504u);
  auto same = pair_features(fa, fa);
  for (std::size_t i = 3 * 126; i < 4 * 126; ++i) EXPECT_EQ(same.values[i], 0.0);
  FeatureVector other;
  other.manifest = gym_manifest();
  other.values.assign(615, 0.0);
  EXPECT_THROW(pair_features(fa, other), SchemaError);
}

TEST(Pairs, EnumerateAndJson) {
  std::vector<Session> ss;
  for (int g = 0; g < 2; ++g)
    for (int d = 0; d < 2; ++d)
      for (int u = 0; u < 3; ++u) {
        auto s = collab_session(10, 0.0, "g" + std::to_string(g) + "-u" + std::to_string(u));
        s.id = "g" + std::to_string(g) + "-d" + std::to_string(d) + "-u" + std::to_string(u);
        s.group_id = "g" + std::to_string(g);
        s.session_index = d;
        ss.push_back(s);
      }
  auto pairs = enumerate_pairs(ss);
  EXPECT_EQ(pairs.size(), 2u * 2 * 3);
  for (const auto& p : pairs) EXPECT_LT(p.session_a, p.session_b);
  auto back = pairs_from_json(pairs_to_json(pairs));
  ASSERT_EQ(back.size(), pairs.size());
  EXPECT_EQ(back[3].session_b, pairs[3].session_b);
  EXPECT_EQ(back[3].group_id, pairs[3].group_id);
}
