#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "helpers.hpp"
#include "hbc/errors.hpp"
#include "hbc/ingest.hpp"
#include "hbc/session_io.hpp"
#include "hbc/stats.hpp"

using namespace hbc;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto d = fs::temp_directory_path() / ("hbc-ingest-" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

const char* kSidecar = R"({"id":"x","user_id":"u1","session_index":0,"sensor_position":"wrist",
  "sample_rate_hz":20,"acc_unit":"m/s2","label_set":"LEG7"})";

void write(const fs::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

}  // namespace

TEST(LoadSession, ValidThreeFrames) {
  auto d = scratch("valid");
  write(d / "s.csv",
        "t,acc_x,acc_y,acc_z,gyro_x,gyro_y,gyro_z,cap_uV,label\n"
        "0,0,0,9.8,0,0,0,1.5,leg-front-lift\n"
        "0.05,0,0,9.8,0,0,0,2.5,leg-front-lift\n"
        "0.1,0,0,9.8,0,0,0,-1,standard-squat\n");
  write(d / "s.json", kSidecar);
  auto s = load_session(d / "s.csv");
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s.labels[2], 3);
  EXPECT_DOUBLE_EQ(s.frames[1].cap_uV, 2.5);
  EXPECT_EQ(s.user_id, "u1");
}

TEST(LoadSession, MissingColumnNamed) {
  auto d = scratch("missing");
  write(d / "s.csv", "t,acc_y,acc_z,gyro_x,gyro_y,gyro_z,cap_uV,label\n0,0,9.8,0,0,0,1,leg-front-lift\n");
  write(d / "s.json", kSidecar);
  try {
    load_session(d / "s.csv");
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("acc_x"), std::string::npos);
  }
}

TEST(LoadSession, UnknownLabelListed) {
  auto d = scratch("label");
  write(d / "s.csv",
        "t,acc_x,acc_y,acc_z,gyro_x,gyro_y,gyro_z,cap_uV,label\n"
        "0,0,0,9.8,0,0,0,1,moonwalk\n");
  write(d / "s.json", kSidecar);
  try {
    load_session(d / "s.csv");
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    ASSERT_EQ(e.violations().size(), 1u);
    EXPECT_NE(e.violations()[0].find("moonwalk"), std::string::npos);
  }
}

TEST(LoadSession, MalformedRowCarriesLine) {
  auto d = scratch("parse");
  write(d / "s.csv",
        "t,acc_x,acc_y,acc_z,gyro_x,gyro_y,gyro_z,cap_uV,label\n"
        "0,0,0,9.8,0,0,0,1,leg-front-lift\n"
        "0.05,0,zero,9.8,0,0,0,1,leg-front-lift\n");
  write(d / "s.json", kSidecar);
  try {
    load_session(d / "s.csv");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(LoadSession, InvariantsChecked) {
  auto d = scratch("invariant");
  write(d / "s.csv",
        "t,acc_x,acc_y,acc_z,gyro_x,gyro_y,gyro_z,cap_uV,label\n"
        "0,0,0,9.8,0,0,0,1,leg-front-lift\n"
        "0,0,0,9.8,0,0,0,1,leg-front-lift\n");
  write(d / "s.json", kSidecar);
  EXPECT_THROW(load_session(d / "s.csv"), ValidationError);
}

TEST(LoadSession, IntervalAnnotationsExpand) {
  std::string csv = "t,acc_x,acc_y,acc_z,gyro_x,gyro_y,gyro_z,cap_uV,label\n";
  for (int i = 0; i < 10; ++i) csv += std::to_string(i * 0.05) + ",0,0,9.8,0,0,0,0,\n";
  auto side = nlohmann::json::parse(kSidecar);
  side["annotations"] = {{{"start_t", 0.1}, {"end_t", 0.3}, {"label", "jump-squat"}}};
  auto s = parse_session(csv, side);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(s.labels[i], (i >= 2 && i < 6) ? 5 : kDiscard) << i;
}

TEST(LoadSession, SaveLoadRoundTrip) {
  auto d = scratch("roundtrip");
  auto s = test::flat_session(50);
  s.frames[3].cap_uV = 0.1 + 0.2;
  s.frames[4].gyro[1] = -1e-300;
  save_session(s, d / "r.csv");
  auto back = load_session(d / "r.csv");
  EXPECT_EQ(serialize_session_csv(back), serialize_session_csv(s));
  EXPECT_EQ(back.frames[3].cap_uV, s.frames[3].cap_uV);
}

TEST(Detrend, Examples) {
  std::vector<double> a{1, 2, 3};
  EXPECT_EQ(detrend(a, DetrendMode::kMean), (std::vector<double>{-1, 0, 1}));
  std::vector<double> b{2, 4, 6};
  for (double v : detrend(b, DetrendMode::kLinear)) EXPECT_NEAR(v, 0.0, 1e-12);
  std::vector<double> c{5, 5, 5};
  EXPECT_EQ(detrend(c, DetrendMode::kMean), (std::vector<double>{0, 0, 0}));
  std::vector<double> one{1};
  EXPECT_THROW(detrend(one, DetrendMode::kLinear), DomainError);
}

namespace {
// Least-squares line through (i, y_i).
std::pair<double, double> fit_line(const std::vector<double>& y) {
  const double n = static_cast<double>(y.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    sx += i;
    sy += y[i];
    sxx += static_cast<double>(i) * i;
    sxy += i * y[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return {slope, (sy - slope * sx) / n};
}
}  // namespace

TEST(Detrend, PropertiesOnRandomSeries) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> nd(0.0, 50.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> x(2 + trial);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = nd(rng) + 3.0 * i + 100.0;
    double scale = 0;
    for (double v : x) scale = std::max(scale, std::abs(v));
    auto m = detrend(x, DetrendMode::kMean);
    EXPECT_NEAR(stats::mean(m), 0.0, 1e-9 * scale);
    auto l = detrend(x, DetrendMode::kLinear);
    auto [slope, icpt] = fit_line(l);
    EXPECT_NEAR(slope, 0.0, 1e-9 * scale);
    EXPECT_NEAR(icpt, 0.0, 1e-9 * scale);
    auto ll = detrend(l, DetrendMode::kLinear);
    for (std::size_t i = 0; i < l.size(); ++i) EXPECT_NEAR(ll[i], l[i], 1e-9 * scale);
  }
}

namespace {
Session anchored_session() {
  auto s = test::flat_session(100);
  for (std::size_t i = 0; i < 100; ++i) {
    s.labels[i] = i < 50 ? 0 : 3;
    s.frames[i].cap_uV = i < 50 ? -2000.0 + 80.0 * i : 0.5 * static_cast<double>(i) - 7.0;
  }
  return s;
}
}  // namespace

TEST(NormalizeHbc, AnchorRangeMapsToTarget) {
  auto s = anchored_session();  // anchor spans (-2000, 1920) ...
  s.frames[49].cap_uV = 2000.0;  // ... now exactly (-2 mV, 2 mV)
  PreprocessConfig cfg;
  cfg.hbc_anchor_class = 0;
  auto m = hbc_normalization_map(s, cfg);
  EXPECT_DOUBLE_EQ(m.scale, 0.25);
  EXPECT_DOUBLE_EQ(m.offset, 0.0);
  auto n = normalize_session_hbc(s, cfg);
  for (std::size_t i = 0; i < s.size(); ++i) EXPECT_DOUBLE_EQ(n.frames[i].cap_uV, 0.25 * s.frames[i].cap_uV);
}

TEST(NormalizeHbc, FixedPointAndIdempotent) {
  auto s = anchored_session();
  PreprocessConfig cfg;
  cfg.hbc_anchor_class = 0;
  auto once = normalize_session_hbc(s, cfg);
  auto m = hbc_normalization_map(once, cfg);
  EXPECT_NEAR(m.scale, 1.0, 1e-12);
  EXPECT_NEAR(m.offset, 0.0, 1e-9);
  auto twice = normalize_session_hbc(once, cfg);
  for (std::size_t i = 0; i < s.size(); ++i)
    EXPECT_NEAR(twice.frames[i].cap_uV, once.frames[i].cap_uV, 1e-9 * 500.0);
  // Global affine map: ratios of differences survive.
  const double r0 = (s.frames[70].cap_uV - s.frames[10].cap_uV) / (s.frames[30].cap_uV - s.frames[20].cap_uV);
  const double r1 =
      (once.frames[70].cap_uV - once.frames[10].cap_uV) / (once.frames[30].cap_uV - once.frames[20].cap_uV);
  EXPECT_NEAR(r0, r1, 1e-9 * std::abs(r0));
}

TEST(NormalizeHbc, Errors) {
  auto s = anchored_session();
  PreprocessConfig cfg;
  cfg.hbc_anchor_class = 6;
  EXPECT_THROW(normalize_session_hbc(s, cfg), DomainError);
  for (auto& f : s.frames) f.cap_uV = 3.0;
  cfg.hbc_anchor_class = 0;
  EXPECT_THROW(normalize_session_hbc(s, cfg), DomainError);
}

TEST(NormalizeHbc, WholeSessionAnchor) {
  auto s = anchored_session();
  PreprocessConfig cfg;  // no anchor class: whole session
  auto n = normalize_session_hbc(s, cfg);
  double lo = 1e300, hi = -1e300;
  for (const auto& f : n.frames) {
    lo = std::min(lo, f.cap_uV);
    hi = std::max(hi, f.cap_uV);
  }
  EXPECT_NEAR(lo, -500.0, 1e-9);
  EXPECT_NEAR(hi, 500.0, 1e-9);
}

TEST(PreprocessConfig, Validation) {
  PreprocessConfig cfg;
  cfg.hbc_norm_range = {1.0, 1.0};
  EXPECT_THROW(cfg.validate(), DomainError);
  cfg = {};
  cfg.feature_clip = {0.5, 0.4};
  EXPECT_THROW(cfg.validate(), DomainError);
  EXPECT_EQ(default_preprocess(LabelSetId::kLeg7).hbc_anchor_class, 0);
  EXPECT_FALSE(default_preprocess(LabelSetId::kGym12).hbc_anchor_class.has_value());
  EXPECT_EQ(default_preprocess(LabelSetId::kCollab).detrend, DetrendMode::kLinear);
}
