#include "hbc/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "hbc/errors.hpp"
#include "hbc/rng.hpp"
#include "hbc/session_io.hpp"

namespace hbc {

namespace {

using nlohmann::json;

// Typed access to one JSON object that rejects keys nobody asked about.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + " must be an object", path_);
  }

  std::string key(std::string_view k) const { return path_.empty() ? std::string(k) : path_ + "." + std::string(k); }
  // Key present, possibly with an explicit null.
  bool present(std::string_view k) {
    seen_.insert(std::string(k));
    return j_.contains(k);
  }
  bool has(std::string_view k) {
    seen_.insert(std::string(k));
    return j_.contains(k) && !j_.at(std::string(k)).is_null();
  }
  const json& at(std::string_view k) {
    seen_.insert(std::string(k));
    return j_.at(std::string(k));
  }
  Section sub(std::string_view k) {
    seen_.insert(std::string(k));
    return Section(j_.at(std::string(k)), key(k));
  }

  template <class T>
  T get(std::string_view k, T fallback) {
    if (!has(k)) return fallback;
    return as<T>(k);
  }
  template <class T>
  T require(std::string_view k) {
    if (!has(k)) throw ConfigError("missing required key '" + key(k) + "'", key(k));
    return as<T>(k);
  }

  double number_in(std::string_view k, double fallback, double lo, double hi) {
    const double v = get<double>(k, fallback);
    if (!(v >= lo && v <= hi))
      throw ConfigError(key(k) + " must be in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]", key(k));
    return v;
  }
  int int_at_least(std::string_view k, int fallback, int lo) {
    const int v = get<int>(k, fallback);
    if (v < lo) throw ConfigError(key(k) + " must be >= " + std::to_string(lo), key(k));
    return v;
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) throw ConfigError("unknown key '" + key(it.key()) + "'", key(it.key()));
  }

 private:
  template <class T>
  T as(std::string_view k) {
    const json& v = j_.at(std::string(k));
    try {
      if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw ConfigError(key(k) + " must be a boolean", key(k));
      } else if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer()) throw ConfigError(key(k) + " must be an integer", key(k));
        if constexpr (std::is_unsigned_v<T>)
          if (!v.is_number_unsigned() && v.get<std::int64_t>() < 0) throw ConfigError(key(k) + " must be non-negative", key(k));
      } else if constexpr (std::is_floating_point_v<T>) {
        if (!v.is_number()) throw ConfigError(key(k) + " must be a number", key(k));
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) throw ConfigError(key(k) + " must be a string", key(k));
      }
      return v.get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(key(k) + ": " + e.what(), key(k));
    }
  }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

// Wraps library validation errors so they report the section key.
template <class F>
void checked(const std::string& key, F&& f) {
  try {
    f();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(key + ": " + e.what(), key);
  }
}

std::vector<int> int_list(Section& s, std::string_view k, std::vector<int> fallback) {
  if (!s.has(k)) return fallback;
  const json& v = s.at(k);
  if (!v.is_array() || v.empty()) throw ConfigError(s.key(k) + " must be a non-empty array", s.key(k));
  std::vector<int> out;
  for (const auto& e : v) {
    if (!e.is_number_integer() || e.get<int>() < 1)
      throw ConfigError(s.key(k) + " entries must be positive integers", s.key(k));
    out.push_back(e.get<int>());
  }
  return out;
}

std::pair<double, double> pair_of(Section& s, std::string_view k, std::pair<double, double> fallback) {
  if (!s.has(k)) return fallback;
  const json& v = s.at(k);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    throw ConfigError(s.key(k) + " must be a two-number array", s.key(k));
  return {v[0].get<double>(), v[1].get<double>()};
}

Preset parse_preset(Section s, std::uint64_t seed) {
  const std::string kind = s.require<std::string>("preset");
  // Absent: preset default; null: noise free.
  auto read_snr = [&](std::optional<double> fallback) -> std::optional<double> {
    if (!s.present("cap_snr_db")) return fallback;
    if (!s.has("cap_snr_db")) return std::nullopt;
    return s.number_in("cap_snr_db", 0.0, -100.0, 200.0);
  };
  Preset out;
  if (kind == "leg7") {
    LegPreset p;
    p.users = s.int_at_least("users", p.users, 1);
    p.sessions_per_user = s.int_at_least("sessions_per_user", p.sessions_per_user, 1);
    p.min_reps = s.int_at_least("min_reps", p.min_reps, 1);
    p.max_reps = s.int_at_least("max_reps", p.max_reps, 1);
    p.imu_noise_acc = s.number_in("imu_noise_acc", p.imu_noise_acc, 0.0, 1e6);
    p.imu_noise_gyro = s.number_in("imu_noise_gyro", p.imu_noise_gyro, 0.0, 1e6);
    p.fs = s.number_in("fs", p.fs, 1.0, 1e4);
    p.seed = seed;
    p.cap_snr_db = read_snr(p.cap_snr_db);
    out = p;
  } else if (kind == "gym12") {
    GymPreset p;
    p.users = s.int_at_least("users", p.users, 1);
    p.sessions_per_user = s.int_at_least("sessions_per_user", p.sessions_per_user, 1);
    p.min_reps = s.int_at_least("min_reps", p.min_reps, 1);
    p.max_reps = s.int_at_least("max_reps", p.max_reps, 1);
    if (s.has("position")) checked(s.key("position"), [&] {
        p.position = sensor_position_from_string(s.get<std::string>("position", ""));
      });
    p.fs = s.number_in("fs", p.fs, 1.0, 1e4);
    p.seed = seed;
    p.cap_snr_db = read_snr(p.cap_snr_db);
    out = p;
  } else if (kind == "collab") {
    CollabPreset p;
    p.groups = s.int_at_least("groups", p.groups, 1);
    p.users_per_group = s.int_at_least("users_per_group", p.users_per_group, 2);
    p.sessions_per_group = s.int_at_least("sessions_per_group", p.sessions_per_group, 1);
    p.blocks = s.int_at_least("blocks", p.blocks, 2);
    p.block_s = s.number_in("block_s", p.block_s, 1.0, 1e4);
    p.rest_s = s.number_in("rest_s", p.rest_s, 0.0, 1e4);
    p.fs = s.number_in("fs", p.fs, 1.0, 1e4);
    p.seed = seed;
    out = p;
  } else {
    throw ConfigError("unknown preset '" + kind + "'", s.key("preset"));
  }
  s.finish();
  std::visit([&](const auto& p) { checked(s.key("preset"), [&] { p.validate(); }); }, out);
  return out;
}

LabelSetId preset_label_set(const Preset& p) {
  if (std::holds_alternative<LegPreset>(p)) return LabelSetId::kLeg7;
  if (std::holds_alternative<GymPreset>(p)) return LabelSetId::kGym12;
  return LabelSetId::kCollab;
}

SourceSpec parse_source(Section& s, std::string_view k, SourceSpec fallback) {
  if (!s.has(k)) return fallback;
  SourceSpec out;
  checked(s.key(k), [&] { out = source_from_string(s.get<std::string>(k, "")); });
  return out;
}

PeakConfig parse_peak(Section s, PeakConfig base) {
  base.rel_threshold = s.number_in("rel_threshold", base.rel_threshold, 0.0, 1.0);
  base.min_distance_s = s.number_in("min_distance_s", base.min_distance_s, 0.0, 1e4);
  base.smoothing_cutoff_hz = s.number_in("smoothing_cutoff_hz", base.smoothing_cutoff_hz, 1e-9, 1e4);
  s.finish();
  return base;
}

}  // namespace

RunConfig parse_run_config(const json& j) {
  RunConfig c;
  c.raw = j;
  c.hash = to_hex(fnv1a64(j.dump()));
  Section root(j, "");
  c.seed = root.require<std::uint64_t>("seed");
  c.output_dir = root.get<std::string>("output_dir", c.output_dir.string());

  // Data first: a simulation preset fixes the label set.
  std::optional<LabelSetId> ls;
  if (root.has("label_set"))
    checked("label_set", [&] { ls = label_set_id_from_string(root.get<std::string>("label_set", "")); });
  if (root.has("data")) {
    Section d = root.sub("data");
    if (d.has("sessions")) {
      const json& v = d.at("sessions");
      if (!v.is_array()) throw ConfigError("data.sessions must be an array of paths", "data.sessions");
      for (const auto& e : v) {
        if (!e.is_string()) throw ConfigError("data.sessions entries must be strings", "data.sessions");
        c.data.sessions.emplace_back(e.get<std::string>());
      }
    }
    if (d.has("dir")) c.data.dir = d.get<std::string>("dir", "");
    if (d.has("simulate")) c.data.simulate = parse_preset(d.sub("simulate"), c.seed);
    d.finish();
    const int sources = !c.data.sessions.empty() + c.data.dir.has_value() + c.data.simulate.has_value();
    if (sources != 1) throw ConfigError("data needs exactly one of sessions, dir or simulate", "data");
  }
  if (c.data.simulate) {
    const LabelSetId p = preset_label_set(*c.data.simulate);
    if (ls && *ls != p) throw ConfigError("label_set does not match the simulation preset", "label_set");
    ls = p;
  }
  c.label_set = ls.value_or(LabelSetId::kLeg7);
  const LabelSet& labels = label_set(c.label_set);

  c.featurize.preprocess = default_preprocess(c.label_set);
  c.featurize.kind = c.label_set == LabelSetId::kGym12 ? FeatureKind::kGym615 : FeatureKind::kLeg126;
  if (root.has("preprocess")) {
    Section s = root.sub("preprocess");
    auto& p = c.featurize.preprocess;
    if (s.has("detrend"))
      checked(s.key("detrend"), [&] { p.detrend = detrend_mode_from_string(s.get<std::string>("detrend", "")); });
    if (s.present("hbc_anchor_class")) {
      if (!s.has("hbc_anchor_class")) {
        p.hbc_anchor_class.reset();  // null: whole session
      } else {
        checked(s.key("hbc_anchor_class"),
                [&] { p.hbc_anchor_class = labels.id_of(s.get<std::string>("hbc_anchor_class", "")); });
      }
    }
    p.normalize_hbc = s.get<bool>("normalize_hbc", p.normalize_hbc);
    p.hbc_norm_range = pair_of(s, "hbc_norm_range", p.hbc_norm_range);
    p.feature_clip = pair_of(s, "feature_clip", p.feature_clip);
    s.finish();
    checked("preprocess", [&] { p.validate(); });
  }
  if (root.has("windowing")) {
    Section s = root.sub("windowing");
    c.featurize.windowing.window_seconds = s.number_in("window_seconds", 4.0, 1e-6, 1e4);
    c.featurize.windowing.step_seconds = s.number_in("step_seconds", 2.0, 1e-6, 1e4);
    s.finish();
    checked("windowing", [&] { c.featurize.windowing.validate(); });
  }
  if (root.has("features")) {
    Section s = root.sub("features");
    if (s.has("set"))
      checked(s.key("set"), [&] { c.featurize.kind = feature_kind_from_string(s.get<std::string>("set", "")); });
    s.finish();
  }

  auto& h = c.harness;
  h.seed = c.seed;
  h.config_hash = c.hash;
  h.class_names = labels.class_names;
  h.scale_quantiles = c.featurize.preprocess.feature_clip;
  h.scheme.seed = c.seed;
  h.model.forest.seed = c.seed;
  h.model.logistic.seed = c.seed;
  if (root.has("balance")) {
    Section s = root.sub("balance");
    if (s.get<bool>("smote", false)) {
      SmoteConfig sc;
      sc.k_neighbors = s.int_at_least("k_neighbors", sc.k_neighbors, 1);
      sc.seed = c.seed;
      h.smote = sc;
    } else {
      s.int_at_least("k_neighbors", 5, 1);
    }
    s.finish();
  }
  if (root.has("model")) {
    Section s = root.sub("model");
    if (s.has("kind"))
      checked(s.key("kind"), [&] { h.model.kind = model_kind_from_string(s.get<std::string>("kind", "")); });
    auto& f = h.model.forest;
    f.n_trees = s.int_at_least("n_trees", f.n_trees, 1);
    f.max_depth = s.int_at_least("max_depth", f.max_depth, 1);
    f.features_per_split = s.int_at_least("features_per_split", f.features_per_split, 0);
    f.bootstrap = s.get<bool>("bootstrap", f.bootstrap);
    auto& l = h.model.logistic;
    l.learning_rate = s.number_in("learning_rate", l.learning_rate, 1e-12, 1e6);
    l.max_iters = s.int_at_least("max_iters", l.max_iters, 1);
    l.l2_penalty = s.number_in("l2_penalty", l.l2_penalty, 0.0, 1e6);
    l.convergence_tol = s.number_in("convergence_tol", l.convergence_tol, 1e-15, 1e6);
    h.window_weights = s.get<bool>("window_weights", h.window_weights);
    h.soft_vote_radius = s.int_at_least("soft_vote_radius", h.soft_vote_radius, -1);
    s.finish();
  }
  if (root.has("eval")) {
    Section s = root.sub("eval");
    if (s.has("scheme"))
      checked(s.key("scheme"), [&] { h.scheme.kind = fold_kind_from_string(s.get<std::string>("scheme", "")); });
    if (s.has("ratios")) {
      const json& v = s.at("ratios");
      if (!v.is_array()) throw ConfigError("eval.ratios must be an array", "eval.ratios");
      h.scheme.ratios.clear();
      for (const auto& e : v) {
        if (!e.is_number()) throw ConfigError("eval.ratios entries must be numbers", "eval.ratios");
        h.scheme.ratios.push_back(e.get<double>());
      }
    }
    if (s.has("modality"))
      checked(s.key("modality"), [&] { h.modality = modality_from_string(s.get<std::string>("modality", "")); });
    h.title = s.get<std::string>("title", h.title);
    if (s.has("grid")) {
      Section g = s.sub("grid");
      c.grid.n_trees = int_list(g, "n_trees", c.grid.n_trees);
      c.grid.max_depth = int_list(g, "max_depth", c.grid.max_depth);
      g.finish();
    }
    s.finish();
    checked("eval.ratios", [&] { h.scheme.validate(); });
  }

  c.counting = default_counting(c.label_set);
  if (root.has("counting")) {
    Section s = root.sub("counting");
    if (s.has("mode")) {
      const auto m = s.get<std::string>("mode", "");
      if (m != "leg" && m != "gym") throw ConfigError("counting.mode must be 'leg' or 'gym'", "counting.mode");
      c.counting.mode = m == "leg" ? CountingMode::kLeg : CountingMode::kGym;
    }
    c.counting.rel_threshold = s.number_in("rel_threshold", c.counting.rel_threshold, 0.0, 1.0);
    c.counting.acc = parse_source(s, "acc_source", c.counting.acc);
    c.counting.gyro = parse_source(s, "gyro_source", c.counting.gyro);
    if (s.has("overrides")) {
      Section o = s.sub("overrides");
      for (auto it = j.at("counting").at("overrides").begin(); it != j.at("counting").at("overrides").end(); ++it) {
        if (!labels.find(it.key())) throw ConfigError("unknown class '" + it.key() + "'", o.key(it.key()));
        c.counting.overrides[it.key()] = parse_peak(o.sub(it.key()), peak_preset(it.key(), c.counting.rel_threshold));
      }
      o.finish();
    }
    s.finish();
  }

  if (root.has("pairwise")) {
    Section s = root.sub("pairwise");
    if (s.has("pairs")) c.pairwise.pairs = s.get<std::string>("pairs", "");
    if (s.has("mode")) {
      const auto m = s.get<std::string>("mode", "");
      if (m != "pairwise" && m != "single_user")
        throw ConfigError("pairwise.mode must be 'pairwise' or 'single_user'", "pairwise.mode");
      c.pairwise.mode = m == "pairwise" ? MappingMode::kPairwise : MappingMode::kSingleUser;
    }
    c.pairwise.hard_lift_drop = s.get<bool>("hard_lift_drop", c.pairwise.hard_lift_drop);
    s.finish();
  }
  if (root.has("report")) {
    Section s = root.sub("report");
    if (!s.has("inputs")) throw ConfigError("missing required key 'report.inputs'", "report.inputs");
    const json& v = s.at("inputs");
    if (!v.is_array()) throw ConfigError("report.inputs must be an array of paths", "report.inputs");
    for (const auto& e : v) {
      if (!e.is_string()) throw ConfigError("report.inputs entries must be strings", "report.inputs");
      c.report_inputs.emplace_back(e.get<std::string>());
    }
    s.finish();
  }
  root.finish();
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string(), "<file>");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what(), "<json>");
  }
  return parse_run_config(j);
}

std::vector<Session> load_sessions(const RunConfig& cfg) {
  if (cfg.data.simulate) {
    return std::visit(
        [](const auto& p) -> std::vector<Session> {
          using P = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<P, LegPreset>) return simulate_leg7(p);
          else if constexpr (std::is_same_v<P, GymPreset>) return simulate_gym12(p);
          else return simulate_collab(p);
        },
        *cfg.data.simulate);
  }
  std::vector<std::filesystem::path> paths = cfg.data.sessions;
  if (cfg.data.dir) {
    if (!std::filesystem::is_directory(*cfg.data.dir))
      throw FormatError("data directory " + cfg.data.dir->string() + " does not exist");
    for (const auto& e : std::filesystem::directory_iterator(*cfg.data.dir))
      if (e.path().extension() == ".csv") paths.push_back(e.path());
    std::sort(paths.begin(), paths.end());
  }
  if (paths.empty()) throw FormatError("no sessions to load");
  std::vector<Session> out;
  for (const auto& p : paths) {
    Session s = load_session(p);
    if (s.label_set != cfg.label_set)
      throw SchemaError("session " + s.id + " uses label set " + std::string(to_string(s.label_set)) +
                        ", config expects " + std::string(to_string(cfg.label_set)));
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace hbc
