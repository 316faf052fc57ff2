#include "hbc/pipeline.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

#include "hbc/errors.hpp"

namespace hbc {

std::string_view to_string(FeatureKind k) { return k == FeatureKind::kLeg126 ? "leg126" : "gym615"; }

FeatureKind feature_kind_from_string(std::string_view s) {
  if (s == "leg126") return FeatureKind::kLeg126;
  if (s == "gym615") return FeatureKind::kGym615;
  throw SchemaError("unknown feature set '" + std::string(s) + "'");
}

ManifestPtr manifest_for(FeatureKind k) { return k == FeatureKind::kLeg126 ? leg_manifest() : gym_manifest(); }

FeatureVector extract_features(const Window& w, double fs, FeatureKind k) {
  return k == FeatureKind::kLeg126 ? extract_features_leg(w, fs) : extract_features_gym(w, fs);
}

Window window_at(const Session& s, std::span<const std::size_t> frames) {
  Window w;
  w.session_id = s.id;
  w.start_index = frames.empty() ? 0 : frames.front();
  w.length_samples = frames.size();
  for (std::size_t f : frames) w.frame_labels.push_back(s.labels.at(f));
  w.label = majority_label(w.frame_labels);
  for (std::string_view name : channel::kAll) {
    std::vector<double> v;
    v.reserve(frames.size());
    for (std::size_t f : frames) v.push_back(extract_channel(s, name, f, f + 1)[0]);
    w.channels.emplace(std::string(name), std::move(v));
  }
  return w;
}

Dataset build_dataset(std::span<const Session> sessions, const FeaturizeConfig& cfg, const ClassMapping* mapping) {
  Dataset d;
  d.manifest = manifest_for(cfg.kind);
  for (const Session& raw : sessions) {
    Session s = preprocess_session(raw, cfg.preprocess);
    if (mapping) s.labels = remap_labels(s.labels, *mapping);
    for (const Window& w : slide_windows(s, cfg.windowing)) {
      FeatureVector fv = extract_features(w, s.sample_rate_hz, cfg.kind);
      fv.user_id = s.user_id;
      d.push_back(fv, {s.id, s.user_id, s.group_id, s.session_index, w.start_index}, w.frame_labels);
    }
  }
  return d;
}

Dataset build_pair_dataset(std::span<const Session> sessions, std::span<const SessionPair> pairs,
                           const FeaturizeConfig& cfg, const ClassMapping& pairwise) {
  std::map<std::string, const Session*> by_id;
  for (const auto& s : sessions) by_id[s.id] = &s;
  auto find = [&](const std::string& id) {
    auto it = by_id.find(id);
    if (it == by_id.end()) throw SchemaError("pair manifest references unknown session '" + id + "'");
    return it->second;
  };
  Dataset d;
  d.manifest = pair_manifest(manifest_for(cfg.kind));
  cfg.windowing.validate();
  for (const SessionPair& p : pairs) {
    const Session a = preprocess_session(*find(p.session_a), cfg.preprocess);
    const Session b = preprocess_session(*find(p.session_b), cfg.preprocess);
    const PairTimeline t = align_sessions(a, b);
    const std::vector<LabelId> joint = derive_pair_labels(t, pairwise);
    const std::size_t w = cfg.windowing.window_samples(a.sample_rate_hz);
    const std::size_t step = cfg.windowing.step_samples(a.sample_rate_hz);
    const std::size_t n = window_count(t.size(), w, step);
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t start = k * step;
      std::span<const LabelId> labels(joint.data() + start, w);
      if (std::find(labels.begin(), labels.end(), kDiscard) != labels.end()) continue;
      std::vector<std::size_t> ia(t.a_index.begin() + static_cast<std::ptrdiff_t>(start),
                                  t.a_index.begin() + static_cast<std::ptrdiff_t>(start + w));
      std::vector<std::size_t> ib;
      for (std::size_t i = start; i < start + w; ++i) ib.push_back(static_cast<std::size_t>(t.b_index[i]));
      FeatureVector fa = extract_features(window_at(a, ia), a.sample_rate_hz, cfg.kind);
      FeatureVector fb = extract_features(window_at(b, ib), b.sample_rate_hz, cfg.kind);
      fa.user_id = a.user_id;
      fa.session_id = a.id;
      fb.user_id = b.user_id;
      fb.session_id = b.id;
      FeatureVector fv = pair_features(fa, fb);
      fv.label = majority_label(labels);
      fv.window_start = start;
      d.push_back(fv, {fv.session_id, fv.user_id, p.group_id, a.session_index, start},
                  std::vector<LabelId>(labels.begin(), labels.end()));
    }
  }
  return d;
}

namespace {

struct FoldData {
  Matrix X;
  std::vector<LabelId> y;
  std::vector<double> w;
  std::vector<std::size_t> ids;  // dataset row per training row (synthetic: base row)
};

class LeakageGuard {
 public:
  LeakageGuard(const Fold& f, const FitObserver& obs) : test_(f.test.begin(), f.test.end()), obs_(obs) {}
  void touch(std::span<const std::size_t> ids) const {
    if (obs_) obs_(ids);
    for (std::size_t id : ids)
      if (test_.count(id)) throw Error("leakage: test row " + std::to_string(id) + " reached a fit routine");
  }

 private:
  std::set<std::size_t> test_;
  const FitObserver& obs_;
};

struct Prepared {
  FoldData train;
  std::optional<FeatureScaler> scaler;
};

Prepared prepare_training(const Dataset& d, std::span<const std::size_t> rows, const HarnessConfig& cfg,
                          const LeakageGuard* guard) {
  Prepared p;
  for (std::size_t r : rows) {
    p.train.X.push_back(d.X[r]);
    p.train.y.push_back(d.y[r]);
    p.train.w.push_back(d.weights[r]);
    p.train.ids.push_back(r);
  }
  if (guard) guard->touch(p.train.ids);
  if (cfg.scale) {
    p.scaler = FeatureScaler::fit(p.train.X, cfg.scale_quantiles.first, cfg.scale_quantiles.second);
    p.scaler->transform_inplace(p.train.X);
  }
  if (cfg.window_weights) {
    if (d.frame_labels.size() != d.size()) throw SchemaError("window weights need per-frame labels");
    std::vector<std::vector<LabelId>> frames;
    for (std::size_t r : rows) frames.push_back(d.frame_labels[r]);
    const ClassCounts counts = count_frames(frames);
    for (std::size_t i = 0; i < rows.size(); ++i) p.train.w[i] = window_weight(frames[i], counts);
  }
  if (cfg.smote) {
    SmoteConfig sc = *cfg.smote;
    SmoteResult res = smote(p.train.X, p.train.y, sc);
    std::vector<std::size_t> touched;
    for (const auto& o : res.origins) {
      touched.push_back(p.train.ids[o.a]);
      touched.push_back(p.train.ids[o.b]);
      p.train.ids.push_back(p.train.ids[o.a]);
      p.train.w.push_back(p.train.w[o.a]);
    }
    if (guard) guard->touch(touched);
    p.train.X = std::move(res.X);
    p.train.y = std::move(res.y);
  }
  return p;
}

TrainedModel fit_model(const FoldData& t, const ModelSpec& spec, std::uint64_t hash) {
  if (spec.kind == ModelKind::kRandomForest) return train_random_forest(t.X, t.y, spec.forest, hash);
  return train_weighted_ovr_logistic(t.X, t.y, t.w, spec.logistic, hash);
}

}  // namespace

EvalReport cross_validate(const Dataset& full, const HarnessConfig& cfg, const FitObserver& observer) {
  const Dataset d = full.select_columns(cfg.modality);
  std::vector<LabelId> all_classes(cfg.class_names.size());
  std::iota(all_classes.begin(), all_classes.end(), 0);

  EvalReport rep;
  rep.title = cfg.title;
  rep.scheme = std::string(to_string(cfg.scheme.kind));
  rep.modality = std::string(to_string(cfg.modality));
  rep.class_names = cfg.class_names;
  rep.config_hash = cfg.config_hash;
  rep.seed = cfg.seed;
  if (cfg.scheme.kind == FoldKind::kRandomSplit)
    rep.notes.push_back("random split mixes windows of the same session across train and test; scores are optimistic");
  rep.notes.push_back("feature manifest " + d.manifest->version() + " (" + d.manifest->hash_hex() + ")");

  for (const Fold& fold : make_folds(std::span<const RowInfo>(d.info), cfg.scheme)) {
    if (fold.train.empty() || fold.test.empty()) continue;
    std::set<LabelId> train_classes;
    for (std::size_t r : fold.train) train_classes.insert(d.y[r]);
    if (train_classes.size() < 2) {
      rep.notes.push_back("fold " + fold.held_out + " skipped: training data has fewer than two classes");
      continue;
    }
    const LeakageGuard guard(fold, observer);
    const Prepared prep = prepare_training(d, fold.train, cfg, &guard);
    const TrainedModel m = fit_model(prep.train, cfg.model, d.manifest->hash());

    // Test rows in temporal order within each session, for soft voting.
    std::vector<std::size_t> test = fold.test;
    std::stable_sort(test.begin(), test.end(), [&](std::size_t a, std::size_t b) {
      return std::tie(d.info[a].session_id, d.info[a].window_start) <
             std::tie(d.info[b].session_id, d.info[b].window_start);
    });
    std::vector<std::vector<double>> probs;
    for (std::size_t r : test) {
      std::vector<double> x = d.X[r];
      if (prep.scaler) x = prep.scaler->transform(x);
      probs.push_back(predict_proba_row(m, x));
    }
    std::vector<std::size_t> pred_idx(test.size());
    if (cfg.soft_vote_radius >= 0) {
      std::size_t begin = 0;
      while (begin < test.size()) {
        std::size_t end = begin;
        while (end < test.size() && d.info[test[end]].session_id == d.info[test[begin]].session_id) ++end;
        std::vector<std::vector<double>> run(probs.begin() + static_cast<std::ptrdiff_t>(begin),
                                             probs.begin() + static_cast<std::ptrdiff_t>(end));
        const auto sm = soft_vote_smooth(run, cfg.soft_vote_radius);
        std::copy(sm.begin(), sm.end(), pred_idx.begin() + static_cast<std::ptrdiff_t>(begin));
        begin = end;
      }
    } else {
      for (std::size_t i = 0; i < probs.size(); ++i) pred_idx[i] = argmax_lower(probs[i]);
    }
    std::vector<LabelId> y_true;
    std::vector<LabelId> y_pred;
    for (std::size_t i = 0; i < test.size(); ++i) {
      y_true.push_back(d.y[test[i]]);
      y_pred.push_back(m.classes[pred_idx[i]]);
    }
    FoldResult fr;
    fr.held_out = fold.held_out;
    fr.n_train = fold.train.size();
    fr.n_test = test.size();
    fr.confusion = confusion_matrix(y_true, y_pred, all_classes);
    fr.macro_f = macro_f_score(fr.confusion);
    fr.accuracy = accuracy(fr.confusion);
    fr.hamming = hamming_loss(y_true, y_pred);
    add_into(rep.pooled, fr.confusion);
    rep.folds.push_back(std::move(fr));
  }
  if (rep.folds.empty()) throw TrainingError("no fold could be evaluated");
  return rep;
}

FittedPipeline fit_pipeline(const Dataset& full, const HarnessConfig& cfg) {
  const Dataset d = full.select_columns(cfg.modality);
  std::vector<std::size_t> rows(d.size());
  std::iota(rows.begin(), rows.end(), 0);
  Prepared prep = prepare_training(d, rows, cfg, nullptr);
  FittedPipeline fp;
  fp.model = fit_model(prep.train, cfg.model, d.manifest->hash());
  fp.scaler = std::move(prep.scaler);
  fp.modality = cfg.modality;
  return fp;
}

nlohmann::json FittedPipeline::to_json() const {
  nlohmann::json j = {{"model", model.to_json()}, {"modality", to_string(modality)}};
  if (scaler) j["scaler"] = {{"lo", scaler->lo()}, {"hi", scaler->hi()}};
  return j;
}

std::vector<GridPoint> forest_grid_search(const Dataset& d, const HarnessConfig& base, const std::vector<int>& n_trees,
                                          const std::vector<int>& depths) {
  std::vector<GridPoint> out;
  for (int t : n_trees)
    for (int depth : depths) {
      HarnessConfig cfg = base;
      cfg.model.kind = ModelKind::kRandomForest;
      cfg.model.forest.n_trees = t;
      cfg.model.forest.max_depth = depth;
      const EvalReport r = cross_validate(d, cfg);
      GridPoint g;
      g.n_trees = t;
      g.max_depth = depth;
      g.accuracy = accuracy(r.pooled);
      g.hamming_loss = 1.0 - g.accuracy;  // single-label: mismatch fraction
      g.macro_f = r.pooled_macro_f();
      out.push_back(g);
    }
  return out;
}

}  // namespace hbc
