#include "hbc/eval.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>

#include "hbc/errors.hpp"
#include "hbc/rng.hpp"

namespace hbc {

std::string_view to_string(FoldKind k) {
  switch (k) {
    case FoldKind::kRandomSplit: return "random_split";
    case FoldKind::kLeaveOneUserOut: return "leave_one_user_out";
    case FoldKind::kLeaveOneSessionOut: return "leave_one_session_out";
    case FoldKind::kLeaveOneGroupOut: return "leave_one_group_out";
  }
  return "?";
}

FoldKind fold_kind_from_string(std::string_view s) {
  for (FoldKind k : {FoldKind::kRandomSplit, FoldKind::kLeaveOneUserOut, FoldKind::kLeaveOneSessionOut,
                     FoldKind::kLeaveOneGroupOut})
    if (to_string(k) == s) return k;
  throw SchemaError("unknown fold scheme '" + std::string(s) + "'");
}

void FoldScheme::validate() const {
  if (kind != FoldKind::kRandomSplit) return;
  if (ratios.size() < 2) throw DomainError("random split needs at least two portions");
  double sum = 0.0;
  for (double r : ratios) {
    if (!(r > 0.0)) throw DomainError("random split ratios must be positive");
    sum += r;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw DomainError("random split ratios must sum to 1");
}

namespace {

const std::string& key_of(const RowInfo& r, FoldKind k) {
  switch (k) {
    case FoldKind::kLeaveOneUserOut: return r.user_id;
    case FoldKind::kLeaveOneGroupOut: return r.group_id;
    default: return r.session_id;
  }
}

}  // namespace

std::vector<Fold> make_folds(std::span<const RowInfo> rows, const FoldScheme& scheme) {
  scheme.validate();
  std::vector<Fold> folds;
  if (scheme.kind == FoldKind::kRandomSplit) {
    std::vector<std::size_t> order(rows.size());
    std::iota(order.begin(), order.end(), 0);
    Rng rng = make_rng(scheme.seed, "splits");
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<std::size_t> portion(rows.size());
    double cum = 0.0;
    std::size_t start = 0;
    for (std::size_t p = 0; p < scheme.ratios.size(); ++p) {
      cum += scheme.ratios[p];
      const std::size_t end = p + 1 == scheme.ratios.size()
                                  ? rows.size()
                                  : static_cast<std::size_t>(std::llround(cum * static_cast<double>(rows.size())));
      for (std::size_t i = start; i < end; ++i) portion[order[i]] = p;
      start = end;
    }
    for (std::size_t p = 0; p + 1 < scheme.ratios.size(); ++p) {
      Fold f;
      f.held_out = "split-" + std::to_string(p);
      for (std::size_t i = 0; i < rows.size(); ++i) (portion[i] == p ? f.test : f.train).push_back(i);
      folds.push_back(std::move(f));
    }
    return folds;
  }

  std::vector<std::string> keys;
  std::map<std::string, std::size_t> index;
  std::vector<std::size_t> row_key(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::string& k = key_of(rows[i], scheme.kind);
    if (k.empty())
      throw SchemaError(std::string(to_string(scheme.kind)) + ": row " + std::to_string(i) + " has no grouping key");
    auto [it, fresh] = index.emplace(k, keys.size());
    if (fresh) keys.push_back(k);
    row_key[i] = it->second;
  }
  for (std::size_t f = 0; f < keys.size(); ++f) {
    Fold fold;
    fold.held_out = keys[f];
    for (std::size_t i = 0; i < rows.size(); ++i) (row_key[i] == f ? fold.test : fold.train).push_back(i);
    folds.push_back(std::move(fold));
  }
  return folds;
}

std::vector<Fold> make_folds(std::span<const Session> sessions, const FoldScheme& scheme) {
  std::vector<RowInfo> rows;
  rows.reserve(sessions.size());
  for (const auto& s : sessions) rows.push_back({s.id, s.user_id, s.group_id, s.session_index, 0});
  return make_folds(std::span<const RowInfo>(rows), scheme);
}

ConfusionMatrix confusion_matrix(std::span<const LabelId> y_true, std::span<const LabelId> y_pred,
                                 std::span<const LabelId> classes) {
  if (y_true.size() != y_pred.size()) throw DomainError("confusion_matrix: length mismatch");
  std::map<LabelId, std::size_t> idx;
  for (std::size_t i = 0; i < classes.size(); ++i) idx[classes[i]] = i;
  ConfusionMatrix m(classes.size(), std::vector<std::size_t>(classes.size(), 0));
  auto find = [&](LabelId l) {
    auto it = idx.find(l);
    if (it == idx.end()) throw DomainError("confusion_matrix: unknown label " + std::to_string(l));
    return it->second;
  };
  for (std::size_t i = 0; i < y_true.size(); ++i) ++m[find(y_true[i])][find(y_pred[i])];
  return m;
}

std::vector<ClassScores> per_class_scores(const ConfusionMatrix& m) {
  const std::size_t k = m.size();
  std::vector<ClassScores> out(k);
  for (std::size_t i = 0; i < k; ++i) {
    if (m[i].size() != k) throw DomainError("confusion matrix is not square");
    for (std::size_t j = 0; j < k; ++j) {
      out[i].support += m[i][j];
      out[j].predicted += m[i][j];
    }
  }
  for (std::size_t i = 0; i < k; ++i) {
    auto& s = out[i];
    const double tp = static_cast<double>(m[i][i]);
    s.precision = s.predicted ? tp / static_cast<double>(s.predicted) : 0.0;
    s.recall = s.support ? tp / static_cast<double>(s.support) : 0.0;
    s.f1 = s.precision + s.recall > 0.0 ? 2.0 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
  }
  return out;
}

double macro_f_score(const ConfusionMatrix& m, std::span<const std::size_t> class_indices) {
  const auto scores = per_class_scores(m);
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i : class_indices) {
    if (scores[i].support == 0 && scores[i].predicted == 0) continue;
    sum += scores[i].f1;
    ++n;
  }
  return n ? sum / static_cast<double>(n) : 0.0;
}

double macro_f_score(const ConfusionMatrix& m) {
  std::vector<std::size_t> all(m.size());
  std::iota(all.begin(), all.end(), 0);
  return macro_f_score(m, all);
}

double accuracy(const ConfusionMatrix& m) {
  std::size_t diag = 0;
  std::size_t total = 0;
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m[i].size(); ++j) {
      total += m[i][j];
      if (i == j) diag += m[i][j];
    }
  return total ? static_cast<double>(diag) / static_cast<double>(total) : 0.0;
}

double hamming_loss(std::span<const LabelId> y_true, std::span<const LabelId> y_pred) {
  if (y_true.empty()) throw DomainError("hamming_loss: empty input");
  if (y_true.size() != y_pred.size()) throw DomainError("hamming_loss: length mismatch");
  std::size_t miss = 0;
  for (std::size_t i = 0; i < y_true.size(); ++i) miss += y_true[i] != y_pred[i];
  return static_cast<double>(miss) / static_cast<double>(y_true.size());
}

void add_into(ConfusionMatrix& acc, const ConfusionMatrix& m) {
  if (acc.empty()) {
    acc = m;
    return;
  }
  if (acc.size() != m.size()) throw DomainError("confusion matrices differ in size");
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m.size(); ++j) acc[i][j] += m[i][j];
}

double EvalReport::mean_fold_macro_f() const {
  if (folds.empty()) return 0.0;
  double s = 0.0;
  for (const auto& f : folds) s += f.macro_f;
  return s / static_cast<double>(folds.size());
}

nlohmann::json EvalReport::to_json() const {
  nlohmann::json j;
  j["title"] = title;
  j["scheme"] = scheme;
  j["modality"] = modality;
  j["classes"] = class_names;
  j["config_hash"] = config_hash;
  j["seed"] = seed;
  j["notes"] = notes;
  auto fj = nlohmann::json::array();
  for (const auto& f : folds)
    fj.push_back({{"held_out", f.held_out},
                  {"n_train", f.n_train},
                  {"n_test", f.n_test},
                  {"macro_f", f.macro_f},
                  {"accuracy", f.accuracy},
                  {"hamming_loss", f.hamming},
                  {"confusion", f.confusion}});
  j["folds"] = std::move(fj);
  j["pooled"]["confusion"] = pooled;
  j["pooled"]["macro_f"] = pooled_macro_f();
  j["pooled"]["accuracy"] = accuracy(pooled);
  j["mean_fold_macro_f"] = mean_fold_macro_f();
  auto pc = nlohmann::json::array();
  const auto scores = per_class_scores(pooled);
  for (std::size_t i = 0; i < scores.size(); ++i)
    pc.push_back({{"class", class_names[i]},
                  {"precision", scores[i].precision},
                  {"recall", scores[i].recall},
                  {"f1", scores[i].f1},
                  {"support", scores[i].support}});
  j["per_class"] = std::move(pc);
  return j;
}

EvalReport EvalReport::from_json(const nlohmann::json& j) {
  try {
    EvalReport r;
    r.title = j.at("title").get<std::string>();
    r.scheme = j.at("scheme").get<std::string>();
    r.modality = j.value("modality", "");
    r.class_names = j.at("classes").get<std::vector<std::string>>();
    r.config_hash = j.value("config_hash", "");
    r.seed = j.value("seed", std::uint64_t{0});
    r.notes = j.value("notes", std::vector<std::string>{});
    for (const auto& f : j.at("folds")) {
      FoldResult fr;
      fr.held_out = f.at("held_out").get<std::string>();
      fr.n_train = f.at("n_train").get<std::size_t>();
      fr.n_test = f.at("n_test").get<std::size_t>();
      fr.macro_f = f.at("macro_f").get<double>();
      fr.accuracy = f.at("accuracy").get<double>();
      fr.hamming = f.at("hamming_loss").get<double>();
      fr.confusion = f.at("confusion").get<ConfusionMatrix>();
      r.folds.push_back(std::move(fr));
    }
    r.pooled = j.at("pooled").at("confusion").get<ConfusionMatrix>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("malformed eval report: ") + e.what());
  }
}

std::string EvalReport::confusion_csv() const {
  std::ostringstream ss;
  ss << "true\\pred";
  for (const auto& c : class_names) ss << ',' << c;
  ss << '\n';
  for (std::size_t i = 0; i < pooled.size(); ++i) {
    ss << class_names[i];
    for (std::size_t v : pooled[i]) ss << ',' << v;
    ss << '\n';
  }
  return ss.str();
}

Relabeled relabel_by_user(const Dataset& d, LabelId exercise_class) {
  Relabeled out;
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < d.size(); ++i)
    if (d.y[i] == exercise_class) rows.push_back(i);
  out.data = d.select_rows(rows);
  std::map<std::string, LabelId> ids;
  for (std::size_t i = 0; i < out.data.size(); ++i) {
    const std::string& u = out.data.info[i].user_id;
    auto [it, fresh] = ids.emplace(u, static_cast<LabelId>(out.class_names.size()));
    if (fresh) out.class_names.push_back(u);
    out.data.y[i] = it->second;
  }
  return out;
}

}  // namespace hbc
