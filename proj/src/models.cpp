#include "hbc/models.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "hbc/errors.hpp"
#include "hbc/rng.hpp"

namespace hbc {

namespace detail {

std::vector<LabelId> class_list(const std::vector<LabelId>& y) {
  std::set<LabelId> s(y.begin(), y.end());
  if (s.size() < 2) throw TrainingError("degenerate training set: fewer than two classes");
  return {s.begin(), s.end()};
}

std::vector<int> encode(const std::vector<LabelId>& y, const std::vector<LabelId>& classes) {
  std::vector<int> out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    auto it = std::lower_bound(classes.begin(), classes.end(), y[i]);
    if (it == classes.end() || *it != y[i]) throw DomainError("label " + std::to_string(y[i]) + " not in class list");
    out[i] = static_cast<int>(it - classes.begin());
  }
  return out;
}

void check_matrix(const Matrix& X, std::size_t n_rows) {
  if (X.size() != n_rows) throw DomainError("feature matrix and labels differ in length");
  if (X.empty()) throw TrainingError("empty training set");
  const std::size_t d = X[0].size();
  for (const auto& row : X) {
    if (row.size() != d) throw DomainError("ragged feature matrix");
    for (double v : row)
      if (!std::isfinite(v)) throw DomainError("non-finite feature value");
  }
}

}  // namespace detail

std::string_view to_string(ModelKind k) {
  return k == ModelKind::kRandomForest ? "random_forest" : "logistic_ovr";
}

ModelKind model_kind_from_string(std::string_view s) {
  if (s == "random_forest") return ModelKind::kRandomForest;
  if (s == "logistic_ovr") return ModelKind::kLogisticOvR;
  throw SchemaError("unknown model kind '" + std::string(s) + "'");
}

std::size_t argmax_lower(std::span<const double> p) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < p.size(); ++i)
    if (p[i] > p[best]) best = i;
  return best;
}

std::vector<double> predict_proba_row(const TrainedModel& m, std::span<const double> x) {
  if (x.size() != m.n_features)
    throw SchemaError("feature vector has " + std::to_string(x.size()) + " values, model expects " +
                      std::to_string(m.n_features));
  std::vector<double> p(m.n_classes(), 0.0);
  if (const auto* f = std::get_if<RandomForest>(&m.params)) {
    for (const auto& t : f->trees) p[static_cast<std::size_t>(t.predict(x))] += 1.0;
    for (double& v : p) v /= static_cast<double>(f->trees.size());
    return p;
  }
  const auto& lr = std::get<LogisticOvR>(m.params);
  double sum = 0.0;
  for (std::size_t c = 0; c < p.size(); ++c) {
    const auto& b = lr.coef[c];
    double z = b[0];
    for (std::size_t j = 0; j < x.size(); ++j) z += b[j + 1] * x[j];
    p[c] = 1.0 / (1.0 + std::exp(-z));
    sum += p[c];
  }
  if (!(sum > 0.0)) {
    std::fill(p.begin(), p.end(), 1.0 / static_cast<double>(p.size()));
    return p;
  }
  for (double& v : p) v /= sum;
  return p;
}

std::vector<double> predict_proba(const TrainedModel& m, const FeatureVector& x) {
  const std::uint64_t h = x.manifest ? x.manifest->hash() : 0;
  if (h != m.manifest_hash)
    throw SchemaError("feature manifest " + to_hex(h) + " does not match model manifest " + to_hex(m.manifest_hash));
  return predict_proba_row(m, x.values);
}

LabelId predict(const TrainedModel& m, std::span<const double> x) {
  return m.classes[argmax_lower(predict_proba_row(m, x))];
}

namespace {

nlohmann::json node_json(const DecisionTree& t, int n) {
  const TreeNode& node = t.nodes[static_cast<std::size_t>(n)];
  if (node.feature < 0) return {{"leaf", node.leaf_class}};
  return {{"feature", node.feature},
          {"threshold", node.threshold},
          {"left", node_json(t, node.left)},
          {"right", node_json(t, node.right)}};
}

int node_from_json(DecisionTree& t, const nlohmann::json& j) {
  const int idx = static_cast<int>(t.nodes.size());
  t.nodes.emplace_back();
  if (j.contains("leaf")) {
    t.nodes[static_cast<std::size_t>(idx)].leaf_class = j.at("leaf").get<int>();
    return idx;
  }
  const int f = j.at("feature").get<int>();
  const double thr = j.at("threshold").get<double>();
  const int l = node_from_json(t, j.at("left"));
  const int r = node_from_json(t, j.at("right"));
  auto& node = t.nodes[static_cast<std::size_t>(idx)];
  node.feature = f;
  node.threshold = thr;
  node.left = l;
  node.right = r;
  return idx;
}

}  // namespace

nlohmann::json TrainedModel::to_json() const {
  nlohmann::json j = {{"format", "hbc-model"},
                      {"format_version", 1},
                      {"kind", to_string(kind)},
                      {"classes", classes},
                      {"n_features", n_features},
                      {"manifest_hash", to_hex(manifest_hash)}};
  if (const auto* f = std::get_if<RandomForest>(&params)) {
    auto trees = nlohmann::json::array();
    for (const auto& t : f->trees) trees.push_back(node_json(t, 0));
    j["trees"] = std::move(trees);
  } else {
    const auto& lr = std::get<LogisticOvR>(params);
    j["coef"] = lr.coef;
    j["iterations"] = lr.iterations;
    j["converged"] = lr.converged;
    j["degenerate"] = lr.degenerate;
  }
  return j;
}

TrainedModel TrainedModel::from_json(const nlohmann::json& j) {
  try {
    if (j.at("format") != "hbc-model" || j.at("format_version") != 1)
      throw SchemaError("not a version-1 model file");
    TrainedModel m;
    m.kind = model_kind_from_string(j.at("kind").get<std::string>());
    m.classes = j.at("classes").get<std::vector<LabelId>>();
    m.n_features = j.at("n_features").get<std::size_t>();
    m.manifest_hash = std::stoull(j.at("manifest_hash").get<std::string>(), nullptr, 16);
    if (m.kind == ModelKind::kRandomForest) {
      RandomForest f;
      for (const auto& tj : j.at("trees")) {
        DecisionTree t;
        node_from_json(t, tj);
        f.trees.push_back(std::move(t));
      }
      m.params = std::move(f);
    } else {
      LogisticOvR lr;
      lr.coef = j.at("coef").get<std::vector<std::vector<double>>>();
      lr.iterations = j.at("iterations").get<std::vector<int>>();
      lr.converged = j.at("converged").get<std::vector<bool>>();
      lr.degenerate = j.at("degenerate").get<std::vector<bool>>();
      m.params = std::move(lr);
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("malformed model file: ") + e.what());
  }
}

ClassCounts count_frames(const std::vector<std::vector<LabelId>>& window_frame_labels) {
  ClassCounts c;
  for (const auto& w : window_frame_labels)
    for (LabelId l : w) {
      c.counts[l] += 1.0;
      c.total += 1.0;
    }
  return c;
}

double window_weight(std::span<const LabelId> window_labels, const ClassCounts& counts) {
  double w = 0.0;
  for (LabelId l : window_labels) {
    auto it = counts.counts.find(l);
    if (it == counts.counts.end() || !(it->second > 0.0))
      throw DomainError("window_weight: class " + std::to_string(l) + " has zero count");
    w += counts.total / it->second;
  }
  return w;
}

std::vector<std::size_t> soft_vote_smooth(const std::vector<std::vector<double>>& probs, int radius) {
  if (radius < 0) throw DomainError("soft_vote_smooth: radius must be >= 0");
  std::vector<std::size_t> out;
  out.reserve(probs.size());
  const auto n = static_cast<std::ptrdiff_t>(probs.size());
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, i - radius);
    const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(n - 1, i + radius);
    std::vector<double> acc(probs[static_cast<std::size_t>(i)].size(), 0.0);
    for (std::ptrdiff_t j = lo; j <= hi; ++j) {
      const auto& p = probs[static_cast<std::size_t>(j)];
      for (std::size_t c = 0; c < acc.size(); ++c) acc[c] += p[c];
    }
    for (double& v : acc) v /= static_cast<double>(hi - lo + 1);
    out.push_back(argmax_lower(acc));
  }
  return out;
}

}  // namespace hbc
