#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "hbc/errors.hpp"
#include "hbc/models.hpp"

namespace hbc {

void LogRegConfig::validate() const {
  if (!(learning_rate > 0.0)) throw DomainError("logistic: learning_rate must be > 0");
  if (!(convergence_tol > 0.0)) throw DomainError("logistic: convergence_tol must be > 0");
  if (max_iters < 1) throw DomainError("logistic: max_iters must be >= 1");
  if (!(l2_penalty >= 0.0)) throw DomainError("logistic: l2_penalty must be >= 0");
}

namespace {

constexpr double kPriorClip = 1e-6;

double log1pexp(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

struct BinaryFit {
  Eigen::VectorXd beta;
  int iterations = 0;
  bool converged = false;
  bool degenerate = false;
};

// A is n x (d+1) with a leading column of ones.
BinaryFit fit_binary(const Eigen::MatrixXd& A, const Eigen::VectorXd& t, const Eigen::VectorXd& w, double wsum,
                     const LogRegConfig& cfg) {
  const Eigen::Index p = A.cols();
  BinaryFit fit;
  fit.beta = Eigen::VectorXd::Zero(p);

  const double pos = w.dot(t) / wsum;
  if (pos <= 0.0 || pos >= 1.0) {
    const double q = std::clamp(pos, kPriorClip, 1.0 - kPriorClip);
    fit.beta(0) = std::log(q / (1.0 - q));
    fit.converged = true;
    fit.degenerate = true;
    return fit;
  }

  Eigen::VectorXd pen = Eigen::VectorXd::Constant(p, cfg.l2_penalty);
  pen(0) = 0.0;

  auto loss = [&](const Eigen::VectorXd& b) {
    const Eigen::VectorXd z = A * b;
    double s = 0.0;
    for (Eigen::Index i = 0; i < z.size(); ++i)
      if (w(i) > 0.0) s += w(i) * (log1pexp(z(i)) - t(i) * z(i));
    return s / wsum + 0.5 * (pen.array() * b.array().square()).sum();
  };

  double current = loss(fit.beta);
  for (int it = 0; it < cfg.max_iters; ++it) {
    fit.iterations = it + 1;
    const Eigen::VectorXd z = A * fit.beta;
    Eigen::VectorXd prob(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) prob(i) = 1.0 / (1.0 + std::exp(-z(i)));
    const Eigen::VectorXd r = w.cwiseProduct(prob - t);
    Eigen::VectorXd g = A.transpose() * r / wsum + pen.cwiseProduct(fit.beta);
    Eigen::VectorXd h = w.cwiseProduct(prob.cwiseProduct((1.0 - prob.array()).matrix())) / wsum;
    Eigen::MatrixXd H = A.transpose() * h.asDiagonal() * A;
    H.diagonal() += pen;
    H.diagonal().array() += 1e-12;  // keeps the bias row solvable on separable data
    const Eigen::VectorXd step = H.ldlt().solve(g);
    if (!step.allFinite()) throw TrainingError("logistic: Newton step is not finite");

    // Damped step with backtracking so the loss never increases.
    double scale = cfg.learning_rate;
    Eigen::VectorXd next = fit.beta - scale * step;
    double next_loss = loss(next);
    for (int k = 0; k < 30 && !(next_loss <= current); ++k) {
      scale *= 0.5;
      next = fit.beta - scale * step;
      next_loss = loss(next);
    }
    if (!std::isfinite(next_loss)) throw TrainingError("logistic: loss is not finite");
    const double moved = (next - fit.beta).cwiseAbs().maxCoeff();
    fit.beta = next;
    current = next_loss;
    if (moved < cfg.convergence_tol) {
      fit.converged = true;
      break;
    }
  }
  return fit;
}

}  // namespace

TrainedModel train_weighted_ovr_logistic(const Matrix& X, const std::vector<LabelId>& y,
                                         const std::vector<double>& weights, const LogRegConfig& cfg,
                                         std::uint64_t manifest_hash) {
  cfg.validate();
  detail::check_matrix(X, y.size());
  if (weights.size() != y.size()) throw DomainError("logistic: weights and y differ in length");
  double wsum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw DomainError("logistic: weights must be finite and >= 0");
    wsum += w;
  }
  if (!(wsum > 0.0)) throw DomainError("logistic: all weights are zero");

  TrainedModel m;
  m.kind = ModelKind::kLogisticOvR;
  m.classes = detail::class_list(y);
  m.n_features = X.empty() ? 0 : X[0].size();
  m.manifest_hash = manifest_hash;
  const std::vector<int> enc = detail::encode(y, m.classes);

  const auto n = static_cast<Eigen::Index>(X.size());
  const auto d = static_cast<Eigen::Index>(m.n_features);
  Eigen::MatrixXd A(n, d + 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    A(i, 0) = 1.0;
    for (Eigen::Index j = 0; j < d; ++j) A(i, j + 1) = X[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  const Eigen::Map<const Eigen::VectorXd> w(weights.data(), n);

  LogisticOvR ovr;
  for (std::size_t c = 0; c < m.classes.size(); ++c) {
    Eigen::VectorXd t(n);
    for (Eigen::Index i = 0; i < n; ++i) t(i) = enc[static_cast<std::size_t>(i)] == static_cast<int>(c) ? 1.0 : 0.0;
    const BinaryFit f = fit_binary(A, t, w, wsum, cfg);
    ovr.coef.emplace_back(f.beta.data(), f.beta.data() + f.beta.size());
    ovr.iterations.push_back(f.iterations);
    ovr.converged.push_back(f.converged);
    ovr.degenerate.push_back(f.degenerate);
  }
  m.params = std::move(ovr);
  return m;
}

}  // namespace hbc
