#include "handfit/losses.hpp"

#include <cmath>
#include <string>

#include "handfit/errors.hpp"

namespace handfit {

namespace {

void require_same_shape(const Points& a, const Points& b, const char* what) {
  if (a.rows() != b.rows()) {
    throw InputError(std::string(what) + ": row count mismatch (" + std::to_string(a.rows()) + " vs " +
                     std::to_string(b.rows()) + ")");
  }
}

void require_same_size(const Eigen::VectorXd& a, const Eigen::VectorXd& b, const char* what) {
  if (a.size() != b.size()) {
    throw InputError(std::string(what) + ": dimension mismatch (" + std::to_string(a.size()) + " vs " +
                     std::to_string(b.size()) + ")");
  }
}

}  // namespace

void LossWeights::validate() const {
  for (double w : values()) {
    if (!std::isfinite(w) || w < 0.0) throw InputError("loss weights must be finite and non-negative");
  }
}

LossWeights LossWeights::from_values(std::span<const double> v) {
  if (v.size() != 6) throw InputError("expected six loss weights, got " + std::to_string(v.size()));
  LossWeights w{v[0], v[1], v[2], v[3], v[4], v[5]};
  w.validate();
  return w;
}

std::array<double, 6> LossWeights::values() const {
  return {lambda1, lambda2, lambda3, lambda4, lambda5, lambda6};
}

double kl_divergence(const GaussianStats& s) {
  require_same_size(s.mean, s.log_variance, "kl_divergence");
  return 0.5 * (s.mean.array().square() + s.log_variance.array().exp() - 1.0 - s.log_variance.array()).sum();
}

double loss_joint(const Points& j_hat, const Points& j_tilde, const Points& j_gt,
                  const std::optional<GaussianStats>& kl, double lambda1) {
  require_same_shape(j_hat, j_gt, "loss_joint");
  require_same_shape(j_tilde, j_gt, "loss_joint");
  double loss = (j_hat - j_gt).cwiseAbs().sum() + (j_tilde - j_gt).cwiseAbs().sum() +
                (j_hat - j_tilde).cwiseAbs().sum();
  if (kl) loss += lambda1 * kl_divergence(*kl);
  return loss;
}

double loss_shape(const Eigen::VectorXd& pred, const Eigen::VectorXd& gt) {
  require_same_size(pred, gt, "loss_shape");
  return (pred - gt).cwiseAbs().sum() + pred.cwiseAbs().sum();
}

double loss_twist(const Eigen::VectorXd& pred, const Eigen::VectorXd& gt) {
  require_same_size(pred, gt, "loss_twist");
  return (pred - gt).cwiseAbs().sum() + pred.cwiseAbs().sum();
}

double loss_vert(const Points& refined, const Points& non_parametric) {
  require_same_shape(refined, non_parametric, "loss_vert");
  return (refined - non_parametric).cwiseAbs().sum();
}

double loss_total(const LossParts& p, const LossWeights& w) {
  return w.lambda2 * p.shape + w.lambda3 * p.twist + w.lambda4 * p.joint + w.lambda5 * p.vert;
}

double loss_inter(const LossParts& p, const LossWeights& w) { return loss_total(p, w) + w.lambda6 * p.pene; }

}  // namespace handfit
