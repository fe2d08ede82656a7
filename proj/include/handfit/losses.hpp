#pragma once

#include <array>
#include <optional>
#include <span>

#include <Eigen/Core>

#include "handfit/mesh.hpp"

namespace handfit {

struct LossWeights {
  double lambda1 = 0.001;  // KL
  double lambda2 = 10.0;   // shape
  double lambda3 = 10.0;   // twist
  double lambda4 = 100.0;  // joint
  double lambda5 = 100.0;  // vertex self-distillation
  double lambda6 = 10.0;   // penetration

  /// Throws InputError on negative or non-finite weights.
  void validate() const;
  static LossWeights from_values(std::span<const double> values);  // exactly six
  std::array<double, 6> values() const;

  friend bool operator==(const LossWeights&, const LossWeights&) = default;
};

/// Diagonal Gaussian given by its mean and log-variance.
struct GaussianStats {
  Eigen::VectorXd mean;
  Eigen::VectorXd log_variance;
};

/// KL(N(mean, exp(log_variance)) || N(0, I)).
double kl_divergence(const GaussianStats& stats);

/// |J_hat - J|_1 + |J_tilde - J|_1 + |J_hat - J_tilde|_1 + lambda1 * KL.
/// L1 norms are sums of absolute entries.
double loss_joint(const Points& j_hat, const Points& j_tilde, const Points& j_gt,
                  const std::optional<GaussianStats>& kl = std::nullopt, double lambda1 = 0.001);

/// |pred - gt|_1 + |pred|_1.
double loss_shape(const Eigen::VectorXd& pred, const Eigen::VectorXd& gt);
double loss_twist(const Eigen::VectorXd& pred, const Eigen::VectorXd& gt);

/// |V_refine - V_non|_1.
double loss_vert(const Points& refined, const Points& non_parametric);

struct LossParts {
  double shape = 0.0;
  double twist = 0.0;
  double joint = 0.0;
  double vert = 0.0;
  double pene = 0.0;
};

double loss_total(const LossParts& parts, const LossWeights& weights);
double loss_inter(const LossParts& parts, const LossWeights& weights);

}  // namespace handfit
