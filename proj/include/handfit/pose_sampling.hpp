#pragma once

#include <random>

#include "handfit/hand_model.hpp"

namespace handfit {

enum class TwistDistribution { zero, normal, uniform };

struct PoseSamplingSpec {
  double max_flexion = 1.2;       // rad, per finger joint, drawn from [0, max]
  double max_abduction = 0.2;     // rad, proximal finger joints only
  TwistDistribution twist = TwistDistribution::normal;
  double twist_scale = 0.05;      // sigma (normal) or half-width (uniform), rad
  bool random_root = true;
  double translation_sigma = 20.0;  // mm
};

/// Local rotation that flexes, abducts and twists one bone. The swing is
/// the minimal rotation taking the rest bone direction to its target, so
/// the twist about the rest bone axis is exactly `twist`.
Rotation articulate_bone(const Eigen::Vector3d& bone_dir, const Eigen::Vector3d& palm_normal,
                         double flexion, double abduction, double twist);

/// Random pose on the MANO tree. Flexion bends toward the palm normal.
Pose sample_pose(const HandModel& model, const Shape& shape, const PoseSamplingSpec& spec,
                 std::mt19937_64& rng);

/// Every finger joint flexed by `flexion`, no twist, identity root.
Pose flexion_pose(const HandModel& model, const Shape& shape, double flexion);

Shape sample_shape(int dims, double sigma, std::mt19937_64& rng);

Rotation random_rotation(std::mt19937_64& rng);

}  // namespace handfit
