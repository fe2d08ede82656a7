#pragma once

#include <random>
#include <string>
#include <vector>

#include "handfit/hand_model.hpp"

namespace handfit {

/// Targets for analytical inverse kinematics.
struct IkInput {
  Points joints;                  // 21 x 3, same row order as forward()
  std::vector<TwistAngle> twists;  // one per non-root articulated joint (joint j -> twists[j-1])
  Shape shape;
};

struct IkResult {
  Pose pose;
  bool inconsistent = false;            // some target bone length off by more than 10%
  std::vector<int> inconsistent_joints;  // joints whose outgoing bone is off
};

/// Twist-swing IK. Root translation places the wrist on its target, root
/// orientation is the Kabsch fit of the wrist-to-child bones, and every
/// other joint gets swing * twist where the swing aligns the rest bone with
/// the target bone expressed in the parent's frame and the twist turns about
/// the rest bone axis. Zero-length target bones raise DegenerateBoneError.
IkResult ik_swing_twist(const HandModel& model, const IkInput& input);

/// Twist of each non-root joint's local rotation about its rest bone axis.
std::vector<TwistAngle> twist_extract(const HandModel& model, const Shape& shape, const Pose& pose);

enum class TwistMode { estimated, zero, random };

std::string to_string(TwistMode mode);
TwistMode twist_mode_from_string(const std::string& name);

struct TwistAblationRow {
  TwistMode mode = TwistMode::estimated;
  double mpjpe = 0.0;  // mm, mean over poses
  double mpvpe = 0.0;  // mm, mean over poses
};

/// Reconstructs each pose from its forward joints with twists chosen by
/// `mode` (ground-truth, zero, or uniform in [0, 1) rad) and reports the
/// error of the re-posed mesh against the original.
TwistAblationRow twist_ablation(const HandModel& model, const Shape& shape,
                                const std::vector<Pose>& poses, TwistMode mode,
                                std::mt19937_64& rng);

}  // namespace handfit
