#pragma once

#include <filesystem>
#include <iosfwd>

#include "handfit/hand_model.hpp"

namespace handfit {

/// Writes the model as a sectioned container: template, faces,
/// shape_blendshapes, pose_blendshapes (only when non-empty),
/// skinning_weights, joint_regressor, parents, tip_parents.
void save_model(const std::filesystem::path& path, const HandModel& model);
void save_model(std::ostream& out, const HandModel& model);

/// Parses and validates. Missing, malformed or inconsistent sections raise
/// ParseError / InvariantError naming the section.
HandModel load_model(const std::filesystem::path& path);
HandModel load_model(std::istream& in);

}  // namespace handfit
