#pragma once

#include <cstdint>

#include "handfit/hand_model.hpp"

namespace handfit {

/// Ring layout chosen for a vertex budget.
struct SyntheticLayout {
  int ring_half = 4;          // finger rings carry 2 * ring_half vertices, palm rings 10 * ring_half
  int palm_rings = 4;
  int rings_per_phalanx = 5;

  int vertex_count() const;
};

/// Layout whose vertex count is closest to `n_vertices` (ties go to the
/// smaller mesh). Throws InputError when n_vertices < 100.
SyntheticLayout choose_layout(int n_vertices);

/// Deterministic low-poly five-finger hand on the MANO kinematic tree.
///
/// The surface is a single closed tube network: a palm tube capped at the
/// wrist that splits into five finger tubes capped at the tips. Skinning
/// weights fall off with distance to each bone; each articulated joint is
/// regressed from the vertex ring at the joint and its two neighbouring
/// rings, each tip from its pole vertex. Shape bases are smoothed random
/// fields, orthogonalised, with 1 mm RMS displacement per unit coefficient.
/// Pose correctives are left empty.
HandModel generate_synthetic_model(std::uint64_t seed, int n_vertices = 778, int n_shape_dims = 10);

}  // namespace handfit
