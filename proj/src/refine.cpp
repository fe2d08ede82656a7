#include "handfit/refine.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <cstdio>
#include <ostream>

#include "handfit/errors.hpp"
#include "handfit/ik.hpp"
#include "handfit/mesh.hpp"
#include "handfit/metrics.hpp"
#include "handfit/parallel.hpp"
#include "handfit/pose_sampling.hpp"

namespace handfit {

namespace {

Eigen::VectorXd as_vector(const std::vector<TwistAngle>& twists) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(twists.size()));
  for (std::size_t i = 0; i < twists.size(); ++i) v(static_cast<Eigen::Index>(i)) = twists[i].radians();
  return v;
}

}  // namespace

void RefineConfig::validate() const {
  if (!(step_size > 0.0) || !(h_rot > 0.0) || !(h_shape > 0.0) || !(h_translation > 0.0)) {
    throw InputError("refine: step size and finite-difference steps must be positive");
  }
  if (max_iters < 1 || grid_refresh < 1 || max_halvings < 1) {
    throw InputError("refine: iteration counts must be positive");
  }
  if (!(tolerance >= 0.0)) throw InputError("refine: tolerance must be non-negative");
  if (resolution < 4) throw InputError("refine: resolution must be at least 4");
  weights.validate();
}

std::string to_string(RefineStatus status) {
  switch (status) {
    case RefineStatus::converged:
      return "converged";
    case RefineStatus::max_iters:
      return "max_iters";
    case RefineStatus::stalled:
      return "stalled";
    case RefineStatus::aborted_non_finite:
      return "aborted_non_finite";
  }
  return "unknown";
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& trace) {
  out << "iter,L_inter,L_pene,M-PD,MPJPE\n";
  char buf[160];
  for (const TraceRow& r : trace) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g\n", r.iter, r.l_inter, r.l_pene, r.m_pd,
                  r.mpjpe);
    out << buf;
  }
}

InteractionObjective::InteractionObjective(const HandModel& model, std::vector<HandState> initial,
                                           std::vector<Points> targets, std::optional<Mesh> object,
                                           RefineConfig config)
    : model_(model),
      initial_(std::move(initial)),
      targets_(std::move(targets)),
      object_(std::move(object)),
      config_(std::move(config)) {
  config_.validate();
  if (initial_.empty() || initial_.size() > 2) throw InputError("refine: expected one or two hands");
  if (targets_.size() != initial_.size()) throw InputError("refine: one target set per hand required");
  if ((initial_.size() == 1) != object_.has_value()) {
    throw InputError("refine: a single hand needs an object; two hands take none");
  }
  for (const Points& t : targets_) {
    if (t.rows() != kNumRegressedJoints) throw InputError("refine: targets must have 21 rows");
  }
  for (const HandState& h : initial_) {
    initial_twists_.push_back(twist_extract(model_, h.shape, h.pose));
  }
  if (object_) {
    object_sdf_ = voxelize_sdf(*object_, config_.resolution);
    object_query_.emplace(*object_);
  }

  const FreeParams& f = config_.free;
  for (int h = 0; h < static_cast<int>(initial_.size()); ++h) {
    if (f.translation) {
      for (int a = 0; a < 3; ++a) slots_.push_back({h, Kind::translation, 0, a});
    }
    for (int j = 0; j < model_.num_joints(); ++j) {
      const bool is_root = model_.parents[static_cast<std::size_t>(j)] < 0;
      if (is_root ? f.root : f.fingers) {
        for (int a = 0; a < 3; ++a) slots_.push_back({h, Kind::rotation, j, a});
      }
    }
    if (f.shape) {
      for (int k = 0; k < model_.num_shape_dims(); ++k) slots_.push_back({h, Kind::shape, k, 0});
    }
  }
  dims_ = static_cast<int>(slots_.size());
  if (dims_ == 0) throw InputError("refine: no free parameters");
}

std::vector<HandState> InteractionObjective::unpack(const Eigen::VectorXd& x) const {
  if (x.size() != dims_) throw InputError("refine: parameter vector has wrong size");
  std::vector<HandState> hands = initial_;
  std::vector<std::vector<Eigen::Vector3d>> rot(hands.size(),
                                                std::vector<Eigen::Vector3d>(static_cast<std::size_t>(model_.num_joints()),
                                                                             Eigen::Vector3d::Zero()));
  for (int i = 0; i < dims_; ++i) {
    const Slot& s = slots_[static_cast<std::size_t>(i)];
    HandState& h = hands[static_cast<std::size_t>(s.hand)];
    switch (s.kind) {
      case Kind::translation:
        h.pose.root_translation(s.axis) += x(i);
        break;
      case Kind::rotation:
        rot[static_cast<std::size_t>(s.hand)][static_cast<std::size_t>(s.index)](s.axis) = x(i);
        break;
      case Kind::shape:
        h.shape.beta(s.index) += x(i);
        break;
    }
  }
  for (std::size_t h = 0; h < hands.size(); ++h) {
    for (std::size_t j = 0; j < rot[h].size(); ++j) {
      if (rot[h][j].isZero(0.0)) continue;
      Rotation& r = hands[h].pose.local_rotations[j];
      r = Rotation::from_rotation_vector(rot[h][j]) * r;
    }
  }
  return hands;
}

std::vector<ForwardResult> InteractionObjective::forward_all(const Eigen::VectorXd& x) const {
  std::vector<ForwardResult> out;
  for (const HandState& h : unpack(x)) out.push_back(forward(model_, h.shape, h.pose));
  return out;
}

InteractionObjective::Grids InteractionObjective::grids_at(const Eigen::VectorXd& x) const {
  const auto hands = forward_all(x);
  Grids g;
  g.first = voxelize_sdf(hands[0].mesh, config_.resolution);
  g.second = hands.size() == 2 ? voxelize_sdf(hands[1].mesh, config_.resolution) : *object_sdf_;
  return g;
}

Evaluation InteractionObjective::evaluate(const Eigen::VectorXd& x, const Grids& grids) const {
  Evaluation e;
  const std::vector<HandState> states = unpack(x);
  for (const HandState& h : states) e.hands.push_back(forward(model_, h.shape, h.pose));

  const Mesh& first = e.hands[0].mesh;
  const MeshDistanceQuery first_query(first);
  if (e.hands.size() == 2) {
    const MeshDistanceQuery second_query(e.hands[1].mesh);
    e.pair = {penetration_into(first.vertices, grids.second, second_query),
              penetration_into(e.hands[1].mesh.vertices, grids.first, first_query)};
  } else {
    e.pair = {penetration_into(first.vertices, grids.second, *object_query_),
              penetration_into(object_->vertices, grids.first, first_query)};
  }
  e.pooled = combine(e.pair.a_into_b, e.pair.b_into_a);
  e.parts.pene = loss_pene(e.pair);

  for (std::size_t h = 0; h < states.size(); ++h) {
    const Points& joints = e.hands[h].joints;
    e.parts.joint += loss_joint(joints, joints, targets_[h]);
    e.parts.shape += loss_shape(states[h].shape.beta, initial_[h].shape.beta);
    e.parts.twist += loss_twist(as_vector(twist_extract(model_, states[h].shape, states[h].pose)),
                                as_vector(initial_twists_[h]));
    e.mpjpe += mpjpe(joints, targets_[h], Alignment::raw) / static_cast<double>(states.size());
  }
  e.l_inter = loss_inter(e.parts, config_.weights);
  return e;
}

Evaluation InteractionObjective::evaluate(const Eigen::VectorXd& x) const { return evaluate(x, grids_at(x)); }

double InteractionObjective::step_for(const Slot& s) const {
  switch (s.kind) {
    case Kind::translation:
      return config_.h_translation;
    case Kind::rotation:
      return config_.h_rot;
    case Kind::shape:
      return config_.h_shape;
  }
  return config_.h_rot;
}

template <typename F>
Eigen::VectorXd InteractionObjective::central_difference(const Eigen::VectorXd& x, F&& f) const {
  Eigen::VectorXd g(dims_);
  parallel_for(dims_, [&](int i) {
    const double h = step_for(slots_[static_cast<std::size_t>(i)]);
    Eigen::VectorXd plus = x, minus = x;
    plus(i) += h;
    minus(i) -= h;
    g(i) = (f(plus) - f(minus)) / (2.0 * h);
  });
  return g;
}

Eigen::VectorXd InteractionObjective::gradient(const Eigen::VectorXd& x, const Grids& grids) const {
  return central_difference(x, [&](const Eigen::VectorXd& p) { return evaluate(p, grids).l_inter; });
}

Eigen::VectorXd InteractionObjective::pene_gradient(const Eigen::VectorXd& x) const {
  const Grids grids = grids_at(x);
  return central_difference(x, [&](const Eigen::VectorXd& p) { return evaluate(p, grids).parts.pene; });
}

namespace {

TraceRow row_of(int iter, const Evaluation& e) {
  return {iter, e.l_inter, e.parts.pene, e.pooled.m_pd, e.mpjpe};
}

}  // namespace

RefineResult refine_interaction(const HandModel& model, const std::vector<HandState>& hands,
                                const std::vector<Points>& targets, const std::optional<Mesh>& object,
                                const RefineConfig& config) {
  const InteractionObjective objective(model, hands, targets, object, config);
  const std::vector<ForwardResult> initial_forward = [&] {
    std::vector<ForwardResult> out;
    for (const HandState& h : hands) out.push_back(forward(model, h.shape, h.pose));
    return out;
  }();

  RefineResult result;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(objective.dims());
  InteractionObjective::Grids grids = objective.grids_at(x);
  Evaluation current = objective.evaluate(x, grids);
  result.trace.push_back(row_of(0, current));

  if (!std::isfinite(current.l_inter)) {
    result.status = RefineStatus::aborted_non_finite;
  } else {
    result.status = RefineStatus::max_iters;
    for (int iter = 1; iter <= config.max_iters; ++iter) {
      if (iter > 1 && (iter - 1) % config.grid_refresh == 0) grids = objective.grids_at(x);
      const Eigen::VectorXd g = objective.gradient(x, grids);
      if (!g.allFinite()) {
        result.status = RefineStatus::aborted_non_finite;
        break;
      }
      // Halve on the gradient grids first, then confirm on fresh grids so
      // every recorded loss is exact and the sequence stays monotone.
      const double reference = objective.evaluate(x, grids).l_inter;
      std::optional<Evaluation> accepted;
      Eigen::VectorXd candidate;
      bool non_finite = false;
      double step = config.step_size;
      for (int k = 0; k <= config.max_halvings && !g.isZero(0.0); ++k, step *= 0.5) {
        candidate = x - step * g;
        const double cached = objective.evaluate(candidate, grids).l_inter;
        if (!std::isfinite(cached)) {
          non_finite = true;
          break;
        }
        if (!(cached < reference)) continue;
        Evaluation e = objective.evaluate(candidate);
        if (!std::isfinite(e.l_inter)) {
          non_finite = true;
          break;
        }
        if (e.l_inter < current.l_inter) {
          accepted = std::move(e);
          break;
        }
      }
      if (non_finite) {
        result.status = RefineStatus::aborted_non_finite;
        break;
      }
      if (!accepted) {
        result.status = RefineStatus::stalled;
        break;
      }
      const double decrease = current.l_inter - accepted->l_inter;
      x = candidate;
      current = std::move(*accepted);
      result.iterations = iter;
      result.trace.push_back(row_of(iter, current));
      if (decrease < config.tolerance) {
        result.status = RefineStatus::converged;
        break;
      }
    }
  }

  result.hands = objective.unpack(x);
  for (std::size_t h = 0; h < result.hands.size(); ++h) {
    EvalReport r = evaluate(current.hands[h].mesh, current.hands[h].joints, initial_forward[h].mesh,
                            initial_forward[h].joints, Alignment::raw, "hand_" + std::to_string(h));
    r.a_pd = current.pooled.a_pd;
    r.m_pd = current.pooled.m_pd;
    result.reports.push_back(std::move(r));
  }
  return result;
}

RefineScenario make_two_hand_scenario(const HandModel& model, double gap, double push) {
  RefineScenario s;
  const Shape shape = Shape::zero(model.num_shape_dims());
  const Eigen::Vector3d n = palm_normal(rest_joints(model, shape));

  HandState a{shape, Pose::identity(model.num_joints())};
  HandState b = a;
  b.pose.local_rotations[0] = Rotation::from_axis_angle(Eigen::Vector3d::UnitY(), std::numbers::pi);

  // Stack along the coordinate axis closest to the palm normal so the
  // displacement touches a single translation component.
  int axis = 0;
  n.cwiseAbs().maxCoeff(&axis);
  const Eigen::Vector3d e = Eigen::Vector3d::Unit(axis) * (n(axis) > 0.0 ? 1.0 : -1.0);
  const ForwardResult fa = forward(model, a.shape, a.pose);
  const ForwardResult fb = forward(model, b.shape, b.pose);
  const double top_a = (fa.mesh.vertices * e).maxCoeff();
  const double bottom_b = (fb.mesh.vertices * e).minCoeff();
  b.pose.root_translation = e * (top_a - bottom_b + gap);
  s.ground_truth = {a, b};
  for (const HandState& h : s.ground_truth) s.targets.push_back(forward(model, h.shape, h.pose).joints);
  HandState pushed = b;
  pushed.pose.root_translation -= e * push;
  s.initial = {a, pushed};
  s.free = FreeParams{};
  return s;
}

RefineScenario make_hand_object_scenario(const HandModel& model, double flexion, double radius) {
  RefineScenario s;
  const Shape shape = Shape::zero(model.num_shape_dims());
  const Points rest = rest_joints(model, shape);
  const Eigen::Vector3d n = palm_normal(rest);

  const HandState truth{shape, Pose::identity(model.num_joints())};
  const ForwardResult flat = forward(model, truth.shape, truth.pose);

  // Over the middle phalanx of the middle finger, clear of every vertex
  // within the sphere's footprint by half a millimetre.
  const Eigen::Vector3d anchor = 0.5 * (rest.row(5) + rest.row(6)).transpose();
  double height = -INFINITY;
  for (int i = 0; i < flat.mesh.num_vertices(); ++i) {
    const Eigen::Vector3d d = flat.mesh.vertex(i) - anchor;
    if ((d - d.dot(n) * n).norm() < radius) height = std::max(height, d.dot(n));
  }
  const Eigen::Vector3d center = anchor + n * (height + radius + 0.5);

  s.ground_truth = {truth};
  s.targets = {flat.joints};
  s.initial = {HandState{shape, flexion_pose(model, shape, flexion)}};
  s.object = make_icosphere(radius, 3, center);
  s.free = FreeParams{false, false, true, false};
  return s;
}

}  // namespace handfit
