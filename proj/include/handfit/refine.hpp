#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "handfit/eval_report.hpp"
#include "handfit/hand_model.hpp"
#include "handfit/losses.hpp"
#include "handfit/penetration.hpp"

namespace handfit {

struct HandState {
  Shape shape;
  Pose pose;
};

/// Which parameter groups the optimizer may move, for every hand.
struct FreeParams {
  bool translation = true;
  bool root = false;
  bool fingers = false;
  bool shape = false;
};

struct RefineConfig {
  double step_size = 1e-2;    // initial step each iteration; mm for translation, rad for rotation
  int max_iters = 200;
  double h_rot = 1e-4;        // rad
  double h_shape = 1e-4;
  double h_translation = 1e-4;  // mm
  double tolerance = 1e-6;    // stop once an accepted step lowers the loss by less
  int max_halvings = 40;
  int grid_refresh = 5;       // gradient grids rebuilt every this many iterations
  int resolution = 32;
  LossWeights weights;
  FreeParams free;

  void validate() const;
};

enum class RefineStatus { converged, max_iters, stalled, aborted_non_finite };
std::string to_string(RefineStatus status);

struct TraceRow {
  int iter = 0;
  double l_inter = 0.0;
  double l_pene = 0.0;
  double m_pd = 0.0;   // pooled over both directions, mm
  double mpjpe = 0.0;  // to targets, mean over hands, mm
};

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& trace);

/// Loss terms at one parameter vector.
struct Evaluation {
  LossParts parts;
  double l_inter = 0.0;
  double mpjpe = 0.0;
  PenetrationPair pair;     // first body into second, second into first
  PenetrationReport pooled;
  std::vector<ForwardResult> hands;
};

/// L_inter over the free parameters of one or two hands, optionally against
/// a static object. Parameters are offsets from the initial state: added to
/// translation and shape, and applied as exp(delta) * R0 to rotations, so
/// x = 0 is the initial state.
///
/// Terms: L_joint = loss_joint(J, J, targets) per hand; L_shape and L_tw
/// regularize toward the initial shape and twists; L_vert is 0 because there
/// is no separate non-parametric mesh; L_pene between the two bodies.
class InteractionObjective {
 public:
  /// Inside-test grids for the two bodies.
  struct Grids {
    VoxelSdf first;
    VoxelSdf second;
  };

  /// Needs one or two hands, one target set per hand, and an object exactly
  /// when there is a single hand. Throws InputError on zero free parameters.
  InteractionObjective(const HandModel& model, std::vector<HandState> initial,
                       std::vector<Points> targets, std::optional<Mesh> object, RefineConfig config);

  int dims() const noexcept { return dims_; }
  std::vector<HandState> unpack(const Eigen::VectorXd& x) const;

  Grids grids_at(const Eigen::VectorXd& x) const;
  Evaluation evaluate(const Eigen::VectorXd& x, const Grids& grids) const;
  Evaluation evaluate(const Eigen::VectorXd& x) const;

  double value(const Eigen::VectorXd& x) const { return evaluate(x).l_inter; }
  /// Central differences, each probe evaluated against `grids`.
  Eigen::VectorXd gradient(const Eigen::VectorXd& x, const Grids& grids) const;
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const { return gradient(x, grids_at(x)); }

  /// L_pene alone, fresh grids, and its FD gradient.
  double pene_value(const Eigen::VectorXd& x) const { return evaluate(x).parts.pene; }
  Eigen::VectorXd pene_gradient(const Eigen::VectorXd& x) const;

 private:
  enum class Kind { translation, rotation, shape };
  struct Slot {
    int hand;
    Kind kind;
    int index;  // joint for rotations, coefficient for shape
    int axis;   // 0..2 for translation and rotation
  };

  std::vector<ForwardResult> forward_all(const Eigen::VectorXd& x) const;
  double step_for(const Slot& s) const;
  template <typename F>
  Eigen::VectorXd central_difference(const Eigen::VectorXd& x, F&& f) const;

  const HandModel& model_;
  std::vector<HandState> initial_;
  std::vector<Points> targets_;
  std::vector<std::vector<TwistAngle>> initial_twists_;
  std::optional<Mesh> object_;
  std::optional<VoxelSdf> object_sdf_;
  std::optional<MeshDistanceQuery> object_query_;
  RefineConfig config_;
  std::vector<Slot> slots_;
  int dims_ = 0;
};

struct RefineResult {
  std::vector<HandState> hands;
  std::vector<TraceRow> trace;  // row 0 is the initial state
  RefineStatus status = RefineStatus::max_iters;
  int iterations = 0;
  /// Per hand: the refined mesh and joints against the initial ones, i.e.
  /// how far refinement moved the estimate, with the pooled final
  /// penetration depths.
  std::vector<EvalReport> reports;
};

/// Monotone gradient descent on L_inter. Each iteration starts at
/// step_size and halves until the loss strictly decreases; accepted losses
/// are always evaluated on freshly built grids.
RefineResult refine_interaction(const HandModel& model, const std::vector<HandState>& hands,
                                const std::vector<Points>& targets, const std::optional<Mesh>& object,
                                const RefineConfig& config);

/// Synthetic refinement setups with known ground truth.
struct RefineScenario {
  std::vector<HandState> ground_truth;
  std::vector<HandState> initial;
  std::vector<Points> targets;  // ground-truth joints
  std::optional<Mesh> object;
  FreeParams free;
};

/// Two copies of the model, the second turned half a revolution about y and
/// placed palm to palm `gap` mm away. The initial estimate pushes the second
/// hand `push` mm into the first. Translation is free.
RefineScenario make_two_hand_scenario(const HandModel& model, double gap = 2.0, double push = 10.0);

/// A flat hand with a sphere resting just above its fingers on the palm
/// side. The initial estimate flexes every finger joint by `flexion` rad
/// into the sphere. Finger rotations are free.
RefineScenario make_hand_object_scenario(const HandModel& model, double flexion = 0.25,
                                         double radius = 20.0);

}  // namespace handfit
