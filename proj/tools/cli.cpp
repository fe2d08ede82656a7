#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <memory>
#include <ostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"

#include "handfit/errors.hpp"
#include "handfit/eval_report.hpp"
#include "handfit/ik.hpp"
#include "handfit/model_io.hpp"
#include "handfit/penetration.hpp"
#include "handfit/pose_sampling.hpp"
#include "handfit/refine.hpp"
#include "handfit/synthetic.hpp"

namespace handfit::cli {

namespace {

using nlohmann::json;

class IoError : public Error {
 public:
  using Error::Error;
};

std::string error_class(const Error& e) {
  if (dynamic_cast<const NonWatertightError*>(&e)) return "non_watertight";
  if (dynamic_cast<const DegenerateBoneError*>(&e)) return "degenerate_bone";
  if (dynamic_cast<const InputError*>(&e)) return "input";
  if (dynamic_cast<const ParseError*>(&e)) return "parse";
  if (dynamic_cast<const InvariantError*>(&e)) return "invariant";
  if (dynamic_cast<const IoError*>(&e)) return "io";
  return "data";
}

TwistDistribution twist_distribution(const std::string& name) {
  if (name == "zero") return TwistDistribution::zero;
  if (name == "normal") return TwistDistribution::normal;
  if (name == "uniform") return TwistDistribution::uniform;
  throw UsageError("unknown twist distribution '" + name + "' (zero, normal, uniform)");
}

std::ofstream open_for_writing(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  return out;
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// ---------------------------------------------------------------------------
// Shared setup

struct Context {
  ExperimentConfig config;
  std::mt19937_64 rng;
};

HandModel load_or_generate(const ExperimentConfig& c) {
  if (!c.model.empty()) return load_model(std::filesystem::path(c.model));
  return generate_synthetic_model(c.model_seed, c.model_vertices, c.shape_dims);
}

PoseSamplingSpec sampling_spec(const ExperimentConfig& c) {
  PoseSamplingSpec spec;
  spec.max_flexion = c.max_flexion;
  spec.max_abduction = c.max_abduction;
  spec.twist = twist_distribution(c.twist);
  spec.twist_scale = c.twist_scale;
  return spec;
}

json point_rows(const Points& p) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < p.rows(); ++i) rows.push_back({p(i, 0), p(i, 1), p(i, 2)});
  return rows;
}

json report_json(const PenetrationReport& r) {
  return {{"penetrating_vertices", r.indices.size()},
          {"a_pd", r.a_pd},
          {"m_pd", r.m_pd},
          {"a_pd_all_vertices", r.a_pd_all}};
}

RefineScenario scenario_for(const HandModel& model, const std::string& name) {
  if (name == "two-hand") return make_two_hand_scenario(model);
  if (name == "hand-object") return make_hand_object_scenario(model);
  throw UsageError("unknown scenario '" + name + "' (two-hand, hand-object)");
}

// Averages the numeric fields of several reports into one.
EvalReport mean_report(const std::vector<EvalReport>& reports, std::string label) {
  EvalReport m;
  m.label = std::move(label);
  if (reports.empty()) return m;
  m.alignment = reports.front().alignment;
  for (const EvalReport& r : reports) {
    m.mpjpe += r.mpjpe;
    m.mpvpe += r.mpvpe;
    m.edge_err += r.edge_err;
    m.normal_err += r.normal_err;
  }
  const double n = static_cast<double>(reports.size());
  m.mpjpe /= n;
  m.mpvpe /= n;
  m.edge_err /= n;
  m.normal_err /= n;
  return m;
}

// ---------------------------------------------------------------------------
// Commands. Each returns the "result" object of the report.

json cmd_gen_model(Context& ctx) {
  const ExperimentConfig& c = ctx.config;
  if (c.out.empty()) throw UsageError("gen-model needs --out");
  const HandModel model = generate_synthetic_model(c.seed, c.model_vertices, c.shape_dims);
  save_model(std::filesystem::path(c.out), model);
  return {{"path", c.out},
          {"vertices", model.num_vertices()},
          {"faces", model.num_faces()},
          {"joints", model.num_joints()},
          {"shape_dims", model.num_shape_dims()}};
}

json cmd_forward(Context& ctx) {
  const ExperimentConfig& c = ctx.config;
  const HandModel model = load_or_generate(c);
  const int count = c.poses.value_or(1);
  const PoseSamplingSpec spec = sampling_spec(c);
  json meshes = json::array();
  for (int i = 0; i < count; ++i) {
    const Shape shape = sample_shape(model.num_shape_dims(), 1.0, ctx.rng);
    const Pose pose = sample_pose(model, shape, spec, ctx.rng);
    const ForwardResult fr = forward(model, shape, pose);
    json entry = {{"index", i}, {"joints", point_rows(fr.joints)}};
    if (!c.out.empty()) {
      std::string path = c.out;
      if (count > 1) {
        const std::filesystem::path p(c.out);
        char suffix[16];
        std::snprintf(suffix, sizeof suffix, "_%03d", i);
        path = (p.parent_path() / (p.stem().string() + suffix + p.extension().string())).string();
      }
      auto file = open_for_writing(path);
      write_obj(file, fr.mesh);
      entry["obj"] = path;
    }
    meshes.push_back(std::move(entry));
  }
  return {{"poses", count}, {"meshes", meshes}};
}

json cmd_ik_roundtrip(Context& ctx) {
  const ExperimentConfig& c = ctx.config;
  const HandModel model = load_or_generate(c);
  const int count = c.poses.value_or(100);
  const PoseSamplingSpec spec = sampling_spec(c);
  const Alignment align = alignment_from_string(c.align);
  double max_joint = 0.0, max_vertex = 0.0;
  int inconsistent = 0;
  std::vector<EvalReport> reports;
  for (int i = 0; i < count; ++i) {
    const Shape shape = sample_shape(model.num_shape_dims(), 1.0, ctx.rng);
    const Pose pose = sample_pose(model, shape, spec, ctx.rng);
    const ForwardResult truth = forward(model, shape, pose);
    const IkResult ik = ik_swing_twist(model, {truth.joints, twist_extract(model, shape, pose), shape});
    const ForwardResult rebuilt = forward(model, shape, ik.pose);
    max_joint = std::max(max_joint, (rebuilt.joints - truth.joints).rowwise().norm().maxCoeff());
    max_vertex = std::max(max_vertex, (rebuilt.mesh.vertices - truth.mesh.vertices).rowwise().norm().maxCoeff());
    inconsistent += ik.inconsistent ? 1 : 0;
    reports.push_back(evaluate(rebuilt.mesh, rebuilt.joints, truth.mesh, truth.joints, align));
  }
  return {{"poses", count},
          {"max_joint_error_mm", max_joint},
          {"max_vertex_error_mm", max_vertex},
          {"inconsistent_targets", inconsistent},
          {"eval_reports", json::array({to_json(mean_report(reports, "ik-roundtrip"))})}};
}

json cmd_gap_report(Context& ctx) {
  const ExperimentConfig& c = ctx.config;
  if (c.steps < 2) throw UsageError("--steps must be at least 2");
  const HandModel model = load_or_generate(c);
  const Shape shape = Shape::zero(model.num_shape_dims());
  json sweep = json::array();
  std::ostringstream csv;
  csv << "flexion_rad,mean_gap_mm\n";
  bool monotone = true;
  double previous = -1.0;
  for (int k = 0; k < c.steps; ++k) {
    const double flexion = c.max_flexion * k / (c.steps - 1);
    const double gap = rest_pose_gap(model, shape, flexion_pose(model, shape, flexion)).mean;
    monotone = monotone && gap >= previous;
    previous = gap;
    sweep.push_back({{"flexion", flexion}, {"mean_gap_mm", gap}});
    csv << fmt(flexion) << ',' << fmt(gap) << '\n';
  }
  const int count = c.poses.value_or(100);
  const PoseSamplingSpec spec = sampling_spec(c);
  double random_gap = 0.0;
  for (int i = 0; i < count; ++i) {
    random_gap += rest_pose_gap(model, shape, sample_pose(model, shape, spec, ctx.rng)).mean / count;
  }
  if (!c.out.empty()) open_for_writing(c.out) << csv.str();
  return {{"sweep", sweep},
          {"monotone", monotone},
          {"rest_gap_mm", sweep.front()["mean_gap_mm"]},
          {"random_poses", count},
          {"random_pose_mean_gap_mm", random_gap}};
}

json cmd_twist_ablation(Context& ctx) {
  const ExperimentConfig& c = ctx.config;
  const HandModel model = load_or_generate(c);
  const Shape shape = Shape::zero(model.num_shape_dims());
  const int count = c.poses.value_or(200);
  const PoseSamplingSpec spec = sampling_spec(c);
  std::vector<Pose> poses;
  for (int i = 0; i < count; ++i) poses.push_back(sample_pose(model, shape, spec, ctx.rng));
  json rows = json::array();
  std::ostringstream csv;
  csv << "mode,mpjpe_mm,mpvpe_mm\n";
  double mpvpe[3] = {};
  int k = 0;
  for (TwistMode mode : {TwistMode::estimated, TwistMode::zero, TwistMode::random}) {
    const TwistAblationRow row = twist_ablation(model, shape, poses, mode, ctx.rng);
    rows.push_back({{"mode", to_string(mode)}, {"mpjpe_mm", row.mpjpe}, {"mpvpe_mm", row.mpvpe}});
    csv << to_string(mode) << ',' << fmt(row.mpjpe) << ',' << fmt(row.mpvpe) << '\n';
    mpvpe[k++] = row.mpvpe;
  }
  if (!c.out.empty()) open_for_writing(c.out) << csv.str();
  return {{"poses", count},
          {"rows", rows},
          {"ordering_holds", mpvpe[2] > mpvpe[1] && mpvpe[1] >= mpvpe[0]},
          {"random_over_zero", mpvpe[1] > 0.0 ? mpvpe[2] / mpvpe[1] : INFINITY}};
}

json cmd_penetration(Context& ctx) {
  const ExperimentConfig& c = ctx.config;
  Mesh a, b;
  if (!c.mesh_a.empty() || !c.mesh_b.empty()) {
    if (c.mesh_a.empty() || c.mesh_b.empty()) throw UsageError("--mesh-a and --mesh-b go together");
    a = load_obj(c.mesh_a);
    b = load_obj(c.mesh_b);
  } else {
    const HandModel model = load_or_generate(c);
    const RefineScenario s = scenario_for(model, c.scenario);
    a = forward(model, s.initial[0].shape, s.initial[0].pose).mesh;
    b = s.object ? *s.object : forward(model, s.initial[1].shape, s.initial[1].pose).mesh;
  }
  const PenetrationPair pair = penetration(a, b, c.resolution);
  if (!c.out.empty()) save_sdf(c.out, voxelize_sdf(b, c.resolution));
  return {{"a_into_b", report_json(pair.a_into_b)},
          {"b_into_a", report_json(pair.b_into_a)},
          {"loss_pene", loss_pene(pair)}};
}

json cmd_refine(Context& ctx) {
  const ExperimentConfig& c = ctx.config;
  const HandModel model = load_or_generate(c);
  const RefineScenario s = scenario_for(model, c.scenario);
  RefineConfig rc;
  rc.step_size = c.step_size;
  rc.max_iters = c.max_iters;
  rc.grid_refresh = c.grid_refresh;
  rc.resolution = c.resolution;
  rc.weights = LossWeights::from_values(c.weights);
  rc.free = s.free;
  const RefineResult r = refine_interaction(model, s.initial, s.targets, s.object, rc);
  if (!c.out.empty()) {
    auto file = open_for_writing(c.out);
    write_trace_csv(file, r.trace);
  }
  const Alignment align = alignment_from_string(c.align);
  json reports = json::array();
  for (std::size_t h = 0; h < r.hands.size(); ++h) {
    const ForwardResult refined = forward(model, r.hands[h].shape, r.hands[h].pose);
    const ForwardResult truth = forward(model, s.ground_truth[h].shape, s.ground_truth[h].pose);
    EvalReport e = evaluate(refined.mesh, refined.joints, truth.mesh, truth.joints, align,
                            "hand_" + std::to_string(h));
    e.a_pd = r.reports[h].a_pd;
    e.m_pd = r.reports[h].m_pd;
    reports.push_back(to_json(e));
  }
  auto row = [](const TraceRow& t) {
    return json{{"iter", t.iter}, {"l_inter", t.l_inter}, {"l_pene", t.l_pene}, {"m_pd", t.m_pd}, {"mpjpe", t.mpjpe}};
  };
  bool monotone = true;
  for (std::size_t i = 1; i < r.trace.size(); ++i) monotone = monotone && r.trace[i].l_inter <= r.trace[i - 1].l_inter;
  return {{"status", to_string(r.status)},
          {"iterations", r.iterations},
          {"initial", row(r.trace.front())},
          {"final", row(r.trace.back())},
          {"monotone", monotone},
          {"eval_reports", reports}};
}

json cmd_report(Context& ctx) {
  const ExperimentConfig& c = ctx.config;
  if (c.inputs.empty()) throw UsageError("report needs at least one --inputs file");
  std::vector<EvalReport> all;
  json list = json::array();
  for (const std::string& path : c.inputs) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    json doc;
    try {
      doc = json::parse(in);
    } catch (const json::exception& e) {
      throw ParseError("report", path + ": " + e.what());
    }
    const json* reports = nullptr;
    if (doc.contains("result") && doc["result"].contains("eval_reports")) reports = &doc["result"]["eval_reports"];
    if (!reports) continue;
    for (const json& r : *reports) {
      EvalReport e = eval_report_from_json(r);
      json entry = to_json(e);
      entry["source"] = path;
      list.push_back(entry);
      all.push_back(std::move(e));
    }
  }
  if (!c.out.empty()) {
    auto file = open_for_writing(c.out);
    for (std::size_t i = 0; i < all.size(); ++i) file << (i ? "\n" : "") << to_key_value(all[i]);
  }
  return {{"count", all.size()}, {"reports", list}, {"mean", to_json(mean_report(all, "mean"))}};
}

// ---------------------------------------------------------------------------
// Flag plumbing: each flag writes into scratch storage and is applied on
// top of the config file only when it was given.

struct Binder {
  CLI::App* app;
  std::vector<std::function<void(ExperimentConfig&)>> appliers;

  template <typename T, typename Field>
  CLI::Option* add(const std::string& name, Field field, const std::string& help) {
    auto value = std::make_shared<T>();
    CLI::Option* opt = app->add_option(name, *value, help);
    appliers.push_back([opt, value, field](ExperimentConfig& c) {
      if (opt->count() > 0) field(c, *value);
    });
    return opt;
  }
};

void add_common(Binder& b) {
  b.add<std::uint64_t>("--seed", [](auto& c, auto v) { c.seed = v; }, "Random seed");
  b.add<std::string>("--model", [](auto& c, const auto& v) { c.model = v; }, "Model container (default: synthetic)");
  b.add<std::uint64_t>("--model-seed", [](auto& c, auto v) { c.model_seed = v; }, "Synthetic model seed");
  b.add<int>("--vertices", [](auto& c, auto v) { c.model_vertices = v; }, "Synthetic vertex budget");
  b.add<int>("--shape-dims", [](auto& c, auto v) { c.shape_dims = v; }, "Synthetic shape dimensions");
  b.add<int>("--poses", [](auto& c, auto v) { c.poses = v; }, "Number of sampled poses");
  b.add<double>("--max-flexion", [](auto& c, auto v) { c.max_flexion = v; }, "Maximum flexion, rad");
  b.add<std::string>("--twist", [](auto& c, const auto& v) { c.twist = v; }, "Twist distribution: zero, normal, uniform");
  b.add<double>("--twist-scale", [](auto& c, auto v) { c.twist_scale = v; }, "Twist sigma or half-width, rad");
  b.add<int>("--resolution", [](auto& c, auto v) { c.resolution = v; }, "SDF cells per axis");
  b.add<std::string>("--out", [](auto& c, const auto& v) { c.out = v; }, "Primary output file");
  b.add<std::string>("--report", [](auto& c, const auto& v) { c.report = v; }, "JSON report path (default stdout)");
  b.add<std::vector<double>>("--weights", [](auto& c, const auto& v) {
     std::copy(v.begin(), v.end(), c.weights.begin());
   }, "Loss weights lambda1..lambda6")->expected(6);
  b.add<std::string>("--align", [](auto& c, const auto& v) { c.align = v; }, "Alignment: raw or root");
}

struct Command {
  std::string name;
  std::string help;
  json (*run)(Context&);
};

}  // namespace

void ExperimentConfig::validate() const {
  if (poses && *poses < 1) throw UsageError("--poses must be at least 1");
  if (model_vertices < 100) throw UsageError("--vertices must be at least 100");
  if (shape_dims < 0) throw UsageError("--shape-dims must be non-negative");
  if (resolution < 4) throw UsageError("--resolution must be at least 4");
  if (max_iters < 1) throw UsageError("--max-iters must be at least 1");
  if (grid_refresh < 1) throw UsageError("--grid-refresh must be at least 1");
  if (!(step_size > 0.0)) throw UsageError("--step-size must be positive");
  if (!(max_flexion >= 0.0) || !(twist_scale >= 0.0) || !(max_abduction >= 0.0)) {
    throw UsageError("sampling ranges must be non-negative");
  }
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw UsageError("--weights must be finite and non-negative");
  }
  twist_distribution(twist);
  if (align != "raw" && align != "root" && align != "root-relative") {
    throw UsageError("--align must be raw or root");
  }
}

json to_json(const ExperimentConfig& c) {
  json doc = {{"seed", c.seed},
              {"model", c.model},
              {"model_seed", c.model_seed},
              {"model_vertices", c.model_vertices},
              {"shape_dims", c.shape_dims},
              {"max_flexion", c.max_flexion},
              {"max_abduction", c.max_abduction},
              {"twist", c.twist},
              {"twist_scale", c.twist_scale},
              {"resolution", c.resolution},
              {"out", c.out},
              {"report", c.report},
              {"weights", c.weights},
              {"align", c.align},
              {"scenario", c.scenario},
              {"max_iters", c.max_iters},
              {"step_size", c.step_size},
              {"grid_refresh", c.grid_refresh},
              {"steps", c.steps},
              {"mesh_a", c.mesh_a},
              {"mesh_b", c.mesh_b},
              {"inputs", c.inputs}};
  doc["poses"] = c.poses ? json(*c.poses) : json(nullptr);
  return doc;
}

void apply_json(ExperimentConfig& c, const json& doc) {
  if (!doc.is_object()) throw UsageError("config must be a JSON object");
  try {
    for (const auto& [key, value] : doc.items()) {
      if (key == "seed") c.seed = value.get<std::uint64_t>();
      else if (key == "model") c.model = value.get<std::string>();
      else if (key == "model_seed") c.model_seed = value.get<std::uint64_t>();
      else if (key == "model_vertices") c.model_vertices = value.get<int>();
      else if (key == "shape_dims") c.shape_dims = value.get<int>();
      else if (key == "poses") c.poses = value.is_null() ? std::nullopt : std::optional<int>(value.get<int>());
      else if (key == "max_flexion") c.max_flexion = value.get<double>();
      else if (key == "max_abduction") c.max_abduction = value.get<double>();
      else if (key == "twist") c.twist = value.get<std::string>();
      else if (key == "twist_scale") c.twist_scale = value.get<double>();
      else if (key == "resolution") c.resolution = value.get<int>();
      else if (key == "out") c.out = value.get<std::string>();
      else if (key == "report") c.report = value.get<std::string>();
      else if (key == "weights") {
        const auto w = value.get<std::vector<double>>();
        if (w.size() != 6) throw UsageError("config 'weights' needs six values");
        std::copy(w.begin(), w.end(), c.weights.begin());
      }
      else if (key == "align") c.align = value.get<std::string>();
      else if (key == "scenario") c.scenario = value.get<std::string>();
      else if (key == "max_iters") c.max_iters = value.get<int>();
      else if (key == "step_size") c.step_size = value.get<double>();
      else if (key == "grid_refresh") c.grid_refresh = value.get<int>();
      else if (key == "steps") c.steps = value.get<int>();
      else if (key == "mesh_a") c.mesh_a = value.get<std::string>();
      else if (key == "mesh_b") c.mesh_b = value.get<std::string>();
      else if (key == "inputs") c.inputs = value.get<std::vector<std::string>>();
      else throw UsageError("unknown config key '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Parametric hand model toolkit", "handfit"};
  app.require_subcommand(1);

  static const Command commands[] = {
      {"gen-model", "Generate a synthetic hand model container", cmd_gen_model},
      {"forward", "Pose sampled hands and export OBJ meshes", cmd_forward},
      {"ik-roundtrip", "Forward, invert with twist-swing IK, forward again", cmd_ik_roundtrip},
      {"gap-report", "Regressor-vs-kinematic joint gap along a flexion sweep", cmd_gap_report},
      {"twist-ablation", "Reconstruction error with estimated, zero and random twists", cmd_twist_ablation},
      {"penetration", "Penetration depths between two meshes", cmd_penetration},
      {"refine", "Remove interpenetration by gradient descent", cmd_refine},
      {"report", "Aggregate evaluation reports from earlier runs", cmd_report},
  };

  std::vector<Binder> binders;
  std::vector<std::string> config_paths(std::size(commands));
  binders.reserve(std::size(commands));
  for (std::size_t i = 0; i < std::size(commands); ++i) {
    Binder b{app.add_subcommand(commands[i].name, commands[i].help), {}};
    b.app->add_option("--config", config_paths[i], "JSON config file; flags take precedence");
    add_common(b);
    const std::string& name = commands[i].name;
    if (name == "refine" || name == "penetration") {
      b.add<std::string>("--scenario", [](auto& c, const auto& v) { c.scenario = v; }, "two-hand or hand-object");
    }
    if (name == "refine") {
      b.add<int>("--max-iters", [](auto& c, auto v) { c.max_iters = v; }, "Iteration cap");
      b.add<double>("--step-size", [](auto& c, auto v) { c.step_size = v; }, "Initial step per iteration");
      b.add<int>("--grid-refresh", [](auto& c, auto v) { c.grid_refresh = v; }, "Gradient grid refresh period");
    }
    if (name == "gap-report") {
      b.add<int>("--steps", [](auto& c, auto v) { c.steps = v; }, "Flexion sweep samples");
    }
    if (name == "penetration") {
      b.add<std::string>("--mesh-a", [](auto& c, const auto& v) { c.mesh_a = v; }, "First OBJ mesh");
      b.add<std::string>("--mesh-b", [](auto& c, const auto& v) { c.mesh_b = v; }, "Second OBJ mesh");
    }
    if (name == "report") {
      b.add<std::vector<std::string>>("--inputs", [](auto& c, const auto& v) { c.inputs = v; }, "Report JSON files");
    }
    binders.push_back(std::move(b));
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: usage: " << e.what() << '\n';
    return 2;
  }

  std::size_t chosen = 0;
  while (!binders[chosen].app->parsed()) ++chosen;

  try {
    Context ctx;
    if (!config_paths[chosen].empty()) {
      std::ifstream in(config_paths[chosen]);
      if (!in) throw UsageError("cannot read config '" + config_paths[chosen] + "'");
      json doc;
      try {
        doc = json::parse(in);
      } catch (const json::exception& e) {
        throw UsageError(std::string("config: ") + e.what());
      }
      apply_json(ctx.config, doc);
    }
    for (const auto& apply : binders[chosen].appliers) apply(ctx.config);
    ctx.config.validate();
    ctx.rng.seed(ctx.config.seed);

    json doc = {{"command", commands[chosen].name},
                {"config", to_json(ctx.config)},
                {"result", commands[chosen].run(ctx)}};
    const std::string text = doc.dump(2) + "\n";
    if (ctx.config.report.empty()) {
      out << text;
    } else {
      open_for_writing(ctx.config.report) << text;
    }
    return 0;
  } catch (const UsageError& e) {
    err << "error: usage: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    err << "error: " << error_class(e) << ": " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    err << "error: internal: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace handfit::cli
