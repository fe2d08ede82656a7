#include "handfit/model_io.hpp"

#include <fstream>

#include "handfit/container.hpp"
#include "handfit/errors.hpp"

namespace handfit {

namespace {

template <class Matrix>
Section f64_section(const std::string& name, const Matrix& m) {
  Section s;
  s.name = name;
  s.rows = m.rows();
  s.cols = m.cols();
  std::vector<double> v(static_cast<std::size_t>(m.size()));
  Eigen::Map<RowMatrix>(v.data(), m.rows(), m.cols()) = m;
  s.data = std::move(v);
  return s;
}

Section i32_section(const std::string& name, std::int64_t rows, std::int64_t cols,
                    std::vector<std::int32_t> v) {
  Section s;
  s.name = name;
  s.rows = rows;
  s.cols = cols;
  s.data = std::move(v);
  return s;
}

const Section& require(const SectionMap& sections, const std::string& name) {
  auto it = sections.find(name);
  if (it == sections.end()) throw ParseError(name, "required section missing");
  return it->second;
}

RowMatrix to_matrix(const Section& s) {
  const auto& v = s.f64();
  return Eigen::Map<const RowMatrix>(v.data(), s.rows, s.cols);
}

void expect_cols(const Section& s, std::int64_t cols) {
  if (s.cols != cols) {
    throw ParseError(s.name, "expected " + std::to_string(cols) + " columns, found " +
                                 std::to_string(s.cols));
  }
}

}  // namespace

void save_model(std::ostream& out, const HandModel& model) {
  validate(model);
  std::vector<Section> sections;
  sections.push_back(f64_section("template", model.template_vertices));
  {
    std::vector<std::int32_t> f(static_cast<std::size_t>(model.faces.size()));
    Eigen::Map<Faces>(f.data(), model.faces.rows(), 3) = model.faces;
    sections.push_back(i32_section("faces", model.faces.rows(), 3, std::move(f)));
  }
  sections.push_back(f64_section("shape_blendshapes", model.shape_blendshapes));
  if (model.pose_blendshapes.rows() > 0) {
    sections.push_back(f64_section("pose_blendshapes", model.pose_blendshapes));
  }
  sections.push_back(f64_section("skinning_weights", model.skinning_weights));
  sections.push_back(f64_section("joint_regressor", model.joint_regressor));
  sections.push_back(i32_section("parents", model.num_joints(), 1,
                                 {model.parents.begin(), model.parents.end()}));
  sections.push_back(i32_section("tip_parents", kNumTips, 1,
                                 {model.tip_parents.begin(), model.tip_parents.end()}));
  write_container(out, sections);
}

void save_model(const std::filesystem::path& path, const HandModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open '" + path.string() + "' for writing");
  save_model(out, model);
  if (!out) throw InputError("failed writing '" + path.string() + "'");
}

HandModel load_model(std::istream& in) {
  const SectionMap sections = read_container(in);
  HandModel model;

  const Section& tpl = require(sections, "template");
  expect_cols(tpl, 3);
  model.template_vertices = to_matrix(tpl);
  const std::int64_t n = tpl.rows;

  const Section& faces = require(sections, "faces");
  expect_cols(faces, 3);
  model.faces = Eigen::Map<const Faces>(faces.i32().data(), faces.rows, 3);

  const Section& shape = require(sections, "shape_blendshapes");
  if (shape.rows > 0) expect_cols(shape, 3 * n);
  model.shape_blendshapes = to_matrix(shape);

  if (auto it = sections.find("pose_blendshapes"); it != sections.end()) {
    if (it->second.rows > 0) expect_cols(it->second, 3 * n);
    model.pose_blendshapes = to_matrix(it->second);
  }

  const Section& weights = require(sections, "skinning_weights");
  model.skinning_weights = to_matrix(weights);

  const Section& regressor = require(sections, "joint_regressor");
  expect_cols(regressor, n);
  model.joint_regressor = to_matrix(regressor);

  const Section& parents = require(sections, "parents");
  if (parents.cols != 1) throw ParseError("parents", "expected a single column");
  model.parents.assign(parents.i32().begin(), parents.i32().end());

  if (auto it = sections.find("tip_parents"); it != sections.end()) {
    const auto& tips = it->second.i32();
    if (it->second.cols != 1 || tips.size() != kNumTips) {
      throw ParseError("tip_parents", "expected " + std::to_string(kNumTips) + " x 1");
    }
    std::copy(tips.begin(), tips.end(), model.tip_parents.begin());
  }

  validate(model);
  return model;
}

HandModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  return load_model(in);
}

}  // namespace handfit
