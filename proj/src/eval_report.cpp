#include "handfit/eval_report.hpp"

#include <cstdio>
#include <sstream>

#include "handfit/errors.hpp"

namespace handfit {

namespace {

std::string exact(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

EvalReport evaluate(const Mesh& pred_mesh, const Points& pred_joints, const Mesh& gt_mesh,
                    const Points& gt_joints, Alignment alignment, std::string label) {
  EvalReport r;
  r.label = std::move(label);
  r.alignment = alignment;
  r.mpjpe = mpjpe(pred_joints, gt_joints, alignment);
  r.mpvpe = mpvpe(pred_mesh.vertices, gt_mesh.vertices, alignment, pred_joints.row(0).transpose(),
                  gt_joints.row(0).transpose());
  r.edge_err = edge_error(pred_mesh, gt_mesh);
  r.normal_err = normal_error(pred_mesh, gt_mesh);
  return r;
}

std::string to_key_value(const EvalReport& r) {
  std::ostringstream out;
  out << "label=" << r.label << '\n'
      << "alignment=" << to_string(r.alignment) << '\n'
      << "mpjpe=" << exact(r.mpjpe) << '\n'
      << "mpvpe=" << exact(r.mpvpe) << '\n'
      << "edge_err=" << exact(r.edge_err) << '\n'
      << "normal_err=" << exact(r.normal_err) << '\n';
  if (r.a_pd) out << "a_pd=" << exact(*r.a_pd) << '\n';
  if (r.m_pd) out << "m_pd=" << exact(*r.m_pd) << '\n';
  return out.str();
}

nlohmann::json to_json(const EvalReport& r) {
  nlohmann::json doc = {{"label", r.label},       {"alignment", to_string(r.alignment)},
                        {"mpjpe", r.mpjpe},       {"mpvpe", r.mpvpe},
                        {"edge_err", r.edge_err}, {"normal_err", r.normal_err}};
  if (r.a_pd) doc["a_pd"] = *r.a_pd;
  if (r.m_pd) doc["m_pd"] = *r.m_pd;
  return doc;
}

EvalReport eval_report_from_json(const nlohmann::json& doc) {
  try {
    EvalReport r;
    r.label = doc.value("label", std::string{});
    r.alignment = alignment_from_string(doc.at("alignment").get<std::string>());
    r.mpjpe = doc.at("mpjpe").get<double>();
    r.mpvpe = doc.at("mpvpe").get<double>();
    r.edge_err = doc.at("edge_err").get<double>();
    r.normal_err = doc.at("normal_err").get<double>();
    if (doc.contains("a_pd")) r.a_pd = doc.at("a_pd").get<double>();
    if (doc.contains("m_pd")) r.m_pd = doc.at("m_pd").get<double>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("report", e.what());
  } catch (const InputError& e) {
    throw ParseError("report", e.what());
  }
}

}  // namespace handfit
