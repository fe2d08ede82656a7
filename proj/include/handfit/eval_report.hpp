#pragma once

#include <optional>
#include <string>

#include "json.hpp"

#include "handfit/metrics.hpp"

namespace handfit {

/// Metrics for one predicted hand against its ground truth.
struct EvalReport {
  std::string label;
  Alignment alignment = Alignment::raw;
  double mpjpe = 0.0;       // mm
  double mpvpe = 0.0;       // mm
  double edge_err = 0.0;    // mm
  double normal_err = 0.0;  // dimensionless
  std::optional<double> a_pd;  // mm
  std::optional<double> m_pd;  // mm

  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

/// Vertex errors under root-relative alignment use the wrist joints (row 0)
/// as roots.
EvalReport evaluate(const Mesh& pred_mesh, const Points& pred_joints, const Mesh& gt_mesh,
                    const Points& gt_joints, Alignment alignment, std::string label = {});

/// One `key=value` line per field, doubles printed round-trip exact.
std::string to_key_value(const EvalReport& report);

nlohmann::json to_json(const EvalReport& report);
/// Throws ParseError("report") on missing or mistyped fields.
EvalReport eval_report_from_json(const nlohmann::json& doc);

}  // namespace handfit
