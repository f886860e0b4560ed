#pragma once

#include <filesystem>

#include <json.hpp>

namespace precipuq {

// Static SVG figures rendered from a report.json document (no recomputation):
// per-learner coverage curves, the learner x level skill heatmap, and the
// scoring-rule skill bars. Writes coverage_curves.svg, skill_heatmap.svg and
// scoring_rule_skill_bars.svg into the directory.
void write_report_svgs(const nlohmann::ordered_json& report, const std::filesystem::path& dir);

// Importance rank heatmap (predictor x level) from an importance report.
void write_importance_svg(const nlohmann::ordered_json& importance,
                          const std::filesystem::path& path);

}  // namespace precipuq
