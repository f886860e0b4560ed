#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "precipuq/bench.hpp"

namespace precipuq {

// Shortest round-trip decimal representation.
std::string format_double(double v);

// Skill fraction as a percentage with two decimals: 0.111 -> "11.10%".
std::string format_percent(double fraction);

// Thousands grouped with thin spaces: 91623 -> "91 623".
std::string format_grouped(std::size_t n);

// Writes report.json, timings.json and the flat CSVs
// (coverage.csv, skills_by_level.csv, scoring_rule_skills.csv,
// station_skills.csv) into the directory.
void write_report_files(const EvaluationReport& report, const std::filesystem::path& dir);

void write_importance_csv(const ImportanceReport& report, const std::filesystem::path& path);
nlohmann::ordered_json importance_json(const ImportanceReport& report);

// Renders a previously written report.json into human-readable tables without
// recomputation. Used by the report subcommand.
std::string render_report_tables(const nlohmann::ordered_json& report);

// Ranked scoring-rule-skill table printed after a benchmark run.
std::string render_ranked_skills(const nlohmann::ordered_json& report);

}  // namespace precipuq
