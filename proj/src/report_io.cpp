#include "precipuq/report_io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace precipuq {

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string format_percent(double fraction) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f%%", fraction * 100.0);
  return buf;
}

std::string format_grouped(std::size_t n) {
  const std::string digits = std::to_string(n);
  std::string out;
  const std::size_t first = digits.size() % 3 == 0 ? 3 : digits.size() % 3;
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (i != 0 && (i - first) % 3 == 0 && i >= first) out += ' ';
    out += digits[i];
  }
  return out;
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path.string());
  return out;
}

}  // namespace

void write_report_files(const EvaluationReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);

  {
    auto out = open_out(dir / "report.json");
    out << report.to_json().dump(2) << '\n';
  }
  {
    auto out = open_out(dir / "timings.json");
    out << report.timings_json().dump(2) << '\n';
  }

  const auto& table = report.table;
  {
    auto out = open_out(dir / "coverage.csv");
    out << "learner,level,coverage\n";
    for (const auto& learner : table.learners) {
      const auto& covs = table.coverage.at(learner);
      for (std::size_t l = 0; l < table.grid.size(); ++l) {
        out << learner << ',' << format_double(table.grid[l]) << ',' << format_double(covs[l])
            << '\n';
      }
    }
  }
  {
    auto out = open_out(dir / "skills_by_level.csv");
    out << "learner,level,mean_score,skill\n";
    for (const auto& learner : table.learners) {
      const auto& scores = table.mean_score.at(learner);
      const auto& skills = table.skill_by_level.at(learner);
      for (std::size_t l = 0; l < table.grid.size(); ++l) {
        out << learner << ',' << format_double(table.grid[l]) << ',' << format_double(scores[l])
            << ',' << format_double(skills[l]) << '\n';
      }
    }
  }
  {
    auto out = open_out(dir / "scoring_rule_skills.csv");
    out << "learner,mean_scoring_rule,skill\n";
    for (const auto& learner : table.learners) {
      out << learner << ',' << format_double(table.mean_scoring_rule.at(learner)) << ','
          << format_double(table.scoring_rule_skill.at(learner)) << '\n';
    }
  }
  {
    auto out = open_out(dir / "station_skills.csv");
    out << "learner,station_id,level,skill\n";
    for (const auto& learner : table.learners) {
      const auto by_level = table.station_skill_by_level.find(learner);
      if (by_level == table.station_skill_by_level.end()) continue;
      for (const auto& [station, skills] : by_level->second) {
        for (std::size_t l = 0; l < table.grid.size(); ++l) {
          out << learner << ',' << station << ',' << format_double(table.grid[l]) << ',';
          if (skills[l]) out << format_double(*skills[l]);
          out << '\n';
        }
        out << learner << ',' << station << ",scoring_rule,";
        const auto& rule = table.station_scoring_rule_skill.at(learner).at(station);
        if (rule) out << format_double(*rule);
        out << '\n';
      }
    }
  }
}

nlohmann::ordered_json importance_json(const ImportanceReport& report) {
  nlohmann::ordered_json j;
  j["version"] = 1;
  j["kind"] = "importance_report";
  j["levels"] = report.levels.levels();
  j["predictor_names"] = report.predictor_names;
  nlohmann::ordered_json per_level = nlohmann::ordered_json::array();
  for (std::size_t l = 0; l < report.levels.size(); ++l) {
    nlohmann::ordered_json cell;
    cell["level"] = report.levels[l];
    std::vector<double> gains(report.predictor_names.size());
    for (std::size_t f = 0; f < gains.size(); ++f) gains[f] = report.total_gain(l, f);
    cell["total_gain"] = gains;
    cell["rank"] = report.ranks[l];
    per_level.push_back(std::move(cell));
  }
  j["per_level"] = std::move(per_level);
  return j;
}

void write_importance_csv(const ImportanceReport& report, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "level,predictor_index,predictor_name,total_gain,rank\n";
  for (std::size_t l = 0; l < report.levels.size(); ++l) {
    for (std::size_t f = 0; f < report.predictor_names.size(); ++f) {
      out << format_double(report.levels[l]) << ',' << (f + 1) << ','
          << report.predictor_names[f] << ',' << format_double(report.total_gain(l, f)) << ','
          << report.ranks[l][f] << '\n';
    }
  }
}

namespace {

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

}  // namespace

std::string render_ranked_skills(const nlohmann::ordered_json& report) {
  const auto& scores = report.at("scores");
  const std::string benchmark = report.at("config").at("benchmark_learner").get<std::string>();

  struct Row {
    std::string learner;
    double rule = 0.0;
    double skill = 0.0;
  };
  std::vector<Row> rows;
  for (auto it = scores.begin(); it != scores.end(); ++it) {
    if (it.value().at("scoring_rule_skill").is_null()) continue;
    rows.push_back({it.key(), it.value().at("mean_scoring_rule").get<double>(),
                    it.value().at("scoring_rule_skill").get<double>()});
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const Row& a, const Row& b) { return a.skill > b.skill; });

  std::ostringstream out;
  out << pad("learner", 18) << pad("scoring_rule", 16) << "skill_vs_" << benchmark << '\n';
  for (const auto& r : rows) {
    std::string name = r.learner;
    if (r.learner == benchmark) name += " (benchmark)";
    out << pad(name, 18) << pad(format_double(r.rule), 16) << format_percent(r.skill) << '\n';
  }
  return out.str();
}

std::string render_report_tables(const nlohmann::ordered_json& report) {
  std::ostringstream out;
  const auto levels = report.at("levels").get<std::vector<double>>();
  const auto& scores = report.at("scores");

  out << "samples: " << format_grouped(report.at("n_samples").get<std::size_t>())
      << "  stations: " << format_grouped(report.at("n_stations").get<std::size_t>())
      << "  folds: " << report.at("fold_sizes").size() << " ("
      << report.at("fold_granularity").get<std::string>() << ")\n\n";

  out << "coverage by level\n";
  out << pad("learner", 18);
  for (double a : levels) out << pad(format_double(a), 9);
  out << '\n';
  for (auto it = scores.begin(); it != scores.end(); ++it) {
    out << pad(it.key(), 18);
    const auto& cov = it.value().at("coverage");
    if (cov.is_null()) {
      out << "(failed)";
    } else {
      for (const auto& c : cov) out << pad(format_double(c.get<double>()), 9);
    }
    out << '\n';
  }
  out << '\n';

  out << "quantile skill by level (vs benchmark)\n";
  out << pad("learner", 18);
  for (double a : levels) out << pad(format_double(a), 9);
  out << '\n';
  for (auto it = scores.begin(); it != scores.end(); ++it) {
    out << pad(it.key(), 18);
    const auto& sk = it.value().at("skill");
    if (sk.is_null()) {
      out << "(failed)";
    } else {
      for (const auto& s : sk) out << pad(format_percent(s.get<double>()), 9);
    }
    out << '\n';
  }
  out << '\n';

  out << "scoring rule skills\n" << render_ranked_skills(report);
  return out.str();
}

}  // namespace precipuq
