#include "precipuq/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "precipuq/report_io.hpp"

namespace precipuq {

namespace {

const char* kPalette[] = {"#1b6ca8", "#d1495b", "#66a182", "#edae49",
                          "#8d5a97", "#2e4057", "#00798c", "#c08552"};

std::string color(std::size_t i) { return kPalette[i % (sizeof(kPalette) / sizeof(kPalette[0]))]; }

void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path.string());
  out << body;
}

std::string svg_open(int w, int h) {
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
    << "\" viewBox=\"0 0 " << w << ' ' << h << "\" font-family=\"sans-serif\">\n";
  return s.str();
}

std::string text(double x, double y, const std::string& t, int size = 11,
                 const std::string& anchor = "start") {
  std::ostringstream s;
  s << "<text x=\"" << x << "\" y=\"" << y << "\" font-size=\"" << size << "\" text-anchor=\""
    << anchor << "\">" << t << "</text>\n";
  return s.str();
}

// Blue-to-white ramp for heatmaps; v in [0, 1], 1 = darkest.
std::string heat_color(double v) {
  v = std::clamp(v, 0.0, 1.0);
  const int r = static_cast<int>(255 - 200 * v);
  const int g = static_cast<int>(255 - 150 * v);
  const int b = 255;
  std::ostringstream s;
  s << "rgb(" << r << ',' << g << ',' << b << ')';
  return s.str();
}

struct LearnerSeries {
  std::string name;
  std::vector<double> values;
};

std::vector<LearnerSeries> collect(const nlohmann::ordered_json& report, const char* field) {
  std::vector<LearnerSeries> series;
  const auto& scores = report.at("scores");
  for (auto it = scores.begin(); it != scores.end(); ++it) {
    if (it.value().at(field).is_null()) continue;
    series.push_back({it.key(), it.value().at(field).get<std::vector<double>>()});
  }
  return series;
}

void write_coverage_svg(const nlohmann::ordered_json& report, const std::filesystem::path& path) {
  const auto levels = report.at("levels").get<std::vector<double>>();
  const auto series = collect(report, "coverage");

  const int width = 560, height = 420;
  const double x0 = 60, y0 = 30, plot_w = 380, plot_h = 340;
  auto px = [&](double a) { return x0 + a * plot_w; };
  auto py = [&](double c) { return y0 + (1.0 - c) * plot_h; };

  std::ostringstream s;
  s << svg_open(width, height);
  s << "<rect x=\"" << x0 << "\" y=\"" << y0 << "\" width=\"" << plot_w << "\" height=\""
    << plot_h << "\" fill=\"none\" stroke=\"#444\"/>\n";
  // Ideal coverage = level diagonal.
  s << "<line x1=\"" << px(0) << "\" y1=\"" << py(0) << "\" x2=\"" << px(1) << "\" y2=\"" << py(1)
    << "\" stroke=\"#999\" stroke-dasharray=\"4 3\"/>\n";
  for (double tick : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    s << text(px(tick), y0 + plot_h + 16, format_double(tick), 10, "middle");
    s << text(x0 - 8, py(tick) + 4, format_double(tick), 10, "end");
  }
  s << text(x0 + plot_w / 2, height - 10, "quantile level", 12, "middle");
  s << text(16, y0 + plot_h / 2, "coverage", 12, "middle");

  for (std::size_t k = 0; k < series.size(); ++k) {
    std::ostringstream pts;
    for (std::size_t l = 0; l < levels.size(); ++l) {
      pts << px(levels[l]) << ',' << py(series[k].values[l]) << ' ';
    }
    s << "<polyline points=\"" << pts.str() << "\" fill=\"none\" stroke=\"" << color(k)
      << "\" stroke-width=\"1.5\"/>\n";
    const double ly = y0 + 14 + 16 * static_cast<double>(k);
    s << "<rect x=\"" << x0 + plot_w + 14 << "\" y=\"" << ly - 9
      << "\" width=\"10\" height=\"10\" fill=\"" << color(k) << "\"/>\n";
    s << text(x0 + plot_w + 30, ly, series[k].name);
  }
  s << "</svg>\n";
  write_file(path, s.str());
}

void write_heatmap_svg(const nlohmann::ordered_json& report, const std::filesystem::path& path) {
  const auto levels = report.at("levels").get<std::vector<double>>();
  const auto series = collect(report, "skill");

  double max_abs = 1e-9;
  for (const auto& sr : series) {
    for (double v : sr.values) max_abs = std::max(max_abs, std::abs(v));
  }

  const double cell_w = 46, cell_h = 26, x0 = 130, y0 = 40;
  const int width = static_cast<int>(x0 + cell_w * static_cast<double>(levels.size()) + 30);
  const int height = static_cast<int>(y0 + cell_h * static_cast<double>(series.size()) + 40);

  std::ostringstream s;
  s << svg_open(width, height);
  s << text(x0, 20, "quantile skill vs benchmark (darker = better)", 12);
  for (std::size_t l = 0; l < levels.size(); ++l) {
    s << text(x0 + cell_w * (static_cast<double>(l) + 0.5), y0 - 6, format_double(levels[l]), 10,
              "middle");
  }
  for (std::size_t k = 0; k < series.size(); ++k) {
    const double y = y0 + cell_h * static_cast<double>(k);
    s << text(x0 - 8, y + cell_h / 2 + 4, series[k].name, 11, "end");
    for (std::size_t l = 0; l < levels.size(); ++l) {
      const double v = series[k].values[l];
      s << "<rect x=\"" << x0 + cell_w * static_cast<double>(l) << "\" y=\"" << y << "\" width=\""
        << cell_w - 2 << "\" height=\"" << cell_h - 2 << "\" fill=\""
        << heat_color(0.5 + 0.5 * v / max_abs) << "\" stroke=\"#ccc\"/>\n";
      s << text(x0 + cell_w * (static_cast<double>(l) + 0.5) - 1, y + cell_h / 2 + 4,
                format_percent(v), 8, "middle");
    }
  }
  s << "</svg>\n";
  write_file(path, s.str());
}

void write_bars_svg(const nlohmann::ordered_json& report, const std::filesystem::path& path) {
  struct Bar {
    std::string name;
    double skill;
  };
  std::vector<Bar> bars;
  const auto& scores = report.at("scores");
  for (auto it = scores.begin(); it != scores.end(); ++it) {
    if (it.value().at("scoring_rule_skill").is_null()) continue;
    bars.push_back({it.key(), it.value().at("scoring_rule_skill").get<double>()});
  }
  std::stable_sort(bars.begin(), bars.end(), [](const Bar& a, const Bar& b) {
    return a.skill > b.skill;
  });

  double max_abs = 1e-9;
  for (const auto& b : bars) max_abs = std::max(max_abs, std::abs(b.skill));

  const double x0 = 130, bar_h = 22, gap = 8, plot_w = 320;
  const double zero_x = x0 + plot_w / 2;
  const int width = static_cast<int>(x0 + plot_w + 90);
  const int height = static_cast<int>(40 + (bar_h + gap) * static_cast<double>(bars.size()) + 20);

  std::ostringstream s;
  s << svg_open(width, height);
  s << text(x0, 20, "quantile scoring rule skill vs benchmark", 12);
  s << "<line x1=\"" << zero_x << "\" y1=\"30\" x2=\"" << zero_x << "\" y2=\"" << height - 20
    << "\" stroke=\"#999\"/>\n";
  for (std::size_t k = 0; k < bars.size(); ++k) {
    const double y = 36 + (bar_h + gap) * static_cast<double>(k);
    const double len = plot_w / 2 * std::abs(bars[k].skill) / max_abs;
    const double bx = bars[k].skill >= 0 ? zero_x : zero_x - len;
    s << text(x0 - 8, y + bar_h / 2 + 4, bars[k].name, 11, "end");
    s << "<rect x=\"" << bx << "\" y=\"" << y << "\" width=\"" << std::max(len, 0.5)
      << "\" height=\"" << bar_h << "\" fill=\"" << color(k) << "\"/>\n";
    s << text(bars[k].skill >= 0 ? bx + len + 6 : bx - 6, y + bar_h / 2 + 4,
              format_percent(bars[k].skill), 10, bars[k].skill >= 0 ? "start" : "end");
  }
  s << "</svg>\n";
  write_file(path, s.str());
}

}  // namespace

void write_report_svgs(const nlohmann::ordered_json& report, const std::filesystem::path& dir) {
  write_coverage_svg(report, dir / "coverage_curves.svg");
  write_heatmap_svg(report, dir / "skill_heatmap.svg");
  write_bars_svg(report, dir / "scoring_rule_skill_bars.svg");
}

void write_importance_svg(const nlohmann::ordered_json& importance,
                          const std::filesystem::path& path) {
  const auto levels = importance.at("levels").get<std::vector<double>>();
  const auto names = importance.at("predictor_names").get<std::vector<std::string>>();
  const auto& per_level = importance.at("per_level");
  const auto p = names.size();

  const double cell_w = 44, cell_h = 18, x0 = 110, y0 = 40;
  const int width = static_cast<int>(x0 + cell_w * static_cast<double>(levels.size()) + 30);
  const int height = static_cast<int>(y0 + cell_h * static_cast<double>(p) + 30);

  std::ostringstream s;
  s << svg_open(width, height);
  s << text(x0, 20, "predictor importance rank (darker = more important)", 12);
  for (std::size_t l = 0; l < levels.size(); ++l) {
    s << text(x0 + cell_w * (static_cast<double>(l) + 0.5), y0 - 6, format_double(levels[l]), 10,
              "middle");
  }
  for (std::size_t f = 0; f < p; ++f) {
    const double y = y0 + cell_h * static_cast<double>(f);
    s << text(x0 - 8, y + cell_h / 2 + 4, names[f], 10, "end");
    for (std::size_t l = 0; l < levels.size(); ++l) {
      const int rank = per_level[l].at("rank")[f].get<int>();
      const double v = 1.0 - (static_cast<double>(rank) - 1.0) / static_cast<double>(p - 1);
      s << "<rect x=\"" << x0 + cell_w * static_cast<double>(l) << "\" y=\"" << y << "\" width=\""
        << cell_w - 2 << "\" height=\"" << cell_h - 2 << "\" fill=\"" << heat_color(v)
        << "\" stroke=\"#ddd\"/>\n";
      s << text(x0 + cell_w * (static_cast<double>(l) + 0.5) - 1, y + cell_h / 2 + 4,
                std::to_string(rank), 9, "middle");
    }
  }
  s << "</svg>\n";
  write_file(path, s.str());
}

}  // namespace precipuq
