#include "psun/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace psun {

namespace {

constexpr int kPanelW = 360;
constexpr int kPanelH = 200;
constexpr int kMargin = 40;

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

struct Panel {
  std::string title;
  std::vector<std::vector<std::pair<double, double>>> series;
  std::vector<std::string> labels;
  bool reference_diagonal = false;
};

void render(const std::string& path, const std::vector<Panel>& panels, int cols) {
  const int rows = (static_cast<int>(panels.size()) + cols - 1) / cols;
  const int width = cols * kPanelW;
  const int height = rows * kPanelH;
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"10\">\n";
  svg << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
  for (std::size_t pi = 0; pi < panels.size(); ++pi) {
    const Panel& p = panels[pi];
    const int px = static_cast<int>(pi % cols) * kPanelW;
    const int py = static_cast<int>(pi / cols) * kPanelH;
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& s : p.series)
      for (const auto& [x, y] : s) {
        xmin = std::min(xmin, x);
        xmax = std::max(xmax, x);
        ymin = std::min(ymin, y);
        ymax = std::max(ymax, y);
      }
    if (p.reference_diagonal) {
      xmin = std::min(xmin, 0.0);
      xmax = std::max(xmax, 1.0);
      ymin = std::min(ymin, 0.0);
      ymax = std::max(ymax, 1.0);
    }
    if (!(xmax > xmin)) xmax = xmin + 1.0;
    if (!(ymax > ymin)) {
      ymax = ymin + 1.0;
      ymin -= 1.0;
    }
    const double plot_w = kPanelW - 2.0 * kMargin;
    const double plot_h = kPanelH - 2.0 * kMargin;
    auto sx = [&](double x) { return px + kMargin + (x - xmin) / (xmax - xmin) * plot_w; };
    auto sy = [&](double y) { return py + kPanelH - kMargin - (y - ymin) / (ymax - ymin) * plot_h; };

    svg << "<rect x=\"" << px + kMargin << "\" y=\"" << py + kMargin << "\" width=\"" << plot_w
        << "\" height=\"" << plot_h << "\" fill=\"none\" stroke=\"#999\"/>\n";
    svg << "<text x=\"" << px + kPanelW / 2 << "\" y=\"" << py + 14
        << "\" text-anchor=\"middle\" font-size=\"11\">" << p.title << "</text>\n";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3g", xmin);
    svg << "<text x=\"" << px + kMargin << "\" y=\"" << py + kPanelH - kMargin + 14
        << "\" text-anchor=\"middle\">" << buf << "</text>\n";
    std::snprintf(buf, sizeof(buf), "%.3g", xmax);
    svg << "<text x=\"" << px + kPanelW - kMargin << "\" y=\"" << py + kPanelH - kMargin + 14
        << "\" text-anchor=\"middle\">" << buf << "</text>\n";
    std::snprintf(buf, sizeof(buf), "%.3g", ymin);
    svg << "<text x=\"" << px + kMargin - 4 << "\" y=\"" << py + kPanelH - kMargin
        << "\" text-anchor=\"end\">" << buf << "</text>\n";
    std::snprintf(buf, sizeof(buf), "%.3g", ymax);
    svg << "<text x=\"" << px + kMargin - 4 << "\" y=\"" << py + kMargin + 4
        << "\" text-anchor=\"end\">" << buf << "</text>\n";

    if (p.reference_diagonal) {
      svg << "<line x1=\"" << sx(0) << "\" y1=\"" << sy(0) << "\" x2=\"" << sx(1) << "\" y2=\""
          << sy(1) << "\" stroke=\"#bbb\" stroke-dasharray=\"4,3\"/>\n";
    }
    for (std::size_t si = 0; si < p.series.size(); ++si) {
      const char* color = kColors[si % 6];
      svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1\" points=\"";
      for (const auto& [x, y] : p.series[si]) svg << sx(x) << ',' << sy(y) << ' ';
      svg << "\"/>\n";
      if (si < p.labels.size() && !p.labels[si].empty()) {
        svg << "<text x=\"" << px + kMargin + 6 << "\" y=\"" << py + kMargin + 12 + 11 * si
            << "\" fill=\"" << color << "\">" << p.labels[si] << "</text>\n";
      }
    }
  }
  svg << "</svg>\n";
  std::ofstream out(path);
  if (!out) throw std::runtime_error("svg: cannot open " + path);
  out << svg.str();
}

}  // namespace

void write_trace_svg(const std::string& path, const DrawMatrix& draws, int max_panels) {
  const int p = std::min<int>(max_panels, static_cast<int>(draws.draws.cols()));
  std::vector<Panel> panels(p);
  for (int j = 0; j < p; ++j) {
    panels[j].title = j < static_cast<int>(draws.names.size()) ? draws.names[j]
                                                               : "beta_" + std::to_string(j + 1);
    std::vector<std::pair<double, double>> s;
    const long n = draws.draws.rows();
    const long stride = std::max<long>(1, n / 2000);  // cap the path size
    for (long i = 0; i < n; i += stride) s.emplace_back(static_cast<double>(i), draws.draws(i, j));
    panels[j].series.push_back(std::move(s));
  }
  render(path, panels, 2);
}

void write_acf_svg(const std::string& path, const ChainSummary& summary, int max_panels) {
  const int p = std::min<int>(max_panels, static_cast<int>(summary.coefficients.size()));
  std::vector<Panel> panels(p);
  for (int j = 0; j < p; ++j) {
    const auto& c = summary.coefficients[j];
    panels[j].title = "acf " + c.name;
    std::vector<std::pair<double, double>> s;
    s.emplace_back(0.0, 1.0);
    for (std::size_t k = 0; k < c.acf.size(); ++k)
      s.emplace_back(static_cast<double>(k + 1), c.acf[k]);
    panels[j].series.push_back(std::move(s));
  }
  render(path, panels, 2);
}

void write_coverage_svg(const std::string& path, const CoverageTable& table) {
  // One panel per combo, two curves (intercept, others) against the diagonal.
  std::vector<Panel> panels;
  for (std::size_t i = 0; i + 1 < table.rows.size(); i += 2) {
    Panel p;
    p.title = table.rows[i].combo;
    p.reference_diagonal = true;
    for (std::size_t r = i; r < i + 2; ++r) {
      std::vector<std::pair<double, double>> s;
      for (std::size_t l = 0; l < table.levels.size(); ++l)
        s.emplace_back(table.levels[l], table.rows[r].coverage[l]);
      p.series.push_back(std::move(s));
      p.labels.push_back(table.rows[r].group);
    }
    panels.push_back(std::move(p));
  }
  render(path, panels, 2);
}

}  // namespace psun
