#include "dcsgd/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>

namespace dcsgd {

namespace {

constexpr double kWidth = 760.0, kHeight = 520.0;
constexpr double kLeft = 70.0, kRight = 20.0, kTop = 20.0, kBottom = 50.0;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                          "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

double clamp_log(double v, double floor_value) {
  return std::log10(std::max(v, floor_value));
}

}  // namespace

std::string render_summary_svg(const std::vector<SummaryRow>& rows, const std::string& metric) {
  if (metric != "excess_risk") {
    throw std::invalid_argument("plot: unsupported metric: " + metric);
  }
  std::map<std::string, std::vector<const SummaryRow*>> series;
  for (const SummaryRow& r : rows) {
    if (r.cost <= 0 || !std::isfinite(r.mean) || r.mean <= 0.0) continue;
    series[r.method].push_back(&r);
  }
  if (series.empty()) throw std::invalid_argument("plot: no plottable rows in summary");

  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (auto& [name, pts] : series) {
    std::sort(pts.begin(), pts.end(),
              [](const SummaryRow* a, const SummaryRow* b) { return a->cost < b->cost; });
    for (const SummaryRow* p : pts) {
      const double x = std::log10(static_cast<double>(p->cost));
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      const double lo = clamp_log(p->mean - p->sd, p->mean * 1e-3);
      const double hi = clamp_log(p->mean + p->sd, p->mean);
      ymin = std::min(ymin, lo);
      ymax = std::max(ymax, hi);
    }
  }
  if (xmax <= xmin) xmax = xmin + 1.0;
  if (ymax <= ymin) ymax = ymin + 1.0;
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - xmin) / (xmax - xmin) * plot_w; };
  auto py = [&](double y) { return kTop + (ymax - y) / (ymax - ymin) * plot_h; };

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n"
      << "  <rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" fill=\"white\"/>\n"
      << "  <rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << plot_w
      << "\" height=\"" << plot_h << "\" fill=\"none\" stroke=\"#333333\"/>\n";

  // axis ticks at integer log10 values
  for (int t = static_cast<int>(std::ceil(xmin)); t <= static_cast<int>(std::floor(xmax)); ++t) {
    const double x = px(t);
    svg << "  <line x1=\"" << fmt(x) << "\" y1=\"" << fmt(kTop + plot_h) << "\" x2=\"" << fmt(x)
        << "\" y2=\"" << fmt(kTop + plot_h + 5) << "\" stroke=\"#333333\"/>\n"
        << "  <text x=\"" << fmt(x) << "\" y=\"" << fmt(kTop + plot_h + 20)
        << "\" font-size=\"11\" text-anchor=\"middle\">1e" << t << "</text>\n";
  }
  for (int t = static_cast<int>(std::ceil(ymin)); t <= static_cast<int>(std::floor(ymax)); ++t) {
    const double y = py(t);
    svg << "  <line x1=\"" << fmt(kLeft - 5) << "\" y1=\"" << fmt(y) << "\" x2=\"" << fmt(kLeft)
        << "\" y2=\"" << fmt(y) << "\" stroke=\"#333333\"/>\n"
        << "  <text x=\"" << fmt(kLeft - 8) << "\" y=\"" << fmt(y + 4)
        << "\" font-size=\"11\" text-anchor=\"end\">1e" << t << "</text>\n";
  }
  svg << "  <text x=\"" << fmt(kLeft + plot_w / 2) << "\" y=\"" << fmt(kHeight - 12)
      << "\" font-size=\"12\" text-anchor=\"middle\">cost (gradient evaluations, log10)</text>\n"
      << "  <text x=\"16\" y=\"" << fmt(kTop + plot_h / 2)
      << "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << fmt(kTop + plot_h / 2) << ")\">mean excess risk (log10)</text>\n";

  int color = 0;
  for (const auto& [name, pts] : series) {
    const char* col = kPalette[color % 10];
    ++color;
    // +/- sd band
    std::ostringstream band;
    for (const SummaryRow* p : pts) {
      const double x = px(std::log10(static_cast<double>(p->cost)));
      const double y = py(clamp_log(p->mean + p->sd, p->mean));
      band << fmt(x) << ',' << fmt(y) << ' ';
    }
    for (auto it = pts.rbegin(); it != pts.rend(); ++it) {
      const SummaryRow* p = *it;
      const double x = px(std::log10(static_cast<double>(p->cost)));
      const double y = py(clamp_log(p->mean - p->sd, p->mean * 1e-3));
      band << fmt(x) << ',' << fmt(y) << ' ';
    }
    svg << "  <polygon points=\"" << band.str() << "\" fill=\"" << col
        << "\" fill-opacity=\"0.15\" stroke=\"none\"/>\n";
    svg << "  <polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"1.5\" points=\"";
    for (const SummaryRow* p : pts) {
      const double x = px(std::log10(static_cast<double>(p->cost)));
      const double y = py(std::log10(p->mean));
      svg << fmt(x) << ',' << fmt(y) << ' ';
    }
    svg << "\"><title>" << name << "</title></polyline>\n";
  }

  // legend
  double ly = kTop + 12;
  color = 0;
  for (const auto& [name, pts] : series) {
    const char* col = kPalette[color % 10];
    ++color;
    svg << "  <line x1=\"" << fmt(kLeft + 12) << "\" y1=\"" << fmt(ly) << "\" x2=\""
        << fmt(kLeft + 40) << "\" y2=\"" << fmt(ly) << "\" stroke=\"" << col
        << "\" stroke-width=\"2\"/>\n"
        << "  <text x=\"" << fmt(kLeft + 46) << "\" y=\"" << fmt(ly + 4)
        << "\" font-size=\"12\">" << name << "</text>\n";
    ly += 16;
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace dcsgd
