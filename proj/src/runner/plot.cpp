#include "lsekit/runner/plot.hpp"

#include "lsekit/error.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace lsekit::run {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 450.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 170.0;
constexpr double kTop = 30.0;
constexpr double kBottom = 50.0;
constexpr int kTicks = 5;

constexpr std::array<const char*, 8> kPalette = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                                 "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

// Fixed two-decimal coordinates; locale independent.
std::string px(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 2);
  return std::string(buf, res.ptr);
}

std::string tick_label(double v) {
  if (std::abs(v) < 1e-12) v = 0.0;
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 4);
  return std::string(buf, res.ptr);
}

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string render_svg(const std::vector<Summary>& summaries, std::string_view metric) {
  const std::size_t k = metric_index(metric);
  double tmin = std::numeric_limits<double>::infinity();
  double tmax = -tmin;
  double ymin = tmin;
  double ymax = -tmin;
  for (const auto& s : summaries) {
    for (const auto& row : s.rows) {
      if (!std::isfinite(row.mean[k])) continue;
      const double half = kErrorBarScale * (std::isfinite(row.se[k]) ? row.se[k] : 0.0);
      tmin = std::min(tmin, double(row.t));
      tmax = std::max(tmax, double(row.t));
      ymin = std::min(ymin, row.mean[k] - half);
      ymax = std::max(ymax, row.mean[k] + half);
    }
  }
  if (!std::isfinite(tmin)) throw ConfigError("plot: no finite '" + std::string(metric) + "' values to draw");
  if (tmax == tmin) tmax = tmin + 1.0;
  if (ymax == ymin) {
    const double pad = std::max(1.0, std::abs(ymin)) * 0.05;
    ymin -= pad;
    ymax += pad;
  }

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto sx = [&](double t) { return kLeft + (t - tmin) / (tmax - tmin) * plot_w; };
  auto sy = [&](double y) { return kTop + (ymax - y) / (ymax - ymin) * plot_h; };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << px(kWidth) << "\" height=\""
    << px(kHeight) << "\" viewBox=\"0 0 " << px(kWidth) << ' ' << px(kHeight) << "\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<g font-family=\"sans-serif\" font-size=\"11\">\n";

  // Axes and ticks.
  o << "<rect x=\"" << px(kLeft) << "\" y=\"" << px(kTop) << "\" width=\"" << px(plot_w)
    << "\" height=\"" << px(plot_h) << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= kTicks; ++i) {
    const double t = tmin + (tmax - tmin) * i / kTicks;
    const double y = ymin + (ymax - ymin) * i / kTicks;
    o << "<line x1=\"" << px(sx(t)) << "\" y1=\"" << px(kTop + plot_h) << "\" x2=\"" << px(sx(t))
      << "\" y2=\"" << px(kTop + plot_h + 4) << "\" stroke=\"black\"/>\n";
    o << "<text x=\"" << px(sx(t)) << "\" y=\"" << px(kTop + plot_h + 16)
      << "\" text-anchor=\"middle\">" << tick_label(t) << "</text>\n";
    o << "<line x1=\"" << px(kLeft - 4) << "\" y1=\"" << px(sy(y)) << "\" x2=\"" << px(kLeft)
      << "\" y2=\"" << px(sy(y)) << "\" stroke=\"black\"/>\n";
    o << "<text x=\"" << px(kLeft - 6) << "\" y=\"" << px(sy(y) + 4)
      << "\" text-anchor=\"end\">" << tick_label(y) << "</text>\n";
  }
  o << "<text x=\"" << px(kLeft + plot_w / 2) << "\" y=\"" << px(kHeight - 12)
    << "\" text-anchor=\"middle\">iteration t</text>\n";
  o << "<text x=\"16\" y=\"" << px(kTop + plot_h / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
    << px(kTop + plot_h / 2) << ")\">" << escape(metric) << "</text>\n";

  for (std::size_t s = 0; s < summaries.size(); ++s) {
    const char* color = kPalette[s % kPalette.size()];
    const auto& rows = summaries[s].rows;
    o << "<g stroke=\"" << color << "\" fill=\"none\">\n";
    o << "<polyline stroke-width=\"1.5\" points=\"";
    bool first = true;
    for (const auto& row : rows) {
      if (!std::isfinite(row.mean[k])) continue;
      o << (first ? "" : " ") << px(sx(row.t)) << ',' << px(sy(row.mean[k]));
      first = false;
    }
    o << "\"/>\n";
    for (const auto& row : rows) {
      if (!std::isfinite(row.mean[k])) continue;
      const double half = kErrorBarScale * (std::isfinite(row.se[k]) ? row.se[k] : 0.0);
      o << "<line x1=\"" << px(sx(row.t)) << "\" y1=\"" << px(sy(row.mean[k] - half))
        << "\" x2=\"" << px(sx(row.t)) << "\" y2=\"" << px(sy(row.mean[k] + half))
        << "\" stroke-width=\"0.8\"/>\n";
    }
    o << "</g>\n";
    const double ly = kTop + 10 + 18.0 * static_cast<double>(s);
    const double lx = kLeft + plot_w + 14;
    o << "<line x1=\"" << px(lx) << "\" y1=\"" << px(ly) << "\" x2=\"" << px(lx + 22) << "\" y2=\""
      << px(ly) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    o << "<text class=\"legend\" x=\"" << px(lx + 28) << "\" y=\"" << px(ly + 4) << "\">"
      << escape(summaries[s].label) << "</text>\n";
  }
  o << "</g>\n</svg>\n";
  return o.str();
}

void emit_plot(const std::vector<Summary>& summaries, std::string_view metric,
               const std::string& path) {
  const std::string svg = render_svg(summaries, metric);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << svg;
  if (!out.flush()) throw IoError("write failed for '" + path + "'");
}

}  // namespace lsekit::run
