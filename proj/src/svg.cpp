#include "hfl/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <utility>
#include <vector>

#include "hfl/csv.hpp"
#include "hfl/error.hpp"

namespace hfl {

namespace {

constexpr double kWidth = 800, kHeight = 500;
constexpr double kLeft = 80, kRight = 200, kTop = 40, kBottom = 60;
constexpr int kTicks = 5;
const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string sig4(double v) {
  if (std::abs(v) < 1e-12) v = 0.0;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
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

struct Series {
  std::string label;
  std::vector<std::pair<double, double>> points;
};

}  // namespace

double sweep_metric(const SweepRow& r, const std::string& metric) {
  if (metric == "coverage") return r.coverage;
  if (metric == "mean_width" || metric == "width") return r.mean_width;
  if (metric == "mse") return r.mse;
  if (metric == "rel_bias") return r.rel_bias;
  if (metric == "varest_rel_bias") return r.varest_rel_bias;
  if (metric == "exact_bias") return r.exact_bias;
  if (metric == "exact_var") return r.exact_var;
  if (metric == "acceptance_rate") return r.acceptance_rate;
  fail(ErrorCode::InvalidArgument, "unknown sweep metric '" + metric + "'");
}

std::string render_svg(const SweepResult& sweep, const std::string& metric) {
  require(!sweep.rows.empty(), ErrorCode::InvalidArgument, "cannot plot an empty sweep");

  std::vector<Series> series;
  for (const auto& r : sweep.rows) {
    const std::string label = r.model + " / situation " + to_string(r.situation);
    auto it = std::find_if(series.begin(), series.end(), [&](const Series& s) { return s.label == label; });
    if (it == series.end()) {
      series.push_back({label, {}});
      it = series.end() - 1;
    }
    it->points.emplace_back(r.pi_b, sweep_metric(r, metric));
  }

  double x_lo = 1.0, x_hi = 0.0, y_lo = 0.0, y_hi = 0.0;
  bool first = true;
  for (const auto& s : series) {
    for (const auto& [x, y] : s.points) {
      if (!std::isfinite(y)) continue;
      x_lo = std::min(x_lo, x);
      x_hi = std::max(x_hi, x);
      y_lo = first ? y : std::min(y_lo, y);
      y_hi = first ? y : std::max(y_hi, y);
      first = false;
    }
  }
  require(!first, ErrorCode::InvalidArgument, "no finite values to plot");
  if (x_hi <= x_lo) {
    x_lo -= 0.05;
    x_hi += 0.05;
  }
  const double pad = y_hi > y_lo ? 0.05 * (y_hi - y_lo) : std::max(0.05 * std::abs(y_hi), 0.05);
  y_lo -= pad;
  y_hi += pad;

  const double plot_w = kWidth - kLeft - kRight, plot_h = kHeight - kTop - kBottom;
  auto sx = [&](double x) { return kLeft + (x - x_lo) / (x_hi - x_lo) * plot_w; };
  auto sy = [&](double y) { return kTop + (y_hi - y) / (y_hi - y_lo) * plot_h; };

  std::ostringstream o;
  o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"500\" viewBox=\"0 0 800 500\">\n"
    << "<rect width=\"800\" height=\"500\" fill=\"white\"/>\n"
    << "<text x=\"" << px(kLeft + plot_w / 2) << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\" "
    << "text-anchor=\"middle\">" << escape(metric) << " vs pi_B</text>\n";

  o << "<g font-family=\"sans-serif\" font-size=\"12\" stroke=\"#cccccc\">\n";
  for (int k = 0; k <= kTicks; ++k) {
    const double t = static_cast<double>(k) / kTicks;
    const double xv = x_lo + t * (x_hi - x_lo), yv = y_lo + t * (y_hi - y_lo);
    o << "<line x1=\"" << px(sx(xv)) << "\" y1=\"" << px(kTop) << "\" x2=\"" << px(sx(xv)) << "\" y2=\""
      << px(kTop + plot_h) << "\"/>\n";
    o << "<line x1=\"" << px(kLeft) << "\" y1=\"" << px(sy(yv)) << "\" x2=\"" << px(kLeft + plot_w) << "\" y2=\""
      << px(sy(yv)) << "\"/>\n";
    o << "<text x=\"" << px(sx(xv)) << "\" y=\"" << px(kTop + plot_h + 18)
      << "\" stroke=\"none\" fill=\"black\" text-anchor=\"middle\">" << sig4(xv) << "</text>\n";
    o << "<text x=\"" << px(kLeft - 6) << "\" y=\"" << px(sy(yv) + 4)
      << "\" stroke=\"none\" fill=\"black\" text-anchor=\"end\">" << sig4(yv) << "</text>\n";
  }
  o << "</g>\n";
  o << "<rect x=\"" << px(kLeft) << "\" y=\"" << px(kTop) << "\" width=\"" << px(plot_w) << "\" height=\""
    << px(plot_h) << "\" fill=\"none\" stroke=\"black\"/>\n";
  o << "<text x=\"" << px(kLeft + plot_w / 2) << "\" y=\"" << px(kHeight - 16)
    << "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">pi_B</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = kColors[k % std::size(kColors)];
    o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    bool sep = false;
    for (const auto& [x, y] : s.points) {
      if (!std::isfinite(y)) continue;
      o << (sep ? " " : "") << px(sx(x)) << ',' << px(sy(y));
      sep = true;
    }
    o << "\"/>\n";
    for (const auto& [x, y] : s.points) {
      if (!std::isfinite(y)) continue;
      o << "<circle cx=\"" << px(sx(x)) << "\" cy=\"" << px(sy(y)) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    }
    const double ly = kTop + 10 + 20 * static_cast<double>(k);
    o << "<line x1=\"" << px(kWidth - kRight + 12) << "\" y1=\"" << px(ly) << "\" x2=\"" << px(kWidth - kRight + 36)
      << "\" y2=\"" << px(ly) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    o << "<text x=\"" << px(kWidth - kRight + 42) << "\" y=\"" << px(ly + 4)
      << "\" font-family=\"sans-serif\" font-size=\"11\">" << escape(s.label) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

void emit_svg(const SweepResult& sweep, const std::string& metric, const std::string& path) {
  csv::write_text(path, render_svg(sweep, metric));
}

}  // namespace hfl
