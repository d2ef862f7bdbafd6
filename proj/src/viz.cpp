#include "limase/viz.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "limase/error.hpp"

namespace limase {

ForcePlotData build_force_plot(const ShapExplanation& e, std::span<const FeatureMeta> features) {
  if (e.phi.size() != features.size()) {
    throw InvalidArgument("force plot: explanation has " + std::to_string(e.phi.size()) +
                          " attributions for " + std::to_string(features.size()) + " features");
  }
  const double gap = std::abs(e.base_value + e.phi_sum() - e.fx);
  if (gap > 1e-6 * std::max(1.0, std::abs(e.fx))) {
    throw InvalidArgument("force plot: base + sum(phi) differs from fx by " +
                          std::to_string(gap));
  }
  ForcePlotData plot;
  plot.base_value = e.base_value;
  plot.fx = e.fx;
  for (std::size_t j = 0; j < e.phi.size(); ++j) {
    const double value = j < e.instance.size() ? e.instance[j] : 0.0;
    plot.contributions.push_back({j, features[j].name, value, e.phi[j]});
  }
  std::stable_sort(plot.contributions.begin(), plot.contributions.end(),
                   [](const Contribution& a, const Contribution& b) {
                     return std::abs(a.phi) > std::abs(b.phi);
                   });
  for (std::size_t k = 0; k < plot.contributions.size(); ++k) {
    const double phi = plot.contributions[k].phi;
    if (phi > 0.0) plot.positive.push_back(k);
    if (phi < 0.0) plot.negative.push_back(k);
  }
  return plot;
}

SummaryPlotData build_summary_plot(const ExplanationMatrix& m, const Matrix& x,
                                   std::span<const FeatureMeta> features) {
  m.validate();
  const auto& phi = m.values;
  if (x.rows() != phi.rows() || x.cols() != phi.cols() || features.size() != phi.cols()) {
    throw InvalidArgument("summary plot: attribution and feature matrices are not aligned");
  }
  SummaryPlotData plot;
  plot.sample_count = phi.rows();
  for (std::size_t j = 0; j < phi.cols(); ++j) {
    SummarySeries s;
    s.feature = j;
    s.name = features[j].name;
    const auto col = x.column(j);
    const auto [lo, hi] = std::minmax_element(col.begin(), col.end());
    double abs_sum = 0.0;
    for (std::size_t i = 0; i < phi.rows(); ++i) {
      s.phi.push_back(phi(i, j));
      abs_sum += std::abs(phi(i, j));
      s.color.push_back(*hi > *lo ? (col[i] - *lo) / (*hi - *lo) : 0.5);
    }
    s.mean_abs_phi = abs_sum / static_cast<double>(phi.rows());
    plot.series.push_back(std::move(s));
  }
  std::stable_sort(plot.series.begin(), plot.series.end(),
                   [](const SummarySeries& a, const SummarySeries& b) {
                     return a.mean_abs_phi > b.mean_abs_phi;
                   });
  return plot;
}

int summary_height(std::size_t rendered_features) {
  return 30 * static_cast<int>(rendered_features) + 80;
}

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  std::string s(buf);
  if (s == "-0.000000") s = "0.000000";
  return s;
}

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
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

std::string header(int width, int height) {
  return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
         "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
         std::to_string(width) + "\" height=\"" + std::to_string(height) + "\" viewBox=\"0 0 " +
         std::to_string(width) + " " + std::to_string(height) + "\">\n" +
         "<rect x=\"0\" y=\"0\" width=\"" + std::to_string(width) + "\" height=\"" +
         std::to_string(height) + "\" fill=\"white\"/>\n";
}

std::string line(double x1, double y1, double x2, double y2, const char* stroke) {
  return "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) + "\" y2=\"" +
         num(y2) + "\" stroke=\"" + stroke + "\" stroke-width=\"1\"/>\n";
}

std::string text(double x, double y, const std::string& body, const char* anchor,
                 int size = 11) {
  return "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-family=\"sans-serif\" font-size=\"" +
         std::to_string(size) + "\" text-anchor=\"" + anchor + "\">" + escape(body) +
         "</text>\n";
}

// Maps [lo, hi] onto [left, right] pixels.
struct Scale {
  double lo;
  double hi;
  double left;
  double right;

  double operator()(double v) const { return left + (v - lo) / (hi - lo) * (right - left); }
};

Scale padded_scale(double lo, double hi, double left, double right) {
  if (!(hi - lo > 1e-12)) {
    const double pad = std::max(1.0, std::abs(lo)) * 0.1;
    lo -= pad;
    hi += pad;
  } else {
    const double pad = (hi - lo) * 0.05;
    lo -= pad;
    hi += pad;
  }
  return {lo, hi, left, right};
}

std::string axis_ticks(const Scale& s, double y) {
  std::string out = line(s.left, y, s.right, y, "#333333");
  for (int k = 0; k <= 4; ++k) {
    const double v = s.lo + (s.hi - s.lo) * k / 4.0;
    const double px = s(v);
    out += line(px, y, px, y + 4, "#333333");
    out += text(px, y + 16, num(v), "middle", 10);
  }
  return out;
}

// Blue (low) to red (high), the usual attribution palette.
std::string blend(double t) {
  t = std::clamp(t, 0.0, 1.0);
  const int r = static_cast<int>(std::lround(0x00 + t * (0xff - 0x00)));
  const int g = static_cast<int>(std::lround(0x8b + t * (0x00 - 0x8b)));
  const int b = static_cast<int>(std::lround(0xfb + t * (0x51 - 0xfb)));
  char buf[8];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
  return buf;
}

void write_text(const std::string& content, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << content;
  if (!out) throw DataError("write failed: " + path.string());
}

}  // namespace

std::string render_svg(const ForcePlotData& plot) {
  double pos = 0.0;
  double neg = 0.0;
  for (auto k : plot.positive) pos += plot.contributions[k].phi;
  for (auto k : plot.negative) neg -= plot.contributions[k].phi;
  const double lo = std::min({plot.base_value, plot.fx - pos, plot.fx});
  const double hi = std::max({plot.base_value, plot.fx + neg, plot.fx});
  const auto scale = padded_scale(lo, hi, 40.0, 860.0);

  std::string svg = header(kSvgWidth, kForceHeight);
  svg += axis_ticks(scale, 100.0);

  // Positive pushes end at fx from the left, negative ones from the right,
  // largest contribution nearest fx.
  double edge = plot.fx;
  for (auto k : plot.positive) {
    const auto& c = plot.contributions[k];
    const double x0 = scale(edge - c.phi);
    const double x1 = scale(edge);
    svg += "<rect class=\"positive\" x=\"" + num(x0) + "\" y=\"60.000000\" width=\"" +
           num(x1 - x0) + "\" height=\"30.000000\" fill=\"#ff0051\" stroke=\"white\"/>\n";
    if (x1 - x0 >= 50.0) svg += text((x0 + x1) / 2.0, 130.0, c.name + " = " + num(c.value), "middle", 10);
    edge -= c.phi;
  }
  edge = plot.fx;
  for (auto k : plot.negative) {
    const auto& c = plot.contributions[k];
    const double x0 = scale(edge);
    const double x1 = scale(edge - c.phi);
    svg += "<rect class=\"negative\" x=\"" + num(x0) + "\" y=\"60.000000\" width=\"" +
           num(x1 - x0) + "\" height=\"30.000000\" fill=\"#008bfb\" stroke=\"white\"/>\n";
    if (x1 - x0 >= 50.0) svg += text((x0 + x1) / 2.0, 130.0, c.name + " = " + num(c.value), "middle", 10);
    edge -= c.phi;
  }

  const double bx = scale(plot.base_value);
  svg += "<line class=\"base\" x1=\"" + num(bx) + "\" y1=\"45.000000\" x2=\"" + num(bx) +
         "\" y2=\"100.000000\" stroke=\"#777777\" stroke-dasharray=\"3,2\"/>\n";
  svg += text(bx, 40.0, "base value " + num(plot.base_value), "middle", 10);
  const double fx = scale(plot.fx);
  svg += line(fx, 55.0, fx, 95.0, "#000000");
  svg += text(fx, 20.0, "f(x) = " + num(plot.fx), "middle", 13);
  svg += "</svg>\n";
  return svg;
}

std::string render_svg(const SummaryPlotData& plot, const SvgOptions& options) {
  const auto shown = std::min(plot.series.size(), options.max_summary_features);
  const int height = summary_height(shown);
  double lo = 0.0;
  double hi = 0.0;
  for (std::size_t r = 0; r < shown; ++r) {
    for (double v : plot.series[r].phi) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  const auto scale = padded_scale(lo, hi, 220.0, 860.0);
  const double axis_y = 30.0 * static_cast<double>(shown) + 50.0;

  std::string svg = header(kSvgWidth, height);
  svg += text(540.0, 25.0, "SHAP value (" + std::to_string(plot.sample_count) + " samples)",
              "middle", 12);
  svg += line(scale(0.0), 40.0, scale(0.0), axis_y, "#bbbbbb");
  for (std::size_t r = 0; r < shown; ++r) {
    const auto& s = plot.series[r];
    const double cy = 50.0 + 30.0 * static_cast<double>(r) + 15.0;
    svg += "<g class=\"feature-row\">\n";
    svg += text(210.0, cy + 4.0, s.name, "end");
    for (std::size_t i = 0; i < s.phi.size(); ++i) {
      const double jitter = static_cast<double>(static_cast<long>((i * 37) % 13) - 6);
      svg += "<circle cx=\"" + num(scale(s.phi[i])) + "\" cy=\"" + num(cy + jitter) +
             "\" r=\"3\" fill=\"" + blend(s.color[i]) + "\" fill-opacity=\"0.8\"/>\n";
    }
    svg += "</g>\n";
  }
  svg += axis_ticks(scale, axis_y);
  svg += text(880.0, 50.0, "high", "end", 10);
  svg += text(880.0, axis_y - 5.0, "low", "end", 10);
  svg += "</svg>\n";
  return svg;
}

void render_svg(const ForcePlotData& plot, const std::filesystem::path& path) {
  write_text(render_svg(plot), path);
}

void render_svg(const SummaryPlotData& plot, const std::filesystem::path& path,
                const SvgOptions& options) {
  write_text(render_svg(plot, options), path);
}

}  // namespace limase
