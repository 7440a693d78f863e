#include "domainrisk/svg_report.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

namespace drisk {
namespace {

std::string xml_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string fmt4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

}  // namespace

std::string render_svg(const RiskTimeline& timeline, const SvgOptions& options) {
  if (timeline.points.empty()) {
    throw std::invalid_argument("render_svg: timeline has no points");
  }
  if (options.width < 200 || options.height < 120) {
    throw std::invalid_argument("render_svg: canvas too small");
  }

  const double left = 52, right = 20, top = 34, bottom = 42;
  const double w = options.width, h = options.height;
  const double plot_w = w - left - right;
  const double plot_h = h - top - bottom;

  int t0 = timeline.points.front().t.serial();
  int t1 = timeline.points.back().t.serial();
  if (t0 == t1) {  // single point: pad a day either side so it has width
    --t0;
    ++t1;
  }
  const auto x_of = [&](Date d) {
    return left + plot_w * (static_cast<double>(d.serial() - t0) / (t1 - t0));
  };
  const auto y_of = [&](double p) {
    const double clamped = std::clamp(p, 0.0, 1.0);
    return top + plot_h * (1.0 - clamped);
  };

  std::string svg;
  svg.reserve(4096 + timeline.points.size() * 256);
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(options.width) +
         "\" height=\"" + std::to_string(options.height) + "\" viewBox=\"0 0 " +
         std::to_string(options.width) + " " + std::to_string(options.height) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  svg += "<text x=\"" + fmt(left) + "\" y=\"20\" font-family=\"monospace\" font-size=\"14\">" +
         xml_escape(timeline.fqdn) + " — risk timeline (model " +
         xml_escape(timeline.model_id) + ")</text>\n";

  // Axes.
  svg += "<line x1=\"" + fmt(left) + "\" y1=\"" + fmt(top) + "\" x2=\"" + fmt(left) +
         "\" y2=\"" + fmt(top + plot_h) + "\" stroke=\"#444444\" stroke-width=\"1\"/>\n";
  svg += "<line x1=\"" + fmt(left) + "\" y1=\"" + fmt(top + plot_h) + "\" x2=\"" +
         fmt(left + plot_w) + "\" y2=\"" + fmt(top + plot_h) +
         "\" stroke=\"#444444\" stroke-width=\"1\"/>\n";

  // Y ticks at quarters.
  for (int q = 0; q <= 4; ++q) {
    const double p = q * 0.25;
    const double y = y_of(p);
    svg += "<line x1=\"" + fmt(left - 4) + "\" y1=\"" + fmt(y) + "\" x2=\"" + fmt(left) +
           "\" y2=\"" + fmt(y) + "\" stroke=\"#444444\" stroke-width=\"1\"/>\n";
    svg += "<text x=\"" + fmt(left - 8) + "\" y=\"" + fmt(y + 4) +
           "\" font-family=\"monospace\" font-size=\"11\" text-anchor=\"end\">" + fmt(p) +
           "</text>\n";
  }

  // X ticks: up to six dates, first and last always included.
  const int n_ticks = std::min<int>(6, static_cast<int>(timeline.points.size()));
  for (int i = 0; i < n_ticks; ++i) {
    const int serial =
        n_ticks == 1 ? t0 + 1 : t0 + (t1 - t0) * i / (n_ticks - 1);
    const Date d(serial);
    const double x = x_of(d);
    svg += "<line x1=\"" + fmt(x) + "\" y1=\"" + fmt(top + plot_h) + "\" x2=\"" + fmt(x) +
           "\" y2=\"" + fmt(top + plot_h + 4) + "\" stroke=\"#444444\" stroke-width=\"1\"/>\n";
    svg += "<text x=\"" + fmt(x) + "\" y=\"" + fmt(top + plot_h + 18) +
           "\" font-family=\"monospace\" font-size=\"11\" text-anchor=\"middle\">" +
           d.to_string() + "</text>\n";
  }

  // Threshold rule.
  const double ty = y_of(timeline.threshold);
  svg += "<line x1=\"" + fmt(left) + "\" y1=\"" + fmt(ty) + "\" x2=\"" + fmt(left + plot_w) +
         "\" y2=\"" + fmt(ty) +
         "\" stroke=\"#cc3333\" stroke-width=\"1\" stroke-dasharray=\"6,4\"/>\n";
  svg += "<text x=\"" + fmt(left + plot_w) + "\" y=\"" + fmt(ty - 4) +
         "\" font-family=\"monospace\" font-size=\"11\" text-anchor=\"end\" "
         "fill=\"#cc3333\">threshold " +
         fmt(timeline.threshold) + "</text>\n";

  // Risk step line: each probability holds until the next evaluation date.
  std::string path = "M " + fmt(x_of(timeline.points.front().t)) + " " +
                     fmt(y_of(timeline.points.front().probability));
  for (std::size_t i = 1; i < timeline.points.size(); ++i) {
    const RiskPoint& pt = timeline.points[i];
    path += " H " + fmt(x_of(pt.t));
    path += " V " + fmt(y_of(pt.probability));
  }
  svg += "<path d=\"" + path + "\" fill=\"none\" stroke=\"#2266bb\" stroke-width=\"1.5\"/>\n";

  // Point markers with tooltips.
  for (const RiskPoint& pt : timeline.points) {
    const bool flagged = pt.probability >= timeline.threshold;
    std::string tip = pt.t.to_string() + "  p=" + fmt4(pt.probability);
    if (pt.base_value) {
      tip += "  base=" + fmt4(*pt.base_value);
      for (const NamedContribution& c : pt.top_positive) {
        tip += "\n+ " + c.name + " " + fmt4(c.value);
      }
      for (const NamedContribution& c : pt.top_negative) {
        tip += "\n- " + c.name + " " + fmt4(c.value);
      }
    }
    svg += "<circle cx=\"" + fmt(x_of(pt.t)) + "\" cy=\"" + fmt(y_of(pt.probability)) +
           "\" r=\"2.5\" fill=\"" + (flagged ? "#cc3333" : "#2266bb") + "\"><title>" +
           xml_escape(tip) + "</title></circle>\n";
  }

  svg += "</svg>\n";
  return svg;
}

}  // namespace drisk
