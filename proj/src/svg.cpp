#include <cmath>
#include <cstdio>
#include <numbers>

#include "medeq/report.hpp"

namespace medeq {

std::string_view tier_color(Tier t) {
  switch (t) {
    case Tier::HighlyOver: return "#1f3b99";
    case Tier::Over: return "#3b6fd4";
    case Tier::Adequate: return "#2a9d8f";
    case Tier::Under: return "#f4a261";
    case Tier::HighlyUnder: return "#e76f51";
    case Tier::AbsentInReal:
    case Tier::AbsentInSynthetic: return "#9e9e9e";
  }
  return "#000000";
}

namespace {

std::string fixed(double v, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  std::string s = buf;
  if (s == "-0.000") s = "0.000";
  return s;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string annotate(const DisparityRecord& r, const Schema& schema) {
  std::string s = r.pattern.to_string(schema) + ": ";
  if (r.value.defined())
    s += "log disparity " + fixed(r.value.value, 6);
  else
    s += r.tier == Tier::AbsentInReal ? "absent in real data" : "absent in synthetic data";
  s += " (" + std::string(tier_name(r.tier)) + ")";
  return s;
}

void collect(const SunburstNode& node, double start, double extent, const Schema& schema,
             std::vector<SunburstSector>& out) {
  if (node.depth > 0)
    out.push_back({node.depth, start, start + extent, node.record.tier, annotate(node.record, schema)});
  if (node.children.empty()) return;
  const double parent_share = node.record.p_real;
  double cursor = start;
  for (const auto& child : node.children) {
    const double frac = parent_share > 0.0 ? child.record.p_real / parent_share
                                           : 1.0 / static_cast<double>(node.children.size());
    const double span = extent * frac;
    collect(child, cursor, span, schema, out);
    cursor += span;
  }
}

struct Point {
  double x, y;
};

Point polar(double cx, double cy, double r, double deg) {
  const double rad = (deg - 90.0) * std::numbers::pi / 180.0;
  return {cx + r * std::cos(rad), cy + r * std::sin(rad)};
}

std::string arc_path(double cx, double cy, double r0, double r1, double a0, double a1) {
  const int large = (a1 - a0) > 180.0 ? 1 : 0;
  const Point p0 = polar(cx, cy, r1, a0), p1 = polar(cx, cy, r1, a1);
  const Point q1 = polar(cx, cy, r0, a1), q0 = polar(cx, cy, r0, a0);
  std::string d = "M" + fixed(p0.x) + "," + fixed(p0.y);
  d += " A" + fixed(r1) + "," + fixed(r1) + " 0 " + std::to_string(large) + " 1 " + fixed(p1.x) + "," + fixed(p1.y);
  d += " L" + fixed(q1.x) + "," + fixed(q1.y);
  d += " A" + fixed(r0) + "," + fixed(r0) + " 0 " + std::to_string(large) + " 0 " + fixed(q0.x) + "," + fixed(q0.y);
  return d + " Z";
}

std::size_t max_depth(const SunburstNode& n) {
  std::size_t d = n.depth;
  for (const auto& c : n.children) d = std::max(d, max_depth(c));
  return d;
}

}  // namespace

std::vector<SunburstSector> sunburst_sectors(const SunburstNode& root, const Schema& schema) {
  std::vector<SunburstSector> out;
  collect(root, 0.0, 360.0, schema, out);
  return out;
}

std::string sunburst_svg(const SunburstNode& root, const Schema& schema) {
  constexpr double size = 800.0, cx = 400.0, cy = 400.0, hole = 70.0, outer = 340.0;
  const std::size_t rings = std::max<std::size_t>(1, max_depth(root));
  const double width = (outer - hole) / static_cast<double>(rings);

  std::string s;
  s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + fixed(size, 0) +
       "\" height=\"" + fixed(size + 60, 0) + "\" viewBox=\"0 0 " + fixed(size, 0) + " " + fixed(size + 60, 0) + "\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  s += "<text x=\"" + fixed(cx) + "\" y=\"" + fixed(cy + 5) +
       "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">" +
       xml_escape(root.label) + "</text>\n";

  for (const auto& sec : sunburst_sectors(root, schema)) {
    const double extent = sec.end_deg - sec.start_deg;
    if (extent <= 0.0) continue;
    const double r0 = hole + width * static_cast<double>(sec.depth - 1);
    const double r1 = r0 + width;
    std::string d;
    if (extent >= 359.999) {
      const double mid = sec.start_deg + 180.0;
      d = arc_path(cx, cy, r0, r1, sec.start_deg, mid) + " " + arc_path(cx, cy, r0, r1, mid, sec.end_deg);
    } else {
      d = arc_path(cx, cy, r0, r1, sec.start_deg, sec.end_deg);
    }
    s += "<path d=\"" + d + "\" fill=\"" + std::string(tier_color(sec.tier)) +
         "\" stroke=\"#ffffff\" stroke-width=\"0.6\" data-ring=\"" + std::to_string(sec.depth) +
         "\" data-tier=\"" + std::string(tier_name(sec.tier)) + "\"><title>" + xml_escape(sec.annotation) +
         "</title></path>\n";
  }

  double x = 20.0;
  for (Tier t : {Tier::HighlyOver, Tier::Over, Tier::Adequate, Tier::Under, Tier::HighlyUnder, Tier::AbsentInReal}) {
    s += "<rect x=\"" + fixed(x) + "\" y=\"" + fixed(size + 20) + "\" width=\"14\" height=\"14\" fill=\"" +
         std::string(tier_color(t)) + "\"/>\n";
    const std::string name = t == Tier::AbsentInReal ? "absent" : std::string(tier_name(t));
    s += "<text x=\"" + fixed(x + 20) + "\" y=\"" + fixed(size + 32) +
         "\" font-family=\"sans-serif\" font-size=\"12\">" + name + "</text>\n";
    x += 125.0;
  }
  s += "</svg>\n";
  return s;
}

void render_sunburst_svg(const SunburstNode& root, const Schema& schema, const std::filesystem::path& path) {
  write_text(path, sunburst_svg(root, schema));
}

std::string histogram_svg(const std::vector<std::pair<std::string, TierHistogram>>& series) {
  constexpr double width = 760.0, height = 420.0, left = 50.0, bottom = 360.0, top = 40.0;
  std::size_t peak = 1;
  for (const auto& [name, h] : series)
    for (auto c : h.counts) peak = std::max(peak, c);
  const double group_w = (width - left - 20.0) / static_cast<double>(kTierCount);
  const double bar_w = (group_w - 12.0) / static_cast<double>(std::max<std::size_t>(1, series.size()));

  std::string s;
  s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + fixed(width, 0) + "\" height=\"" +
       fixed(height, 0) + "\" viewBox=\"0 0 " + fixed(width, 0) + " " + fixed(height, 0) + "\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  s += "<line x1=\"" + fixed(left) + "\" y1=\"" + fixed(bottom) + "\" x2=\"" + fixed(width - 10) + "\" y2=\"" +
       fixed(bottom) + "\" stroke=\"#333333\"/>\n";
  for (std::size_t t = 0; t < kTierCount; ++t) {
    const double gx = left + group_w * static_cast<double>(t) + 6.0;
    for (std::size_t k = 0; k < series.size(); ++k) {
      const std::size_t count = series[k].second.counts[t];
      const double h = (bottom - top) * static_cast<double>(count) / static_cast<double>(peak);
      const double x = gx + bar_w * static_cast<double>(k);
      const double opacity = series.size() > 1 ? 1.0 - 0.45 * static_cast<double>(k) / static_cast<double>(series.size() - 1) : 1.0;
      s += "<rect x=\"" + fixed(x) + "\" y=\"" + fixed(bottom - h) + "\" width=\"" + fixed(bar_w - 2.0) +
           "\" height=\"" + fixed(h) + "\" fill=\"" + std::string(tier_color(kAllTiers[t])) + "\" fill-opacity=\"" +
           fixed(opacity, 2) + "\"><title>" + xml_escape(series[k].first) + " " +
           std::string(tier_name(kAllTiers[t])) + ": " + std::to_string(count) + "</title></rect>\n";
      s += "<text x=\"" + fixed(x + bar_w / 2 - 1.0) + "\" y=\"" + fixed(bottom - h - 4) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" + std::to_string(count) + "</text>\n";
    }
    s += "<text x=\"" + fixed(gx + (group_w - 12.0) / 2) + "\" y=\"" + fixed(bottom + 18) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">" +
         std::string(tier_name(kAllTiers[t])) + "</text>\n";
  }
  double lx = left;
  for (std::size_t k = 0; k < series.size(); ++k) {
    s += "<text x=\"" + fixed(lx) + "\" y=\"22\" font-family=\"sans-serif\" font-size=\"12\">" +
         std::to_string(k + 1) + ": " + xml_escape(series[k].first) + "</text>\n";
    lx += 220.0;
  }
  s += "</svg>\n";
  return s;
}

void render_histogram_svg(const std::vector<std::pair<std::string, TierHistogram>>& series,
                          const std::filesystem::path& path) {
  write_text(path, histogram_svg(series));
}

}  // namespace medeq
