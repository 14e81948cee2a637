#include "hoopdef/chart.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hoopdef {

namespace {

constexpr double kScale = 10.0;  // px per foot
constexpr double kMargin = 30.0;

// diverging blue-white-red; q=0 deep blue (better defense), q=1 deep red
std::string diverging_color(double q) {
  q = std::clamp(q, 0.0, 1.0);
  int r, g, b;
  if (q < 0.5) {
    const double s = q / 0.5;
    r = static_cast<int>(33 + s * (247 - 33));
    g = static_cast<int>(102 + s * (247 - 102));
    b = static_cast<int>(172 + s * (247 - 172));
  } else {
    const double s = (q - 0.5) / 0.5;
    r = static_cast<int>(247 + s * (178 - 247));
    g = static_cast<int>(247 + s * (24 - 247));
    b = static_cast<int>(247 + s * (43 - 247));
  }
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
  return buf;
}

// court drawn with the baseline at the left: px = margin + y*scale,
// py = margin + x*scale keeps the hoop near the top-left like a
// broadcast half-court view rotated is unnecessary; use x right, y up.
double px(const CourtGeometry&, double y) { return kMargin + y * kScale; }
double py(const CourtGeometry& geom, double x) { return kMargin + (geom.depth_ft - x) * kScale; }

void court_outline(std::ostringstream& out, const CourtGeometry& geom) {
  out << "<rect x=\"" << kMargin << "\" y=\"" << kMargin << "\" width=\""
      << geom.width_ft * kScale << "\" height=\"" << geom.depth_ft * kScale
      << "\" fill=\"none\" stroke=\"#444\" stroke-width=\"2\"/>\n";
  // hoop
  out << "<circle cx=\"" << px(geom, geom.hoop.y) << "\" cy=\"" << py(geom, geom.hoop.x)
      << "\" r=\"" << 0.75 * kScale << "\" fill=\"none\" stroke=\"#444\" stroke-width=\"1.5\"/>\n";
  // three-point line: corner segments plus the arc
  const double cy1 = geom.hoop.y - geom.corner_three_ft;
  const double cy2 = geom.hoop.y + geom.corner_three_ft;
  out << "<line x1=\"" << px(geom, cy1) << "\" y1=\"" << py(geom, 0.0) << "\" x2=\""
      << px(geom, cy1) << "\" y2=\"" << py(geom, geom.corner_depth_ft)
      << "\" stroke=\"#888\" stroke-width=\"1\"/>\n";
  out << "<line x1=\"" << px(geom, cy2) << "\" y1=\"" << py(geom, 0.0) << "\" x2=\""
      << px(geom, cy2) << "\" y2=\"" << py(geom, geom.corner_depth_ft)
      << "\" stroke=\"#888\" stroke-width=\"1\"/>\n";
  out << "<path d=\"M " << px(geom, cy1) << ' ' << py(geom, geom.corner_depth_ft);
  const int arcs = 48;
  for (int i = 0; i <= arcs; ++i) {
    const double a0 = std::atan2(geom.corner_depth_ft - geom.hoop.x, cy1 - geom.hoop.y);
    const double a1 = std::atan2(geom.corner_depth_ft - geom.hoop.x, cy2 - geom.hoop.y);
    const double a = a0 + (a1 - a0) * i / arcs;
    const double yy = geom.hoop.y + geom.arc_radius_ft * std::cos(a);
    const double xx = geom.hoop.x + geom.arc_radius_ft * std::sin(a);
    out << " L " << px(geom, yy) << ' ' << py(geom, xx);
  }
  out << "\" fill=\"none\" stroke=\"#888\" stroke-width=\"1\"/>\n";
}

}  // namespace

std::string emit_shot_chart(const DefensiveShotChart& chart, const CourtGeometry& geom) {
  const double w = geom.width_ft * kScale + 2 * kMargin;
  const double h = geom.depth_ft * kScale + 2 * kMargin + 60.0;
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
      << "\" viewBox=\"0 0 " << w << ' ' << h << "\">\n";
  out << "<title>defender " << chart.defender_id << " shot chart</title>\n";
  court_outline(out, geom);
  for (const auto& d : chart.dots) {
    const double r = 2.0 + 6.0 * std::clamp(d.freq_quantile, 0.0, 1.0);
    out << "<circle cx=\"" << px(geom, d.location.y) << "\" cy=\"" << py(geom, d.location.x)
        << "\" r=\"" << r << "\" fill=\"" << diverging_color(d.eff_quantile)
        << "\" fill-opacity=\"0.8\" stroke=\"#333\" stroke-width=\"0.4\"/>\n";
  }
  // legend: color = efficiency effect, size = frequency effect
  const double ly = geom.depth_ft * kScale + kMargin + 24.0;
  for (int i = 0; i <= 10; ++i) {
    out << "<rect x=\"" << kMargin + i * 14.0 << "\" y=\"" << ly
        << "\" width=\"14\" height=\"10\" fill=\"" << diverging_color(i / 10.0) << "\"/>\n";
  }
  out << "<text x=\"" << kMargin << "\" y=\"" << ly - 5
      << "\" font-size=\"10\" fill=\"#333\">reduces efficiency &#8592; color &#8594; raises; dot "
         "size: shot frequency quantile</text>\n";
  out << "<circle cx=\"" << kMargin + 180.0 << "\" cy=\"" << ly + 5 << "\" r=\"2\" fill=\"#999\"/>\n";
  out << "<circle cx=\"" << kMargin + 200.0 << "\" cy=\"" << ly + 5 << "\" r=\"8\" fill=\"#999\"/>\n";
  out << "</svg>\n";
  return out.str();
}

std::string emit_surface_heatmap(const Eigen::VectorXd& surface, const std::string& title,
                                 const CourtGeometry& geom) {
  const double w = geom.width_ft * kScale + 2 * kMargin;
  const double h = geom.depth_ft * kScale + 2 * kMargin;
  const double peak = std::max(surface.maxCoeff(), 1e-300);
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
      << "\" viewBox=\"0 0 " << w << ' ' << h << "\">\n";
  out << "<title>" << title << "</title>\n";
  for (int v = 0; v < surface.size(); ++v) {
    const double q = surface(v) / peak;
    if (q < 1e-4) continue;
    const Point c = geom.tile_center(v);
    out << "<rect x=\"" << px(geom, c.y - 0.5) << "\" y=\"" << py(geom, c.x + 0.5)
        << "\" width=\"" << kScale << "\" height=\"" << kScale << "\" fill=\""
        << diverging_color(0.5 + 0.5 * q) << "\" fill-opacity=\"" << 0.15 + 0.85 * q << "\"/>\n";
  }
  court_outline(out, geom);
  out << "</svg>\n";
  return out.str();
}

}  // namespace hoopdef
