#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace hoopdef {

struct Point {
  double x = 0.0;  // feet from the baseline toward half court
  double y = 0.0;  // feet from the right sideline (attacking view)

  Point operator+(Point o) const { return {x + o.x, y + o.y}; }
  Point operator-(Point o) const { return {x - o.x, y - o.y}; }
  Point operator*(double s) const { return {x * s, y * s}; }
  double dot(Point o) const { return x * o.x + y * o.y; }
  double norm() const { return std::hypot(x, y); }
};

inline Point operator*(double s, Point p) { return p * s; }
inline double distance(Point a, Point b) { return (a - b).norm(); }

/// Half-court geometry with a regular one-foot tile grid.
///
/// Tiles are indexed row-major by depth: tile v covers
/// (ix, ix+1] x (iy, iy+1] with v = ix * tiles_wide() + iy, except that
/// the cells touching x=0 / y=0 are closed below. Points on interior
/// tile edges therefore land in the lower-index tile.
struct CourtGeometry {
  double depth_ft = 47.0;
  double width_ft = 50.0;
  double tile_size_ft = 1.0;
  Point hoop{5.25, 25.0};

  // three-point line (NBA): arc radius, corner lane distance, corner depth
  double arc_radius_ft = 23.75;
  double corner_three_ft = 22.0;
  double corner_depth_ft = 14.0;

  int tiles_deep() const { return static_cast<int>(std::lround(depth_ft / tile_size_ft)); }
  int tiles_wide() const { return static_cast<int>(std::lround(width_ft / tile_size_ft)); }
  int tile_count() const { return tiles_deep() * tiles_wide(); }

  bool contains(Point p) const {
    return p.x >= 0.0 && p.x <= depth_ft && p.y >= 0.0 && p.y <= width_ft;
  }

  int tile_index(Point p) const {
    if (!contains(p)) {
      throw std::out_of_range("tile_index: point (" + std::to_string(p.x) + ", " +
                              std::to_string(p.y) + ") outside half court");
    }
    const int ix = edge_cell(p.x / tile_size_ft, tiles_deep());
    const int iy = edge_cell(p.y / tile_size_ft, tiles_wide());
    return ix * tiles_wide() + iy;
  }

  Point tile_center(int v) const {
    if (v < 0 || v >= tile_count()) throw std::out_of_range("tile_center: bad tile id");
    const int ix = v / tiles_wide();
    const int iy = v % tiles_wide();
    return {(ix + 0.5) * tile_size_ft, (iy + 0.5) * tile_size_ft};
  }

  bool is_three_point(Point p) const {
    if (p.x <= corner_depth_ft) return std::abs(p.y - hoop.y) >= corner_three_ft;
    return distance(p, hoop) >= arc_radius_ft;
  }

 private:
  static int edge_cell(double c, int n) {
    int i = static_cast<int>(std::ceil(c)) - 1;
    if (i < 0) i = 0;
    if (i >= n) i = n - 1;
    return i;
  }
};

}  // namespace hoopdef
