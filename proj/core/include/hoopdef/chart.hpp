#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hoopdef/geometry.hpp"

namespace hoopdef {

/// One defender's shot chart: the shots he contested, colored by his
/// efficiency-effect quantile and sized by his frequency-effect
/// quantile within the shot's basis.
struct ShotChartDot {
  Point location;
  int basis = 0;
  double eff_quantile = 0.5;   // 0 = reduces efficiency most
  double freq_quantile = 0.5;  // 0 = reduces frequency most
};

struct DefensiveShotChart {
  int defender_id = 0;
  std::vector<ShotChartDot> dots;
};

/// Renders the chart as a standalone SVG document with the half-court
/// outline, a diverging color scale for efficiency, and a size legend
/// for frequency.
std::string emit_shot_chart(const DefensiveShotChart& chart, const CourtGeometry& geom = {});

/// Basis surface heatmap over the tile grid.
std::string emit_surface_heatmap(const Eigen::VectorXd& surface, const std::string& title,
                                 const CourtGeometry& geom = {});

}  // namespace hoopdef
