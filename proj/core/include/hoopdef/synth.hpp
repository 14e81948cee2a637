#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hoopdef/rng.hpp"
#include "hoopdef/tracking.hpp"

namespace hoopdef {

/// Court regions the generator plants as ground-truth shot types: smooth
/// blobs on the tile grid, each normalized to unit mass, with a point
/// value derived from its center.
struct SynthBases {
  Eigen::MatrixXd surfaces;       // n x V, rows sum to 1
  std::vector<Point> centers;
  std::vector<int> point_values;  // 2 or 3 per basis

  static SynthBases standard_five(const CourtGeometry& geom = {});
};

/// Ground-truth parameters for the generative model. Defender positions
/// follow the convex-combination placement rule with Gaussian noise;
/// hidden matchups keep their assignment with probability stay_prob.
/// Outcome coefficients drive the per-possession shot draw and the
/// make/miss draw.
struct SynthConfig {
  double w_offender = 0.62;
  double w_ball = 0.11;
  double w_hoop = 0.27;
  double stay_prob = 0.98;       // (0, 1]
  double defender_noise_ft = 2.0;

  int n_possessions = 100;
  int frames_per_possession = 150;  // 6 s at 25 Hz
  double frame_rate_hz = 25.0;
  std::uint64_t seed = 0;

  int n_offenders = 25;  // league roster sizes; 5 of each drawn per possession
  int n_defenders = 25;

  bool with_shots = true;
  bool record_matchups = true;  // keep hidden assignments in the ledger

  // outcome-model truth; empty matrices disable the shot draw
  Eigen::MatrixXd shot_propensity;   // n_offenders x B
  Eigen::MatrixXd freq_suppression;  // n_defenders x B
  Eigen::MatrixXd shot_skill;        // n_offenders x B
  Eigen::MatrixXd contest_skill;     // n_defenders x B
  Eigen::VectorXd distance_slope;    // B, nonnegative
  std::vector<int> defender_group;   // n_defenders, in {0,1,2}
  double distance_cap_ft = 6.0;

  // motion plumbing
  double pass_rate_per_s = 0.25;
  double pass_duration_s = 0.4;
  double anchor_pull_per_s = 1.5;
  double motion_sd_ft = 3.0;

  void validate() const;

  /// Fills outcome coefficients with a structured random league:
  /// grouped defender effects, style-driven offender propensities, and
  /// style-correlated shooting skill. Scales chosen so defensive and
  /// spatial structure are clearly present.
  static SynthConfig league(int n_offenders, int n_defenders, std::uint64_t seed,
                            const CourtGeometry& geom = {});
};

/// Everything hidden from the fitted pipeline, kept for verification.
struct PossessionTruth {
  std::string possession_id;
  std::vector<std::array<int, 5>> matchups;       // per frame: offender guarded by defender j
  Eigen::Matrix<double, 5, 5> guard_fractions;    // realized Z_n
  int outcome = 0;                                // 0 = no shot, else 1 + slot*B + basis
  int shooter_slot = -1, basis = -1;
  int shooter_id = -1, defender_id = -1;          // global ids; defender = guard at release
  double defender_distance_ft = 0.0;              // capped, as used in the make/miss draw
  bool made = false;
};

struct GroundTruthLedger {
  SynthConfig config;
  SynthBases bases;
  std::vector<PossessionTruth> possessions;

  void save(const std::string& path) const;
  static GroundTruthLedger load(const std::string& path);
};

struct SynthResult {
  std::vector<Possession> possessions;
  GroundTruthLedger ledger;
};

std::pair<Possession, PossessionTruth> simulate_possession(const SynthConfig& config,
                                                           const SynthBases& bases, int index,
                                                           const CourtGeometry& geom = {});

SynthResult simulate_corpus(const SynthConfig& config, const CourtGeometry& geom = {});

}  // namespace hoopdef
