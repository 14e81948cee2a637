#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "hoopdef/matchup.hpp"
#include "hoopdef/nmf.hpp"

namespace hoopdef {

/// Defender types from the time-in-basis profile: top two principal
/// components, then three-way k-means. Labels are canonicalized by
/// ascending cluster mean on the first component.
struct DefenderGroups {
  std::vector<int> defender_ids;
  Eigen::MatrixXd time_in_basis;  // N x B, rows sum to <= 1
  Eigen::MatrixXd pc_scores;      // N x 2
  std::vector<int> group_of;      // N, values 0..k-1

  int group_for(int defender_id) const;  // -1 when unknown
};

/// Union-symmetrized k-nearest-neighbor graph over shot-selection
/// loadings, with the pieces of the autoregressive prior it implies:
/// row-normalized weights, per-node conditional variances inversely
/// proportional to degree, and the discount that keeps it proper.
struct OffenderGraph {
  std::vector<int> player_ids;
  std::vector<std::vector<int>> neighbors;  // sorted, symmetric, no self loops
  Eigen::VectorXd cond_var;                 // var_scale / degree
  double discount = 0.9;
  double var_scale = 1.0;

  int size() const { return static_cast<int>(player_ids.size()); }
  Eigen::MatrixXd weight_matrix() const;  // M: 1/degree on edges
  Eigen::MatrixXd precision() const;      // D^{-1} (I - discount * M)
  int index_of(int player_id) const;      // -1 when unknown
};

/// Average fraction of time each defender spends guarding an offender
/// located in each retained basis region; weighted by the smoothing
/// marginals. Defenders with no observed frames are excluded.
std::pair<std::vector<int>, Eigen::MatrixXd> defender_time_in_basis(
    std::span<const Possession> corpus, const MatchupModel& model, const ShotBasis& basis,
    const CourtGeometry& geom = {}, int threads = 1);

DefenderGroups pca_kmeans_groups(const std::vector<int>& ids, const Eigen::MatrixXd& profile,
                                 int k = 3, std::uint64_t seed = 0);

OffenderGraph build_offender_graph(const std::vector<int>& player_ids,
                                   const Eigen::MatrixXd& loadings, int k_neighbors = 10,
                                   double discount = 0.9, double var_scale = 1.0);

struct CarCheck {
  double min_eigenvalue = 0.0;
  double max_asymmetry = 0.0;
};

/// Verifies the prior is proper: precision symmetric to 1e-10 and
/// positive definite. Throws otherwise; downstream fits depend on it.
CarCheck car_precision_check(const OffenderGraph& graph);

}  // namespace hoopdef
