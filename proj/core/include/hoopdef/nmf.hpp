#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "hoopdef/geometry.hpp"

namespace hoopdef {

/// Nonnegative decomposition of the player intensity matrix into shot
/// types: loadings (players x rank) times bases (rank x tiles). After
/// fitting, each retained basis row is normalized to unit mass and the
/// loadings absorb the scale, so reconstruction is unchanged.
struct ShotBasis {
  Eigen::MatrixXd loadings;  // K x rank
  Eigen::MatrixXd bases;     // rank x V
  int rank = 0;
  std::optional<int> residual_index;
  double kl_divergence = 0.0;

  /// Dominant retained basis per tile (argmax of basis intensity).
  std::vector<int> tile_assignment(int tiles) const;
};

/// Generalized KL divergence sum_ij [ a log(a/b) - a + b ], 0 log 0 = 0.
/// Infinite when b vanishes where a does not.
double generalized_kl(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

/// One round of multiplicative updates (loadings then bases); never
/// increases the divergence and preserves positivity.
void nmf_multiplicative_step(const Eigen::MatrixXd& target, Eigen::MatrixXd& loadings,
                             Eigen::MatrixXd& bases);

struct NmfOptions {
  int rank = 6;
  int restarts = 5;
  std::uint64_t seed = 0;
  double rel_tol = 1e-7;
  int max_iters = 2000;
};

ShotBasis fit_shot_basis(const Eigen::MatrixXd& surfaces, const NmfOptions& opts = {});

/// Flags the residual basis (lowest peak-to-mean concentration), drops
/// it, and orders the survivors by total loading mass.
ShotBasis identify_and_drop_residual(const ShotBasis& basis);

/// Point value of each retained basis from its intensity-weighted centroid.
std::vector<int> basis_point_values(const ShotBasis& basis, const CourtGeometry& geom = {});

}  // namespace hoopdef
