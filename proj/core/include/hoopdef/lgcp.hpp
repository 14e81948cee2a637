#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "hoopdef/rng.hpp"
#include "hoopdef/tracking.hpp"

namespace hoopdef {

struct LgcpConfig {
  double marginal_var = 3.0;        // prior variance of the log-intensity field
  double ls_shape = 4.0;            // gamma prior on each lengthscale: mean 8 ft, sd 4 ft
  double ls_scale = 2.0;
  double jitter_rel = 1e-6;         // diagonal jitter, relative to marginal_var
  std::optional<double> log_mean_rate;  // default log(max(shots,1) / tiles)
  int map_max_iters = 200;
  double grad_tol_per_tile = 1e-5;  // stop when |grad| < tol * V
  int sweeps = 2;                   // alternations of field fit and lengthscale sampling
  int lengthscale_samples = 100;    // per sweep
  double mh_proposal_sd = 0.8;      // random-walk sd, feet
  std::uint64_t seed = 0;
};

struct IntensitySurface {
  int player_id = -1;
  Eigen::VectorXd intensity;        // lambda over tiles, strictly positive
  Eigen::VectorXd normalized;       // unit total mass
  double log_mean_rate = 0.0;
  std::array<double, 2> lengthscale{8.0, 8.0};
  std::vector<std::array<double, 2>> lengthscale_draws;
  double mh_acceptance = 0.0;
};

/// Shot counts per tile; one row per player, row sums = shot counts.
Eigen::MatrixXd count_matrix(const std::vector<std::vector<Point>>& shots_by_player,
                             const CourtGeometry& geom = {});

/// Counts gathered from a corpus; returns (sorted shooter ids, counts).
std::pair<std::vector<int>, Eigen::MatrixXd> collect_shot_counts(std::span<const Possession> corpus,
                                                                 const CourtGeometry& geom = {});

/// Dense squared-exponential covariance over arbitrary centers, with
/// independent lengthscales per court dimension.
Eigen::MatrixXd se_kernel(std::span<const Point> centers, double marginal_var, double len_x,
                          double len_y);

/// Unnormalized log posterior of the latent field and its gradient:
///   sum_v [ x_v (z_v + z0) - exp(z_v + z0) ] - z' C^{-1} z / 2.
/// The covariance receives relative jitter if its factorization needs it.
std::pair<double, Eigen::VectorXd> lgcp_log_posterior_and_gradient(const Eigen::VectorXd& field,
                                                                   const Eigen::VectorXd& counts,
                                                                   const Eigen::MatrixXd& cov,
                                                                   double log_mean_rate,
                                                                   double jitter_rel = 1e-6);

/// Squared-exponential prior on the regular tile grid, factored as a
/// Kronecker product of the two court dimensions. Applies C, C^{-1} and
/// C^{1/2} in O(V (D + W)) after two small eigendecompositions.
class GridGaussianPrior {
 public:
  GridGaussianPrior(const CourtGeometry& geom, double marginal_var, double len_x, double len_y,
                    double jitter_rel = 1e-6);

  Eigen::VectorXd apply(const Eigen::VectorXd& v) const;
  Eigen::VectorXd apply_inverse(const Eigen::VectorXd& v) const;
  Eigen::VectorXd apply_sqrt(const Eigen::VectorXd& v) const;
  double quad_inverse(const Eigen::VectorXd& v) const;  // v' C^{-1} v
  double log_det() const;
  int size() const { return deep_ * wide_; }

 private:
  Eigen::VectorXd transform(const Eigen::VectorXd& v, int power) const;
  int deep_, wide_;
  Eigen::MatrixXd ux_, uy_;
  Eigen::VectorXd eig_;  // Kronecker eigenvalues, floored
};

struct LgcpMapFit {
  Eigen::VectorXd field;      // MAP latent field z*
  Eigen::VectorXd intensity;  // exp(z* + z0)
  double log_mean_rate = 0.0;
  double objective = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
};

LgcpMapFit fit_lgcp_map(const Eigen::VectorXd& counts, const LgcpConfig& config,
                        std::array<double, 2> lengthscale, const CourtGeometry& geom = {});

/// Metropolis-Hastings over the two lengthscales given the current
/// field (or the prior alone when no field is supplied).
struct LengthscaleChain {
  std::vector<std::array<double, 2>> samples;
  double acceptance_rate = 0.0;
};

LengthscaleChain sample_lengthscale_mh(const Eigen::VectorXd* field, const LgcpConfig& config,
                                       std::array<double, 2> init, int n_samples, Rng& rng,
                                       const CourtGeometry& geom = {});

/// Full per-player routine: alternate MAP field fits and lengthscale
/// sampling, then report the surface at the averaged lengthscale.
IntensitySurface fit_player_surface(int player_id, const Eigen::VectorXd& counts,
                                    const LgcpConfig& config, const CourtGeometry& geom = {});

std::vector<IntensitySurface> fit_all_surfaces(const std::vector<int>& player_ids,
                                               const Eigen::MatrixXd& counts,
                                               const LgcpConfig& config,
                                               const CourtGeometry& geom = {}, int threads = 1);

}  // namespace hoopdef
