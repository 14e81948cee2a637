#include "hoopdef/lgcp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "hoopdef/threading.hpp"

namespace hoopdef {

Eigen::MatrixXd count_matrix(const std::vector<std::vector<Point>>& shots_by_player,
                             const CourtGeometry& geom) {
  const int V = geom.tile_count();
  Eigen::MatrixXd counts =
      Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(shots_by_player.size()), V);
  for (std::size_t k = 0; k < shots_by_player.size(); ++k)
    for (const Point& s : shots_by_player[k])
      counts(static_cast<Eigen::Index>(k), geom.tile_index(s)) += 1.0;
  return counts;
}

std::pair<std::vector<int>, Eigen::MatrixXd> collect_shot_counts(std::span<const Possession> corpus,
                                                                 const CourtGeometry& geom) {
  std::vector<int> ids;
  std::vector<std::vector<Point>> shots;
  auto row_of = [&](int id) {
    const auto it = std::lower_bound(ids.begin(), ids.end(), id);
    if (it != ids.end() && *it == id) return static_cast<std::size_t>(it - ids.begin());
    const std::size_t pos = it - ids.begin();
    ids.insert(it, id);
    shots.insert(shots.begin() + pos, {});
    return pos;
  };
  for (const auto& p : corpus) {
    if (!p.shot) continue;
    if (!geom.contains(p.shot->location))
      throw std::invalid_argument("possession " + p.id + ": shot location out of bounds");
    shots[row_of(p.offense_ids[p.shot->shooter])].push_back(p.shot->location);
  }
  return {ids, count_matrix(shots, geom)};
}

Eigen::MatrixXd se_kernel(std::span<const Point> centers, double marginal_var, double len_x,
                          double len_y) {
  if (!(marginal_var > 0.0) || !(len_x > 0.0) || !(len_y > 0.0))
    throw std::invalid_argument("se_kernel: variance and lengthscales must be positive");
  const Eigen::Index n = static_cast<Eigen::Index>(centers.size());
  Eigen::MatrixXd cov(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    cov(i, i) = marginal_var;
    for (Eigen::Index j = 0; j < i; ++j) {
      const double dx = (centers[i].x - centers[j].x) / len_x;
      const double dy = (centers[i].y - centers[j].y) / len_y;
      cov(i, j) = cov(j, i) = marginal_var * std::exp(-0.5 * (dx * dx + dy * dy));
    }
  }
  return cov;
}

std::pair<double, Eigen::VectorXd> lgcp_log_posterior_and_gradient(const Eigen::VectorXd& field,
                                                                   const Eigen::VectorXd& counts,
                                                                   const Eigen::MatrixXd& cov,
                                                                   double log_mean_rate,
                                                                   double jitter_rel) {
  if (field.size() != counts.size() || field.size() != cov.rows() || cov.rows() != cov.cols())
    throw std::invalid_argument("lgcp_log_posterior_and_gradient: size mismatch");
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) {
    const double jitter = jitter_rel * cov.diagonal().maxCoeff();
    Eigen::MatrixXd jittered = cov;
    jittered.diagonal().array() += jitter;
    llt.compute(jittered);
    if (llt.info() != Eigen::Success)
      throw std::runtime_error("lgcp_log_posterior_and_gradient: covariance not PD after jitter");
  }
  const Eigen::VectorXd rate = (field.array() + log_mean_rate).exp();
  const Eigen::VectorXd prior_pull = llt.solve(field);
  const double value = (counts.array() * (field.array() + log_mean_rate)).sum() - rate.sum() -
                       0.5 * field.dot(prior_pull);
  Eigen::VectorXd grad = counts - rate - prior_pull;
  return {value, grad};
}

GridGaussianPrior::GridGaussianPrior(const CourtGeometry& geom, double marginal_var, double len_x,
                                     double len_y, double jitter_rel)
    : deep_(geom.tiles_deep()), wide_(geom.tiles_wide()) {
  if (!(marginal_var > 0.0) || !(len_x > 0.0) || !(len_y > 0.0))
    throw std::invalid_argument("GridGaussianPrior: variance and lengthscales must be positive");
  auto axis = [&](int n, double len, double var) {
    Eigen::MatrixXd k(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double d = (i - j) * geom.tile_size_ft / len;
        k(i, j) = var * std::exp(-0.5 * d * d);
      }
    return k;
  };
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ex(axis(deep_, len_x, marginal_var));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ey(axis(wide_, len_y, 1.0));
  ux_ = ex.eigenvectors();
  uy_ = ey.eigenvectors();
  eig_.resize(deep_ * wide_);
  const double floor = jitter_rel * marginal_var;
  for (int i = 0; i < deep_; ++i)
    for (int j = 0; j < wide_; ++j)
      eig_(i * wide_ + j) = std::max(ex.eigenvalues()(i) * ey.eigenvalues()(j), floor);
}

Eigen::VectorXd GridGaussianPrior::transform(const Eigen::VectorXd& v, int power) const {
  if (v.size() != deep_ * wide_) throw std::invalid_argument("GridGaussianPrior: bad vector size");
  using MapT = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
  MapT z(v.data(), deep_, wide_);
  Eigen::MatrixXd w = ux_.transpose() * z * uy_;  // spectral coordinates
  for (int i = 0; i < deep_; ++i)
    for (int j = 0; j < wide_; ++j) {
      const double e = eig_(i * wide_ + j);
      const double factor = power == 1 ? e : (power == -1 ? 1.0 / e : std::sqrt(e));
      w(i, j) *= factor;
    }
  Eigen::MatrixXd back = ux_ * w * uy_.transpose();
  Eigen::VectorXd out(deep_ * wide_);
  for (int i = 0; i < deep_; ++i)
    for (int j = 0; j < wide_; ++j) out(i * wide_ + j) = back(i, j);
  return out;
}

Eigen::VectorXd GridGaussianPrior::apply(const Eigen::VectorXd& v) const { return transform(v, 1); }
Eigen::VectorXd GridGaussianPrior::apply_inverse(const Eigen::VectorXd& v) const {
  return transform(v, -1);
}
Eigen::VectorXd GridGaussianPrior::apply_sqrt(const Eigen::VectorXd& v) const {
  return transform(v, 2);
}
double GridGaussianPrior::quad_inverse(const Eigen::VectorXd& v) const {
  return v.dot(apply_inverse(v));
}
double GridGaussianPrior::log_det() const { return eig_.array().log().sum(); }

namespace {

double lgcp_objective(const Eigen::VectorXd& field, const Eigen::VectorXd& counts,
                      const GridGaussianPrior& prior, double z0) {
  return (counts.array() * (field.array() + z0)).sum() - (field.array() + z0).exp().sum() -
         0.5 * prior.quad_inverse(field);
}

// conjugate gradient on (I + C^{1/2} W C^{1/2}) e = rhs; well conditioned
// because the operator's spectrum starts at one
Eigen::VectorXd cg_whitened(const GridGaussianPrior& prior, const Eigen::VectorXd& weights,
                            const Eigen::VectorXd& rhs, int max_iters, double tol) {
  auto matvec = [&](const Eigen::VectorXd& v) {
    return (v + prior.apply_sqrt(weights.cwiseProduct(prior.apply_sqrt(v)))).eval();
  };
  Eigen::VectorXd x = Eigen::VectorXd::Zero(rhs.size());
  Eigen::VectorXd r = rhs;
  Eigen::VectorXd p = r;
  double rs = r.squaredNorm();
  const double target = tol * tol * rs;
  for (int it = 0; it < max_iters && rs > target; ++it) {
    const Eigen::VectorXd ap = matvec(p);
    const double alpha = rs / p.dot(ap);
    x += alpha * p;
    r -= alpha * ap;
    const double rs_new = r.squaredNorm();
    p = r + (rs_new / rs) * p;
    rs = rs_new;
  }
  return x;
}

}  // namespace

LgcpMapFit fit_lgcp_map(const Eigen::VectorXd& counts, const LgcpConfig& config,
                        std::array<double, 2> lengthscale, const CourtGeometry& geom) {
  const int V = geom.tile_count();
  if (counts.size() != V) throw std::invalid_argument("fit_lgcp_map: counts size != tile count");
  if (counts.minCoeff() < 0.0) throw std::invalid_argument("fit_lgcp_map: negative count");

  const GridGaussianPrior prior(geom, config.marginal_var, lengthscale[0], lengthscale[1],
                                config.jitter_rel);
  const double z0 = config.log_mean_rate
                        ? *config.log_mean_rate
                        : std::log(std::max(counts.sum(), 1.0) / static_cast<double>(V));

  LgcpMapFit fit;
  fit.log_mean_rate = z0;
  Eigen::VectorXd z = Eigen::VectorXd::Zero(V);
  double obj = lgcp_objective(z, counts, prior, z0);
  const double gtol = config.grad_tol_per_tile * V;

  int iter = 0;
  for (; iter < config.map_max_iters; ++iter) {
    const Eigen::VectorXd rate = (z.array() + z0).exp();
    const Eigen::VectorXd grad = counts - rate - prior.apply_inverse(z);
    fit.grad_norm = grad.norm();
    if (fit.grad_norm < gtol) break;

    // Newton direction for (C^{-1} + W) d = g via the whitened system
    const Eigen::VectorXd rhs = prior.apply_sqrt(grad);
    const Eigen::VectorXd e = cg_whitened(prior, rate, rhs, 200, 1e-10);
    const Eigen::VectorXd dir = prior.apply_sqrt(e);

    double step = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 40; ++ls) {
      const Eigen::VectorXd cand = z + step * dir;
      const double cand_obj = lgcp_objective(cand, counts, prior, z0);
      if (cand_obj > obj) {
        z = cand;
        obj = cand_obj;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // numerically stationary
  }
  fit.iterations = iter;
  {
    const Eigen::VectorXd rate = (z.array() + z0).exp();
    fit.grad_norm = (counts - rate - prior.apply_inverse(z)).norm();
  }
  if (fit.grad_norm >= gtol) {
    throw std::runtime_error("fit_lgcp_map: no convergence after " +
                             std::to_string(config.map_max_iters) +
                             " iterations (grad norm " + std::to_string(fit.grad_norm) +
                             ", tolerance " + std::to_string(gtol) + ")");
  }
  fit.field = z;
  fit.intensity = (z.array() + z0).exp();
  fit.objective = obj;
  return fit;
}

LengthscaleChain sample_lengthscale_mh(const Eigen::VectorXd* field, const LgcpConfig& config,
                                       std::array<double, 2> init, int n_samples, Rng& rng,
                                       const CourtGeometry& geom) {
  auto log_target = [&](std::array<double, 2> ls) -> double {
    if (ls[0] <= 0.0 || ls[1] <= 0.0) return -std::numeric_limits<double>::infinity();
    double lp = 0.0;
    for (double l : ls)
      lp += (config.ls_shape - 1.0) * std::log(l) - l / config.ls_scale;
    if (field && field->size() > 0) {
      const GridGaussianPrior prior(geom, config.marginal_var, ls[0], ls[1], config.jitter_rel);
      lp += -0.5 * prior.log_det() - 0.5 * prior.quad_inverse(*field);
    }
    return lp;
  };

  LengthscaleChain chain;
  chain.samples.reserve(n_samples);
  std::array<double, 2> cur = init;
  double cur_lp = log_target(cur);
  int accepted = 0;
  for (int s = 0; s < n_samples; ++s) {
    const std::array<double, 2> prop{cur[0] + rng.normal(0.0, config.mh_proposal_sd),
                                     cur[1] + rng.normal(0.0, config.mh_proposal_sd)};
    const double prop_lp = log_target(prop);
    if (std::log(rng.uniform_pos()) < prop_lp - cur_lp) {
      cur = prop;
      cur_lp = prop_lp;
      ++accepted;
    }
    chain.samples.push_back(cur);
  }
  chain.acceptance_rate = n_samples > 0 ? static_cast<double>(accepted) / n_samples : 0.0;
  return chain;
}

IntensitySurface fit_player_surface(int player_id, const Eigen::VectorXd& counts,
                                    const LgcpConfig& config, const CourtGeometry& geom) {
  Rng rng = Rng::split(config.seed, static_cast<std::uint64_t>(player_id) + 0x5u);
  std::array<double, 2> ls{config.ls_shape * config.ls_scale, config.ls_shape * config.ls_scale};

  IntensitySurface surf;
  surf.player_id = player_id;
  LgcpMapFit fit;
  for (int sweep = 0; sweep < std::max(config.sweeps, 1); ++sweep) {
    fit = fit_lgcp_map(counts, config, ls, geom);
    if (config.lengthscale_samples > 0) {
      LengthscaleChain chain =
          sample_lengthscale_mh(&fit.field, config, ls, config.lengthscale_samples, rng, geom);
      surf.lengthscale_draws = chain.samples;
      surf.mh_acceptance = chain.acceptance_rate;
      std::array<double, 2> mean{0.0, 0.0};
      for (const auto& s : chain.samples) {
        mean[0] += s[0];
        mean[1] += s[1];
      }
      mean[0] /= chain.samples.size();
      mean[1] /= chain.samples.size();
      ls = mean;
    }
  }
  fit = fit_lgcp_map(counts, config, ls, geom);
  surf.intensity = fit.intensity;
  surf.normalized = fit.intensity / fit.intensity.sum();
  surf.log_mean_rate = fit.log_mean_rate;
  surf.lengthscale = ls;
  return surf;
}

std::vector<IntensitySurface> fit_all_surfaces(const std::vector<int>& player_ids,
                                               const Eigen::MatrixXd& counts,
                                               const LgcpConfig& config, const CourtGeometry& geom,
                                               int threads) {
  if (static_cast<Eigen::Index>(player_ids.size()) != counts.rows())
    throw std::invalid_argument("fit_all_surfaces: ids/counts mismatch");
  std::vector<IntensitySurface> out(player_ids.size());
  parallel_for(static_cast<int>(player_ids.size()), threads, [&](int i) {
    out[i] = fit_player_surface(player_ids[i], counts.row(i).transpose(), config, geom);
  });
  return out;
}

}  // namespace hoopdef
