#include "hoopdef/nmf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "hoopdef/rng.hpp"

namespace hoopdef {

namespace {
constexpr double kFloor = 1e-12;
}

std::vector<int> ShotBasis::tile_assignment(int tiles) const {
  if (bases.cols() != tiles) throw std::invalid_argument("tile_assignment: tile count mismatch");
  std::vector<int> assign(tiles);
  for (int v = 0; v < tiles; ++v) {
    Eigen::Index arg = 0;
    bases.col(v).maxCoeff(&arg);
    assign[v] = static_cast<int>(arg);
  }
  return assign;
}

double generalized_kl(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("generalized_kl: shape mismatch");
  double total = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      const double av = a(i, j), bv = b(i, j);
      if (av < 0.0 || bv < 0.0) throw std::invalid_argument("generalized_kl: negative entry");
      if (av > 0.0) {
        if (bv == 0.0) return std::numeric_limits<double>::infinity();
        total += av * std::log(av / bv) - av + bv;
      } else {
        total += bv;
      }
    }
  return total;
}

void nmf_multiplicative_step(const Eigen::MatrixXd& target, Eigen::MatrixXd& loadings,
                             Eigen::MatrixXd& bases) {
  const Eigen::Index k = target.rows(), v = target.cols(), r = loadings.cols();
  if (loadings.rows() != k || bases.rows() != r || bases.cols() != v)
    throw std::invalid_argument("nmf_multiplicative_step: shape mismatch");

  Eigen::MatrixXd ratio =
      (target.array() / (loadings * bases).array().max(kFloor)).matrix();
  const Eigen::VectorXd inv_base_mass =
      bases.rowwise().sum().cwiseMax(kFloor).cwiseInverse();
  loadings = loadings
                 .cwiseProduct((ratio * bases.transpose()) * inv_base_mass.asDiagonal())
                 .cwiseMax(kFloor);

  ratio = (target.array() / (loadings * bases).array().max(kFloor)).matrix();
  const Eigen::VectorXd inv_load_mass =
      loadings.colwise().sum().transpose().cwiseMax(kFloor).cwiseInverse();
  bases = bases.cwiseProduct(inv_load_mass.asDiagonal() * (loadings.transpose() * ratio))
              .cwiseMax(kFloor);
}

ShotBasis fit_shot_basis(const Eigen::MatrixXd& surfaces, const NmfOptions& opts) {
  const Eigen::Index k = surfaces.rows(), v = surfaces.cols();
  if (k < opts.rank)
    throw std::invalid_argument("fit_shot_basis: fewer players than basis rank");
  if (surfaces.minCoeff() < 0.0)
    throw std::invalid_argument("fit_shot_basis: negative surface entry");

  ShotBasis best;
  best.kl_divergence = std::numeric_limits<double>::infinity();
  const double total_mass = surfaces.sum();

  for (int restart = 0; restart < std::max(opts.restarts, 1); ++restart) {
    Rng rng = Rng::split(opts.seed, static_cast<std::uint64_t>(restart));
    Eigen::MatrixXd w(k, opts.rank), l(opts.rank, v);
    for (Eigen::Index i = 0; i < k; ++i)
      for (int j = 0; j < opts.rank; ++j) w(i, j) = std::abs(rng.normal()) + 0.1;
    for (int i = 0; i < opts.rank; ++i)
      for (Eigen::Index j = 0; j < v; ++j) l(i, j) = std::abs(rng.normal()) + 0.1;
    const double init_mass = (w * l).sum();
    w *= std::sqrt(total_mass / init_mass);
    l *= std::sqrt(total_mass / init_mass);

    double kl = generalized_kl(surfaces, w * l);
    for (int it = 0; it < opts.max_iters; ++it) {
      nmf_multiplicative_step(surfaces, w, l);
      if ((it + 1) % 10 == 0 || it + 1 == opts.max_iters) {
        const double kl_new = generalized_kl(surfaces, w * l);
        if (std::abs(kl - kl_new) < opts.rel_tol * std::max(std::abs(kl), 1e-30)) {
          kl = kl_new;
          break;
        }
        kl = kl_new;
      }
    }
    if (kl < best.kl_divergence) {
      best.loadings = w;
      best.bases = l;
      best.kl_divergence = kl;
    }
  }

  best.rank = opts.rank;
  // unit-mass basis rows; loadings keep the reconstruction fixed
  for (int b = 0; b < best.rank; ++b) {
    const double mass = best.bases.row(b).sum();
    if (mass > 0.0) {
      best.bases.row(b) /= mass;
      best.loadings.col(b) *= mass;
    }
  }
  return best;
}

ShotBasis identify_and_drop_residual(const ShotBasis& basis) {
  if (basis.rank < 2) throw std::invalid_argument("identify_and_drop_residual: rank too small");

  int residual = 0;
  double lowest_ratio = std::numeric_limits<double>::infinity();
  for (int b = 0; b < basis.rank; ++b) {
    const double peak = basis.bases.row(b).maxCoeff();
    const double mean = basis.bases.row(b).mean();
    const double ratio = mean > 0.0 ? peak / mean : std::numeric_limits<double>::infinity();
    if (ratio < lowest_ratio) {
      lowest_ratio = ratio;
      residual = b;
    }
  }

  std::vector<int> keep;
  for (int b = 0; b < basis.rank; ++b)
    if (b != residual) keep.push_back(b);
  std::stable_sort(keep.begin(), keep.end(), [&](int a, int b) {
    return basis.loadings.col(a).sum() > basis.loadings.col(b).sum();
  });

  ShotBasis out;
  out.rank = basis.rank - 1;
  out.residual_index = residual;
  out.kl_divergence = basis.kl_divergence;
  out.loadings.resize(basis.loadings.rows(), out.rank);
  out.bases.resize(out.rank, basis.bases.cols());
  for (int i = 0; i < out.rank; ++i) {
    out.loadings.col(i) = basis.loadings.col(keep[i]);
    out.bases.row(i) = basis.bases.row(keep[i]);
    const double mass = out.bases.row(i).sum();
    if (mass > 0.0) out.bases.row(i) /= mass;
  }
  return out;
}

std::vector<int> basis_point_values(const ShotBasis& basis, const CourtGeometry& geom) {
  if (basis.bases.cols() != geom.tile_count())
    throw std::invalid_argument("basis_point_values: grid mismatch");
  std::vector<int> values;
  for (int b = 0; b < basis.rank; ++b) {
    Point centroid{0.0, 0.0};
    const double mass = basis.bases.row(b).sum();
    for (int v = 0; v < basis.bases.cols(); ++v)
      centroid = centroid + (basis.bases(b, v) / mass) * geom.tile_center(v);
    values.push_back(geom.is_three_point(centroid) ? 3 : 2);
  }
  return values;
}

}  // namespace hoopdef
