#include <doctest.h>

#include <cmath>

#include "hoopdef/nmf.hpp"
#include "hoopdef/rng.hpp"
#include "hoopdef/synth.hpp"

using namespace hoopdef;

TEST_CASE("generalized kl is zero at identity and matches hand values") {
  Eigen::MatrixXd a(1, 1), b(1, 1);
  a << 1.0;
  b << 2.0;
  CHECK(generalized_kl(a, a) == 0.0);
  CHECK(generalized_kl(a, b) == doctest::Approx(1.0 - std::log(2.0)).epsilon(1e-14));
}

TEST_CASE("generalized kl scales linearly under joint scaling") {
  Rng rng(6);
  Eigen::MatrixXd a(3, 4), b(3, 4);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 4; ++j) {
      a(i, j) = rng.gamma(1.0, 1.0);
      b(i, j) = rng.gamma(1.0, 1.0);
    }
  const double base = generalized_kl(a, b);
  CHECK(generalized_kl(3.5 * a, 3.5 * b) == doctest::Approx(3.5 * base).epsilon(1e-12));
  CHECK(base > 0.0);
}

TEST_CASE("kl is infinite where support is lost") {
  Eigen::MatrixXd a(1, 2), b(1, 2);
  a << 1.0, 0.0;
  b << 0.0, 1.0;
  CHECK(std::isinf(generalized_kl(a, b)));
  // but zero entries in the target cost only the reconstruction mass
  Eigen::MatrixXd c(1, 2);
  c << 0.5, 0.5;
  CHECK(generalized_kl(b, c) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("an exact factorization is a fixed point of the update") {
  Rng rng(9);
  Eigen::MatrixXd w(6, 2), l(2, 20);
  for (int i = 0; i < w.rows(); ++i)
    for (int j = 0; j < w.cols(); ++j) w(i, j) = rng.gamma(2.0, 1.0) + 0.1;
  for (int i = 0; i < l.rows(); ++i)
    for (int j = 0; j < l.cols(); ++j) l(i, j) = rng.gamma(2.0, 1.0) + 0.1;
  const Eigen::MatrixXd target = w * l;
  Eigen::MatrixXd w2 = w, l2 = l;
  nmf_multiplicative_step(target, w2, l2);
  CHECK((w2 - w).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((l2 - l).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("rank-one targets are recovered to tiny divergence") {
  Rng rng(10);
  Eigen::VectorXd w(8), l(30);
  for (int i = 0; i < 8; ++i) w(i) = rng.gamma(2.0, 1.0) + 0.1;
  for (int i = 0; i < 30; ++i) l(i) = rng.gamma(2.0, 1.0) + 0.1;
  const Eigen::MatrixXd target = w * l.transpose();
  Eigen::MatrixXd wf = Eigen::MatrixXd::Constant(8, 1, 0.7);
  Eigen::MatrixXd lf = Eigen::MatrixXd::Constant(1, 30, 0.9);
  for (int it = 0; it < 500; ++it) nmf_multiplicative_step(target, wf, lf);
  CHECK(generalized_kl(target, wf * lf) < 1e-6);
}

TEST_CASE("updates never increase the divergence from random starts") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    Eigen::MatrixXd target(7, 25);
    for (int i = 0; i < 7; ++i)
      for (int j = 0; j < 25; ++j) target(i, j) = rng.gamma(0.8, 1.0);
    Eigen::MatrixXd w(7, 3), l(3, 25);
    for (int i = 0; i < 7; ++i)
      for (int j = 0; j < 3; ++j) w(i, j) = rng.gamma(1.0, 1.0) + 0.05;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 25; ++j) l(i, j) = rng.gamma(1.0, 1.0) + 0.05;
    double kl = generalized_kl(target, w * l);
    for (int it = 0; it < 50; ++it) {
      nmf_multiplicative_step(target, w, l);
      const double next = generalized_kl(target, w * l);
      CHECK(next <= kl + 1e-8);
      kl = next;
      CHECK(w.minCoeff() >= 0.0);
      CHECK(l.minCoeff() >= 0.0);
    }
  }
}

namespace {

// planted construction: five disjoint blobs plus a diffuse floor whose
// weight varies by player; the first ten players shoot from exactly one
// blob each, which pins the factorization
Eigen::MatrixXd planted_surfaces(int players, const SynthBases& bases, Rng& rng) {
  const int V = static_cast<int>(bases.surfaces.cols());
  Eigen::MatrixXd surf(players, V);
  for (int k = 0; k < players; ++k) {
    Eigen::VectorXd mix = Eigen::VectorXd::Zero(5);
    if (k < 10) {
      mix(k % 5) = 1.0;
    } else {
      for (int b = 0; b < 5; ++b) mix(b) = rng.gamma(0.5, 1.0) + 1e-4;
      mix /= mix.sum();
    }
    const double floor_share = rng.uniform(0.05, 0.25);
    Eigen::VectorXd row = Eigen::VectorXd::Zero(V);
    for (int b = 0; b < 5; ++b)
      row += (1.0 - floor_share) * mix(b) * bases.surfaces.row(b).transpose();
    for (int v = 0; v < V; ++v) row(v) += floor_share / V * (0.5 + rng.uniform());
    surf.row(k) = row.transpose() / row.sum();
  }
  return surf;
}

double cosine(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return a.dot(b) / (a.norm() * b.norm());
}

}  // namespace

TEST_CASE("planted blobs are recovered and the diffuse part is flagged residual") {
  const SynthBases bases = SynthBases::standard_five();
  Rng rng(123);
  const Eigen::MatrixXd surfaces = planted_surfaces(25, bases, rng);
  NmfOptions opts;
  opts.rank = 6;
  opts.restarts = 3;
  opts.seed = 5;
  opts.max_iters = 800;
  const ShotBasis fit = fit_shot_basis(surfaces, opts);
  // the discarded basis is the diffuse one: nearly flat over the court
  REQUIRE(fit.rank == 6);
  const ShotBasis retained = identify_and_drop_residual(fit);
  REQUIRE(retained.rank == 5);
  REQUIRE(retained.residual_index.has_value());
  const double residual_ratio = fit.bases.row(*retained.residual_index).maxCoeff() /
                                fit.bases.row(*retained.residual_index).mean();
  CHECK(residual_ratio < 5.0);  // the flagged basis is the diffuse one

  // greedy matching of fitted bases to planted blobs by cosine similarity
  std::vector<bool> used(5, false);
  for (int planted = 0; planted < 5; ++planted) {
    double best = -1.0;
    int arg = -1;
    for (int b = 0; b < 5; ++b) {
      if (used[b]) continue;
      const double c = cosine(bases.surfaces.row(planted).transpose(),
                              retained.bases.row(b).transpose());
      if (c > best) {
        best = c;
        arg = b;
      }
    }
    used[arg] = true;
    CHECK(best > 0.9);
  }
}

TEST_CASE("permuting player rows permutes loadings and keeps bases") {
  // equivariance of the update map: running a step on row-permuted data
  // from the row-permuted state gives the row-permuted loadings and the
  // identical bases
  Rng rng(44);
  Eigen::MatrixXd target(9, 30), w(9, 4), l(4, 30);
  for (int i = 0; i < 9; ++i)
    for (int j = 0; j < 30; ++j) target(i, j) = rng.gamma(0.9, 1.0) + 1e-3;
  for (int i = 0; i < 9; ++i)
    for (int j = 0; j < 4; ++j) w(i, j) = rng.gamma(1.0, 1.0) + 0.05;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 30; ++j) l(i, j) = rng.gamma(1.0, 1.0) + 0.05;

  Eigen::MatrixXd target_rev(9, 30), w_rev(9, 4);
  for (int i = 0; i < 9; ++i) {
    target_rev.row(i) = target.row(8 - i);
    w_rev.row(i) = w.row(8 - i);
  }
  Eigen::MatrixXd l_rev = l;
  for (int it = 0; it < 25; ++it) {
    nmf_multiplicative_step(target, w, l);
    nmf_multiplicative_step(target_rev, w_rev, l_rev);
  }
  for (int i = 0; i < 9; ++i)
    for (int j = 0; j < 4; ++j)
      CHECK(w_rev(i, j) == doctest::Approx(w(8 - i, j)).epsilon(1e-10));
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 30; ++j) CHECK(l_rev(i, j) == doctest::Approx(l(i, j)).epsilon(1e-10));
}

TEST_CASE("square full-rank positive targets factor almost exactly when rank equals players") {
  Rng rng(77);
  const int k = 6;
  Eigen::MatrixXd target(k, 40);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < 40; ++j) target(i, j) = rng.gamma(1.5, 1.0) + 0.01;
    target.row(i) /= target.row(i).sum();
  }
  NmfOptions opts;
  opts.rank = k;
  opts.restarts = 4;
  opts.seed = 3;
  opts.max_iters = 4000;
  opts.rel_tol = 1e-10;
  const ShotBasis fit = fit_shot_basis(target, opts);
  CHECK(fit.kl_divergence < 1e-4);
}

TEST_CASE("rank must not exceed the number of players") {
  Eigen::MatrixXd target = Eigen::MatrixXd::Constant(3, 10, 0.1);
  NmfOptions opts;
  opts.rank = 6;
  CHECK_THROWS_AS(fit_shot_basis(target, opts), std::invalid_argument);
}

TEST_CASE("residual drop keeps exactly rank minus one bases ordered by mass") {
  const SynthBases bases = SynthBases::standard_five();
  Rng rng(31);
  const Eigen::MatrixXd surfaces = planted_surfaces(20, bases, rng);
  NmfOptions opts;
  opts.rank = 6;
  opts.restarts = 2;
  opts.seed = 12;
  opts.max_iters = 600;
  const ShotBasis fit = fit_shot_basis(surfaces, opts);
  const ShotBasis retained = identify_and_drop_residual(fit);
  CHECK(retained.rank == 5);
  REQUIRE(retained.residual_index.has_value());
  for (int b = 0; b < retained.rank; ++b)
    CHECK(retained.bases.row(b).sum() == doctest::Approx(1.0).epsilon(1e-9));
  for (int b = 1; b < retained.rank; ++b)
    CHECK(retained.loadings.col(b - 1).sum() >= retained.loadings.col(b).sum() - 1e-12);
  // reconstruction preserved by renormalization bookkeeping on retained columns
  const double mass_before = fit.loadings.sum();
  CHECK(mass_before > 0.0);
}

TEST_CASE("ties in concentration break deterministically toward the lowest index") {
  ShotBasis b;
  b.rank = 3;
  b.bases = Eigen::MatrixXd::Constant(3, 10, 0.1);  // equally flat rows
  b.loadings = Eigen::MatrixXd::Constant(4, 3, 1.0);
  const ShotBasis r = identify_and_drop_residual(b);
  REQUIRE(r.residual_index.has_value());
  CHECK(*r.residual_index == 0);
  CHECK(r.rank == 2);
}

TEST_CASE("nonnegative combinations of retained bases stay nonnegative") {
  const SynthBases bases = SynthBases::standard_five();
  Rng rng(64);
  Eigen::VectorXd weights(5);
  for (int b = 0; b < 5; ++b) weights(b) = rng.gamma(1.0, 1.0);
  const Eigen::VectorXd combo = bases.surfaces.transpose() * weights;
  CHECK(combo.minCoeff() >= 0.0);
}
