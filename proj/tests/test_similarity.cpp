#include <doctest.h>

#include <cmath>
#include <numeric>

#include "hoopdef/rng.hpp"
#include "hoopdef/similarity.hpp"
#include "hoopdef/synth.hpp"

using namespace hoopdef;

namespace {

std::vector<int> iota_ids(int n) {
  std::vector<int> ids(n);
  std::iota(ids.begin(), ids.end(), 0);
  return ids;
}

Eigen::MatrixXd random_loadings(int n, int cols, Rng& rng) {
  Eigen::MatrixXd w(n, cols);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < cols; ++j) w(i, j) = rng.gamma(0.8, 1.0) + 1e-3;
    w.row(i) /= w.row(i).sum();
  }
  return w;
}

}  // namespace

TEST_CASE("two mutual neighbors give the textbook proper prior") {
  Eigen::MatrixXd w(2, 3);
  w << 0.8, 0.1, 0.1, 0.1, 0.8, 0.1;
  const OffenderGraph g = build_offender_graph(iota_ids(2), w, 1, 0.9, 1.0);
  REQUIRE(g.neighbors[0] == std::vector<int>{1});
  REQUIRE(g.neighbors[1] == std::vector<int>{0});
  const Eigen::MatrixXd m = g.weight_matrix();
  CHECK(m(0, 1) == 1.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd::Identity(2, 2) - 0.9 * m);
  CHECK(es.eigenvalues().minCoeff() == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(es.eigenvalues().maxCoeff() == doctest::Approx(1.9).epsilon(1e-12));
  const CarCheck check = car_precision_check(g);
  CHECK(check.min_eigenvalue > 0.0);
  CHECK(check.max_asymmetry < 1e-12);
}

TEST_CASE("union symmetrization keeps one-directional near misses") {
  // a tight clique of 4 plus a distant satellite: the satellite's nearest
  // neighbors are in the clique, but no clique member picks the satellite
  Eigen::MatrixXd w(5, 2);
  w << 0.00, 1.00,
       0.02, 0.98,
       0.04, 0.96,
       0.06, 0.94,
       0.90, 0.10;
  const OffenderGraph g = build_offender_graph(iota_ids(5), w, 2, 0.9, 1.0);
  bool satellite_connected = false;
  for (int j : g.neighbors[4]) satellite_connected = satellite_connected || j < 4;
  CHECK(satellite_connected);
  for (int j : g.neighbors[4]) {
    const auto& back = g.neighbors[j];
    CHECK(std::find(back.begin(), back.end(), 4) != back.end());
  }
}

TEST_CASE("minimum degree honors the neighbor count under the union rule") {
  Rng rng(15);
  const Eigen::MatrixXd w = random_loadings(40, 5, rng);
  const OffenderGraph g = build_offender_graph(iota_ids(40), w, 10, 0.9, 1.0);
  for (int i = 0; i < g.size(); ++i) {
    CHECK(static_cast<int>(g.neighbors[i].size()) >= 10);
    for (int j : g.neighbors[i]) CHECK(j != i);
  }
  // row-normalized weights sum to one
  const Eigen::MatrixXd m = g.weight_matrix();
  for (int i = 0; i < g.size(); ++i) CHECK(m.row(i).sum() == doctest::Approx(1.0));
}

TEST_CASE("ring of ten nodes is proper at discount 0.9") {
  OffenderGraph g;
  g.player_ids = iota_ids(10);
  g.discount = 0.9;
  g.var_scale = 1.0;
  g.neighbors.resize(10);
  g.cond_var.resize(10);
  for (int i = 0; i < 10; ++i) {
    g.neighbors[i] = {(i + 9) % 10, (i + 1) % 10};
    std::sort(g.neighbors[i].begin(), g.neighbors[i].end());
    g.cond_var(i) = 0.5;
  }
  const CarCheck check = car_precision_check(g);
  // oracle: eigenvalues of I - 0.9 M on a ring are 1 - 0.9 cos(2 pi j / 10),
  // scaled by the constant degree 2 in the precision
  double oracle_min = 1e18;
  for (int j = 0; j < 10; ++j)
    oracle_min = std::min(oracle_min, 2.0 * (1.0 - 0.9 * std::cos(2.0 * M_PI * j / 10.0)));
  CHECK(check.min_eigenvalue == doctest::Approx(oracle_min).epsilon(1e-9));
  CHECK(check.min_eigenvalue > 0.0);
}

TEST_CASE("discount one makes the precision singular and the check fail") {
  Eigen::MatrixXd w(12, 3);
  Rng rng(8);
  w = random_loadings(12, 3, rng);
  OffenderGraph g = build_offender_graph(iota_ids(12), w, 3, 0.9, 1.0);
  g.discount = 1.0;  // forced past the validation for the error path
  CHECK_THROWS_AS(car_precision_check(g), std::runtime_error);
}

TEST_CASE("random union knn graphs stay symmetric positive definite") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Rng rng(seed);
    const int n = 60;
    const Eigen::MatrixXd w = random_loadings(n, 5, rng);
    const OffenderGraph g = build_offender_graph(iota_ids(n), w, 10, 0.9, 1.0);
    const CarCheck check = car_precision_check(g);
    CHECK(check.min_eigenvalue > 0.0);
    CHECK(check.max_asymmetry < 1e-10);
  }
}

TEST_CASE("duplicate loading rows break ties by player id") {
  Eigen::MatrixXd w(12, 2);
  for (int i = 0; i < 12; ++i) {
    w(i, 0) = (i < 6) ? 0.3 : 0.7;  // two groups of identical rows
    w(i, 1) = 1.0 - w(i, 0);
  }
  const OffenderGraph a = build_offender_graph(iota_ids(12), w, 3, 0.9, 1.0);
  const OffenderGraph b = build_offender_graph(iota_ids(12), w, 3, 0.9, 1.0);
  for (int i = 0; i < 12; ++i) CHECK(a.neighbors[i] == b.neighbors[i]);
  // ties resolve toward the smallest ids
  CHECK(a.neighbors[5] == std::vector<int>{0, 1, 2});
}

TEST_CASE("kmeans recovers three planted blobs through the pca front end") {
  Rng rng(12);
  const int per = 15;
  Eigen::MatrixXd profile(3 * per, 5);
  std::vector<int> truth(3 * per);
  const double centers[3][5] = {{0.8, 0.1, 0.05, 0.03, 0.02},
                                {0.05, 0.75, 0.1, 0.05, 0.05},
                                {0.05, 0.05, 0.1, 0.4, 0.4}};
  for (int c = 0; c < 3; ++c)
    for (int i = 0; i < per; ++i) {
      const int row2 = c * per + i;
      truth[row2] = c;
      for (int b = 0; b < 5; ++b) profile(row2, b) = centers[c][b] + rng.normal(0.0, 0.02);
    }
  const DefenderGroups g = pca_kmeans_groups(iota_ids(3 * per), profile, 3, 9);
  // perfect recovery up to label names, which are canonicalized
  for (int c = 0; c < 3; ++c)
    for (int i = 1; i < per; ++i) CHECK(g.group_of[c * per + i] == g.group_of[c * per]);
  CHECK(g.group_of[0] != g.group_of[per]);
  CHECK(g.group_of[per] != g.group_of[2 * per]);
}

TEST_CASE("row order does not change the recovered partition") {
  Rng rng(13);
  const int n = 30;
  Eigen::MatrixXd profile(n, 4);
  for (int i = 0; i < n; ++i) {
    const int c = i % 3;
    for (int b = 0; b < 4; ++b)
      profile(i, b) = (b == c ? 0.7 : 0.1) + rng.normal(0.0, 0.02);
  }
  const DefenderGroups a = pca_kmeans_groups(iota_ids(n), profile, 3, 1);

  Eigen::MatrixXd reversed(n, 4);
  std::vector<int> rev_ids(n);
  for (int i = 0; i < n; ++i) {
    reversed.row(i) = profile.row(n - 1 - i);
    rev_ids[i] = n - 1 - i;
  }
  const DefenderGroups b = pca_kmeans_groups(rev_ids, reversed, 3, 1);
  for (int i = 0; i < n; ++i) CHECK(b.group_of[i] == a.group_of[n - 1 - i]);
}

TEST_CASE("duplicated rows receive identical labels") {
  Rng rng(14);
  Eigen::MatrixXd profile(20, 3);
  for (int i = 0; i < 10; ++i) {
    for (int b = 0; b < 3; ++b) profile(i, b) = rng.uniform();
    profile.row(10 + i) = profile.row(i);
  }
  const DefenderGroups g = pca_kmeans_groups(iota_ids(20), profile, 3, 3);
  for (int i = 0; i < 10; ++i) CHECK(g.group_of[i] == g.group_of[10 + i]);
}

TEST_CASE("too few rows for the cluster count is an error") {
  Eigen::MatrixXd profile(2, 3);
  profile.setConstant(0.2);
  CHECK_THROWS_AS(pca_kmeans_groups(iota_ids(2), profile, 3, 0), std::invalid_argument);
}

TEST_CASE("defender time in basis concentrates where the guarded offender stands") {
  // park every offender inside the rim region; defenders shadow their
  // matchup, so every profile row should be the rim basis indicator
  const SynthBases bases = SynthBases::standard_five();
  ShotBasis basis;
  basis.rank = 5;
  basis.bases = bases.surfaces;
  basis.loadings = Eigen::MatrixXd::Ones(5, 5);

  MatchupModel m;
  m.w_offender = 0.62;
  m.w_ball = 0.11;
  m.w_hoop = 0.27;
  m.emission_var = 0.05;
  m.stay_prob = 0.9;
  const CourtGeometry geom;

  Possession p;
  p.id = "rim";
  for (int t = 0; t < 60; ++t) {
    TrackingFrame f;
    f.t = 0.04 * t;
    for (int k = 0; k < 5; ++k) f.offense[k] = {4.3 + 0.45 * k, 23.0 + 0.9 * k};
    f.ball = f.offense[0];
    f.ball_handler = 0;
    for (int j = 0; j < 5; ++j) f.defense[j] = emission_mean(f, j, m, geom);
    p.frames.push_back(f);
  }
  const std::vector<Possession> corpus = {p};
  const auto [ids, profile] = defender_time_in_basis(corpus, m, basis, geom);
  REQUIRE(ids.size() == 5);
  const int rim = basis.tile_assignment(geom.tile_count())[geom.tile_index({5.3, 25.0})];
  for (int i = 0; i < 5; ++i) {
    CHECK(profile(i, rim) > 0.95);
    CHECK(profile.row(i).sum() == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("a uniformly wandering offender spreads time by region area") {
  // single offender pair moving uniformly over the court; time in each
  // basis approaches the fraction of tiles assigned to it
  const SynthBases bases = SynthBases::standard_five();
  ShotBasis basis;
  basis.rank = 5;
  basis.bases = bases.surfaces;
  basis.loadings = Eigen::MatrixXd::Ones(5, 5);
  const CourtGeometry geom;
  const std::vector<int> region = basis.tile_assignment(geom.tile_count());
  Eigen::VectorXd area = Eigen::VectorXd::Zero(5);
  for (int v : region) area(v) += 1.0 / geom.tile_count();

  MatchupModel m;
  m.w_offender = 1.0 - 2e-9;
  m.w_ball = 1e-9;
  m.w_hoop = 1e-9;
  m.emission_var = 0.01;
  m.stay_prob = 0.9;

  Rng rng(5);
  std::vector<Possession> corpus;
  for (int n = 0; n < 40; ++n) {
    Possession p;
    p.id = "u" + std::to_string(n);
    for (int t = 0; t < 100; ++t) {
      TrackingFrame f;
      f.t = 0.04 * t;
      for (int k = 0; k < 5; ++k)
        f.offense[k] = {rng.uniform(0.0, 47.0), rng.uniform(0.0, 50.0)};
      f.ball = f.offense[0];
      for (int j = 0; j < 5; ++j) f.defense[j] = f.offense[j];
      p.frames.push_back(f);
    }
    corpus.push_back(p);
  }
  const auto [ids, profile] = defender_time_in_basis(corpus, m, basis, geom);
  for (int b = 0; b < 5; ++b)
    CHECK(profile.col(b).mean() == doctest::Approx(area(b)).epsilon(0.15));
}
