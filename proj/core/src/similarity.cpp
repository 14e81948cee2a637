#include "hoopdef/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include "hoopdef/threading.hpp"

namespace hoopdef {

int DefenderGroups::group_for(int defender_id) const {
  for (std::size_t i = 0; i < defender_ids.size(); ++i)
    if (defender_ids[i] == defender_id) return group_of[i];
  return -1;
}

Eigen::MatrixXd OffenderGraph::weight_matrix() const {
  const int n = size();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j : neighbors[i]) m(i, j) = 1.0 / static_cast<double>(neighbors[i].size());
  return m;
}

Eigen::MatrixXd OffenderGraph::precision() const {
  const int n = size();
  Eigen::MatrixXd q = Eigen::MatrixXd::Identity(n, n) - discount * weight_matrix();
  for (int i = 0; i < n; ++i) q.row(i) /= cond_var(i);
  return q;
}

int OffenderGraph::index_of(int player_id) const {
  for (std::size_t i = 0; i < player_ids.size(); ++i)
    if (player_ids[i] == player_id) return static_cast<int>(i);
  return -1;
}

std::pair<std::vector<int>, Eigen::MatrixXd> defender_time_in_basis(
    std::span<const Possession> corpus, const MatchupModel& model, const ShotBasis& basis,
    const CourtGeometry& geom, int threads) {
  const std::vector<int> region = basis.tile_assignment(geom.tile_count());
  const int B = basis.rank;

  struct Acc {
    Eigen::VectorXd mass;
    long frames = 0;
  };
  const int n = static_cast<int>(corpus.size());
  std::vector<std::map<int, Acc>> partial(n);
  parallel_for(n, threads, [&](int i) {
    const auto& p = corpus[i];
    const MatchupPosterior post = forward_backward(p, model, geom);
    auto& acc = partial[i];
    for (std::size_t t = 0; t < p.frames.size(); ++t) {
      const auto& f = p.frames[t];
      int tile_region[5];
      for (int k = 0; k < 5; ++k) tile_region[k] = region[geom.tile_index(f.offense[k])];
      for (int j = 0; j < 5; ++j) {
        Acc& a = acc[p.defense_ids[j]];
        if (a.mass.size() == 0) a.mass = Eigen::VectorXd::Zero(B);
        for (int k = 0; k < 5; ++k)
          a.mass(tile_region[k]) += post.marginals[j](static_cast<Eigen::Index>(t), k);
        a.frames += 1;
      }
    }
  });

  std::map<int, Acc> total;
  for (const auto& m : partial)
    for (const auto& [id, a] : m) {
      Acc& t = total[id];
      if (t.mass.size() == 0) t.mass = Eigen::VectorXd::Zero(B);
      t.mass += a.mass;
      t.frames += a.frames;
    }

  std::vector<int> ids;
  for (const auto& [id, a] : total)
    if (a.frames > 0) ids.push_back(id);
  Eigen::MatrixXd profile(static_cast<Eigen::Index>(ids.size()), B);
  for (std::size_t i = 0; i < ids.size(); ++i)
    profile.row(static_cast<Eigen::Index>(i)) =
        (total[ids[i]].mass / static_cast<double>(total[ids[i]].frames)).transpose();
  return {ids, profile};
}

namespace {

// Deterministic k-means: greedy farthest-point seeding and fixed
// tie-breaks, so the partition does not depend on row order.
std::vector<int> kmeans_labels(const Eigen::MatrixXd& x, int k) {
  const int n = static_cast<int>(x.rows());
  auto lex_less = [&](int a, int b) {
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
      if (x(a, c) < x(b, c)) return true;
      if (x(a, c) > x(b, c)) return false;
    }
    return a < b;
  };

  std::vector<Eigen::RowVectorXd> centers;
  int first = 0;
  for (int i = 1; i < n; ++i)
    if (lex_less(i, first)) first = i;
  centers.push_back(x.row(first));
  for (int c = 1; c < k; ++c) {
    int far = 0;
    double far_d = -1.0;
    for (int i = 0; i < n; ++i) {
      double d = std::numeric_limits<double>::infinity();
      for (const auto& cc : centers) d = std::min(d, (x.row(i) - cc).squaredNorm());
      if (d > far_d + 1e-15 || (std::abs(d - far_d) <= 1e-15 && lex_less(i, far))) {
        far_d = d;
        far = i;
      }
    }
    centers.push_back(x.row(far));
  }

  std::vector<int> label(n, 0);
  for (int round = 0; round < 200; ++round) {
    bool changed = false;
    for (int i = 0; i < n; ++i) {
      int best = 0;
      double best_d = (x.row(i) - centers[0]).squaredNorm();
      for (int c = 1; c < k; ++c) {
        const double d = (x.row(i) - centers[c]).squaredNorm();
        if (d < best_d - 1e-15) {
          best_d = d;
          best = c;
        }
      }
      if (best != label[i]) {
        label[i] = best;
        changed = true;
      }
    }
    for (int c = 0; c < k; ++c) {
      Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(x.cols());
      int count = 0;
      for (int i = 0; i < n; ++i)
        if (label[i] == c) {
          mean += x.row(i);
          ++count;
        }
      if (count > 0) centers[c] = mean / count;
    }
    if (!changed) break;
  }
  return label;
}

}  // namespace

DefenderGroups pca_kmeans_groups(const std::vector<int>& ids, const Eigen::MatrixXd& profile,
                                 int k, std::uint64_t seed) {
  (void)seed;  // seeding is deterministic; kept for interface stability
  const int n = static_cast<int>(profile.rows());
  if (static_cast<int>(ids.size()) != n)
    throw std::invalid_argument("pca_kmeans_groups: ids/profile mismatch");
  if (n < k) throw std::invalid_argument("pca_kmeans_groups: fewer rows than clusters");

  Eigen::MatrixXd centered = profile.rowwise() - profile.colwise().mean();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const int pcs = std::min<int>(2, static_cast<int>(svd.singularValues().size()));
  Eigen::MatrixXd scores = Eigen::MatrixXd::Zero(n, 2);
  scores.leftCols(pcs) =
      svd.matrixU().leftCols(pcs) * svd.singularValues().head(pcs).asDiagonal();
  for (int c = 0; c < 2; ++c) {  // orientation convention: largest-|.| entry positive
    Eigen::Index arg = 0;
    if (scores.col(c).cwiseAbs().maxCoeff(&arg) > 0.0 && scores(arg, c) < 0.0)
      scores.col(c) = -scores.col(c);
  }

  std::vector<int> raw = kmeans_labels(scores, k);

  // canonical labels: ascending cluster mean along the first component
  std::vector<double> mean_pc1(k, 0.0);
  std::vector<int> count(k, 0);
  for (int i = 0; i < n; ++i) {
    mean_pc1[raw[i]] += scores(i, 0);
    count[raw[i]] += 1;
  }
  for (int c = 0; c < k; ++c) mean_pc1[c] = count[c] ? mean_pc1[c] / count[c] : 1e18;
  std::vector<int> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return mean_pc1[a] < mean_pc1[b]; });
  std::vector<int> relabel(k);
  for (int c = 0; c < k; ++c) relabel[order[c]] = c;

  DefenderGroups g;
  g.defender_ids = ids;
  g.time_in_basis = profile;
  g.pc_scores = scores;
  g.group_of.resize(n);
  for (int i = 0; i < n; ++i) g.group_of[i] = relabel[raw[i]];
  return g;
}

OffenderGraph build_offender_graph(const std::vector<int>& player_ids,
                                   const Eigen::MatrixXd& loadings, int k_neighbors,
                                   double discount, double var_scale) {
  const int n = static_cast<int>(player_ids.size());
  if (loadings.rows() != n) throw std::invalid_argument("build_offender_graph: ids/loadings mismatch");
  if (n < k_neighbors + 1)
    throw std::invalid_argument("build_offender_graph: need at least k+1 players");
  if (!(discount >= 0.0 && discount < 1.0))
    throw std::invalid_argument("build_offender_graph: discount must lie in [0,1)");

  Eigen::MatrixXd w = loadings;
  for (int i = 0; i < n; ++i) {
    const double mass = w.row(i).sum();
    if (mass > 0.0) w.row(i) /= mass;
  }

  std::vector<std::vector<int>> adj(n);
  for (int i = 0; i < n; ++i) {
    std::vector<int> order;
    order.reserve(n - 1);
    for (int j = 0; j < n; ++j)
      if (j != i) order.push_back(j);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      const double da = (w.row(i) - w.row(a)).squaredNorm();
      const double db = (w.row(i) - w.row(b)).squaredNorm();
      if (da != db) return da < db;
      return player_ids[a] < player_ids[b];  // duplicate rows: tie-break by id
    });
    order.resize(k_neighbors);
    for (int j : order) {  // union symmetrization
      adj[i].push_back(j);
      adj[j].push_back(i);
    }
  }

  OffenderGraph g;
  g.player_ids = player_ids;
  g.discount = discount;
  g.var_scale = var_scale;
  g.neighbors.resize(n);
  g.cond_var.resize(n);
  for (int i = 0; i < n; ++i) {
    std::sort(adj[i].begin(), adj[i].end());
    adj[i].erase(std::unique(adj[i].begin(), adj[i].end()), adj[i].end());
    g.neighbors[i] = adj[i];
    g.cond_var(i) = var_scale / static_cast<double>(adj[i].size());
  }
  return g;
}

CarCheck car_precision_check(const OffenderGraph& graph) {
  const Eigen::MatrixXd q = graph.precision();
  CarCheck c;
  c.max_asymmetry = (q - q.transpose()).cwiseAbs().maxCoeff();
  if (c.max_asymmetry > 1e-10)
    throw std::runtime_error("car_precision_check: precision asymmetric beyond 1e-10 (" +
                             std::to_string(c.max_asymmetry) + ")");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (q + q.transpose()),
                                                    Eigen::EigenvaluesOnly);
  c.min_eigenvalue = es.eigenvalues().minCoeff();
  const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  if (!(c.min_eigenvalue > 1e-12 * scale))
    throw std::runtime_error("car_precision_check: precision not positive definite (min eig " +
                             std::to_string(c.min_eigenvalue) + ")");
  return c;
}

}  // namespace hoopdef
