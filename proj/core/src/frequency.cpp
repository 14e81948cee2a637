#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hoopdef/outcomes.hpp"

namespace hoopdef {

namespace {

std::vector<int> sorted_unique(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

int index_in(const std::vector<int>& universe, int id) {
  const auto it = std::lower_bound(universe.begin(), universe.end(), id);
  if (it == universe.end() || *it != id) return -1;
  return static_cast<int>(it - universe.begin());
}

// stable log(1 + sum exp(eta)) over the shot cells
double lse0(const Eigen::VectorXd& eta) {
  const double m = std::max(0.0, eta.maxCoeff());
  return m + std::log(std::exp(-m) + (eta.array() - m).exp().sum());
}

// shot-cell probabilities exp(eta) / (1 + sum exp(eta))
Eigen::VectorXd softmax0(const Eigen::VectorXd& eta) {
  const double m = std::max(0.0, eta.maxCoeff());
  Eigen::VectorXd p = (eta.array() - m).exp();
  p /= (std::exp(-m) + p.sum());
  return p;
}

}  // namespace

FrequencyDesign build_frequency_design(std::span<const Possession> corpus,
                                       std::span<const MatchupSummary> summaries,
                                       const ShotBasis& basis, const CourtGeometry& geom) {
  if (corpus.size() != summaries.size())
    throw std::invalid_argument("build_frequency_design: corpus/summary size mismatch");
  const std::vector<int> region = basis.tile_assignment(geom.tile_count());

  FrequencyDesign d;
  d.n_bases = basis.rank;
  std::vector<int> off, def;
  for (const auto& p : corpus) {
    off.insert(off.end(), p.offense_ids.begin(), p.offense_ids.end());
    def.insert(def.end(), p.defense_ids.begin(), p.defense_ids.end());
  }
  d.offender_ids = sorted_unique(std::move(off));
  d.defender_ids = sorted_unique(std::move(def));

  d.rows.reserve(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& p = corpus[i];
    FrequencyDesign::Row row;
    for (int k = 0; k < 5; ++k) row.offense[k] = index_in(d.offender_ids, p.offense_ids[k]);
    for (int j = 0; j < 5; ++j) row.defense[j] = index_in(d.defender_ids, p.defense_ids[j]);
    row.guard_fractions = summaries[i].guard_fractions;
    if (p.shot) {
      const int b = region[geom.tile_index(p.shot->location)];
      row.outcome = 1 + p.shot->shooter * d.n_bases + b;
    } else {
      row.outcome = 0;
    }
    d.rows.push_back(row);
  }
  return d;
}

Eigen::VectorXd frequency_prob(const Eigen::MatrixXd& propensity,
                               const Eigen::MatrixXd& suppression,
                               const Eigen::Matrix<double, 5, 5>& guards) {
  if (propensity.rows() != 5 || suppression.rows() != 5 ||
      propensity.cols() != suppression.cols())
    throw std::invalid_argument("frequency_prob: expected 5 x B slot matrices");
  const int B = static_cast<int>(propensity.cols());
  Eigen::VectorXd eta(5 * B);
  for (int k = 0; k < 5; ++k)
    for (int b = 0; b < B; ++b) {
      double l = propensity(k, b);
      for (int j = 0; j < 5; ++j) l += guards(j, k) * suppression(j, b);
      eta(k * B + b) = l;
    }
  const Eigen::VectorXd p = softmax0(eta);
  Eigen::VectorXd out(1 + 5 * B);
  out(0) = 1.0 - p.sum();
  out.tail(5 * B) = p;
  return out;
}

Eigen::MatrixXd bohning_bound_matrix(int k) {
  if (k < 1) throw std::invalid_argument("bohning_bound_matrix: k must be >= 1");
  return 0.5 * (Eigen::MatrixXd::Identity(k, k) -
                Eigen::MatrixXd::Constant(k, k, 1.0 / (k + 1)));
}

namespace {

/// Parameter layout for the Gaussian variational family.
struct FreqLayout {
  int n_off = 0, n_def = 0, n_bases = 1, groups = 0;
  bool defense = true;
  int off(int k, int b) const { return k * n_bases + b; }
  int def(int j, int b) const { return n_off * n_bases + j * n_bases + b; }
  int off_mean(int b) const { return n_off * n_bases + (defense ? n_def * n_bases : 0) + b; }
  int def_mean(int g, int b) const { return off_mean(n_bases) + g * n_bases + b; }
  int total() const {
    return n_off * n_bases + (defense ? n_def * n_bases : 0) + n_bases +
           (defense ? groups * n_bases : 0);
  }
};

}  // namespace

FrequencyPosterior fit_frequency_variational(const FrequencyDesign& design,
                                             const FrequencyPriors& priors,
                                             const DefenderGroups& groups,
                                             const FrequencyModelSpec& spec, int max_sweeps,
                                             double rel_tol) {
  if (!(priors.def_var < priors.off_var + 1e-15))
    throw std::invalid_argument(
        "fit_frequency_variational: identifiability requires def_var < off_var");

  FreqLayout lay;
  lay.n_off = static_cast<int>(design.offender_ids.size());
  lay.n_def = static_cast<int>(design.defender_ids.size());
  lay.n_bases = spec.spatial ? design.n_bases : 1;
  lay.defense = spec.include_defense;
  lay.groups = spec.include_defense ? std::max(spec.defender_groups, 1) : 0;
  const int P = lay.total();
  const int B = lay.n_bases;
  const int K = 5 * B;  // shot cells per possession

  std::vector<int> group_of(lay.n_def, 0);
  if (lay.defense && lay.groups > 1) {
    for (int j = 0; j < lay.n_def; ++j) {
      const int g = groups.group_for(design.defender_ids[j]);
      group_of[j] = g >= 0 ? std::min(g, lay.groups - 1) : 0;
    }
  }

  // prior precision, including the hierarchical couplings
  Eigen::MatrixXd lambda = Eigen::MatrixXd::Zero(P, P);
  for (int k = 0; k < lay.n_off; ++k)
    for (int b = 0; b < B; ++b) {
      const int ia = lay.off(k, b), im = lay.off_mean(b);
      const double w = 1.0 / priors.off_var;
      lambda(ia, ia) += w;
      lambda(im, im) += w;
      lambda(ia, im) -= w;
      lambda(im, ia) -= w;
    }
  for (int b = 0; b < B; ++b)
    lambda(lay.off_mean(b), lay.off_mean(b)) += 1.0 / priors.off_group_var;
  if (lay.defense) {
    for (int j = 0; j < lay.n_def; ++j)
      for (int b = 0; b < B; ++b) {
        const int ib = lay.def(j, b), im = lay.def_mean(group_of[j], b);
        const double w = 1.0 / priors.def_var;
        lambda(ib, ib) += w;
        lambda(im, im) += w;
        lambda(ib, im) -= w;
        lambda(im, ib) -= w;
      }
    for (int g = 0; g < lay.groups; ++g)
      for (int b = 0; b < B; ++b)
        lambda(lay.def_mean(g, b), lay.def_mean(g, b)) += 1.0 / priors.def_group_var;
  }

  // likelihood curvature: fixed quadratic bound per possession
  const double diag_w = 0.5;                 // bound diagonal
  const double rank1_w = 0.5 / (K + 1.0);    // bound rank-one correction
  struct Cell {                              // sparse row of the per-possession design
    int idx[6];
    double w[6];
    int n = 0;
  };
  std::vector<Cell> cells(design.rows.size() * K);
  auto cell_at = [&](std::size_t n, int r) -> Cell& { return cells[n * K + r]; };

  for (std::size_t n = 0; n < design.rows.size(); ++n) {
    const auto& row = design.rows[n];
    for (int k = 0; k < 5; ++k)
      for (int b = 0; b < B; ++b) {
        Cell& c = cell_at(n, k * B + b);
        c.idx[c.n] = lay.off(row.offense[k], b);
        c.w[c.n] = 1.0;
        ++c.n;
        if (lay.defense) {
          for (int j = 0; j < 5; ++j) {
            const double z = row.guard_fractions(j, k);
            if (z == 0.0) continue;
            c.idx[c.n] = lay.def(row.defense[j], b);
            c.w[c.n] = z;
            ++c.n;
          }
        }
      }
  }

  std::vector<int> support;
  std::vector<double> support_val;
  Eigen::VectorXd colsum = Eigen::VectorXd::Zero(P);
  for (std::size_t n = 0; n < design.rows.size(); ++n) {
    support.clear();
    support_val.clear();
    for (int r = 0; r < K; ++r) {
      const Cell& c = cell_at(n, r);
      for (int a = 0; a < c.n; ++a) {
        for (int b2 = 0; b2 < c.n; ++b2)
          lambda(c.idx[a], c.idx[b2]) += diag_w * c.w[a] * c.w[b2];
        if (colsum(c.idx[a]) == 0.0) support.push_back(c.idx[a]);
        colsum(c.idx[a]) += c.w[a];
      }
    }
    // rank-one part of the bound touches only this possession's support
    support_val.reserve(support.size());
    for (int s : support) {
      support_val.push_back(colsum(s));
      colsum(s) = 0.0;
    }
    for (std::size_t a = 0; a < support.size(); ++a)
      for (std::size_t b2 = 0; b2 < support.size(); ++b2)
        lambda(support[a], support[b2]) -= rank1_w * support_val[a] * support_val[b2];
  }

  Eigen::LLT<Eigen::MatrixXd> llt(lambda);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("fit_frequency_variational: bound precision not PD");

  FrequencyPosterior post;
  post.spec = spec;
  post.n_bases = B;
  post.offender_ids = design.offender_ids;
  post.defender_ids = design.defender_ids;
  post.defender_group = group_of;

  Eigen::VectorXd mean = Eigen::VectorXd::Zero(P);
  Eigen::VectorXd eta(K), psi(K);
  double prev_elbo = -std::numeric_limits<double>::infinity();
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    Eigen::VectorXd h = Eigen::VectorXd::Zero(P);
    double const_sum = 0.0;
    for (std::size_t n = 0; n < design.rows.size(); ++n) {
      for (int r = 0; r < K; ++r) {
        const Cell& c = cell_at(n, r);
        double v = 0.0;
        for (int a = 0; a < c.n; ++a) v += c.w[a] * mean(c.idx[a]);
        psi(r) = v;
      }
      const Eigen::VectorXd p = softmax0(psi);
      const double psum = psi.sum();
      // b_n = A psi - p;  target coefficient S_n + b_n
      eta = (0.5 * psi.array() - rank1_w * psum) - p.array();
      const int outcome = design.rows[n].outcome;
      const int cell = spec.spatial ? outcome - 1
                                    : (outcome > 0 ? (outcome - 1) / design.n_bases : -1);
      if (outcome > 0) eta(cell) += 1.0;
      for (int r = 0; r < K; ++r) {
        const Cell& c = cell_at(n, r);
        for (int a = 0; a < c.n; ++a) h(c.idx[a]) += eta(r) * c.w[a];
      }
      const double quad = 0.5 * (diag_w * psi.squaredNorm() - rank1_w * psum * psum);
      const_sum += lse0(psi) - p.dot(psi) + quad;
    }

    mean = llt.solve(h);
    const double elbo = 0.5 * h.dot(mean) - const_sum;
    post.elbo_trace.push_back(elbo);
    if (sweep > 0) {
      if (elbo < prev_elbo - 1e-6)
        throw std::runtime_error("fit_frequency_variational: bound decreased (" +
                                 std::to_string(prev_elbo) + " -> " + std::to_string(elbo) + ")");
      if (std::abs(elbo - prev_elbo) < rel_tol * (std::abs(prev_elbo) + 1.0)) break;
    }
    prev_elbo = elbo;
  }

  // marginal sds from the factored bound precision
  Eigen::MatrixXd cov = llt.solve(Eigen::MatrixXd::Identity(P, P));

  post.off_coef.resize(lay.n_off, B);
  post.off_sd.resize(lay.n_off, B);
  for (int k = 0; k < lay.n_off; ++k)
    for (int b = 0; b < B; ++b) {
      post.off_coef(k, b) = mean(lay.off(k, b));
      post.off_sd(k, b) = std::sqrt(std::max(cov(lay.off(k, b), lay.off(k, b)), 0.0));
    }
  if (lay.defense) {
    post.def_coef.resize(lay.n_def, B);
    post.def_sd.resize(lay.n_def, B);
    for (int j = 0; j < lay.n_def; ++j)
      for (int b = 0; b < B; ++b) {
        post.def_coef(j, b) = mean(lay.def(j, b));
        post.def_sd(j, b) = std::sqrt(std::max(cov(lay.def(j, b), lay.def(j, b)), 0.0));
      }
    post.def_group_mean.resize(lay.groups, B);
    for (int g = 0; g < lay.groups; ++g)
      for (int b = 0; b < B; ++b) post.def_group_mean(g, b) = mean(lay.def_mean(g, b));
  }
  post.off_mean.resize(B);
  for (int b = 0; b < B; ++b) post.off_mean(b) = mean(lay.off_mean(b));
  return post;
}

Eigen::VectorXd FrequencyPosterior::predict(const FrequencyDesign::Row& row) const {
  const int B = n_bases;
  Eigen::MatrixXd propensity(5, B), suppression = Eigen::MatrixXd::Zero(5, B);
  for (int k = 0; k < 5; ++k) {
    const int idx = row.offense[k];
    for (int b = 0; b < B; ++b)
      propensity(k, b) =
          (idx >= 0 && idx < off_coef.rows()) ? off_coef(idx, b) : off_mean(b);
  }
  if (spec.include_defense && def_coef.size() > 0) {
    for (int j = 0; j < 5; ++j) {
      const int idx = row.defense[j];
      for (int b = 0; b < B; ++b) {
        if (idx >= 0 && idx < def_coef.rows())
          suppression(j, b) = def_coef(idx, b);
        else
          suppression(j, b) = def_group_mean.col(b).mean();
      }
    }
  }
  return frequency_prob(propensity, suppression, row.guard_fractions);
}

}  // namespace hoopdef
