#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hoopdef/outcomes.hpp"
#include "hoopdef/rng.hpp"
#include "hoopdef/threading.hpp"

namespace hoopdef {

namespace {

int index_in(const std::vector<int>& universe, int id) {
  const auto it = std::lower_bound(universe.begin(), universe.end(), id);
  if (it == universe.end() || *it != id) return -1;
  return static_cast<int>(it - universe.begin());
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }
double log1pexp(double x) { return x > 30.0 ? x : std::log1p(std::exp(x)); }

/// Layout of the efficiency parameter vector.
struct EffLayout {
  int n_off = 0, n_def = 0, n_bases = 1, groups = 0;
  bool defense = true;
  int skill(int k, int b) const { return k * n_bases + b; }
  int contest(int j, int b) const { return n_off * n_bases + j * n_bases + b; }
  int log_slope(int b) const {
    return n_off * n_bases + (defense ? n_def * n_bases : 0) + b;
  }
  int skill_mean(int b) const {
    return n_off * n_bases + (defense ? (n_def + 1) * n_bases : 0) + b;
  }
  int contest_mean(int g, int b) const { return skill_mean(n_bases) + g * n_bases + b; }
  int total() const {
    return n_off * n_bases + (defense ? (n_def + 1) * n_bases : 0) + n_bases +
           (defense ? groups * n_bases : 0);
  }
};

struct EffModel {
  EffLayout lay;
  EfficiencyPriors priors;
  EfficiencyModelSpec spec;
  const EfficiencyDesign* design = nullptr;
  std::vector<int> group_of;            // per defender index
  std::vector<Eigen::MatrixXd> car_q;   // one precision per basis (shared), or empty
  std::vector<int> graph_row;           // design offender index -> graph row

  int collapse_basis(int b) const { return spec.spatial ? b : 0; }

  double log_post(const Eigen::VectorXd& x, Eigen::VectorXd* grad) const {
    const auto& lay_ = lay;
    const int B = lay_.n_bases;
    double lp = 0.0;
    if (grad) grad->setZero();

    std::vector<double> slope(B, 0.0);
    if (lay_.defense)
      for (int b = 0; b < B; ++b) slope[b] = std::exp(x(lay_.log_slope(b)));

    for (const auto& row : design->rows) {
      const int b = collapse_basis(row.basis);
      double l = x(lay_.skill(row.shooter, b));
      if (lay_.defense) l += x(lay_.contest(row.defender, b)) + slope[b] * row.distance_ft;
      const double y = row.made ? 1.0 : 0.0;
      lp += y * l - log1pexp(l);
      if (grad) {
        const double r = y - sigmoid(l);
        (*grad)(lay_.skill(row.shooter, b)) += r;
        if (lay_.defense) {
          (*grad)(lay_.contest(row.defender, b)) += r;
          (*grad)(lay_.log_slope(b)) += r * row.distance_ft * slope[b];
        }
      }
    }

    // offender skill prior: CAR around the per-basis mean, or independent
    for (int b = 0; b < B; ++b) {
      const double mu = x(lay_.skill_mean(b));
      if (!car_q.empty()) {
        Eigen::VectorXd centered(lay_.n_off);
        for (int k = 0; k < lay_.n_off; ++k) centered(k) = x(lay_.skill(k, b)) - mu;
        const Eigen::VectorXd qc = car_q[0] * centered;
        lp -= 0.5 * centered.dot(qc);
        if (grad) {
          for (int k = 0; k < lay_.n_off; ++k) (*grad)(lay_.skill(k, b)) -= qc(k);
          (*grad)(lay_.skill_mean(b)) += qc.sum();
        }
      } else {
        const double w = 1.0 / priors.indep_skill_var;
        for (int k = 0; k < lay_.n_off; ++k) {
          const double c = x(lay_.skill(k, b)) - mu;
          lp -= 0.5 * w * c * c;
          if (grad) {
            (*grad)(lay_.skill(k, b)) -= w * c;
            (*grad)(lay_.skill_mean(b)) += w * c;
          }
        }
      }
      lp -= 0.5 * mu * mu / priors.skill_group_var;
      if (grad) (*grad)(lay_.skill_mean(b)) -= mu / priors.skill_group_var;
    }

    if (lay_.defense) {
      const double wc = 1.0 / priors.contest_var;
      for (int j = 0; j < lay_.n_def; ++j)
        for (int b = 0; b < B; ++b) {
          const double mu = x(lay_.contest_mean(group_of[j], b));
          const double c = x(lay_.contest(j, b)) - mu;
          lp -= 0.5 * wc * c * c;
          if (grad) {
            (*grad)(lay_.contest(j, b)) -= wc * c;
            (*grad)(lay_.contest_mean(group_of[j], b)) += wc * c;
          }
        }
      for (int g = 0; g < lay_.groups; ++g)
        for (int b = 0; b < B; ++b) {
          const double mu = x(lay_.contest_mean(g, b));
          lp -= 0.5 * mu * mu / priors.contest_group_var;
          if (grad) (*grad)(lay_.contest_mean(g, b)) -= mu / priors.contest_group_var;
        }
      // half-normal slope, sampled on the log scale (Jacobian term +u)
      for (int b = 0; b < B; ++b) {
        const double u = x(lay_.log_slope(b));
        const double xi = slope[b];
        lp += -0.5 * xi * xi / priors.slope_var + u;
        if (grad) (*grad)(lay_.log_slope(b)) += -xi * xi / priors.slope_var + 1.0;
      }
    }
    return lp;
  }

  /// PSD curvature (Gauss-Newton likelihood block plus exact prior
  /// curvature, except the slope barrier which is kept PSD).
  Eigen::MatrixXd curvature(const Eigen::VectorXd& x) const {
    const int P = lay.total();
    const int B = lay.n_bases;
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(P, P);
    std::vector<double> slope(B, 0.0);
    if (lay.defense)
      for (int b = 0; b < B; ++b) slope[b] = std::exp(x(lay.log_slope(b)));

    for (const auto& row : design->rows) {
      const int b = collapse_basis(row.basis);
      double l = x(lay.skill(row.shooter, b));
      int idx[3];
      double wv[3];
      int nn = 0;
      idx[nn] = lay.skill(row.shooter, b);
      wv[nn++] = 1.0;
      if (lay.defense) {
        l += x(lay.contest(row.defender, b)) + slope[b] * row.distance_ft;
        idx[nn] = lay.contest(row.defender, b);
        wv[nn++] = 1.0;
        idx[nn] = lay.log_slope(b);
        wv[nn++] = row.distance_ft * slope[b];
      }
      const double s = sigmoid(l);
      const double w = std::max(s * (1.0 - s), 1e-6);
      for (int a = 0; a < nn; ++a)
        for (int c = 0; c < nn; ++c) h(idx[a], idx[c]) += w * wv[a] * wv[c];
    }

    for (int b = 0; b < B; ++b) {
      if (!car_q.empty()) {
        const Eigen::MatrixXd& q = car_q[0];
        for (int k = 0; k < lay.n_off; ++k) {
          for (int k2 = 0; k2 < lay.n_off; ++k2) h(lay.skill(k, b), lay.skill(k2, b)) += q(k, k2);
          const double rowsum = q.row(k).sum();
          h(lay.skill(k, b), lay.skill_mean(b)) -= rowsum;
          h(lay.skill_mean(b), lay.skill(k, b)) -= rowsum;
        }
        h(lay.skill_mean(b), lay.skill_mean(b)) += q.sum();
      } else {
        const double w = 1.0 / priors.indep_skill_var;
        for (int k = 0; k < lay.n_off; ++k) {
          h(lay.skill(k, b), lay.skill(k, b)) += w;
          h(lay.skill(k, b), lay.skill_mean(b)) -= w;
          h(lay.skill_mean(b), lay.skill(k, b)) -= w;
          h(lay.skill_mean(b), lay.skill_mean(b)) += w;
        }
      }
      h(lay.skill_mean(b), lay.skill_mean(b)) += 1.0 / priors.skill_group_var;
    }

    if (lay.defense) {
      const double wc = 1.0 / priors.contest_var;
      for (int j = 0; j < lay.n_def; ++j)
        for (int b = 0; b < B; ++b) {
          const int ic = lay.contest(j, b), im = lay.contest_mean(group_of[j], b);
          h(ic, ic) += wc;
          h(ic, im) -= wc;
          h(im, ic) -= wc;
          h(im, im) += wc;
        }
      for (int g = 0; g < lay.groups; ++g)
        for (int b = 0; b < B; ++b)
          h(lay.contest_mean(g, b), lay.contest_mean(g, b)) += 1.0 / priors.contest_group_var;
      for (int b = 0; b < B; ++b) {
        const double xi = slope[b];
        h(lay.log_slope(b), lay.log_slope(b)) += 2.0 * xi * xi / priors.slope_var + 1e-3;
      }
    }
    h.diagonal().array() += 1e-8;
    return h;
  }
};

EffModel make_model(const EfficiencyDesign& design, const OffenderGraph& graph,
                    const DefenderGroups& groups, const EfficiencyPriors& priors,
                    const EfficiencyModelSpec& spec) {
  EffModel m;
  m.priors = priors;
  m.spec = spec;
  m.design = &design;
  m.lay.n_off = static_cast<int>(design.offender_ids.size());
  m.lay.n_def = static_cast<int>(design.defender_ids.size());
  m.lay.n_bases = spec.spatial ? design.n_bases : 1;
  m.lay.defense = spec.include_defense;
  m.lay.groups = spec.include_defense ? std::max(spec.defender_groups, 1) : 0;

  m.group_of.assign(m.lay.n_def, 0);
  if (m.lay.defense && m.lay.groups > 1)
    for (int j = 0; j < m.lay.n_def; ++j) {
      const int g = groups.group_for(design.defender_ids[j]);
      m.group_of[j] = g >= 0 ? std::min(g, m.lay.groups - 1) : 0;
    }

  if (spec.car_prior) {
    // permute the graph precision into design order; every offender in
    // the design must be a graph node
    const int n = m.lay.n_off;
    m.graph_row.resize(n);
    for (int k = 0; k < n; ++k) {
      const int r = graph.index_of(design.offender_ids[k]);
      if (r < 0)
        throw std::invalid_argument("fit_efficiency: offender " +
                                    std::to_string(design.offender_ids[k]) +
                                    " missing from the similarity graph");
      m.graph_row[k] = r;
    }
    const Eigen::MatrixXd q_full = graph.precision();
    Eigen::MatrixXd q(n, n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) q(a, b) = q_full(m.graph_row[a], m.graph_row[b]);
    q = 0.5 * (q + q.transpose());
    m.car_q.push_back(std::move(q));
  }
  return m;
}

Eigen::VectorXd newton_map(const EffModel& model, int max_iters = 100, double tol = 1e-8) {
  const int P = model.lay.total();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(P);
  Eigen::VectorXd grad(P);
  double lp = model.log_post(x, &grad);
  for (int it = 0; it < max_iters; ++it) {
    if (grad.norm() < tol * P) break;
    const Eigen::MatrixXd h = model.curvature(x);
    Eigen::LLT<Eigen::MatrixXd> llt(h);
    if (llt.info() != Eigen::Success)
      throw std::runtime_error("fit_efficiency_map: curvature factorization failed");
    const Eigen::VectorXd dir = llt.solve(grad);
    double step = 1.0;
    bool ok = false;
    for (int ls = 0; ls < 40; ++ls) {
      Eigen::VectorXd cand = x + step * dir;
      Eigen::VectorXd cand_grad(P);
      const double cand_lp = model.log_post(cand, &cand_grad);
      if (cand_lp > lp) {
        x = cand;
        lp = cand_lp;
        grad = cand_grad;
        ok = true;
        break;
      }
      step *= 0.5;
    }
    if (!ok) break;
  }
  return x;
}

void fill_posterior_point(EfficiencyPosterior& post, const EffModel& model,
                          const Eigen::VectorXd& x, const Eigen::MatrixXd* cov) {
  const auto& lay = model.lay;
  const int B = lay.n_bases;
  post.n_bases = B;
  post.skill.resize(lay.n_off, B);
  post.skill_sd = Eigen::MatrixXd::Zero(lay.n_off, B);
  post.skill_mean.resize(B);
  auto sd_at = [&](int i) { return cov ? std::sqrt(std::max((*cov)(i, i), 0.0)) : 0.0; };
  for (int k = 0; k < lay.n_off; ++k)
    for (int b = 0; b < B; ++b) {
      post.skill(k, b) = x(lay.skill(k, b));
      post.skill_sd(k, b) = sd_at(lay.skill(k, b));
    }
  for (int b = 0; b < B; ++b) post.skill_mean(b) = x(lay.skill_mean(b));
  if (lay.defense) {
    post.contest.resize(lay.n_def, B);
    post.contest_sd = Eigen::MatrixXd::Zero(lay.n_def, B);
    for (int j = 0; j < lay.n_def; ++j)
      for (int b = 0; b < B; ++b) {
        post.contest(j, b) = x(lay.contest(j, b));
        post.contest_sd(j, b) = sd_at(lay.contest(j, b));
      }
    post.slope.resize(B);
    post.slope_sd = Eigen::VectorXd::Zero(B);
    for (int b = 0; b < B; ++b) {
      post.slope(b) = std::exp(x(lay.log_slope(b)));
      post.slope_sd(b) = post.slope(b) * sd_at(lay.log_slope(b));  // delta method
    }
    post.contest_group_mean.resize(lay.groups, B);
    for (int g = 0; g < lay.groups; ++g)
      for (int b = 0; b < B; ++b) post.contest_group_mean(g, b) = x(lay.contest_mean(g, b));
  } else {
    post.contest = Eigen::MatrixXd();
    post.slope = Eigen::VectorXd::Zero(B);
    post.slope_sd = Eigen::VectorXd::Zero(B);
    post.contest_group_mean = Eigen::MatrixXd();
  }
}

/// Split-Rhat over chains x kept-draws for one parameter column.
double split_rhat(const Eigen::MatrixXd& draws_by_chain) {
  const int m2 = static_cast<int>(draws_by_chain.cols()) * 2;
  const int half = static_cast<int>(draws_by_chain.rows()) / 2;
  if (half < 2) return 1.0;
  Eigen::VectorXd means(m2), vars(m2);
  for (int c = 0; c < draws_by_chain.cols(); ++c) {
    for (int s = 0; s < 2; ++s) {
      const auto seg = draws_by_chain.col(c).segment(s * half, half);
      const double mu = seg.mean();
      means(2 * c + s) = mu;
      vars(2 * c + s) = (seg.array() - mu).square().sum() / (half - 1);
    }
  }
  const double w = vars.mean();
  const double grand = means.mean();
  const double b = half * (means.array() - grand).square().sum() / (m2 - 1);
  if (w <= 1e-300) return 1.0;
  const double var_plus = (half - 1.0) / half * w + b / half;
  return std::sqrt(var_plus / w);
}

}  // namespace

EfficiencyDesign build_efficiency_design(std::span<const Possession> corpus,
                                         std::span<const MatchupSummary> summaries,
                                         const ShotBasis& basis, const CourtGeometry& geom,
                                         double distance_cap_ft,
                                         std::vector<std::string>* warnings) {
  if (corpus.size() != summaries.size())
    throw std::invalid_argument("build_efficiency_design: corpus/summary size mismatch");
  const std::vector<int> region = basis.tile_assignment(geom.tile_count());

  EfficiencyDesign d;
  d.n_bases = basis.rank;
  d.distance_cap_ft = distance_cap_ft;
  {
    std::vector<int> off, def;
    for (const auto& p : corpus) {
      off.insert(off.end(), p.offense_ids.begin(), p.offense_ids.end());
      def.insert(def.end(), p.defense_ids.begin(), p.defense_ids.end());
    }
    std::sort(off.begin(), off.end());
    off.erase(std::unique(off.begin(), off.end()), off.end());
    std::sort(def.begin(), def.end());
    def.erase(std::unique(def.begin(), def.end()), def.end());
    d.offender_ids = std::move(off);
    d.defender_ids = std::move(def);
  }

  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& p = corpus[i];
    if (!p.shot) continue;
    const auto& s = *p.shot;
    if (s.frame_index < 0 || s.frame_index >= static_cast<int>(p.frames.size()) ||
        !summaries[i].has_shot) {
      if (warnings)
        warnings->push_back("possession " + p.id + ": no release frame, shot dropped");
      continue;
    }
    const auto& f = p.frames[s.frame_index];
    Eigen::Index guard = 0;
    summaries[i].release_guard_weights.maxCoeff(&guard);

    EfficiencyDesign::Row row;
    row.shooter = index_in(d.offender_ids, p.offense_ids[s.shooter]);
    row.defender = index_in(d.defender_ids, p.defense_ids[guard]);
    row.basis = region[geom.tile_index(s.location)];
    row.distance_ft = std::min(distance(f.defense[guard], s.location), distance_cap_ft);
    row.made = s.made;
    row.possession = static_cast<int>(i);
    row.location = s.location;
    d.rows.push_back(row);
  }
  return d;
}

EfficiencyPosterior fit_efficiency_map(const EfficiencyDesign& design, const OffenderGraph& graph,
                                       const DefenderGroups& groups,
                                       const EfficiencyPriors& priors,
                                       const EfficiencyModelSpec& spec) {
  const EffModel model = make_model(design, graph, groups, priors, spec);
  const Eigen::VectorXd x = newton_map(model);
  const Eigen::MatrixXd h = model.curvature(x);
  const Eigen::MatrixXd cov = Eigen::LLT<Eigen::MatrixXd>(h).solve(
      Eigen::MatrixXd::Identity(h.rows(), h.cols()));

  EfficiencyPosterior post;
  post.spec = spec;
  post.offender_ids = design.offender_ids;
  post.defender_ids = design.defender_ids;
  post.defender_group = model.group_of;
  fill_posterior_point(post, model, x, &cov);
  post.rhat = Eigen::VectorXd::Ones(model.lay.total());
  return post;
}

EfficiencyPosterior fit_efficiency_mcmc(const EfficiencyDesign& design, const OffenderGraph& graph,
                                        const DefenderGroups& groups,
                                        const EfficiencyPriors& priors, const McmcOptions& opts,
                                        const EfficiencyModelSpec& spec) {
  const EffModel model = make_model(design, graph, groups, priors, spec);
  const int P = model.lay.total();

  const Eigen::VectorXd map = newton_map(model);
  const Eigen::VectorXd inv_mass = model.curvature(map).diagonal().cwiseMax(1e-8).cwiseInverse();
  const Eigen::VectorXd mass_sqrt = inv_mass.cwiseInverse().cwiseSqrt();

  const int warmup = opts.samples / 2;
  const int kept = opts.samples - warmup;
  Eigen::MatrixXd draws(static_cast<Eigen::Index>(kept) * opts.chains, P);
  std::vector<int> chain_divergences(opts.chains, 0);
  std::vector<double> chain_step(opts.chains, 0.0);

  parallel_for(opts.chains, std::max(opts.threads, 1), [&](int chain) {
    Rng rng = Rng::split(opts.seed, 0xeff0 + static_cast<std::uint64_t>(chain));
    Eigen::VectorXd x = map;
    for (int i = 0; i < P; ++i) x(i) += 0.05 * std::sqrt(inv_mass(i)) * rng.normal();
    Eigen::VectorXd grad(P);
    double lp = model.log_post(x, &grad);

    // dual averaging toward the target acceptance rate
    double step = 0.1;
    const double mu = std::log(10.0 * step);
    double log_avg_step = std::log(step), h_bar = 0.0;
    const double gamma = 0.05, t0 = 10.0, kappa = 0.75;

    Eigen::VectorXd p(P), xc(P), gc(P);
    for (int iter = 0; iter < opts.samples; ++iter) {
      for (int i = 0; i < P; ++i) p(i) = mass_sqrt(i) * rng.normal();
      const double h0 = -lp + 0.5 * p.dot(inv_mass.cwiseProduct(p).eval());

      xc = x;
      gc = grad;
      double lpc = lp;
      const int max_l = std::max(1, std::min(opts.max_leapfrog,
                                             static_cast<int>(std::lround(1.2 / step))));
      const int L = 1 + rng.uniform_int(max_l);
      bool divergent = false;
      for (int l = 0; l < L; ++l) {
        p += 0.5 * step * gc;
        xc += step * inv_mass.cwiseProduct(p);
        lpc = model.log_post(xc, &gc);
        p += 0.5 * step * gc;
        if (!std::isfinite(lpc)) {
          divergent = true;
          break;
        }
      }
      const double h1 = divergent ? h0 + 1e6
                                  : -lpc + 0.5 * p.dot(inv_mass.cwiseProduct(p).eval());
      const double accept_lp = h0 - h1;
      if (!divergent && accept_lp < -100.0) divergent = true;
      const double accept_prob = std::min(1.0, std::exp(std::min(accept_lp, 0.0)));
      if (!divergent && std::log(rng.uniform_pos()) < accept_lp) {
        x = xc;
        grad = gc;
        lp = lpc;
      }

      if (iter < warmup) {
        const double eta = 1.0 / (iter + 1 + t0);
        h_bar = (1.0 - eta) * h_bar + eta * (opts.target_accept - accept_prob);
        const double log_step = mu - std::sqrt(iter + 1.0) / gamma * h_bar;
        const double w = std::pow(iter + 1.0, -kappa);
        log_avg_step = w * log_step + (1.0 - w) * log_avg_step;
        step = std::exp(log_step);
        if (iter + 1 == warmup) step = std::exp(log_avg_step);
      } else {
        if (divergent) ++chain_divergences[chain];
        draws.row(static_cast<Eigen::Index>(chain) * kept + (iter - warmup)) = x.transpose();
      }
    }
    chain_step[chain] = step;
  });

  int total_div = 0;
  for (int d : chain_divergences) total_div += d;
  const double div_frac = static_cast<double>(total_div) / (kept * opts.chains);
  if (div_frac > opts.max_divergence_frac)
    throw std::runtime_error("fit_efficiency_mcmc: divergence rate " + std::to_string(div_frac) +
                             " exceeds threshold (adapted step sizes around " +
                             std::to_string(chain_step[0]) + "; reduce target_accept step)");

  EfficiencyPosterior post;
  post.spec = spec;
  post.offender_ids = design.offender_ids;
  post.defender_ids = design.defender_ids;
  post.defender_group = model.group_of;
  post.divergences = total_div;
  post.step_size = chain_step[0];
  post.draws = draws;

  // per-parameter split-Rhat across chains
  post.rhat.resize(P);
  Eigen::MatrixXd by_chain(kept, opts.chains);
  for (int i = 0; i < P; ++i) {
    for (int c = 0; c < opts.chains; ++c)
      by_chain.col(c) = draws.col(i).segment(static_cast<Eigen::Index>(c) * kept, kept);
    post.rhat(i) = split_rhat(by_chain);
  }
  post.max_rhat = post.rhat.maxCoeff();
  post.rhat_ok = post.max_rhat < 1.05;

  // posterior means and sds; the slope is reported on its natural scale
  Eigen::VectorXd mean = draws.colwise().mean();
  Eigen::VectorXd sd(P);
  for (int i = 0; i < P; ++i)
    sd(i) = std::sqrt((draws.col(i).array() - mean(i)).square().sum() / (draws.rows() - 1));
  fill_posterior_point(post, model, mean, nullptr);
  const auto& lay = model.lay;
  const int B = lay.n_bases;
  for (int k = 0; k < lay.n_off; ++k)
    for (int b = 0; b < B; ++b) post.skill_sd(k, b) = sd(lay.skill(k, b));
  if (lay.defense) {
    for (int j = 0; j < lay.n_def; ++j)
      for (int b = 0; b < B; ++b) post.contest_sd(j, b) = sd(lay.contest(j, b));
    for (int b = 0; b < B; ++b) {
      const auto xi = draws.col(lay.log_slope(b)).array().exp();
      post.slope(b) = xi.mean();
      post.slope_sd(b) = std::sqrt((xi - xi.mean()).square().sum() / (xi.size() - 1));
    }
  }
  return post;
}

double EfficiencyPosterior::predict_make_prob(int shooter_idx, int defender_idx, int basis,
                                              double distance) const {
  const int b = spec.spatial ? basis : 0;
  double l = (shooter_idx >= 0 && shooter_idx < skill.rows()) ? skill(shooter_idx, b)
                                                              : skill_mean(b);
  if (spec.include_defense && contest.size() > 0) {
    if (defender_idx >= 0 && defender_idx < contest.rows())
      l += contest(defender_idx, b);
    else
      l += contest_group_mean.col(b).mean();
    l += slope(b) * distance;
  }
  return 1.0 / (1.0 + std::exp(-l));
}

}  // namespace hoopdef
