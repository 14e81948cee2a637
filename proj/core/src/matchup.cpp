#include "hoopdef/matchup.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "hoopdef/threading.hpp"

namespace hoopdef {

namespace {

constexpr int kPlayers = 5;

// log emission densities for one defender-frame: loge[k] =
// log N(defender | mu_k, var * I2)
void log_emissions(const TrackingFrame& f, int defender, const MatchupModel& m,
                   const CourtGeometry& geom, std::array<double, kPlayers>& loge) {
  const double inv2v = 1.0 / (2.0 * m.emission_var);
  const double norm = -std::log(2.0 * M_PI * m.emission_var);
  const Point d = f.defense[defender];
  for (int k = 0; k < kPlayers; ++k) {
    const Point mu = emission_mean(f, k, m, geom);
    const Point r = d - mu;
    loge[k] = norm - (r.x * r.x + r.y * r.y) * inv2v;
  }
}

}  // namespace

Point emission_mean(const TrackingFrame& frame, int offender, const MatchupModel& model,
                    const CourtGeometry& geom) {
  return model.w_offender * frame.offense[offender] + model.w_ball * frame.ball +
         model.w_hoop * geom.hoop;
}

MatchupPosterior forward_backward(const Possession& possession, const MatchupModel& model,
                                  const CourtGeometry& geom) {
  const int T = static_cast<int>(possession.frames.size());
  if (T == 0) throw std::invalid_argument("forward_backward: possession has no frames");
  if (!(model.stay_prob > 0.0 && model.stay_prob < 1.0))
    throw std::invalid_argument("forward_backward: stay_prob must lie in (0,1)");
  if (!(model.emission_var > 0.0))
    throw std::invalid_argument("forward_backward: emission_var must be positive");

  const double stay = model.stay_prob;
  const double move = (1.0 - stay) / (kPlayers - 1);

  MatchupPosterior post;
  post.log_likelihood = 0.0;
  post.guard_fractions.setZero();

  std::array<double, kPlayers> loge;
  Eigen::MatrixXd emis(T, kPlayers);   // scaled emission likelihoods
  Eigen::MatrixXd alpha(T, kPlayers);  // normalized forward
  Eigen::MatrixXd beta(T, kPlayers);   // scaled backward
  Eigen::VectorXd scale(T);

  for (int j = 0; j < kPlayers; ++j) {
    double loglik = 0.0;
    for (int t = 0; t < T; ++t) {
      log_emissions(possession.frames[t], j, model, geom, loge);
      double mx = loge[0];
      for (int k = 1; k < kPlayers; ++k) mx = std::max(mx, loge[k]);
      for (int k = 0; k < kPlayers; ++k) emis(t, k) = std::exp(loge[k] - mx);
      loglik += mx;
    }

    // forward, with per-frame normalization
    for (int k = 0; k < kPlayers; ++k) alpha(0, k) = emis(0, k) / kPlayers;
    scale(0) = alpha.row(0).sum();
    alpha.row(0) /= scale(0);
    for (int t = 1; t < T; ++t) {
      const double total = alpha.row(t - 1).sum();  // == 1
      for (int k = 0; k < kPlayers; ++k) {
        const double pred = move * total + (stay - move) * alpha(t - 1, k);
        alpha(t, k) = pred * emis(t, k);
      }
      scale(t) = alpha.row(t).sum();
      alpha.row(t) /= scale(t);
    }
    for (int t = 0; t < T; ++t) loglik += std::log(scale(t));

    // backward, sharing the forward scale factors
    beta.row(T - 1).setOnes();
    for (int t = T - 2; t >= 0; --t) {
      double total = 0.0;
      std::array<double, kPlayers> eb;
      for (int k = 0; k < kPlayers; ++k) {
        eb[k] = emis(t + 1, k) * beta(t + 1, k);
        total += eb[k];
      }
      for (int k = 0; k < kPlayers; ++k)
        beta(t, k) = (move * total + (stay - move) * eb[k]) / scale(t + 1);
    }

    post.marginals[j] = alpha.cwiseProduct(beta);
    for (int t = 0; t < T; ++t) {
      const double s = post.marginals[j].row(t).sum();
      post.marginals[j].row(t) /= s;
    }

    post.pairwise[j].resize(std::max(T - 1, 0));
    for (int t = 1; t < T; ++t) {
      Eigen::Matrix<double, kPlayers, kPlayers> xi;
      for (int k = 0; k < kPlayers; ++k) {
        for (int k2 = 0; k2 < kPlayers; ++k2) {
          const double a = (k == k2) ? stay : move;
          xi(k, k2) = alpha(t - 1, k) * a * emis(t, k2) * beta(t, k2) / scale(t);
        }
      }
      xi /= xi.sum();
      post.pairwise[j][t - 1] = xi;
    }

    post.guard_fractions.row(j) = post.marginals[j].colwise().mean();
    post.log_likelihood += loglik;
  }
  return post;
}

ConstrainedGlsFit constrained_gls(const Eigen::Matrix<double, Eigen::Dynamic, 3>& design,
                                  const Eigen::VectorXd& response,
                                  const Eigen::VectorXd& weights) {
  if (design.rows() != response.size() || design.rows() != weights.size())
    throw std::invalid_argument("constrained_gls: size mismatch");
  Eigen::Matrix3d xtx = Eigen::Matrix3d::Zero();
  Eigen::Vector3d xty = Eigen::Vector3d::Zero();
  double yty = 0.0, mass = 0.0;
  for (Eigen::Index i = 0; i < design.rows(); ++i) {
    const double w = weights(i);
    if (w < 0.0) throw std::invalid_argument("constrained_gls: negative weight");
    if (w == 0.0) continue;
    const Eigen::Vector3d x = design.row(i).transpose();
    xtx.noalias() += w * x * x.transpose();
    xty.noalias() += w * response(i) * x;
    yty += w * response(i) * response(i);
    mass += w;
  }
  if (!(mass > 0.0)) throw std::invalid_argument("constrained_gls: zero total weight");

  Eigen::LDLT<Eigen::Matrix3d> ldlt(xtx);
  const double scale = xtx.diagonal().maxCoeff();
  if (ldlt.info() != Eigen::Success || ldlt.vectorD().minCoeff() <= 1e-10 * scale) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(xtx);
    Eigen::Vector3d null_dir = es.eigenvectors().col(0).cwiseAbs();
    int c0, c1;
    null_dir.maxCoeff(&c0);
    null_dir(c0) = -1.0;
    null_dir.maxCoeff(&c1);
    static const char* names[3] = {"offender", "ball", "hoop"};
    throw std::runtime_error(std::string("constrained_gls: rank-deficient design; columns '") +
                             names[c0] + "' and '" + names[c1] + "' are nearly collinear");
  }

  const Eigen::Vector3d gls = ldlt.solve(xty);
  const Eigen::Vector3d u = ldlt.solve(Eigen::Vector3d::Ones());
  const double shortfall = 1.0 - gls.sum();
  Eigen::Vector3d coef = gls + u * (shortfall / u.sum());

  double ssr = yty - 2.0 * coef.dot(xty) + coef.dot(xtx * coef);
  if (ssr < 0.0) ssr = 0.0;  // numerical underflow at an exact fit
  return {coef, ssr / mass};
}

EmissionStep m_step_emission(std::span<const Possession> corpus,
                             std::span<const MatchupPosterior> posteriors,
                             const CourtGeometry& geom) {
  if (corpus.size() != posteriors.size())
    throw std::invalid_argument("m_step_emission: corpus/posterior size mismatch");
  Eigen::Matrix3d xtx = Eigen::Matrix3d::Zero();
  Eigen::Vector3d xty = Eigen::Vector3d::Zero();
  double yty = 0.0, mass = 0.0;
  for (std::size_t n = 0; n < corpus.size(); ++n) {
    const auto& frames = corpus[n].frames;
    for (std::size_t t = 0; t < frames.size(); ++t) {
      const auto& f = frames[t];
      for (int j = 0; j < kPlayers; ++j) {
        const Point d = f.defense[j];
        for (int k = 0; k < kPlayers; ++k) {
          const double w = posteriors[n].marginals[j](static_cast<Eigen::Index>(t), k);
          if (w <= 0.0) continue;
          const Eigen::Vector3d xx(f.offense[k].x, f.ball.x, geom.hoop.x);
          const Eigen::Vector3d xy(f.offense[k].y, f.ball.y, geom.hoop.y);
          xtx.noalias() += w * (xx * xx.transpose() + xy * xy.transpose());
          xty.noalias() += w * (d.x * xx + d.y * xy);
          yty += w * (d.x * d.x + d.y * d.y);
          mass += 2.0 * w;
        }
      }
    }
  }
  if (!(mass > 0.0)) throw std::invalid_argument("m_step_emission: no posterior mass");

  Eigen::LDLT<Eigen::Matrix3d> ldlt(xtx);
  const double scale = xtx.diagonal().maxCoeff();
  if (ldlt.info() != Eigen::Success || ldlt.vectorD().minCoeff() <= 1e-10 * scale)
    throw std::runtime_error("m_step_emission: rank-deficient design (collinear covariates)");
  const Eigen::Vector3d gls = ldlt.solve(xty);
  const Eigen::Vector3d u = ldlt.solve(Eigen::Vector3d::Ones());
  const Eigen::Vector3d coef = gls + u * ((1.0 - gls.sum()) / u.sum());

  double ssr = yty - 2.0 * coef.dot(xty) + coef.dot(xtx * coef);
  if (ssr < 0.0) ssr = 0.0;
  double var = ssr / mass;
  if (var < 1e-12) var = 1e-12;
  return {coef(0), coef(1), coef(2), var};
}

double m_step_stay_prob(double stay_mass, double switch_mass, double max_stay_prob,
                        bool* clamped) {
  if (clamped) *clamped = false;
  if (!(stay_mass > 0.0)) throw std::invalid_argument("m_step_stay_prob: no stay mass");
  if (!(switch_mass > 0.0)) {
    if (clamped) *clamped = true;
    return max_stay_prob;
  }
  // exact argmax of the expected transition log-likelihood: the odds of
  // staying are the ratio of diagonal to off-diagonal expectation mass
  const double odds = stay_mass / switch_mass;
  double p = odds / (1.0 + odds);
  if (p > max_stay_prob) {
    if (clamped) *clamped = true;
    p = max_stay_prob;
  }
  return p;
}

namespace {

MatchupModel default_init(std::span<const Possession> corpus) {
  // neutral weights; emission variance from defender-to-nearest-offender
  // distances; sticky transitions
  double sum = 0.0, sumsq = 0.0;
  long n = 0;
  for (const auto& p : corpus) {
    for (const auto& f : p.frames) {
      for (int j = 0; j < kPlayers; ++j) {
        double best = std::numeric_limits<double>::infinity();
        for (int k = 0; k < kPlayers; ++k) best = std::min(best, distance(f.defense[j], f.offense[k]));
        sum += best;
        sumsq += best * best;
        ++n;
      }
    }
  }
  MatchupModel m;
  m.w_offender = m.w_ball = m.w_hoop = 1.0 / 3;
  m.stay_prob = 0.9;
  if (n > 1) {
    const double mean = sum / n;
    const double var = std::max(sumsq / n - mean * mean, 0.25);
    m.emission_var = var;
  }
  return m;
}

}  // namespace

EmFit fit_em(std::span<const Possession> corpus, const EmOptions& opts,
             const CourtGeometry& geom) {
  if (corpus.empty()) throw std::invalid_argument("fit_em: empty corpus");
  for (const auto& p : corpus)
    if (p.frames.empty()) throw std::invalid_argument("fit_em: possession " + p.id + " has no frames");

  EmFit fit;
  fit.model = opts.use_init ? opts.init : default_init(corpus);

  const int n = static_cast<int>(corpus.size());
  std::vector<MatchupPosterior> posteriors(n);
  double prev_ll = -std::numeric_limits<double>::infinity();

  for (int iter = 0; iter < opts.max_iters; ++iter) {
    const MatchupModel cur = fit.model;
    parallel_for(n, opts.threads,
                 [&](int i) { posteriors[i] = forward_backward(corpus[i], cur, geom); });

    double ll = 0.0, stay_mass = 0.0, switch_mass = 0.0;
    for (int i = 0; i < n; ++i) {  // ordered reduction
      ll += posteriors[i].log_likelihood;
      for (int j = 0; j < kPlayers; ++j) {
        for (const auto& xi : posteriors[i].pairwise[j]) {
          const double diag = xi.trace();
          stay_mass += diag;
          switch_mass += xi.sum() - diag;
        }
      }
    }
    fit.log_likelihood.push_back(ll);
    fit.iterations = iter + 1;

    const EmissionStep em = m_step_emission(corpus, posteriors, geom);
    fit.model.w_offender = em.w_offender;
    fit.model.w_ball = em.w_ball;
    fit.model.w_hoop = em.w_hoop;
    fit.model.emission_var = em.emission_var;
    fit.model.stay_prob =
        m_step_stay_prob(stay_mass, std::max(switch_mass, 0.0), opts.max_stay_prob);

    if (iter > 0) {
      const double rel = std::abs(ll - prev_ll) / (std::abs(prev_ll) + 1e-12);
      if (rel < opts.rel_tol) {
        fit.converged = true;
        break;
      }
    }
    prev_ll = ll;
  }
  return fit;
}

std::vector<MatchupSummary> compute_matchup_summaries(std::span<const Possession> corpus,
                                                      const MatchupModel& model,
                                                      const CourtGeometry& geom, int threads) {
  std::vector<MatchupSummary> out(corpus.size());
  parallel_for(static_cast<int>(corpus.size()), threads, [&](int i) {
    const auto& p = corpus[i];
    MatchupPosterior post = forward_backward(p, model, geom);
    MatchupSummary s;
    s.possession_id = p.id;
    s.guard_fractions = post.guard_fractions;
    if (p.shot && p.shot->frame_index >= 0 &&
        p.shot->frame_index < static_cast<int>(p.frames.size())) {
      s.has_shot = true;
      const int t = p.shot->frame_index;
      for (int j = 0; j < kPlayers; ++j)
        s.release_guard_weights(j) = post.marginals[j](t, p.shot->shooter);
    } else {
      s.release_guard_weights.setZero();
    }
    out[i] = s;
  });
  return out;
}

}  // namespace hoopdef
