#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hoopdef/tracking.hpp"

namespace hoopdef {

/// Defender placement model: a guarding defender's canonical location is
/// a convex combination of the guarded offender, the ball, and the hoop,
/// observed with isotropic Gaussian noise; matchups evolve as a Markov
/// chain that keeps the current assignment with probability stay_prob
/// and otherwise switches uniformly to one of the other four offenders.
struct MatchupModel {
  double w_offender = 1.0 / 3;
  double w_ball = 1.0 / 3;
  double w_hoop = 1.0 / 3;
  double emission_var = 25.0;  // ft^2, shared by both coordinates
  double stay_prob = 0.9;

  Eigen::Vector3d weights() const { return {w_offender, w_ball, w_hoop}; }
};

/// Smoothing output for one possession. marginals[j](t, k) is the
/// posterior probability that defender j guards offender k at frame t;
/// pairwise[j][t-1](k, k') covers (state at t-1 = k, state at t = k').
struct MatchupPosterior {
  std::array<Eigen::MatrixXd, 5> marginals;
  std::array<std::vector<Eigen::Matrix<double, 5, 5>>, 5> pairwise;
  Eigen::Matrix<double, 5, 5> guard_fractions;  // Z_n: row j, column k, rows sum to 1
  double log_likelihood = 0.0;                  // summed over the five defenders
};

Point emission_mean(const TrackingFrame& frame, int offender, const MatchupModel& model,
                    const CourtGeometry& geom = {});

MatchupPosterior forward_backward(const Possession& possession, const MatchupModel& model,
                                  const CourtGeometry& geom = {});

/// Closed-form solution of min_c sum_i w_i (y_i - x_i'c)^2 subject to
/// sum(c) = 1, plus the weighted mean squared residual of the fit.
struct ConstrainedGlsFit {
  Eigen::Vector3d coef;
  double mean_sq_residual = 0.0;  // weighted SSR / total weight
};

ConstrainedGlsFit constrained_gls(const Eigen::Matrix<double, Eigen::Dynamic, 3>& design,
                                  const Eigen::VectorXd& response, const Eigen::VectorXd& weights);

/// Emission M-step over a corpus: stacks both coordinates of every
/// (frame, defender, offender) triple weighted by the smoothing
/// marginals and solves the constrained system. The variance estimate
/// divides by the effective observation count (marginals sum to one per
/// defender-frame), which keeps EM ascent exact.
struct EmissionStep {
  double w_offender, w_ball, w_hoop;
  double emission_var;
};

EmissionStep m_step_emission(std::span<const Possession> corpus,
                             std::span<const MatchupPosterior> posteriors,
                             const CourtGeometry& geom = {});

/// Transition M-step from pairwise expectation mass on/off the diagonal.
double m_step_stay_prob(double stay_mass, double switch_mass, double max_stay_prob = 0.9999,
                        bool* clamped = nullptr);

struct EmOptions {
  double rel_tol = 1e-6;
  int max_iters = 100;
  int threads = 1;
  double max_stay_prob = 0.9999;
  bool use_init = false;  // otherwise data-driven defaults
  MatchupModel init;
};

struct EmFit {
  MatchupModel model;
  std::vector<double> log_likelihood;  // observed-data trace, one entry per iteration
  int iterations = 0;
  bool converged = false;
};

EmFit fit_em(std::span<const Possession> corpus, const EmOptions& opts = {},
             const CourtGeometry& geom = {});

/// Per-possession summary carried downstream: guard fractions plus the
/// defender weights over the shooter at the release frame.
struct MatchupSummary {
  std::string possession_id;
  Eigen::Matrix<double, 5, 5> guard_fractions;
  bool has_shot = false;
  Eigen::Matrix<double, 5, 1> release_guard_weights;  // P(defender j guards the shooter)
};

std::vector<MatchupSummary> compute_matchup_summaries(std::span<const Possession> corpus,
                                                      const MatchupModel& model,
                                                      const CourtGeometry& geom = {},
                                                      int threads = 1);

}  // namespace hoopdef
