#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hoopdef/matchup.hpp"
#include "hoopdef/nmf.hpp"
#include "hoopdef/similarity.hpp"

namespace hoopdef {

// ---------------------------------------------------------------------------
// designs

/// One multinomial observation per possession: outcome 0 means no shot,
/// outcome 1 + slot*B + basis identifies the shooter slot and region.
struct FrequencyDesign {
  int n_bases = 5;
  std::vector<int> offender_ids;  // universe, sorted
  std::vector<int> defender_ids;
  struct Row {
    std::array<int, 5> offense;  // indices into offender_ids
    std::array<int, 5> defense;  // indices into defender_ids
    Eigen::Matrix<double, 5, 5> guard_fractions;  // row j, column k
    int outcome = 0;
  };
  std::vector<Row> rows;

  int n_outcomes() const { return 1 + 5 * n_bases; }
};

/// One Bernoulli observation per shot; the contest distance is capped
/// where its effect on the log-odds flattens.
struct EfficiencyDesign {
  int n_bases = 5;
  double distance_cap_ft = 6.0;
  std::vector<int> offender_ids;
  std::vector<int> defender_ids;
  struct Row {
    int shooter = 0;   // index into offender_ids
    int defender = 0;  // index into defender_ids
    int basis = 0;
    double distance_ft = 0.0;  // capped
    bool made = false;
    int possession = -1;  // row index in the frequency design, for fold splits
    Point location;       // release location, kept for charting
  };
  std::vector<Row> rows;
};

FrequencyDesign build_frequency_design(std::span<const Possession> corpus,
                                       std::span<const MatchupSummary> summaries,
                                       const ShotBasis& basis, const CourtGeometry& geom = {});

EfficiencyDesign build_efficiency_design(std::span<const Possession> corpus,
                                         std::span<const MatchupSummary> summaries,
                                         const ShotBasis& basis, const CourtGeometry& geom = {},
                                         double distance_cap_ft = 6.0,
                                         std::vector<std::string>* warnings = nullptr);

// ---------------------------------------------------------------------------
// frequency model (multinomial logit, local variational bound)

/// Outcome probabilities over 1 + 5*B cells; propensity and suppression
/// are 5 x B court-slot matrices and guards is the 5 x 5 fraction matrix.
Eigen::VectorXd frequency_prob(const Eigen::MatrixXd& propensity,
                               const Eigen::MatrixXd& suppression,
                               const Eigen::Matrix<double, 5, 5>& guards);

/// Fixed curvature bound on the log-sum-exp Hessian over K shot cells:
/// (I - 11'/(K+1)) / 2. Dominates the Hessian everywhere.
Eigen::MatrixXd bohning_bound_matrix(int k);

struct FrequencyPriors {
  double off_var = 1.0;         // individual offender effects
  double def_var = 0.01;        // individual defender effects (< off_var)
  double off_group_var = 1.0;   // hyperprior on per-basis offense means
  double def_group_var = 0.01;  // hyperprior on per-group defense means
};

/// Which structure a fit uses; the full model keeps defender terms,
/// three defender groups, and per-basis spatial resolution.
struct FrequencyModelSpec {
  bool include_defense = true;
  int defender_groups = 3;  // 1 collapses the shrinkage point
  bool spatial = true;      // false folds all bases into one outcome per shooter
};

struct FrequencyPosterior {
  FrequencyModelSpec spec;
  int n_bases = 1;
  std::vector<int> offender_ids, defender_ids;
  std::vector<int> defender_group;      // per defender index
  Eigen::MatrixXd off_coef, off_sd;     // offenders x bases
  Eigen::MatrixXd def_coef, def_sd;     // defenders x bases (empty without defense)
  Eigen::VectorXd off_mean;             // per basis
  Eigen::MatrixXd def_group_mean;       // groups x bases
  std::vector<double> elbo_trace;

  /// Plug-in predictive distribution for one design row; unseen players
  /// fall back to the hierarchical means.
  Eigen::VectorXd predict(const FrequencyDesign::Row& row) const;
};

FrequencyPosterior fit_frequency_variational(const FrequencyDesign& design,
                                             const FrequencyPriors& priors,
                                             const DefenderGroups& groups,
                                             const FrequencyModelSpec& spec = {},
                                             int max_sweeps = 200, double rel_tol = 1e-9);

// ---------------------------------------------------------------------------
// efficiency model (Bayesian logistic regression, CAR prior, HMC)

struct EfficiencyPriors {
  double contest_var = 0.01;     // individual defender contest effects
  double skill_group_var = 1.0;  // hyperprior on per-basis skill means
  double contest_group_var = 1.0;
  double slope_var = 1.0;        // half-normal scale for the distance slope
  double indep_skill_var = 0.25; // used when the CAR structure is disabled
};

struct EfficiencyModelSpec {
  bool include_defense = true;  // contest effects and the distance term
  bool car_prior = true;        // otherwise independent skill around the mean
  int defender_groups = 3;
  bool spatial = true;          // false collapses bases
};

struct McmcOptions {
  int chains = 4;
  int samples = 2000;  // per chain; first half is warmup
  std::uint64_t seed = 0;
  double target_accept = 0.8;
  int max_leapfrog = 48;
  double max_divergence_frac = 0.05;
  int threads = 1;
};

struct EfficiencyPosterior {
  EfficiencyModelSpec spec;
  int n_bases = 1;
  std::vector<int> offender_ids, defender_ids;
  std::vector<int> defender_group;
  Eigen::MatrixXd skill, skill_sd;      // offenders x bases
  Eigen::MatrixXd contest, contest_sd;  // defenders x bases
  Eigen::VectorXd slope, slope_sd;      // per basis, nonnegative
  Eigen::VectorXd skill_mean;           // per basis
  Eigen::MatrixXd contest_group_mean;   // groups x bases
  Eigen::VectorXd rhat;                 // per parameter
  double max_rhat = 0.0;
  int divergences = 0;
  double step_size = 0.0;
  bool rhat_ok = true;
  Eigen::MatrixXd draws;  // kept samples x parameters (all chains stacked)

  double predict_make_prob(int shooter_idx, int defender_idx, int basis, double distance) const;
};

/// Posterior mode under the same priors (Newton); used to seed the
/// sampler and as the fast surrogate during cross-validation.
EfficiencyPosterior fit_efficiency_map(const EfficiencyDesign& design, const OffenderGraph& graph,
                                       const DefenderGroups& groups, const EfficiencyPriors& priors,
                                       const EfficiencyModelSpec& spec = {});

EfficiencyPosterior fit_efficiency_mcmc(const EfficiencyDesign& design, const OffenderGraph& graph,
                                        const DefenderGroups& groups, const EfficiencyPriors& priors,
                                        const McmcOptions& opts = {},
                                        const EfficiencyModelSpec& spec = {});

// ---------------------------------------------------------------------------
// reports

/// Per defender and basis: the shot-frequency effect and the combined
/// efficiency effect contest + slope * relative median distance, both
/// centered to a zero league mean per basis.
struct DefenderEffect {
  int defender_id = 0;
  int basis = 0;
  double freq_effect = 0.0;
  double freq_sd = 0.0;
  double eff_effect = 0.0;
  double eff_sd = 0.0;
  double median_distance_delta = 0.0;
  long shots_faced = 0;
  bool prior_dominated = false;  // no shots faced in this basis
  int rank = 0;                  // 1 = best (most negative) within basis
};

std::vector<DefenderEffect> defender_effect_table(const FrequencyPosterior& freq,
                                                  const EfficiencyPosterior& eff,
                                                  const EfficiencyDesign& design);

/// Expected points per possession for an offender guarded full time by
/// one defender, in a lineup of league-average teammates.
double expected_points_per_possession(int offender_id, int defender_id,
                                      const FrequencyPosterior& freq,
                                      const EfficiencyPosterior& eff,
                                      const EfficiencyDesign& design,
                                      const std::vector<int>& basis_points);

// ---------------------------------------------------------------------------
// cross-validation harness

enum class ModelVariant { kFull, kNoShrinkage, kNoDefense, kNoSpatial };

struct CvOptions {
  int folds = 10;
  std::uint64_t seed = 0;
  bool efficiency_mcmc = false;  // MAP surrogate by default
  McmcOptions mcmc;
  int threads = 1;
};

struct CvCell {
  double log_likelihood = 0.0;
  long count = 0;
  bool defined = true;
};

/// Held-out log-likelihood table: rows shooter / basis / full /
/// efficiency, columns full / no-shrinkage / no-defense / no-spatial.
struct CvTable {
  std::array<std::array<CvCell, 4>, 4> cells;
  static const char* row_name(int r);
  static const char* col_name(int c);
};

CvTable cross_validate(const FrequencyDesign& freq_design, const EfficiencyDesign& eff_design,
                       const DefenderGroups& groups, const OffenderGraph& graph,
                       const FrequencyPriors& freq_priors, const EfficiencyPriors& eff_priors,
                       const CvOptions& opts = {});

}  // namespace hoopdef
