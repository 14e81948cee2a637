#pragma once

// Design-level synthetic data for the outcome models: draws possessions
// and shots directly in design space, bypassing tracking, so the
// frequency/efficiency fitters can be exercised against exact truths.

#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "hoopdef/outcomes.hpp"
#include "hoopdef/rng.hpp"
#include "hoopdef/similarity.hpp"

namespace testgen {

using hoopdef::EfficiencyDesign;
using hoopdef::FrequencyDesign;
using hoopdef::Rng;

inline std::vector<int> iota_ids(int n) {
  std::vector<int> ids(n);
  std::iota(ids.begin(), ids.end(), 0);
  return ids;
}

inline std::vector<int> sample_distinct(Rng& rng, int n, int k) {
  std::vector<int> idx = iota_ids(n);
  for (int i = 0; i < k; ++i) std::swap(idx[i], idx[i + rng.uniform_int(n - i)]);
  idx.resize(k);
  return idx;
}

inline Eigen::Matrix<double, 5, 5> random_guard_fractions(Rng& rng, double stickiness = 6.0) {
  Eigen::Matrix<double, 5, 5> z;
  for (int j = 0; j < 5; ++j) {
    double total = 0.0;
    for (int k = 0; k < 5; ++k) {
      z(j, k) = rng.gamma(j == k ? stickiness : 0.4, 1.0) + 1e-6;
      total += z(j, k);
    }
    z.row(j) /= total;
  }
  return z;
}

/// Multinomial possessions from known propensity/suppression matrices
/// (players x bases). Zero-size suppression disables defender effects.
inline FrequencyDesign make_frequency_design(int possessions, const Eigen::MatrixXd& propensity,
                                             const Eigen::MatrixXd& suppression, Rng& rng) {
  const int n_off = static_cast<int>(propensity.rows());
  const int B = static_cast<int>(propensity.cols());
  const int n_def = suppression.size() > 0 ? static_cast<int>(suppression.rows()) : 5;

  FrequencyDesign d;
  d.n_bases = B;
  d.offender_ids = iota_ids(n_off);
  d.defender_ids = iota_ids(n_def);
  d.rows.reserve(possessions);
  for (int n = 0; n < possessions; ++n) {
    FrequencyDesign::Row row;
    const auto off = sample_distinct(rng, n_off, 5);
    const auto def = sample_distinct(rng, n_def, 5);
    for (int i = 0; i < 5; ++i) {
      row.offense[i] = off[i];
      row.defense[i] = def[i];
    }
    row.guard_fractions = random_guard_fractions(rng);

    Eigen::MatrixXd prop(5, B), supp = Eigen::MatrixXd::Zero(5, B);
    for (int k = 0; k < 5; ++k) prop.row(k) = propensity.row(off[k]);
    if (suppression.size() > 0)
      for (int j = 0; j < 5; ++j) supp.row(j) = suppression.row(def[j]);
    const Eigen::VectorXd probs = hoopdef::frequency_prob(prop, supp, row.guard_fractions);
    std::vector<double> w(probs.data(), probs.data() + probs.size());
    row.outcome = rng.categorical(w);
    d.rows.push_back(row);
  }
  return d;
}

/// Bernoulli shots from known skill/contest/slope coefficients; the
/// distance is drawn uniformly inside the cap.
inline EfficiencyDesign make_efficiency_design(int shots, const Eigen::MatrixXd& skill,
                                               const Eigen::MatrixXd& contest,
                                               const Eigen::VectorXd& slope, double cap,
                                               Rng& rng) {
  const int n_off = static_cast<int>(skill.rows());
  const int B = static_cast<int>(skill.cols());
  const int n_def = contest.size() > 0 ? static_cast<int>(contest.rows()) : 5;

  EfficiencyDesign d;
  d.n_bases = B;
  d.distance_cap_ft = cap;
  d.offender_ids = iota_ids(n_off);
  d.defender_ids = iota_ids(n_def);
  d.rows.reserve(shots);
  for (int n = 0; n < shots; ++n) {
    EfficiencyDesign::Row row;
    row.shooter = rng.uniform_int(n_off);
    row.defender = rng.uniform_int(n_def);
    row.basis = rng.uniform_int(B);
    row.distance_ft = rng.uniform(0.0, cap);
    double logit = skill(row.shooter, row.basis);
    if (contest.size() > 0)
      logit += contest(row.defender, row.basis) + slope(row.basis) * row.distance_ft;
    row.made = rng.uniform() < 1.0 / (1.0 + std::exp(-logit));
    row.possession = n;
    d.rows.push_back(row);
  }
  return d;
}

/// Trivial group assignment (round robin) for fit interfaces that need one.
inline hoopdef::DefenderGroups round_robin_groups(int n_def, int bases = 5) {
  hoopdef::DefenderGroups g;
  g.defender_ids = iota_ids(n_def);
  g.group_of.resize(n_def);
  for (int j = 0; j < n_def; ++j) g.group_of[j] = j % 3;
  g.time_in_basis = Eigen::MatrixXd::Constant(n_def, bases, 0.2);
  g.pc_scores = Eigen::MatrixXd::Zero(n_def, 2);
  return g;
}

inline hoopdef::OffenderGraph knn_graph(int n_off, int k, Rng& rng) {
  Eigen::MatrixXd w(n_off, 5);
  for (int i = 0; i < n_off; ++i) {
    for (int j = 0; j < 5; ++j) w(i, j) = rng.gamma(0.8, 1.0) + 1e-3;
    w.row(i) /= w.row(i).sum();
  }
  return hoopdef::build_offender_graph(iota_ids(n_off), w, k, 0.9, 1.0);
}

}  // namespace testgen
