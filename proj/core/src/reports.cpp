#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include "hoopdef/outcomes.hpp"
#include "hoopdef/rng.hpp"

namespace hoopdef {

namespace {

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  double m = v[mid];
  if (v.size() % 2 == 0) {
    const double lo = *std::max_element(v.begin(), v.begin() + mid);
    m = 0.5 * (m + lo);
  }
  return m;
}

}  // namespace

std::vector<DefenderEffect> defender_effect_table(const FrequencyPosterior& freq,
                                                  const EfficiencyPosterior& eff,
                                                  const EfficiencyDesign& design) {
  if (!freq.spec.include_defense || !eff.spec.include_defense)
    throw std::invalid_argument("defender_effect_table: fits carry no defender effects");
  const int B = eff.n_bases;
  const int n_def = static_cast<int>(eff.defender_ids.size());

  // release-distance medians per defender and basis, and pooled per basis
  std::map<std::pair<int, int>, std::vector<double>> dist;
  std::vector<std::vector<double>> pooled(B);
  std::vector<std::vector<long>> faced(B, std::vector<long>(n_def, 0));
  for (const auto& row : design.rows) {
    dist[{row.defender, row.basis}].push_back(row.distance_ft);
    pooled[row.basis].push_back(row.distance_ft);
    faced[row.basis][row.defender] += 1;
  }
  std::vector<double> pooled_median(B, 0.0);
  for (int b = 0; b < B; ++b) pooled_median[b] = median(pooled[b]);

  std::vector<DefenderEffect> table;
  table.reserve(static_cast<std::size_t>(n_def) * B);
  for (int b = 0; b < B; ++b) {
    double freq_center = 0.0, eff_center = 0.0;
    std::vector<DefenderEffect> rows(n_def);
    for (int j = 0; j < n_def; ++j) {
      DefenderEffect e;
      e.defender_id = eff.defender_ids[j];
      e.basis = b;
      e.shots_faced = faced[b][j];
      e.prior_dominated = faced[b][j] == 0;
      const auto it = dist.find({j, b});
      e.median_distance_delta =
          it == dist.end() ? 0.0 : median(it->second) - pooled_median[b];
      const int fj = [&] {  // frequency fit may use a different universe order
        const auto fit = std::lower_bound(freq.defender_ids.begin(), freq.defender_ids.end(),
                                          e.defender_id);
        return (fit != freq.defender_ids.end() && *fit == e.defender_id)
                   ? static_cast<int>(fit - freq.defender_ids.begin())
                   : -1;
      }();
      e.freq_effect = fj >= 0 ? freq.def_coef(fj, b) : 0.0;
      e.freq_sd = fj >= 0 ? freq.def_sd(fj, b) : 0.0;
      e.eff_effect = eff.contest(j, b) + eff.slope(b) * e.median_distance_delta;
      e.eff_sd = std::sqrt(eff.contest_sd(j, b) * eff.contest_sd(j, b) +
                           std::pow(eff.slope_sd(b) * e.median_distance_delta, 2));
      freq_center += e.freq_effect;
      eff_center += e.eff_effect;
      rows[j] = e;
    }
    freq_center /= n_def;
    eff_center /= n_def;
    for (auto& e : rows) {  // zero league mean per basis at reporting time
      e.freq_effect -= freq_center;
      e.eff_effect -= eff_center;
    }
    std::vector<int> order(n_def);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int c) {
      if (rows[a].eff_effect != rows[c].eff_effect)
        return rows[a].eff_effect < rows[c].eff_effect;
      return rows[a].defender_id < rows[c].defender_id;
    });
    for (int r = 0; r < n_def; ++r) rows[order[r]].rank = r + 1;
    table.insert(table.end(), rows.begin(), rows.end());
  }
  return table;
}

double expected_points_per_possession(int offender_id, int defender_id,
                                      const FrequencyPosterior& freq,
                                      const EfficiencyPosterior& eff,
                                      const EfficiencyDesign& design,
                                      const std::vector<int>& basis_points) {
  const int B = freq.n_bases;
  if (static_cast<int>(basis_points.size()) != B)
    throw std::invalid_argument("expected_points_per_possession: point values mismatch");

  auto find_idx = [](const std::vector<int>& ids, int id) {
    const auto it = std::lower_bound(ids.begin(), ids.end(), id);
    return (it != ids.end() && *it == id) ? static_cast<int>(it - ids.begin()) : -1;
  };
  const int kf = find_idx(freq.offender_ids, offender_id);
  const int jf = find_idx(freq.defender_ids, defender_id);
  const int ke = find_idx(eff.offender_ids, offender_id);
  const int je = find_idx(eff.defender_ids, defender_id);

  // the matchup of interest plus four league-average teammates
  Eigen::VectorXd eta_self(B);
  for (int b = 0; b < B; ++b) {
    double l = kf >= 0 ? freq.off_coef(kf, b) : freq.off_mean(b);
    if (freq.spec.include_defense && jf >= 0) l += freq.def_coef(jf, b);
    eta_self(b) = l;
  }
  double denom = 1.0;
  for (int b = 0; b < B; ++b) denom += std::exp(eta_self(b)) + 4.0 * std::exp(freq.off_mean(b));

  // contest distance: this defender's median in each basis, falling back
  // to the pooled median
  std::map<int, std::vector<double>> by_basis, pooled;
  for (const auto& row : design.rows) {
    if (row.defender == je) by_basis[row.basis].push_back(row.distance_ft);
    pooled[row.basis].push_back(row.distance_ft);
  }

  double epp = 0.0;
  for (int b = 0; b < B; ++b) {
    const double p_shot = std::exp(eta_self(b)) / denom;
    double d = 0.0;
    if (by_basis.count(b))
      d = median(by_basis[b]);
    else if (pooled.count(b))
      d = median(pooled[b]);
    const double p_make = eff.predict_make_prob(ke, je, b, d);
    epp += p_shot * p_make * basis_points[b];
  }
  return epp;
}

const char* CvTable::row_name(int r) {
  static const char* names[4] = {"shooter_loglik", "basis_loglik", "full_loglik",
                                 "efficiency_loglik"};
  return names[r];
}

const char* CvTable::col_name(int c) {
  static const char* names[4] = {"full", "no_shrinkage", "no_defense", "no_spatial"};
  return names[c];
}

namespace {

FrequencyModelSpec freq_spec_for(ModelVariant v) {
  switch (v) {
    case ModelVariant::kFull:
      return {true, 3, true};
    case ModelVariant::kNoShrinkage:
      return {true, 1, true};
    case ModelVariant::kNoDefense:
      return {false, 1, true};
    case ModelVariant::kNoSpatial:
      return {false, 1, false};
  }
  return {};
}

EfficiencyModelSpec eff_spec_for(ModelVariant v) {
  switch (v) {
    case ModelVariant::kFull:
      return {true, true, 3, true};
    case ModelVariant::kNoShrinkage:
      return {true, false, 1, true};
    case ModelVariant::kNoDefense:
      return {false, true, 1, true};
    case ModelVariant::kNoSpatial:
      return {false, false, 1, false};
  }
  return {};
}

}  // namespace

CvTable cross_validate(const FrequencyDesign& freq_design, const EfficiencyDesign& eff_design,
                       const DefenderGroups& groups, const OffenderGraph& graph,
                       const FrequencyPriors& freq_priors, const EfficiencyPriors& eff_priors,
                       const CvOptions& opts) {
  const int n = static_cast<int>(freq_design.rows.size());
  if (n < opts.folds) throw std::invalid_argument("cross_validate: fewer possessions than folds");
  const int B = freq_design.n_bases;

  // deterministic shuffled fold assignment
  std::vector<int> fold_of(n);
  {
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    Rng rng(opts.seed);
    for (int i = n - 1; i > 0; --i) std::swap(idx[i], idx[rng.uniform_int(i + 1)]);
    for (int i = 0; i < n; ++i) fold_of[idx[i]] = i % opts.folds;
  }

  CvTable table;
  for (auto& row : table.cells)
    for (auto& cell : row) {
      cell.log_likelihood = 0.0;
      cell.count = 0;
    }
  table.cells[1][3].defined = false;  // basis row has no meaning without space
  table.cells[2][3].defined = false;  // nor does the joint outcome

  const ModelVariant variants[4] = {ModelVariant::kFull, ModelVariant::kNoShrinkage,
                                    ModelVariant::kNoDefense, ModelVariant::kNoSpatial};

  for (int fold = 0; fold < opts.folds; ++fold) {
    FrequencyDesign freq_train = freq_design;
    freq_train.rows.clear();
    for (int i = 0; i < n; ++i)
      if (fold_of[i] != fold) freq_train.rows.push_back(freq_design.rows[i]);

    EfficiencyDesign eff_train = eff_design;
    eff_train.rows.clear();
    for (const auto& row : eff_design.rows)
      if (fold_of[row.possession] != fold) eff_train.rows.push_back(row);

    for (int vi = 0; vi < 4; ++vi) {
      const ModelVariant v = variants[vi];
      const FrequencyPosterior freq_fit =
          fit_frequency_variational(freq_train, freq_priors, groups, freq_spec_for(v));
      const EfficiencyPosterior eff_fit =
          opts.efficiency_mcmc
              ? fit_efficiency_mcmc(eff_train, graph, groups, eff_priors, opts.mcmc,
                                    eff_spec_for(v))
              : fit_efficiency_map(eff_train, graph, groups, eff_priors, eff_spec_for(v));

      for (int i = 0; i < n; ++i) {
        if (fold_of[i] != fold) continue;
        const auto& row = freq_design.rows[i];
        const Eigen::VectorXd p = freq_fit.predict(row);
        const int outcome = row.outcome;
        const bool spatial = freq_fit.spec.spatial;

        if (spatial) {
          // full 26-way outcome
          table.cells[2][vi].log_likelihood += std::log(std::max(p(outcome), 1e-300));
          table.cells[2][vi].count += 1;
          // shooter marginal
          double ps = p(0);
          if (outcome > 0) {
            const int slot = (outcome - 1) / B;
            ps = p.segment(1 + slot * B, B).sum();
          }
          table.cells[0][vi].log_likelihood += std::log(std::max(ps, 1e-300));
          table.cells[0][vi].count += 1;
          // basis marginal
          double pb = p(0);
          if (outcome > 0) {
            const int basis = (outcome - 1) % B;
            pb = 0.0;
            for (int k = 0; k < 5; ++k) pb += p(1 + k * B + basis);
          }
          table.cells[1][vi].log_likelihood += std::log(std::max(pb, 1e-300));
          table.cells[1][vi].count += 1;
        } else {
          const int six = outcome > 0 ? 1 + (outcome - 1) / B : 0;
          table.cells[0][vi].log_likelihood += std::log(std::max(p(six), 1e-300));
          table.cells[0][vi].count += 1;
        }
      }

      for (const auto& row : eff_design.rows) {
        if (fold_of[row.possession] != fold) continue;
        const double q =
            eff_fit.predict_make_prob(row.shooter, row.defender, row.basis, row.distance_ft);
        const double p_obs = row.made ? q : 1.0 - q;
        table.cells[3][vi].log_likelihood += std::log(std::max(p_obs, 1e-300));
        table.cells[3][vi].count += 1;
      }
    }
  }
  return table;
}

}  // namespace hoopdef
