#include "hoopdef/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "hoopdef/threading.hpp"

namespace hoopdef {

std::vector<AttentionEntry> attention_scores(std::span<const Possession> corpus,
                                             const MatchupModel& model,
                                             const CourtGeometry& geom, int threads) {
  struct Acc {
    double on = 0.0, off = 0.0;
    long frames_on = 0, frames_off = 0;
  };
  const int n = static_cast<int>(corpus.size());
  std::vector<std::map<int, Acc>> partial(n);
  parallel_for(n, threads, [&](int i) {
    const auto& p = corpus[i];
    const MatchupPosterior post = forward_backward(p, model, geom);
    auto& acc = partial[i];
    for (std::size_t t = 0; t < p.frames.size(); ++t) {
      const auto& f = p.frames[t];
      for (int k = 0; k < 5; ++k) {
        double drawn = 0.0;
        for (int j = 0; j < 5; ++j) drawn += post.marginals[j](static_cast<Eigen::Index>(t), k);
        Acc& a = acc[p.offense_ids[k]];
        if (f.ball_handler && *f.ball_handler == k) {
          a.on += drawn;
          a.frames_on += 1;
        } else {
          a.off += drawn;
          a.frames_off += 1;
        }
      }
    }
  });

  std::map<int, Acc> total;
  for (const auto& m : partial) {
    for (const auto& [id, a] : m) {
      Acc& t = total[id];
      t.on += a.on;
      t.off += a.off;
      t.frames_on += a.frames_on;
      t.frames_off += a.frames_off;
    }
  }

  std::vector<AttentionEntry> out;
  for (const auto& [id, a] : total) {
    if (a.frames_on + a.frames_off == 0) continue;  // no playing time
    AttentionEntry e;
    e.player_id = id;
    e.on_ball = a.frames_on > 0 ? a.on / a.frames_on : 0.0;
    e.off_ball = a.frames_off > 0 ? a.off / a.frames_off : 0.0;
    e.frames_on_ball = a.frames_on;
    e.frames_off_ball = a.frames_off;
    out.push_back(e);
  }
  return out;
}

double guard_entropy(const Eigen::Matrix<double, 1, 5>& fractions) {
  double h = 0.0;
  for (int k = 0; k < 5; ++k) {
    const double z = fractions(k);
    if (z > 0.0) h -= z * std::log2(z);
  }
  return h;
}

EntropyReport defensive_entropy(std::span<const Possession> corpus,
                                std::span<const MatchupSummary> summaries) {
  if (corpus.size() != summaries.size())
    throw std::invalid_argument("defensive_entropy: corpus/summary size mismatch");

  struct Acc {
    double sum = 0.0;
    long n = 0;
  };
  std::map<int, Acc> players;
  std::map<int, Acc> team_def, team_induced;

  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& p = corpus[i];
    const auto& z = summaries[i].guard_fractions;
    for (int j = 0; j < 5; ++j) {
      const double h = guard_entropy(z.row(j));
      auto& pa = players[p.defense_ids[j]];
      pa.sum += h;
      pa.n += 1;
      auto& td = team_def[p.defense_team];
      td.sum += h;
      td.n += 1;
      auto& ti = team_induced[p.offense_team];
      ti.sum += h;
      ti.n += 1;
    }
  }

  EntropyReport rep;
  for (const auto& [id, a] : players)
    rep.players.push_back({id, a.n ? a.sum / a.n : 0.0, a.n});
  std::map<int, TeamEntropy> teams;
  for (const auto& [id, a] : team_def) {
    TeamEntropy& t = teams[id];
    t.team_id = id;
    t.defensive_entropy = a.n ? a.sum / a.n : 0.0;
    t.defensive_samples = a.n;
  }
  for (const auto& [id, a] : team_induced) {
    TeamEntropy& t = teams[id];
    t.team_id = id;
    t.induced_entropy = a.n ? a.sum / a.n : 0.0;
    t.induced_samples = a.n;
  }
  for (const auto& [id, t] : teams) rep.teams.push_back(t);
  return rep;
}

}  // namespace hoopdef
