#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "hoopdef/matchup.hpp"

namespace hoopdef {

/// Attention an offender draws: total defender-time spent guarding him
/// divided by his time on court, split by whether he holds the ball.
/// Five units of attention exist league-wide per frame.
struct AttentionEntry {
  int player_id = 0;
  double on_ball = 0.0;
  double off_ball = 0.0;
  long frames_on_ball = 0;
  long frames_off_ball = 0;
};

std::vector<AttentionEntry> attention_scores(std::span<const Possession> corpus,
                                             const MatchupModel& model,
                                             const CourtGeometry& geom = {}, int threads = 1);

/// Base-2 entropy of one guard-fraction row; 0 log 0 = 0.
double guard_entropy(const Eigen::Matrix<double, 1, 5>& fractions);

struct PlayerEntropy {
  int player_id = 0;
  double mean_entropy = 0.0;
  long possessions = 0;
};

struct TeamEntropy {
  int team_id = 0;
  double defensive_entropy = 0.0;  // mean over own defenders' possessions
  double induced_entropy = 0.0;    // mean over defenders faced on offense
  long defensive_samples = 0;
  long induced_samples = 0;
};

struct EntropyReport {
  std::vector<PlayerEntropy> players;
  std::vector<TeamEntropy> teams;
};

EntropyReport defensive_entropy(std::span<const Possession> corpus,
                                std::span<const MatchupSummary> summaries);

}  // namespace hoopdef
