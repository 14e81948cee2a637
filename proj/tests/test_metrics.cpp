#include <doctest.h>

#include <cmath>

#include "hoopdef/metrics.hpp"
#include "hoopdef/synth.hpp"

using namespace hoopdef;

TEST_CASE("entropy of a pure matchup is zero and of a 50/50 split is one") {
  Eigen::Matrix<double, 1, 5> z;
  z << 1, 0, 0, 0, 0;
  CHECK(guard_entropy(z) == 0.0);
  z << 0.5, 0.5, 0, 0, 0;
  CHECK(guard_entropy(z) == doctest::Approx(1.0).epsilon(1e-14));
  z << 0.2, 0.2, 0.2, 0.2, 0.2;
  CHECK(guard_entropy(z) == doctest::Approx(std::log2(5.0)).epsilon(1e-13));
}

TEST_CASE("entropy stays within its bounds on random fraction rows") {
  Rng rng(5);
  for (int i = 0; i < 500; ++i) {
    Eigen::Matrix<double, 1, 5> z;
    double total = 0.0;
    for (int k = 0; k < 5; ++k) {
      z(k) = rng.gamma(0.4, 1.0) + 1e-12;
      total += z(k);
    }
    z /= total;
    const double h = guard_entropy(z);
    CHECK(h >= 0.0);
    CHECK(h <= std::log2(5.0) + 1e-12);
  }
}

namespace {

// one possession, hand-built marginals via a noiseless generator with a
// pinned matchup sequence is overkill; instead exercise the aggregation
// path through summaries directly
MatchupSummary summary_with(const Eigen::Matrix<double, 5, 5>& z, const std::string& id) {
  MatchupSummary s;
  s.possession_id = id;
  s.guard_fractions = z;
  s.has_shot = false;
  s.release_guard_weights.setZero();
  return s;
}

}  // namespace

TEST_CASE("team and induced entropy aggregate over the right possessions") {
  Possession a;
  a.id = "a";
  a.offense_team = 1;
  a.defense_team = 2;
  a.frames.resize(1);
  Possession b = a;
  b.id = "b";
  b.offense_team = 2;
  b.defense_team = 1;

  Eigen::Matrix<double, 5, 5> pure = Eigen::Matrix<double, 5, 5>::Identity();
  Eigen::Matrix<double, 5, 5> split = Eigen::Matrix<double, 5, 5>::Zero();
  for (int j = 0; j < 5; ++j) {
    split(j, 0) = 0.5;
    split(j, 1) = 0.5;
  }
  const std::vector<Possession> corpus = {a, b};
  const std::vector<MatchupSummary> summaries = {summary_with(pure, "a"),
                                                 summary_with(split, "b")};
  const EntropyReport rep = defensive_entropy(corpus, summaries);

  REQUIRE(rep.teams.size() == 2);
  for (const auto& t : rep.teams) {
    if (t.team_id == 2) {
      CHECK(t.defensive_entropy == doctest::Approx(0.0));  // team 2 defended possession a
      CHECK(t.induced_entropy == doctest::Approx(1.0));    // and attacked in possession b
    } else {
      CHECK(t.defensive_entropy == doctest::Approx(1.0));
      CHECK(t.induced_entropy == doctest::Approx(0.0));
    }
  }
}

TEST_CASE("attention concentrates on a singly guarded offender") {
  // noiseless frozen matchups: defender j shadows offender j the whole way
  SynthConfig c = SynthConfig::league(12, 12, 31);
  c.n_possessions = 4;
  c.frames_per_possession = 140;
  c.stay_prob = 1.0;
  c.defender_noise_ft = 0.05;
  const SynthResult r = simulate_corpus(c);
  MatchupModel m;
  m.w_offender = c.w_offender;
  m.w_ball = c.w_ball;
  m.w_hoop = c.w_hoop;
  m.emission_var = 0.01;
  m.stay_prob = 0.999;
  const auto scores = attention_scores(r.possessions, m);
  for (const auto& e : scores) {
    const double total_frames = e.frames_on_ball + e.frames_off_ball;
    if (total_frames == 0) continue;
    if (e.frames_off_ball > 0) CHECK(e.off_ball == doctest::Approx(1.0).epsilon(0.02));
    if (e.frames_on_ball > 0) CHECK(e.on_ball == doctest::Approx(1.0).epsilon(0.02));
  }
}

TEST_CASE("five units of attention exist per frame") {
  SynthConfig c = SynthConfig::league(12, 12, 77);
  c.n_possessions = 6;
  c.frames_per_possession = 120;
  const SynthResult r = simulate_corpus(c);
  MatchupModel m;
  m.w_offender = c.w_offender;
  m.w_ball = c.w_ball;
  m.w_hoop = c.w_hoop;
  m.emission_var = 4.0;
  m.stay_prob = 0.98;
  const auto scores = attention_scores(r.possessions, m);
  // total attention-frames = sum over players of attention * frames, which
  // must equal 5 per tracked frame
  double mass = 0.0;
  long frames = 0;
  for (const auto& e : scores)
    mass += e.on_ball * e.frames_on_ball + e.off_ball * e.frames_off_ball;
  for (const auto& p : r.possessions) frames += static_cast<long>(p.frames.size());
  CHECK(mass == doctest::Approx(5.0 * frames).epsilon(1e-9));
}

TEST_CASE("a 20% double team yields on-ball attention 1.2") {
  MatchupModel m;
  m.w_offender = 0.62;
  m.w_ball = 0.11;
  m.w_hoop = 0.27;
  m.emission_var = 0.01;  // emissions dominate, posterior is effectively hard
  m.stay_prob = 0.5;
  const CourtGeometry geom;

  Possession p;
  p.id = "dt";
  const int T = 100;
  for (int t = 0; t < T; ++t) {
    TrackingFrame f;
    f.t = 0.04 * t;
    for (int k = 0; k < 5; ++k) f.offense[k] = {10.0 + 7.0 * k, 5.0 + 9.0 * k};
    f.ball = f.offense[0];
    f.ball_handler = 0;
    for (int j = 0; j < 5; ++j) {
      const int guard = (t < 20 && j == 1) ? 0 : j;  // defender 1 doubles early
      f.defense[j] = emission_mean(f, guard, m, geom);
    }
    p.frames.push_back(f);
  }
  const std::vector<Possession> corpus = {p};
  const auto scores = attention_scores(corpus, m, geom);
  for (const auto& e : scores) {
    if (e.player_id == p.offense_ids[0]) {
      CHECK(e.frames_on_ball == T);
      CHECK(e.on_ball == doctest::Approx(1.2).epsilon(1e-3));
    }
    if (e.player_id == p.offense_ids[1] && e.player_id != p.offense_ids[0])
      CHECK(e.off_ball == doctest::Approx(0.8).epsilon(1e-3));
  }
}
