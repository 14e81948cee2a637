#include <doctest.h>

#include <sstream>

#include "hoopdef/jsonl.hpp"
#include "hoopdef/synth.hpp"

using namespace hoopdef;

namespace {

SynthConfig small_league(std::uint64_t seed, int possessions) {
  SynthConfig c = SynthConfig::league(12, 12, seed);
  c.n_possessions = possessions;
  c.frames_per_possession = 130;
  return c;
}

}  // namespace

TEST_CASE("same seed gives byte-identical corpora") {
  const SynthConfig c = small_league(42, 6);
  const SynthResult a = simulate_corpus(c);
  const SynthResult b = simulate_corpus(c);
  std::ostringstream sa, sb;
  write_tracking_jsonl(sa, a.possessions);
  write_tracking_jsonl(sb, b.possessions);
  CHECK(sa.str() == sb.str());
  CHECK(!sa.str().empty());
}

TEST_CASE("empty corpus is valid and carries a ledger") {
  SynthConfig c = small_league(1, 0);
  const SynthResult r = simulate_corpus(c);
  CHECK(r.possessions.empty());
  CHECK(r.ledger.possessions.empty());
  CHECK(r.ledger.config.n_offenders == 12);
}

TEST_CASE("frame accounting matches the configuration") {
  SynthConfig c = small_league(2, 100);
  c.frames_per_possession = 125;  // 5 s at 25 Hz
  const SynthResult r = simulate_corpus(c);
  long frames = 0;
  for (const auto& p : r.possessions) frames += static_cast<long>(p.frames.size());
  CHECK(frames == 12500);
}

TEST_CASE("stay probability one freezes the hidden matchups") {
  SynthConfig c = small_league(3, 4);
  c.stay_prob = 1.0;
  const SynthResult r = simulate_corpus(c);
  for (const auto& t : r.ledger.possessions) {
    REQUIRE(!t.matchups.empty());
    for (const auto& frame : t.matchups)
      for (int j = 0; j < 5; ++j) CHECK(frame[j] == t.matchups[0][j]);
  }
}

TEST_CASE("vanishing noise puts defenders exactly on the placement rule") {
  SynthConfig c = small_league(4, 3);
  c.defender_noise_ft = 0.0;
  const SynthResult r = simulate_corpus(c);
  const CourtGeometry geom;
  for (std::size_t n = 0; n < r.possessions.size(); ++n) {
    const auto& p = r.possessions[n];
    const auto& m = r.ledger.possessions[n].matchups;
    for (std::size_t t = 0; t < p.frames.size(); ++t) {
      const auto& f = p.frames[t];
      for (int j = 0; j < 5; ++j) {
        const Point mu = c.w_offender * f.offense[m[t][j]] + c.w_ball * f.ball +
                         c.w_hoop * geom.hoop;
        CHECK(distance(f.defense[j], mu) < 1e-9);
      }
    }
  }
}

TEST_CASE("hidden transitions hit the configured retention rate") {
  SynthConfig c = small_league(5, 200);
  c.frames_per_possession = 110;  // > 1e5 transitions across the corpus
  c.stay_prob = 0.97;
  const SynthResult r = simulate_corpus(c);
  long stays = 0, total = 0;
  for (const auto& t : r.ledger.possessions) {
    for (std::size_t f = 1; f < t.matchups.size(); ++f)
      for (int j = 0; j < 5; ++j) {
        stays += t.matchups[f][j] == t.matchups[f - 1][j] ? 1 : 0;
        ++total;
      }
  }
  REQUIRE(total >= 100000);
  CHECK(static_cast<double>(stays) / total == doctest::Approx(0.97).epsilon(0.011));
}

TEST_CASE("defender residuals match the configured noise scale") {
  SynthConfig c = small_league(6, 60);
  c.defender_noise_ft = 2.0;
  const SynthResult r = simulate_corpus(c);
  const CourtGeometry geom;
  double sum = 0.0, sumsq = 0.0;
  long n = 0;
  for (std::size_t i = 0; i < r.possessions.size(); ++i) {
    const auto& p = r.possessions[i];
    const auto& m = r.ledger.possessions[i].matchups;
    for (std::size_t t = 0; t < p.frames.size(); ++t) {
      const auto& f = p.frames[t];
      for (int j = 0; j < 5; ++j) {
        const Point mu = c.w_offender * f.offense[m[t][j]] + c.w_ball * f.ball +
                         c.w_hoop * geom.hoop;
        const Point resid = f.defense[j] - mu;
        sum += resid.x + resid.y;
        sumsq += resid.x * resid.x + resid.y * resid.y;
        n += 2;
      }
    }
  }
  const double mean = sum / n;
  const double sd = std::sqrt(sumsq / n - mean * mean);
  CHECK(std::abs(mean) < 0.025);
  CHECK(sd == doctest::Approx(2.0).epsilon(0.01));
}

TEST_CASE("each defender guards exactly one offender per frame") {
  const SynthResult r = simulate_corpus(small_league(7, 5));
  for (const auto& t : r.ledger.possessions)
    for (const auto& frame : t.matchups)
      for (int j = 0; j < 5; ++j) {
        CHECK(frame[j] >= 0);
        CHECK(frame[j] < 5);
      }
}

TEST_CASE("realized guard fractions sum to one per defender") {
  const SynthResult r = simulate_corpus(small_league(8, 5));
  for (const auto& t : r.ledger.possessions)
    for (int j = 0; j < 5; ++j)
      CHECK(t.guard_fractions.row(j).sum() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("shots land in the sampled basis region with the ball at the shooter") {
  const SynthConfig c = small_league(9, 80);
  const SynthResult r = simulate_corpus(c);
  const CourtGeometry geom;
  int shots = 0;
  for (std::size_t i = 0; i < r.possessions.size(); ++i) {
    const auto& p = r.possessions[i];
    const auto& t = r.ledger.possessions[i];
    if (t.outcome == 0) {
      CHECK(!p.shot.has_value());
      continue;
    }
    ++shots;
    REQUIRE(p.shot.has_value());
    CHECK(p.shot->shooter == t.shooter_slot);
    CHECK(p.shot->made == t.made);
    // release frame: shooter holds the ball at the shot location
    const auto& f = p.frames[p.shot->frame_index];
    CHECK(distance(f.offense[t.shooter_slot], p.shot->location) < 1e-9);
    REQUIRE(f.ball_handler.has_value());
    CHECK(*f.ball_handler == t.shooter_slot);
    // the sampled tile belongs to the drawn basis region
    int arg = 0;
    double best = r.ledger.bases.surfaces(0, geom.tile_index(p.shot->location));
    for (int b = 1; b < r.ledger.bases.surfaces.rows(); ++b) {
      const double v = r.ledger.bases.surfaces(b, geom.tile_index(p.shot->location));
      if (v > best) {
        best = v;
        arg = b;
      }
    }
    CHECK(arg == t.basis);
  }
  CHECK(shots > 10);
}

TEST_CASE("ledger round trips through disk") {
  const SynthResult r = simulate_corpus(small_league(10, 3));
  const std::string path = "/tmp/hoopdef_test_ledger.json";
  r.ledger.save(path);
  const GroundTruthLedger back = GroundTruthLedger::load(path);
  REQUIRE(back.possessions.size() == r.ledger.possessions.size());
  CHECK(back.config.stay_prob == r.ledger.config.stay_prob);
  CHECK(back.possessions[1].outcome == r.ledger.possessions[1].outcome);
  CHECK(back.possessions[1].guard_fractions(2, 3) ==
        doctest::Approx(r.ledger.possessions[1].guard_fractions(2, 3)));
  CHECK(back.bases.point_values == r.ledger.bases.point_values);
}

TEST_CASE("planted bases have three two-point and two three-point regions") {
  const SynthBases b = SynthBases::standard_five();
  REQUIRE(b.point_values.size() == 5);
  int twos = 0, threes = 0;
  for (int v : b.point_values) (v == 2 ? twos : threes) += 1;
  CHECK(twos == 3);
  CHECK(threes == 2);
  for (int i = 0; i < 5; ++i)
    CHECK(b.surfaces.row(i).sum() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("generated corpora survive the jsonl round trip") {
  const SynthResult r = simulate_corpus(small_league(11, 4));
  std::ostringstream out;
  write_tracking_jsonl(out, r.possessions);
  std::istringstream in(out.str());
  JsonlReadOptions opts;
  opts.admit = false;
  const auto back = read_tracking_jsonl(in, CourtGeometry{}, opts, nullptr);
  REQUIRE(back.size() == r.possessions.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].id == r.possessions[i].id);
    CHECK(back[i].frames.size() == r.possessions[i].frames.size());
    CHECK(back[i].offense_ids == r.possessions[i].offense_ids);
    CHECK(back[i].shot.has_value() == r.possessions[i].shot.has_value());
    const auto& fa = back[i].frames.back();
    const auto& fb = r.possessions[i].frames.back();
    CHECK(fa.ball.x == doctest::Approx(fb.ball.x));
    CHECK(fa.defense[4].y == doctest::Approx(fb.defense[4].y));
  }
}
