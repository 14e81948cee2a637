#include <doctest.h>

#include <cmath>

#include "hoopdef/geometry.hpp"
#include "hoopdef/rng.hpp"
#include "hoopdef/tracking.hpp"

using namespace hoopdef;

TEST_CASE("tile ids cover the grid corners") {
  CourtGeometry geom;
  CHECK(geom.tile_count() == 2350);
  CHECK(geom.tile_index({0.5, 0.5}) == 0);
  CHECK(geom.tile_index({46.5, 49.5}) == 2349);
  CHECK(geom.tile_index({10.2, 3.7}) == geom.tile_index({10.9, 3.1}));
}

TEST_CASE("tile boundaries go to the lower-index cell") {
  CourtGeometry geom;
  CHECK(geom.tile_index({10.0, 3.5}) == geom.tile_index({9.5, 3.5}));
  CHECK(geom.tile_index({10.5, 4.0}) == geom.tile_index({10.5, 3.5}));
  // court corners stay in range
  CHECK(geom.tile_index({0.0, 0.0}) == 0);
  CHECK(geom.tile_index({47.0, 50.0}) == 2349);
}

TEST_CASE("tile_index rejects out-of-bounds points") {
  CourtGeometry geom;
  CHECK_THROWS_AS(geom.tile_index({-0.1, 10.0}), std::out_of_range);
  CHECK_THROWS_AS(geom.tile_index({47.2, 10.0}), std::out_of_range);
  CHECK_THROWS_AS(geom.tile_index({10.0, 50.3}), std::out_of_range);
}

TEST_CASE("every in-bounds point maps to exactly one tile and back within half a tile") {
  CourtGeometry geom;
  Rng rng(11);
  for (int i = 0; i < 2000; ++i) {
    const Point p{rng.uniform(0.0, 47.0), rng.uniform(0.0, 50.0)};
    const int v = geom.tile_index(p);
    REQUIRE(v >= 0);
    REQUIRE(v < geom.tile_count());
    const Point c = geom.tile_center(v);
    CHECK(std::abs(c.x - p.x) <= 0.5 + 1e-12);
    CHECK(std::abs(c.y - p.y) <= 0.5 + 1e-12);
  }
}

TEST_CASE("three point classification uses the corner lanes and the arc") {
  CourtGeometry geom;
  CHECK(geom.is_three_point({4.0, 1.5}));        // corner
  CHECK(!geom.is_three_point({4.0, 10.0}));      // short corner, inside 22
  CHECK(geom.is_three_point({30.0, 25.0}));      // beyond the arc
  CHECK(!geom.is_three_point({20.0, 25.0}));     // mid range
  CHECK(!geom.is_three_point({5.25, 25.0}));     // at the rim
}

namespace {

Possession full_court_possession(double x_shift, bool far_side) {
  Possession p;
  p.id = "p";
  p.attack = far_side ? AttackEnd::kFar : AttackEnd::kNear;
  for (int t = 0; t < 3; ++t) {
    TrackingFrame f;
    f.t = 0.2 * t;
    for (int k = 0; k < 5; ++k) {
      f.offense[k] = {x_shift + 2.0 * k, 10.0 + 3.0 * k};
      f.defense[k] = {x_shift + 2.0 * k + 1.0, 12.0 + 3.0 * k};
    }
    f.ball = {x_shift + 1.0, 11.0};
    f.ball_handler = 0;
    p.frames.push_back(f);
  }
  return p;
}

}  // namespace

TEST_CASE("normalizing a far-side possession mirrors the attacked hoop home") {
  CourtGeometry geom;
  Possession raw = full_court_possession(60.0, true);
  const Possession norm = normalize_half_court(raw, geom);
  CHECK(!norm.attack.has_value());
  // reflection through mid court
  CHECK(norm.frames[0].offense[0].x == doctest::Approx(94.0 - 60.0));
  CHECK(norm.frames[0].offense[0].y == doctest::Approx(50.0 - 10.0));
  // distances preserved
  const double before = distance(raw.frames[0].offense[0], raw.frames[0].defense[3]);
  const double after = distance(norm.frames[0].offense[0], norm.frames[0].defense[3]);
  CHECK(before == doctest::Approx(after));
}

TEST_CASE("normalization is idempotent on half-court data") {
  CourtGeometry geom;
  Possession raw = full_court_possession(10.0, false);
  const Possession once = normalize_half_court(raw, geom);
  const Possession twice = normalize_half_court(once, geom);
  for (std::size_t t = 0; t < once.frames.size(); ++t)
    for (int k = 0; k < 5; ++k) {
      CHECK(once.frames[t].offense[k].x == twice.frames[t].offense[k].x);
      CHECK(once.frames[t].defense[k].y == twice.frames[t].defense[k].y);
    }
}

TEST_CASE("unknown attack direction on full-court data is rejected") {
  Possession raw = full_court_possession(60.0, true);
  raw.attack.reset();
  CHECK_THROWS_AS(normalize_half_court(raw), std::invalid_argument);
}

TEST_CASE("positions outside the full court are rejected") {
  Possession raw = full_court_possession(60.0, true);
  raw.frames[1].offense[2] = {95.5, 10.0};
  CHECK_THROWS_AS(normalize_half_court(raw), std::invalid_argument);
}

TEST_CASE("admission truncates at the first shot and enforces duration") {
  CourtGeometry geom;
  Possession p;
  p.id = "a";
  for (int t = 0; t < 200; ++t) {
    TrackingFrame f;
    f.t = 0.04 * t;
    for (int k = 0; k < 5; ++k) {
      f.offense[k] = {10.0 + k, 10.0 + k};
      f.defense[k] = {12.0 + k, 12.0 + k};
    }
    f.ball = {10.0, 10.0};
    p.frames.push_back(f);
  }
  ShotEvent s;
  s.shooter = 2;
  s.location = {12.0, 12.0};
  s.frame_index = 150;
  p.shot = s;

  const auto admitted = admit_possession(p, geom, 5.0);
  REQUIRE(admitted.has_value());
  CHECK(admitted->frames.size() == 151);
  CHECK(admitted->shot->frame_index == 150);

  // too short once truncated at an early shot
  p.shot->frame_index = 50;
  CHECK(!admit_possession(p, geom, 5.0).has_value());
}

TEST_CASE("admission keeps the trailing in-half-court run") {
  CourtGeometry geom;
  Possession p;
  p.id = "b";
  for (int t = 0; t < 300; ++t) {
    TrackingFrame f;
    f.t = 0.04 * t;
    const double x = t < 60 ? 60.0 : 20.0;  // everyone in the back court early on
    for (int k = 0; k < 5; ++k) {
      f.offense[k] = {x + 0.1 * k, 10.0 + k};
      f.defense[k] = {x + 1.0 + 0.1 * k, 12.0 + k};
    }
    f.ball = {x, 10.0};
    p.frames.push_back(f);
  }
  const auto admitted = admit_possession(p, geom, 5.0);
  REQUIRE(admitted.has_value());
  CHECK(admitted->frames.size() == 240);
  CHECK(admitted->frames.front().t == doctest::Approx(0.04 * 60));
}
