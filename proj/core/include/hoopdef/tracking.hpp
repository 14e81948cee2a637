#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "hoopdef/geometry.hpp"

namespace hoopdef {

struct ShotEvent {
  int shooter = -1;  // offender slot 0..4
  Point location;
  bool made = false;
  int frame_index = -1;  // release frame within the possession
  std::optional<double> defender_distance_ft;  // filled when building the efficiency design
};

struct TrackingFrame {
  double t = 0.0;  // seconds since possession start
  std::array<Point, 5> offense;
  std::array<Point, 5> defense;
  Point ball;
  std::optional<int> ball_handler;  // offender slot, if anyone controls the ball
};

/// Which basket the offense attacks, in full-court coordinates
/// x in [0, 2*depth]. Near = the canonical hoop end (x small).
enum class AttackEnd { kNear, kFar };

struct Possession {
  std::string id;
  std::vector<TrackingFrame> frames;
  std::optional<ShotEvent> shot;
  int offense_team = 0;
  int defense_team = 1;
  std::array<int, 5> offense_ids{0, 1, 2, 3, 4};
  std::array<int, 5> defense_ids{0, 1, 2, 3, 4};
  std::optional<AttackEnd> attack;  // unset once normalized

  double duration_s() const {
    return frames.empty() ? 0.0 : frames.back().t - frames.front().t;
  }
};

/// Reflects a full-court possession so the attacked basket sits at the
/// canonical hoop. A possession whose coordinates already fit the half
/// court and that carries no attack annotation passes through unchanged;
/// full-court coordinates without an attack annotation are rejected.
/// The transform is a point reflection through mid court (an isometry).
Possession normalize_half_court(const Possession& raw, const CourtGeometry& geom = {});

/// Admission filter used before model fitting: truncates at the first
/// shot, keeps the trailing run of frames with all ten players and the
/// ball inside the half court, and requires the stated minimum duration.
std::optional<Possession> admit_possession(const Possession& normalized,
                                           const CourtGeometry& geom = {},
                                           double min_duration_s = 5.0);

}  // namespace hoopdef
