#include "hoopdef/tracking.hpp"

#include <stdexcept>

namespace hoopdef {
namespace {

bool in_half_court(const TrackingFrame& f, const CourtGeometry& geom) {
  for (const auto& p : f.offense)
    if (!geom.contains(p)) return false;
  for (const auto& p : f.defense)
    if (!geom.contains(p)) return false;
  return geom.contains(f.ball);
}

void check_full_court(const Possession& p, const CourtGeometry& geom) {
  const double max_x = 2.0 * geom.depth_ft;
  auto ok = [&](Point q) { return q.x >= 0.0 && q.x <= max_x && q.y >= 0.0 && q.y <= geom.width_ft; };
  for (std::size_t i = 0; i < p.frames.size(); ++i) {
    const auto& f = p.frames[i];
    bool good = ok(f.ball);
    for (const auto& q : f.offense) good = good && ok(q);
    for (const auto& q : f.defense) good = good && ok(q);
    if (!good) {
      throw std::invalid_argument("possession " + p.id + ": frame " + std::to_string(i) +
                                  " has a position outside the full court");
    }
  }
}

}  // namespace

Possession normalize_half_court(const Possession& raw, const CourtGeometry& geom) {
  check_full_court(raw, geom);

  auto all_in_half = [&] {
    for (const auto& f : raw.frames)
      if (!in_half_court(f, geom)) return false;
    return true;
  };

  if (!raw.attack.has_value()) {
    if (all_in_half()) return raw;  // already normalized
    throw std::invalid_argument("possession " + raw.id +
                                ": full-court coordinates but attack direction unknown");
  }

  Possession out = raw;
  out.attack.reset();
  if (*raw.attack == AttackEnd::kNear) return out;

  const double cx = 2.0 * geom.depth_ft;  // reflect through mid court
  const double cy = geom.width_ft;
  auto flip = [&](Point p) { return Point{cx - p.x, cy - p.y}; };
  for (auto& f : out.frames) {
    for (auto& p : f.offense) p = flip(p);
    for (auto& p : f.defense) p = flip(p);
    f.ball = flip(f.ball);
  }
  if (out.shot) out.shot->location = flip(out.shot->location);
  return out;
}

std::optional<Possession> admit_possession(const Possession& normalized,
                                           const CourtGeometry& geom,
                                           double min_duration_s) {
  Possession p = normalized;
  if (p.shot && p.shot->frame_index >= 0 &&
      p.shot->frame_index < static_cast<int>(p.frames.size())) {
    p.frames.resize(p.shot->frame_index + 1);  // ignore activity after the first shot
  }
  // trailing run of frames with everyone in the half court
  int first = static_cast<int>(p.frames.size());
  while (first > 0 && in_half_court(p.frames[first - 1], geom)) --first;
  if (first > 0) {
    p.frames.erase(p.frames.begin(), p.frames.begin() + first);
    if (p.shot) p.shot->frame_index -= first;
  }
  if (p.frames.empty()) return std::nullopt;
  if (p.shot && p.shot->frame_index < 0) return std::nullopt;
  if (p.duration_s() < min_duration_s) return std::nullopt;
  return p;
}

}  // namespace hoopdef
