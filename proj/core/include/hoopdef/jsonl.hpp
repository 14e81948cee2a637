#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "hoopdef/tracking.hpp"

namespace hoopdef {

/// Tracking interchange format: one JSON object per line, one line per
/// frame. Required keys: possession_id, t, offense ([[x,y]] x5),
/// defense ([[x,y]] x5), ball ([x,y]), ball_handler (int or null),
/// shot ({shooter,x,y,made} or null; present on the release frame).
/// Optional keys (first line of a possession): offense_ids, defense_ids,
/// offense_team, defense_team, attack ("near"|"far").
struct JsonlReadOptions {
  bool normalize = true;
  bool admit = true;
  double min_duration_s = 5.0;
};

std::vector<Possession> read_tracking_jsonl(std::istream& in, const CourtGeometry& geom,
                                            const JsonlReadOptions& opts,
                                            std::vector<std::string>* warnings = nullptr);

std::vector<Possession> read_tracking_jsonl_file(const std::string& path,
                                                 const CourtGeometry& geom,
                                                 const JsonlReadOptions& opts,
                                                 std::vector<std::string>* warnings = nullptr);

void write_tracking_jsonl(std::ostream& out, std::span<const Possession> corpus);
void write_tracking_jsonl_file(const std::string& path, std::span<const Possession> corpus);

}  // namespace hoopdef
