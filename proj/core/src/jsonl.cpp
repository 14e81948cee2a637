#include "hoopdef/jsonl.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace hoopdef {

using nlohmann::json;

namespace {

Point parse_point(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

void warn(std::vector<std::string>* warnings, std::string msg) {
  if (warnings) warnings->push_back(std::move(msg));
}

}  // namespace

std::vector<Possession> read_tracking_jsonl(std::istream& in, const CourtGeometry& geom,
                                            const JsonlReadOptions& opts,
                                            std::vector<std::string>* warnings) {
  std::vector<Possession> raw;
  Possession* cur = nullptr;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw std::runtime_error("line " + std::to_string(lineno) + ": bad JSON: " + e.what());
    }
    const std::string pid = j.at("possession_id").is_string()
                                ? j.at("possession_id").get<std::string>()
                                : std::to_string(j.at("possession_id").get<long>());
    if (!cur || cur->id != pid) {
      raw.emplace_back();
      cur = &raw.back();
      cur->id = pid;
      if (j.contains("offense_ids"))
        for (int k = 0; k < 5; ++k) cur->offense_ids[k] = j["offense_ids"].at(k).get<int>();
      if (j.contains("defense_ids"))
        for (int k = 0; k < 5; ++k) cur->defense_ids[k] = j["defense_ids"].at(k).get<int>();
      if (j.contains("offense_team")) cur->offense_team = j["offense_team"].get<int>();
      if (j.contains("defense_team")) cur->defense_team = j["defense_team"].get<int>();
      if (j.contains("attack") && !j["attack"].is_null()) {
        const std::string a = j["attack"].get<std::string>();
        if (a == "near")
          cur->attack = AttackEnd::kNear;
        else if (a == "far")
          cur->attack = AttackEnd::kFar;
        else
          throw std::runtime_error("possession " + pid + ": unknown attack end '" + a + "'");
      }
    }
    if (!j.contains("ball") || j["ball"].is_null()) {
      warn(warnings, "possession " + pid + " line " + std::to_string(lineno) +
                         ": missing ball position, frame dropped");
      continue;
    }
    TrackingFrame f;
    f.t = j.at("t").get<double>();
    for (int k = 0; k < 5; ++k) f.offense[k] = parse_point(j.at("offense").at(k));
    for (int k = 0; k < 5; ++k) f.defense[k] = parse_point(j.at("defense").at(k));
    f.ball = parse_point(j["ball"]);
    if (j.contains("ball_handler") && !j["ball_handler"].is_null())
      f.ball_handler = j["ball_handler"].get<int>();
    if (!cur->frames.empty() && f.t <= cur->frames.back().t)
      throw std::runtime_error("possession " + pid + ": frame times not strictly increasing");
    cur->frames.push_back(f);
    if (j.contains("shot") && !j["shot"].is_null()) {
      if (cur->shot) {
        warn(warnings, "possession " + pid + ": extra shot event ignored (first shot kept)");
      } else {
        ShotEvent s;
        const json& js = j["shot"];
        s.shooter = js.at("shooter").get<int>();
        s.location = {js.at("x").get<double>(), js.at("y").get<double>()};
        s.made = js.at("made").get<bool>();
        s.frame_index = static_cast<int>(cur->frames.size()) - 1;
        cur->shot = s;
      }
    }
  }

  std::vector<Possession> out;
  out.reserve(raw.size());
  for (auto& p : raw) {
    Possession q = p;
    if (opts.normalize) {
      try {
        q = normalize_half_court(p, geom);
      } catch (const std::exception& e) {
        warn(warnings, std::string("rejected: ") + e.what());
        continue;
      }
    }
    if (opts.admit) {
      auto admitted = admit_possession(q, geom, opts.min_duration_s);
      if (!admitted) {
        warn(warnings, "possession " + p.id + ": not admitted (too short or out of half court)");
        continue;
      }
      q = std::move(*admitted);
    }
    out.push_back(std::move(q));
  }
  return out;
}

std::vector<Possession> read_tracking_jsonl_file(const std::string& path,
                                                 const CourtGeometry& geom,
                                                 const JsonlReadOptions& opts,
                                                 std::vector<std::string>* warnings) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open tracking file: " + path);
  return read_tracking_jsonl(f, geom, opts, warnings);
}

void write_tracking_jsonl(std::ostream& out, std::span<const Possession> corpus) {
  for (const auto& p : corpus) {
    for (std::size_t i = 0; i < p.frames.size(); ++i) {
      const auto& f = p.frames[i];
      json j;
      j["possession_id"] = p.id;
      j["t"] = f.t;
      json off = json::array(), def = json::array();
      for (const auto& q : f.offense) off.push_back({q.x, q.y});
      for (const auto& q : f.defense) def.push_back({q.x, q.y});
      j["offense"] = off;
      j["defense"] = def;
      j["ball"] = {f.ball.x, f.ball.y};
      if (f.ball_handler)
        j["ball_handler"] = *f.ball_handler;
      else
        j["ball_handler"] = nullptr;
      if (i == 0) {
        j["offense_ids"] = p.offense_ids;
        j["defense_ids"] = p.defense_ids;
        j["offense_team"] = p.offense_team;
        j["defense_team"] = p.defense_team;
        if (p.attack) j["attack"] = (*p.attack == AttackEnd::kNear) ? "near" : "far";
      }
      if (p.shot && p.shot->frame_index == static_cast<int>(i)) {
        j["shot"] = {{"shooter", p.shot->shooter},
                     {"x", p.shot->location.x},
                     {"y", p.shot->location.y},
                     {"made", p.shot->made}};
      } else {
        j["shot"] = nullptr;
      }
      out << j.dump() << '\n';
    }
  }
}

void write_tracking_jsonl_file(const std::string& path, std::span<const Possession> corpus) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open for write: " + path);
  write_tracking_jsonl(f, corpus);
}

}  // namespace hoopdef
