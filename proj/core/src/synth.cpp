#include "hoopdef/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

namespace hoopdef {

using nlohmann::json;

namespace {

json mat_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json r = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
    rows.push_back(std::move(r));
  }
  return rows;
}

Eigen::MatrixXd json_to_mat(const json& j) {
  if (j.empty()) return {};
  Eigen::MatrixXd m(j.size(), j.at(0).size());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(i, c) = j.at(i).at(c).get<double>();
  return m;
}

json vec_to_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Eigen::VectorXd json_to_vec(const json& j) {
  Eigen::VectorXd v(j.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = j.at(i).get<double>();
  return v;
}

Point reflect_into(Point p, double lo_x, double hi_x, double lo_y, double hi_y) {
  auto refl = [](double c, double lo, double hi) {
    while (c < lo || c > hi) {
      if (c < lo) c = 2 * lo - c;
      if (c > hi) c = 2 * hi - c;
    }
    return c;
  };
  return {refl(p.x, lo_x, hi_x), refl(p.y, lo_y, hi_y)};
}

std::vector<int> sample_distinct(Rng& rng, int n, int k) {
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (int i = 0; i < k; ++i) std::swap(idx[i], idx[i + rng.uniform_int(n - i)]);
  idx.resize(k);
  return idx;
}

}  // namespace

SynthBases SynthBases::standard_five(const CourtGeometry& geom) {
  SynthBases b;
  b.centers = {{5.25, 25.0}, {13.0, 25.0}, {15.0, 11.0}, {4.0, 2.0}, {30.0, 25.0}};
  const std::vector<double> spread = {2.5, 3.0, 3.5, 1.5, 3.0};
  const int V = geom.tile_count();
  b.surfaces.resize(static_cast<Eigen::Index>(b.centers.size()), V);
  for (std::size_t i = 0; i < b.centers.size(); ++i) {
    for (int v = 0; v < V; ++v) {
      const Point c = geom.tile_center(v);
      const double d2 = (c - b.centers[i]).dot(c - b.centers[i]);
      b.surfaces(static_cast<Eigen::Index>(i), v) = std::exp(-0.5 * d2 / (spread[i] * spread[i]));
    }
    b.surfaces.row(static_cast<Eigen::Index>(i)) /= b.surfaces.row(static_cast<Eigen::Index>(i)).sum();
    Point centroid{0.0, 0.0};
    for (int v = 0; v < V; ++v)
      centroid = centroid + b.surfaces(static_cast<Eigen::Index>(i), v) * geom.tile_center(v);
    b.point_values.push_back(geom.is_three_point(centroid) ? 3 : 2);
  }
  return b;
}

void SynthConfig::validate() const {
  const double wsum = w_offender + w_ball + w_hoop;
  if (w_offender < 0 || w_ball < 0 || w_hoop < 0 || std::abs(wsum - 1.0) > 1e-9)
    throw std::invalid_argument("SynthConfig: placement weights must be a simplex");
  if (!(stay_prob > 0.0 && stay_prob <= 1.0))
    throw std::invalid_argument("SynthConfig: stay_prob must lie in (0,1]");
  if (defender_noise_ft < 0.0) throw std::invalid_argument("SynthConfig: negative noise");
  if (n_possessions < 0) throw std::invalid_argument("SynthConfig: negative possession count");
  if (frames_per_possession < 1 || frame_rate_hz <= 0.0)
    throw std::invalid_argument("SynthConfig: bad frame settings");
  if (n_offenders < 5 || n_defenders < 5)
    throw std::invalid_argument("SynthConfig: rosters need at least five players");
  if (with_shots) {
    const auto B = shot_propensity.cols();
    if (B == 0 || shot_propensity.rows() != n_offenders || freq_suppression.rows() != n_defenders ||
        freq_suppression.cols() != B || shot_skill.rows() != n_offenders || shot_skill.cols() != B ||
        contest_skill.rows() != n_defenders || contest_skill.cols() != B ||
        distance_slope.size() != B)
      throw std::invalid_argument("SynthConfig: outcome coefficient shapes inconsistent");
    if (distance_slope.minCoeff() < 0.0)
      throw std::invalid_argument("SynthConfig: distance slope must be nonnegative");
    if (distance_cap_ft <= 0.0) throw std::invalid_argument("SynthConfig: bad distance cap");
    if (static_cast<int>(defender_group.size()) != n_defenders)
      throw std::invalid_argument("SynthConfig: defender_group size mismatch");
  }
}

SynthConfig SynthConfig::league(int n_offenders, int n_defenders, std::uint64_t seed,
                                const CourtGeometry& geom) {
  SynthConfig c;
  c.n_offenders = n_offenders;
  c.n_defenders = n_defenders;
  c.seed = seed;
  c.with_shots = true;

  const SynthBases bases = SynthBases::standard_five(geom);
  const int B = static_cast<int>(bases.surfaces.rows());
  Rng rng = Rng::split(seed, 0x1ea6);

  // offender style: preferred shot mix, Dirichlet-ish
  Eigen::MatrixXd style(n_offenders, B);
  for (int k = 0; k < n_offenders; ++k) {
    double total = 0.0;
    for (int b = 0; b < B; ++b) {
      style(k, b) = rng.gamma(0.7, 1.0) + 1e-3;
      total += style(k, b);
    }
    style.row(k) /= total;
  }

  c.shot_propensity.resize(n_offenders, B);
  for (int k = 0; k < n_offenders; ++k)
    for (int b = 0; b < B; ++b)
      c.shot_propensity(k, b) =
          -2.2 + 0.9 * std::log(5.0 * style(k, b) + 0.05) + rng.normal(0.0, 0.15);

  c.defender_group.resize(n_defenders);
  for (int j = 0; j < n_defenders; ++j) c.defender_group[j] = j % 3;

  Eigen::MatrixXd freq_group(3, B), contest_group(3, B);
  for (int g = 0; g < 3; ++g)
    for (int b = 0; b < B; ++b) {
      freq_group(g, b) = rng.normal(0.0, 0.4);
      contest_group(g, b) = rng.normal(0.0, 0.3);
    }

  c.freq_suppression.resize(n_defenders, B);
  c.contest_skill.resize(n_defenders, B);
  for (int j = 0; j < n_defenders; ++j)
    for (int b = 0; b < B; ++b) {
      c.freq_suppression(j, b) = freq_group(c.defender_group[j], b) + rng.normal(0.0, 0.15);
      c.contest_skill(j, b) = contest_group(c.defender_group[j], b) + rng.normal(0.0, 0.1);
    }

  const double base_skill[5] = {0.3, -0.1, -0.2, -0.45, -0.5};
  c.shot_skill.resize(n_offenders, B);
  for (int k = 0; k < n_offenders; ++k)
    for (int b = 0; b < B; ++b)
      c.shot_skill(k, b) = base_skill[b % 5] + 0.8 * (style(k, b) - 1.0 / B) + rng.normal(0.0, 0.1);

  c.distance_slope.resize(B);
  for (int b = 0; b < B; ++b) c.distance_slope(b) = std::abs(rng.normal(0.12, 0.04));
  return c;
}

std::pair<Possession, PossessionTruth> simulate_possession(const SynthConfig& config,
                                                           const SynthBases& bases, int index,
                                                           const CourtGeometry& geom) {
  Rng rng = Rng::split(config.seed, static_cast<std::uint64_t>(index));
  const int T = config.frames_per_possession;
  const double dt = 1.0 / config.frame_rate_hz;
  const bool shots = config.with_shots && config.shot_propensity.size() > 0;
  const int B = shots ? static_cast<int>(config.shot_propensity.cols()) : 0;

  Possession p;
  {
    char buf[32];
    std::snprintf(buf, sizeof buf, "synth-%06d", index);
    p.id = buf;
  }
  p.offense_team = 2 * (index % 15);
  p.defense_team = 2 * (index % 15) + 1;
  const std::vector<int> off = sample_distinct(rng, config.n_offenders, 5);
  const std::vector<int> def = sample_distinct(rng, config.n_defenders, 5);
  for (int i = 0; i < 5; ++i) {
    p.offense_ids[i] = off[i];
    p.defense_ids[i] = def[i];
  }

  // anchors: style-weighted around planted regions, pushed apart
  std::array<Point, 5> anchor;
  for (int k = 0; k < 5; ++k) {
    Point best{0, 0};
    double best_sep = -1.0;
    for (int attempt = 0; attempt < 40; ++attempt) {
      Point cand;
      if (shots) {
        Eigen::VectorXd w = config.shot_propensity.row(off[k]).array().exp();
        std::vector<double> wv(w.data(), w.data() + w.size());
        const int b = rng.categorical(wv);
        cand = bases.centers[b];
      } else {
        cand = {rng.uniform(8.0, 40.0), rng.uniform(6.0, 44.0)};
      }
      cand.x += rng.normal(0.0, 2.5);
      cand.y += rng.normal(0.0, 2.5);
      cand = reflect_into(cand, 2.0, 44.0, 2.5, 47.5);
      double sep = 1e9;
      for (int k2 = 0; k2 < k; ++k2) sep = std::min(sep, distance(cand, anchor[k2]));
      if (sep > best_sep) {
        best_sep = sep;
        best = cand;
      }
      if (sep >= 10.0) break;
    }
    anchor[k] = best;
  }

  // hidden matchups: identity start, sticky transitions
  std::vector<std::array<int, 5>> matchups(T);
  for (int j = 0; j < 5; ++j) matchups[0][j] = j;
  for (int t = 1; t < T; ++t) {
    for (int j = 0; j < 5; ++j) {
      const int prev = matchups[t - 1][j];
      if (config.stay_prob >= 1.0 || rng.uniform() < config.stay_prob) {
        matchups[t][j] = prev;
      } else {
        int pick = rng.uniform_int(4);
        if (pick >= prev) ++pick;
        matchups[t][j] = pick;
      }
    }
  }

  // offender paths: mean reversion toward the anchor
  std::vector<std::array<Point, 5>> offense(T);
  for (int k = 0; k < 5; ++k)
    offense[0][k] = reflect_into({anchor[k].x + rng.normal(0.0, 1.0), anchor[k].y + rng.normal(0.0, 1.0)},
                                 0.5, 46.5, 0.5, 49.5);
  const double pull = config.anchor_pull_per_s * dt;
  const double step_sd = config.motion_sd_ft * std::sqrt(dt);
  for (int t = 1; t < T; ++t) {
    for (int k = 0; k < 5; ++k) {
      Point q = offense[t - 1][k];
      q.x += pull * (anchor[k].x - q.x) + rng.normal(0.0, step_sd);
      q.y += pull * (anchor[k].y - q.y) + rng.normal(0.0, step_sd);
      offense[t][k] = reflect_into(q, 0.5, 46.5, 0.5, 49.5);
    }
  }

  // ball: held by one offender, occasional passes with a short flight
  std::vector<int> holder(T);       // slot that owns the ball at each frame
  std::vector<int> handler(T, -1);  // annotation; -1 while the ball is in the air
  const int flight = std::max(1, static_cast<int>(std::lround(config.pass_duration_s *
                                                              config.frame_rate_hz)));
  {
    int cur = 0;
    double furthest = -1.0;
    for (int k = 0; k < 5; ++k) {
      const double d = distance(anchor[k], geom.hoop);
      if (d > furthest) {
        furthest = d;
        cur = k;
      }
    }
    int t = 0;
    while (t < T) {
      const int gap = 1 + static_cast<int>(rng.exponential(config.pass_rate_per_s * dt));
      const int until = std::min(T, t + gap);
      for (int i = t; i < until; ++i) {
        holder[i] = cur;
        handler[i] = cur;
      }
      t = until;
      if (t >= T) break;
      int target = rng.uniform_int(4);
      if (target >= cur) ++target;
      const int land = std::min(T - 1, t + flight - 1);
      for (int i = t; i < land; ++i) {
        holder[i] = -10 - (cur * 5 + target);  // encoded flight from cur to target
        handler[i] = -1;
      }
      holder[land] = target;
      handler[land] = target;
      cur = target;
      t = land + 1;
    }
  }

  PossessionTruth truth;
  truth.possession_id = p.id;
  truth.guard_fractions.setZero();
  for (int t = 0; t < T; ++t)
    for (int j = 0; j < 5; ++j) truth.guard_fractions(j, matchups[t][j]) += 1.0 / T;

  // outcome draw from the frequency model at the realized guard fractions
  int shooter = -1, basis = -1;
  Point shot_loc;
  if (shots) {
    Eigen::MatrixXd logits(5, B);
    for (int k = 0; k < 5; ++k)
      for (int b = 0; b < B; ++b) {
        double l = config.shot_propensity(off[k], b);
        for (int j = 0; j < 5; ++j)
          l += truth.guard_fractions(j, k) * config.freq_suppression(def[j], b);
        logits(k, b) = l;
      }
    std::vector<double> w(1 + 5 * B);
    w[0] = 1.0;
    for (int k = 0; k < 5; ++k)
      for (int b = 0; b < B; ++b) w[1 + k * B + b] = std::exp(logits(k, b));
    const int outcome = rng.categorical(w);
    truth.outcome = outcome;
    if (outcome > 0) {
      shooter = (outcome - 1) / B;
      basis = (outcome - 1) % B;
      truth.shooter_slot = shooter;
      truth.basis = basis;
      truth.shooter_id = off[shooter];
      // sample the shot tile from the basis surface, restricted to tiles
      // where that basis dominates so the design rebuild is consistent
      const int V = geom.tile_count();
      std::vector<double> tw(V, 0.0);
      for (int v = 0; v < V; ++v) {
        int arg = 0;
        double m = bases.surfaces(0, v);
        for (Eigen::Index r = 1; r < bases.surfaces.rows(); ++r)
          if (bases.surfaces(r, v) > m) {
            m = bases.surfaces(r, v);
            arg = static_cast<int>(r);
          }
        if (arg == basis) tw[v] = bases.surfaces(basis, v);
      }
      const int tile = rng.categorical(tw);
      const Point c = geom.tile_center(tile);
      shot_loc = {c.x + rng.uniform(-0.499, 0.499), c.y + rng.uniform(-0.499, 0.499)};

      // glide the shooter into the shot location over the final frames
      const int blend = std::min(T - 1, static_cast<int>(std::lround(0.6 * config.frame_rate_hz)));
      for (int i = 0; i <= blend; ++i) {
        const int t = T - 1 - blend + i;
        const double s = blend > 0 ? static_cast<double>(i) / blend : 1.0;
        offense[t][shooter] = offense[t][shooter] + s * (shot_loc - offense[t][shooter]);
      }
      offense[T - 1][shooter] = shot_loc;
      // the shooter must own the ball at the release
      if (holder[T - 1] != shooter) {
        const int start = std::max(0, T - flight);
        const int from = handler[start] >= 0 ? handler[start] : holder[std::max(0, start - 1)];
        for (int t = start; t < T - 1; ++t) {
          holder[t] = -10 - ((from >= 0 ? from : 0) * 5 + shooter);
          handler[t] = -1;
        }
        holder[T - 1] = shooter;
        handler[T - 1] = shooter;
      }
    }
  }

  // ball positions from the holder / flight encoding
  std::vector<Point> ball(T);
  for (int t = 0; t < T; ++t) {
    if (holder[t] >= 0) {
      ball[t] = offense[t][holder[t]];
    } else {
      const int code = -(holder[t] + 10);
      const int from = code / 5, to = code % 5;
      int begin = t;
      while (begin > 0 && holder[begin - 1] == holder[t]) --begin;
      int end = t;
      while (end + 1 < T && holder[end + 1] == holder[t]) ++end;
      const double s = (end > begin) ? static_cast<double>(t - begin + 1) / (end - begin + 2) : 0.5;
      ball[t] = offense[t][from] + s * (offense[t][to] - offense[t][from]);
    }
  }

  // defenders: placement rule plus isotropic noise
  p.frames.resize(T);
  for (int t = 0; t < T; ++t) {
    TrackingFrame& f = p.frames[t];
    f.t = t * dt;
    f.offense = offense[t];
    f.ball = ball[t];
    f.ball_handler = handler[t] >= 0 ? std::optional<int>(handler[t]) : std::nullopt;
    for (int j = 0; j < 5; ++j) {
      const int k = matchups[t][j];
      const Point mu = config.w_offender * f.offense[k] + config.w_ball * f.ball +
                       config.w_hoop * geom.hoop;
      Point d = mu;
      for (int attempt = 0; attempt < 100; ++attempt) {
        d = {mu.x + rng.normal(0.0, config.defender_noise_ft),
             mu.y + rng.normal(0.0, config.defender_noise_ft)};
        if (geom.contains(d)) break;
      }
      if (!geom.contains(d)) d = reflect_into(d, 0.0, geom.depth_ft, 0.0, geom.width_ft);
      f.defense[j] = d;
    }
  }

  if (shooter >= 0) {
    // make/miss from the efficiency model at the realized contest distance
    int guard = -1;
    double best = 1e18;
    for (int j = 0; j < 5; ++j) {
      if (matchups[T - 1][j] == shooter) {
        const double d = distance(p.frames[T - 1].defense[j], shot_loc);
        if (guard < 0 || d < best) {
          guard = j;
          best = d;
        }
      }
    }
    if (guard < 0) {
      for (int j = 0; j < 5; ++j) {
        const double d = distance(p.frames[T - 1].defense[j], shot_loc);
        if (d < best) {
          guard = j;
          best = d;
        }
      }
    }
    const double dist = std::min(best, config.distance_cap_ft);
    const double logit = config.shot_skill(off[shooter], basis) +
                         config.contest_skill(def[guard], basis) +
                         config.distance_slope(basis) * dist;
    const bool made = rng.uniform() < 1.0 / (1.0 + std::exp(-logit));

    ShotEvent shot;
    shot.shooter = shooter;
    shot.location = shot_loc;
    shot.made = made;
    shot.frame_index = T - 1;
    p.shot = shot;

    truth.defender_id = def[guard];
    truth.defender_distance_ft = dist;
    truth.made = made;
  }

  if (config.record_matchups) truth.matchups = std::move(matchups);
  return {std::move(p), std::move(truth)};
}

SynthResult simulate_corpus(const SynthConfig& config, const CourtGeometry& geom) {
  config.validate();
  SynthResult out;
  out.ledger.config = config;
  out.ledger.bases = SynthBases::standard_five(geom);
  out.possessions.reserve(config.n_possessions);
  out.ledger.possessions.reserve(config.n_possessions);
  for (int i = 0; i < config.n_possessions; ++i) {
    auto [p, truth] = simulate_possession(config, out.ledger.bases, i, geom);
    out.possessions.push_back(std::move(p));
    out.ledger.possessions.push_back(std::move(truth));
  }
  return out;
}

void GroundTruthLedger::save(const std::string& path) const {
  json j;
  json cfg;
  cfg["w_offender"] = config.w_offender;
  cfg["w_ball"] = config.w_ball;
  cfg["w_hoop"] = config.w_hoop;
  cfg["stay_prob"] = config.stay_prob;
  cfg["defender_noise_ft"] = config.defender_noise_ft;
  cfg["n_possessions"] = config.n_possessions;
  cfg["frames_per_possession"] = config.frames_per_possession;
  cfg["frame_rate_hz"] = config.frame_rate_hz;
  cfg["seed"] = config.seed;
  cfg["n_offenders"] = config.n_offenders;
  cfg["n_defenders"] = config.n_defenders;
  cfg["with_shots"] = config.with_shots;
  cfg["record_matchups"] = config.record_matchups;
  cfg["shot_propensity"] = mat_to_json(config.shot_propensity);
  cfg["freq_suppression"] = mat_to_json(config.freq_suppression);
  cfg["shot_skill"] = mat_to_json(config.shot_skill);
  cfg["contest_skill"] = mat_to_json(config.contest_skill);
  cfg["distance_slope"] = vec_to_json(config.distance_slope);
  cfg["defender_group"] = config.defender_group;
  cfg["distance_cap_ft"] = config.distance_cap_ft;
  j["config"] = std::move(cfg);

  json jb;
  jb["surfaces"] = mat_to_json(bases.surfaces);
  jb["point_values"] = bases.point_values;
  json centers = json::array();
  for (const auto& c : bases.centers) centers.push_back({c.x, c.y});
  jb["centers"] = std::move(centers);
  j["bases"] = std::move(jb);

  json jp = json::array();
  for (const auto& t : possessions) {
    json e;
    e["possession_id"] = t.possession_id;
    e["outcome"] = t.outcome;
    e["shooter_slot"] = t.shooter_slot;
    e["basis"] = t.basis;
    e["shooter_id"] = t.shooter_id;
    e["defender_id"] = t.defender_id;
    e["defender_distance_ft"] = t.defender_distance_ft;
    e["made"] = t.made;
    json z = json::array();
    for (int r = 0; r < 5; ++r) {
      json row = json::array();
      for (int c = 0; c < 5; ++c) row.push_back(t.guard_fractions(r, c));
      z.push_back(std::move(row));
    }
    e["guard_fractions"] = std::move(z);
    if (!t.matchups.empty()) {
      json m = json::array();
      for (const auto& frame : t.matchups) m.push_back(frame);
      e["matchups"] = std::move(m);
    }
    jp.push_back(std::move(e));
  }
  j["possessions"] = std::move(jp);

  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open ledger for write: " + path);
  f << j.dump() << '\n';
}

GroundTruthLedger GroundTruthLedger::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open ledger: " + path);
  json j;
  f >> j;

  GroundTruthLedger led;
  const json& cfg = j.at("config");
  SynthConfig& c = led.config;
  c.w_offender = cfg.at("w_offender").get<double>();
  c.w_ball = cfg.at("w_ball").get<double>();
  c.w_hoop = cfg.at("w_hoop").get<double>();
  c.stay_prob = cfg.at("stay_prob").get<double>();
  c.defender_noise_ft = cfg.at("defender_noise_ft").get<double>();
  c.n_possessions = cfg.at("n_possessions").get<int>();
  c.frames_per_possession = cfg.at("frames_per_possession").get<int>();
  c.frame_rate_hz = cfg.at("frame_rate_hz").get<double>();
  c.seed = cfg.at("seed").get<std::uint64_t>();
  c.n_offenders = cfg.at("n_offenders").get<int>();
  c.n_defenders = cfg.at("n_defenders").get<int>();
  c.with_shots = cfg.at("with_shots").get<bool>();
  c.record_matchups = cfg.at("record_matchups").get<bool>();
  c.shot_propensity = json_to_mat(cfg.at("shot_propensity"));
  c.freq_suppression = json_to_mat(cfg.at("freq_suppression"));
  c.shot_skill = json_to_mat(cfg.at("shot_skill"));
  c.contest_skill = json_to_mat(cfg.at("contest_skill"));
  c.distance_slope = json_to_vec(cfg.at("distance_slope"));
  c.defender_group = cfg.at("defender_group").get<std::vector<int>>();
  c.distance_cap_ft = cfg.at("distance_cap_ft").get<double>();

  const json& jb = j.at("bases");
  led.bases.surfaces = json_to_mat(jb.at("surfaces"));
  led.bases.point_values = jb.at("point_values").get<std::vector<int>>();
  for (const auto& cc : jb.at("centers"))
    led.bases.centers.push_back({cc.at(0).get<double>(), cc.at(1).get<double>()});

  for (const auto& e : j.at("possessions")) {
    PossessionTruth t;
    t.possession_id = e.at("possession_id").get<std::string>();
    t.outcome = e.at("outcome").get<int>();
    t.shooter_slot = e.at("shooter_slot").get<int>();
    t.basis = e.at("basis").get<int>();
    t.shooter_id = e.at("shooter_id").get<int>();
    t.defender_id = e.at("defender_id").get<int>();
    t.defender_distance_ft = e.at("defender_distance_ft").get<double>();
    t.made = e.at("made").get<bool>();
    for (int r = 0; r < 5; ++r)
      for (int col = 0; col < 5; ++col)
        t.guard_fractions(r, col) = e.at("guard_fractions").at(r).at(col).get<double>();
    if (e.contains("matchups"))
      for (const auto& frame : e.at("matchups"))
        t.matchups.push_back({frame.at(0).get<int>(), frame.at(1).get<int>(),
                              frame.at(2).get<int>(), frame.at(3).get<int>(),
                              frame.at(4).get<int>()});
    led.possessions.push_back(std::move(t));
  }
  return led;
}

}  // namespace hoopdef
