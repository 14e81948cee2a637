#include "hoopdef/pipeline.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "hoopdef/chart.hpp"
#include "hoopdef/csv.hpp"
#include "hoopdef/hash.hpp"
#include "hoopdef/jsonl.hpp"
#include "hoopdef/lgcp.hpp"
#include "hoopdef/matchup.hpp"
#include "hoopdef/metrics.hpp"
#include "hoopdef/nmf.hpp"
#include "hoopdef/outcomes.hpp"
#include "hoopdef/synth.hpp"

namespace hoopdef {

namespace fs = std::filesystem;
using nlohmann::json;

const char* stage_name(Stage s) {
  switch (s) {
    case Stage::kSimulate: return "simulate";
    case Stage::kIngest: return "ingest";
    case Stage::kMatchups: return "matchups";
    case Stage::kMetrics: return "metrics";
    case Stage::kSurfaces: return "surfaces";
    case Stage::kBasis: return "basis";
    case Stage::kSimilarity: return "similarity";
    case Stage::kFrequency: return "frequency";
    case Stage::kEfficiency: return "efficiency";
    case Stage::kCrossval: return "crossval";
    case Stage::kReport: return "report";
  }
  return "?";
}

PipelineConfig PipelineConfig::load_file(const std::string& path) {
  return from_config(KeyValueConfig::parse_file(path));
}

PipelineConfig PipelineConfig::from_config(KeyValueConfig raw) {
  PipelineConfig c;
  c.out_dir = raw.get_string("out", "out");
  c.input_path = raw.get_string("input.tracking", "");
  c.seed = static_cast<std::uint64_t>(raw.get_int64("seed", 7));
  c.threads = raw.get_int("threads", 1, 1, 256);
  if (!c.input_path.empty() && !fs::exists(c.input_path))
    throw std::runtime_error("input.tracking does not exist: " + c.input_path);
  // eagerly range-check every tunable so bad configs fail at load
  raw.get_int("simulate.possessions", 500, 0, 2000000);
  raw.get_int("simulate.frames", 150, 1, 100000);
  raw.get_double("simulate.rate_hz", 25.0, 1.0, 100.0);
  raw.get_int("simulate.offenders", 25, 5, 5000);
  raw.get_int("simulate.defenders", 25, 5, 5000);
  raw.get_double("ingest.min_duration_s", 5.0, 0.0, 60.0);
  raw.get_double("matchup.tol", 1e-6, 0.0, 1.0);
  raw.get_int("matchup.max_iters", 100, 1, 10000);
  raw.get_double("lgcp.marginal_var", 3.0, 1e-6, 1000.0);
  raw.get_double("lgcp.ls_shape", 4.0, 1e-3, 1000.0);
  raw.get_double("lgcp.ls_scale", 2.0, 1e-3, 1000.0);
  raw.get_int("lgcp.sweeps", 2, 1, 100);
  raw.get_int("lgcp.lengthscale_samples", 100, 0, 100000);
  raw.get_int("nmf.rank", 6, 2, 64);
  raw.get_int("nmf.restarts", 5, 1, 100);
  raw.get_int("similarity.knn", 10, 1, 1000);
  raw.get_double("similarity.zeta", 0.9, 0.0, 0.999999);
  raw.get_double("outcomes.distance_cap_ft", 6.0, 0.1, 94.0);
  raw.get_double("outcomes.freq_off_var", 1.0, 1e-9, 1e6);
  raw.get_double("outcomes.freq_def_var", 0.01, 1e-9, 1e6);
  raw.get_int("efficiency.chains", 4, 1, 64);
  raw.get_int("efficiency.samples", 2000, 10, 1000000);
  raw.get_int("crossval.folds", 10, 2, 1000);
  c.raw = std::move(raw);
  return c;
}

namespace {

// ---------------------------------------------------------------------------
// artifact helpers

std::uint64_t file_hash(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) return 0;
  std::uint64_t h = 0xCBF29CE484222325ULL;
  char buf[1 << 16];
  while (f.read(buf, sizeof buf) || f.gcount() > 0)
    h = fnv1a64(std::string_view(buf, static_cast<std::size_t>(f.gcount())), h);
  return h;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << text;
}

json load_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  json j;
  f >> j;
  return j;
}

json mat_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json r = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) r.push_back(m(i, c));
    rows.push_back(std::move(r));
  }
  return rows;
}

Eigen::MatrixXd mat_from_json(const json& j) {
  if (j.empty()) return {};
  Eigen::MatrixXd m(j.size(), j.at(0).size());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(i, c) = j.at(i).at(c).get<double>();
  return m;
}

// ---------------------------------------------------------------------------
// shared in-memory state so consecutive stages skip disk round trips

struct Context {
  const PipelineConfig& cfg;
  CourtGeometry geom;
  fs::path out;
  json manifest;

  std::optional<std::vector<Possession>> corpus;
  std::optional<MatchupModel> model;
  std::optional<std::vector<MatchupSummary>> summaries;
  std::optional<std::pair<std::vector<int>, Eigen::MatrixXd>> shooter_surfaces;
  std::optional<ShotBasis> basis;
  std::optional<DefenderGroups> groups;
  std::optional<OffenderGraph> graph;
  std::optional<FrequencyPosterior> freq;
  std::optional<EfficiencyPosterior> eff;

  std::map<std::string, std::string> stage_dir;  // resolved artifact dirs

  explicit Context(const PipelineConfig& c) : cfg(c), out(c.out_dir) {}

  std::string dir_of(const std::string& stage) const {
    const auto it = stage_dir.find(stage);
    if (it == stage_dir.end()) throw std::runtime_error("stage not yet run: " + stage);
    return it->second;
  }

  std::vector<Possession>& load_corpus() {
    if (!corpus) {
      JsonlReadOptions opts;  // canonical artifact is already admitted
      opts.normalize = true;
      opts.admit = false;
      corpus = read_tracking_jsonl_file(dir_of("ingest") + "/corpus.jsonl", geom, opts, nullptr);
    }
    return *corpus;
  }

  MatchupModel& load_model() {
    if (!model) {
      const json j = load_json(dir_of("matchups") + "/matchup_model.json");
      MatchupModel m;
      m.w_offender = j.at("w_offender").get<double>();
      m.w_ball = j.at("w_ball").get<double>();
      m.w_hoop = j.at("w_hoop").get<double>();
      m.emission_var = j.at("emission_var").get<double>();
      m.stay_prob = j.at("stay_prob").get<double>();
      model = m;
    }
    return *model;
  }

  std::vector<MatchupSummary>& load_summaries() {
    if (!summaries) {
      std::vector<MatchupSummary> out_s;
      std::ifstream f(dir_of("matchups") + "/guard_fractions.jsonl");
      if (!f) throw std::runtime_error("missing guard_fractions.jsonl");
      std::string line;
      while (std::getline(f, line)) {
        if (line.empty()) continue;
        const json j = json::parse(line);
        MatchupSummary s;
        s.possession_id = j.at("possession_id").get<std::string>();
        for (int r = 0; r < 5; ++r)
          for (int c = 0; c < 5; ++c) s.guard_fractions(r, c) = j.at("z").at(r).at(c).get<double>();
        s.has_shot = j.at("has_shot").get<bool>();
        if (s.has_shot)
          for (int r = 0; r < 5; ++r) s.release_guard_weights(r) = j.at("release").at(r).get<double>();
        else
          s.release_guard_weights.setZero();
        out_s.push_back(std::move(s));
      }
      summaries = std::move(out_s);
    }
    return *summaries;
  }

  std::pair<std::vector<int>, Eigen::MatrixXd>& load_surfaces() {
    if (!shooter_surfaces) {
      const json j = load_json(dir_of("surfaces") + "/surfaces.json");
      shooter_surfaces = {j.at("player_ids").get<std::vector<int>>(),
                          mat_from_json(j.at("normalized"))};
    }
    return *shooter_surfaces;
  }

  ShotBasis& load_basis() {
    if (!basis) {
      const json j = load_json(dir_of("basis") + "/basis.json");
      ShotBasis b;
      b.bases = mat_from_json(j.at("bases"));
      b.loadings = mat_from_json(j.at("loadings"));
      b.rank = j.at("rank").get<int>();
      if (!j.at("residual_index").is_null()) b.residual_index = j.at("residual_index").get<int>();
      b.kl_divergence = j.at("kl_divergence").get<double>();
      basis = std::move(b);
    }
    return *basis;
  }

  DefenderGroups& load_groups() {
    if (!groups) {
      const json j = load_json(dir_of("similarity") + "/similarity.json");
      DefenderGroups g;
      g.defender_ids = j.at("defender_ids").get<std::vector<int>>();
      g.group_of = j.at("group_of").get<std::vector<int>>();
      g.time_in_basis = mat_from_json(j.at("time_in_basis"));
      g.pc_scores = mat_from_json(j.at("pc_scores"));
      groups = std::move(g);
    }
    return *groups;
  }

  OffenderGraph& load_graph() {
    if (!graph) {
      const json j = load_json(dir_of("similarity") + "/similarity.json");
      OffenderGraph g;
      g.player_ids = j.at("graph_player_ids").get<std::vector<int>>();
      g.neighbors = j.at("neighbors").get<std::vector<std::vector<int>>>();
      const auto cv = j.at("cond_var").get<std::vector<double>>();
      g.cond_var = Eigen::Map<const Eigen::VectorXd>(cv.data(), cv.size());
      g.discount = j.at("discount").get<double>();
      g.var_scale = j.at("var_scale").get<double>();
      graph = std::move(g);
    }
    return *graph;
  }
};

// configuration keys that feed each stage's cache key
const std::map<std::string, std::vector<std::string>>& stage_config_keys() {
  static const std::map<std::string, std::vector<std::string>> keys = {
      {"simulate",
       {"seed", "simulate.possessions", "simulate.frames", "simulate.rate_hz",
        "simulate.offenders", "simulate.defenders", "simulate.stay_prob",
        "simulate.defender_noise_ft", "simulate.record_matchups"}},
      {"ingest", {"input.tracking", "ingest.min_duration_s"}},
      {"matchups", {"matchup.tol", "matchup.max_iters", "threads"}},
      {"metrics", {}},
      {"surfaces",
       {"seed", "lgcp.marginal_var", "lgcp.ls_shape", "lgcp.ls_scale", "lgcp.sweeps",
        "lgcp.lengthscale_samples"}},
      {"basis", {"seed", "nmf.rank", "nmf.restarts"}},
      {"similarity", {"similarity.knn", "similarity.zeta", "similarity.var_scale"}},
      {"frequency",
       {"outcomes.freq_off_var", "outcomes.freq_def_var", "outcomes.freq_off_group_var",
        "outcomes.freq_def_group_var"}},
      {"efficiency",
       {"seed", "outcomes.distance_cap_ft", "outcomes.contest_var", "outcomes.slope_var",
        "efficiency.chains", "efficiency.samples"}},
      {"crossval", {"seed", "crossval.folds", "crossval.mcmc", "outcomes.distance_cap_ft"}},
      {"report", {"outcomes.distance_cap_ft"}},
  };
  return keys;
}

const std::map<std::string, std::vector<std::string>>& stage_deps() {
  static const std::map<std::string, std::vector<std::string>> deps = {
      {"simulate", {}},
      {"ingest", {"simulate"}},  // only when no external input is given
      {"matchups", {"ingest"}},
      {"metrics", {"ingest", "matchups"}},
      {"surfaces", {"ingest"}},
      {"basis", {"surfaces"}},
      {"similarity", {"ingest", "matchups", "basis"}},
      {"frequency", {"ingest", "matchups", "basis", "similarity"}},
      {"efficiency", {"ingest", "matchups", "basis", "similarity"}},
      {"crossval", {"ingest", "matchups", "basis", "similarity"}},
      {"report", {"ingest", "matchups", "metrics", "basis", "similarity", "frequency",
                  "efficiency"}},
  };
  return deps;
}

LgcpConfig lgcp_config(const PipelineConfig& cfg) {
  LgcpConfig c;
  c.marginal_var = cfg.raw.get_double("lgcp.marginal_var", 3.0, 1e-6, 1000.0);
  c.ls_shape = cfg.raw.get_double("lgcp.ls_shape", 4.0, 1e-3, 1000.0);
  c.ls_scale = cfg.raw.get_double("lgcp.ls_scale", 2.0, 1e-3, 1000.0);
  c.sweeps = cfg.raw.get_int("lgcp.sweeps", 2, 1, 100);
  c.lengthscale_samples = cfg.raw.get_int("lgcp.lengthscale_samples", 100, 0, 100000);
  c.seed = cfg.seed;
  return c;
}

FrequencyPriors freq_priors(const PipelineConfig& cfg) {
  FrequencyPriors p;
  p.off_var = cfg.raw.get_double("outcomes.freq_off_var", 1.0, 1e-9, 1e6);
  p.def_var = cfg.raw.get_double("outcomes.freq_def_var", 0.01, 1e-9, 1e6);
  p.off_group_var = cfg.raw.get_double("outcomes.freq_off_group_var", 1.0, 1e-9, 1e6);
  p.def_group_var = cfg.raw.get_double("outcomes.freq_def_group_var", 0.01, 1e-9, 1e6);
  return p;
}

EfficiencyPriors eff_priors(const PipelineConfig& cfg) {
  EfficiencyPriors p;
  p.contest_var = cfg.raw.get_double("outcomes.contest_var", 0.01, 1e-9, 1e6);
  p.skill_group_var = cfg.raw.get_double("outcomes.skill_group_var", 1.0, 1e-9, 1e6);
  p.contest_group_var = cfg.raw.get_double("outcomes.contest_group_var", 1.0, 1e-9, 1e6);
  p.slope_var = cfg.raw.get_double("outcomes.slope_var", 1.0, 1e-9, 1e6);
  return p;
}

// ---------------------------------------------------------------------------
// stage bodies; each returns the list of files it wrote (paths relative
// to its artifact directory)

std::vector<std::string> run_simulate(Context& ctx, const std::string& dir) {
  const auto& r = ctx.cfg.raw;
  SynthConfig sc = SynthConfig::league(r.get_int("simulate.offenders", 25, 5, 5000),
                                       r.get_int("simulate.defenders", 25, 5, 5000), ctx.cfg.seed,
                                       ctx.geom);
  sc.n_possessions = r.get_int("simulate.possessions", 500, 0, 2000000);
  sc.frames_per_possession = r.get_int("simulate.frames", 150, 1, 100000);
  sc.frame_rate_hz = r.get_double("simulate.rate_hz", 25.0, 1.0, 100.0);
  sc.stay_prob = r.get_double("simulate.stay_prob", 0.98, 1e-6, 1.0);
  sc.defender_noise_ft = r.get_double("simulate.defender_noise_ft", 2.0, 0.0, 50.0);
  sc.record_matchups = r.get_bool("simulate.record_matchups", false);
  sc.seed = ctx.cfg.seed;

  SynthResult res = simulate_corpus(sc, ctx.geom);
  write_tracking_jsonl_file(dir + "/corpus.jsonl", res.possessions);
  res.ledger.save(dir + "/ledger.json");
  ctx.corpus = std::move(res.possessions);
  return {"corpus.jsonl", "ledger.json"};
}

std::vector<std::string> run_ingest(Context& ctx, const std::string& dir) {
  const std::string source = ctx.cfg.input_path.empty()
                                 ? ctx.dir_of("simulate") + "/corpus.jsonl"
                                 : ctx.cfg.input_path;
  JsonlReadOptions opts;
  opts.min_duration_s = ctx.cfg.raw.get_double("ingest.min_duration_s", 5.0, 0.0, 60.0);
  std::vector<std::string> warnings;
  std::vector<Possession> corpus = read_tracking_jsonl_file(source, ctx.geom, opts, &warnings);
  write_tracking_jsonl_file(dir + "/corpus.jsonl", corpus);

  json stats;
  stats["possessions"] = corpus.size();
  long frames = 0, shots = 0;
  for (const auto& p : corpus) {
    frames += static_cast<long>(p.frames.size());
    shots += p.shot ? 1 : 0;
  }
  stats["frames"] = frames;
  stats["shots"] = shots;
  stats["warnings"] = warnings;
  write_text(dir + "/ingest_stats.json", stats.dump(2) + "\n");
  ctx.corpus = std::move(corpus);
  return {"corpus.jsonl", "ingest_stats.json"};
}

std::vector<std::string> run_matchups(Context& ctx, const std::string& dir) {
  auto& corpus = ctx.load_corpus();
  EmOptions opts;
  opts.rel_tol = ctx.cfg.raw.get_double("matchup.tol", 1e-6, 0.0, 1.0);
  opts.max_iters = ctx.cfg.raw.get_int("matchup.max_iters", 100, 1, 10000);
  opts.threads = ctx.cfg.threads;
  const EmFit fit = fit_em(corpus, opts, ctx.geom);

  json j;
  j["w_offender"] = fit.model.w_offender;
  j["w_ball"] = fit.model.w_ball;
  j["w_hoop"] = fit.model.w_hoop;
  j["emission_var"] = fit.model.emission_var;
  j["stay_prob"] = fit.model.stay_prob;
  j["iterations"] = fit.iterations;
  j["converged"] = fit.converged;
  j["log_likelihood_trace"] = fit.log_likelihood;
  write_text(dir + "/matchup_model.json", j.dump(2) + "\n");

  const auto summaries = compute_matchup_summaries(corpus, fit.model, ctx.geom, ctx.cfg.threads);
  std::ofstream f(dir + "/guard_fractions.jsonl");
  for (const auto& s : summaries) {
    json e;
    e["possession_id"] = s.possession_id;
    json z = json::array();
    for (int r = 0; r < 5; ++r) {
      json row = json::array();
      for (int c = 0; c < 5; ++c) row.push_back(s.guard_fractions(r, c));
      z.push_back(std::move(row));
    }
    e["z"] = std::move(z);
    e["has_shot"] = s.has_shot;
    if (s.has_shot) {
      json rel = json::array();
      for (int r = 0; r < 5; ++r) rel.push_back(s.release_guard_weights(r));
      e["release"] = std::move(rel);
    }
    f << e.dump() << '\n';
  }
  ctx.model = fit.model;
  ctx.summaries = summaries;
  return {"matchup_model.json", "guard_fractions.jsonl"};
}

std::vector<std::string> run_metrics(Context& ctx, const std::string& dir) {
  auto& corpus = ctx.load_corpus();
  const auto& model = ctx.load_model();
  const auto attention = attention_scores(corpus, model, ctx.geom, ctx.cfg.threads);
  CsvWriter att;
  att.field("player_id").field("metric").field("value");
  att.endrow();
  for (const auto& a : attention) {
    att.field(a.player_id).field("attention_on_ball").field(a.on_ball);
    att.endrow();
    att.field(a.player_id).field("attention_off_ball").field(a.off_ball);
    att.endrow();
  }
  att.save(dir + "/attention.csv");

  const auto entropy = defensive_entropy(corpus, ctx.load_summaries());
  CsvWriter ent;
  ent.field("player_id").field("metric").field("value");
  ent.endrow();
  for (const auto& e : entropy.players) {
    ent.field(e.player_id).field("defensive_entropy").field(e.mean_entropy);
    ent.endrow();
  }
  for (const auto& t : entropy.teams) {
    ent.field(t.team_id).field("team_entropy").field(t.defensive_entropy);
    ent.endrow();
    ent.field(t.team_id).field("induced_entropy").field(t.induced_entropy);
    ent.endrow();
  }
  ent.save(dir + "/entropy.csv");
  return {"attention.csv", "entropy.csv"};
}

std::vector<std::string> run_surfaces(Context& ctx, const std::string& dir) {
  auto& corpus = ctx.load_corpus();
  const auto [ids, counts] = collect_shot_counts(corpus, ctx.geom);
  const auto surfaces = fit_all_surfaces(ids, counts, lgcp_config(ctx.cfg), ctx.geom,
                                         ctx.cfg.threads);

  Eigen::MatrixXd normalized(surfaces.size(), ctx.geom.tile_count());
  for (std::size_t i = 0; i < surfaces.size(); ++i)
    normalized.row(static_cast<Eigen::Index>(i)) = surfaces[i].normalized.transpose();

  json j;
  j["player_ids"] = ids;
  j["normalized"] = mat_json(normalized);
  write_text(dir + "/surfaces.json", j.dump() + "\n");

  // csv with a grid metadata header line
  std::ostringstream csv;
  csv << "# depth_ft=47 width_ft=50 tile_ft=1 order=row_major\n";
  csv << "player_id";
  for (int v = 0; v < ctx.geom.tile_count(); ++v) csv << ",t" << v;
  csv << "\n";
  for (std::size_t i = 0; i < surfaces.size(); ++i) {
    csv << ids[i];
    for (int v = 0; v < ctx.geom.tile_count(); ++v) csv << ',' << fmt_double(normalized(i, v));
    csv << "\n";
  }
  write_text(dir + "/surfaces.csv", csv.str());

  CsvWriter ls;
  ls.field("player_id").field("lengthscale_x").field("lengthscale_y").field("mh_acceptance");
  ls.endrow();
  for (const auto& s : surfaces) {
    ls.field(s.player_id).field(s.lengthscale[0]).field(s.lengthscale[1]).field(s.mh_acceptance);
    ls.endrow();
  }
  ls.save(dir + "/lengthscales.csv");

  ctx.shooter_surfaces = {ids, normalized};
  return {"surfaces.json", "surfaces.csv", "lengthscales.csv"};
}

std::vector<std::string> run_basis(Context& ctx, const std::string& dir) {
  const auto& [ids, normalized] = ctx.load_surfaces();
  NmfOptions opts;
  opts.rank = ctx.cfg.raw.get_int("nmf.rank", 6, 2, 64);
  opts.restarts = ctx.cfg.raw.get_int("nmf.restarts", 5, 1, 100);
  opts.seed = ctx.cfg.seed;
  const ShotBasis full = fit_shot_basis(normalized, opts);
  const ShotBasis retained = identify_and_drop_residual(full);

  json j;
  j["rank"] = retained.rank;
  j["residual_index"] = full.rank > retained.rank ? json(*retained.residual_index) : json();
  j["kl_divergence"] = retained.kl_divergence;
  j["bases"] = mat_json(retained.bases);
  j["loadings"] = mat_json(retained.loadings);
  j["player_ids"] = ids;
  j["point_values"] = basis_point_values(retained, ctx.geom);
  write_text(dir + "/basis.json", j.dump() + "\n");

  CsvWriter w;
  w.field("player_id");
  for (int b = 0; b < retained.rank; ++b) w.field("basis_" + std::to_string(b));
  w.endrow();
  for (std::size_t i = 0; i < ids.size(); ++i) {
    w.field(ids[i]);
    for (int b = 0; b < retained.rank; ++b)
      w.field(retained.loadings(static_cast<Eigen::Index>(i), b));
    w.endrow();
  }
  w.save(dir + "/loadings.csv");

  std::vector<std::string> outputs = {"basis.json", "loadings.csv"};
  for (int b = 0; b < retained.rank; ++b) {
    const std::string name = "basis_" + std::to_string(b) + ".svg";
    write_text(dir + "/" + name,
               emit_surface_heatmap(retained.bases.row(b).transpose(),
                                    "shot type " + std::to_string(b), ctx.geom));
    outputs.push_back(name);
  }
  ctx.basis = retained;
  return outputs;
}

std::vector<std::string> run_similarity(Context& ctx, const std::string& dir) {
  auto& corpus = ctx.load_corpus();
  const auto& model = ctx.load_model();
  const auto& basis = ctx.load_basis();
  const auto [def_ids, profile] =
      defender_time_in_basis(corpus, model, basis, ctx.geom, ctx.cfg.threads);
  const DefenderGroups groups = pca_kmeans_groups(def_ids, profile, 3, ctx.cfg.seed);

  const auto& [off_ids, loadings] = ctx.load_surfaces();
  const int knn = ctx.cfg.raw.get_int("similarity.knn", 10, 1, 1000);
  const double zeta = ctx.cfg.raw.get_double("similarity.zeta", 0.9, 0.0, 0.999999);
  const double var_scale = ctx.cfg.raw.get_double("similarity.var_scale", 1.0, 1e-9, 1e6);
  const OffenderGraph graph = build_offender_graph(off_ids, basis.loadings, knn, zeta, var_scale);
  const CarCheck check = car_precision_check(graph);

  json j;
  j["defender_ids"] = groups.defender_ids;
  j["group_of"] = groups.group_of;
  j["time_in_basis"] = mat_json(groups.time_in_basis);
  j["pc_scores"] = mat_json(groups.pc_scores);
  j["graph_player_ids"] = graph.player_ids;
  j["neighbors"] = graph.neighbors;
  std::vector<double> cv(graph.cond_var.data(), graph.cond_var.data() + graph.cond_var.size());
  j["cond_var"] = cv;
  j["discount"] = graph.discount;
  j["var_scale"] = graph.var_scale;
  j["car_min_eigenvalue"] = check.min_eigenvalue;
  j["car_max_asymmetry"] = check.max_asymmetry;
  write_text(dir + "/similarity.json", j.dump() + "\n");

  CsvWriter g;
  g.field("defender_id").field("group").field("pc1").field("pc2");
  g.endrow();
  for (std::size_t i = 0; i < groups.defender_ids.size(); ++i) {
    g.field(groups.defender_ids[i])
        .field(groups.group_of[i])
        .field(groups.pc_scores(static_cast<Eigen::Index>(i), 0))
        .field(groups.pc_scores(static_cast<Eigen::Index>(i), 1));
    g.endrow();
  }
  g.save(dir + "/groups.csv");

  CsvWriter e;
  e.field("player_a").field("player_b");
  e.endrow();
  for (int a = 0; a < graph.size(); ++a)
    for (int b : graph.neighbors[a])
      if (graph.player_ids[a] < graph.player_ids[b]) {
        e.field(graph.player_ids[a]).field(graph.player_ids[b]);
        e.endrow();
      }
  e.save(dir + "/edges.csv");

  ctx.groups = groups;
  ctx.graph = graph;
  return {"similarity.json", "groups.csv", "edges.csv"};
}

void write_coef_csv(const std::string& path, const std::vector<int>& ids,
                    const Eigen::MatrixXd& mean, const Eigen::MatrixXd& sd) {
  CsvWriter w;
  w.field("player_id").field("basis").field("mean").field("sd").field("rank");
  w.endrow();
  for (int b = 0; b < mean.cols(); ++b) {
    std::vector<int> order(ids.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int x, int y) { return mean(x, b) < mean(y, b); });
    std::vector<int> rank(ids.size());
    for (std::size_t r = 0; r < order.size(); ++r) rank[order[r]] = static_cast<int>(r) + 1;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      w.field(ids[i])
          .field(b)
          .field(mean(static_cast<Eigen::Index>(i), b))
          .field(sd(static_cast<Eigen::Index>(i), b))
          .field(rank[i]);
      w.endrow();
    }
  }
  w.save(path);
}

std::vector<std::string> run_frequency(Context& ctx, const std::string& dir) {
  auto& corpus = ctx.load_corpus();
  const FrequencyDesign design =
      build_frequency_design(corpus, ctx.load_summaries(), ctx.load_basis(), ctx.geom);
  const FrequencyPosterior post =
      fit_frequency_variational(design, freq_priors(ctx.cfg), ctx.load_groups());

  write_coef_csv(dir + "/frequency_offense.csv", post.offender_ids, post.off_coef, post.off_sd);
  write_coef_csv(dir + "/frequency_defense.csv", post.defender_ids, post.def_coef, post.def_sd);
  json j;
  j["offender_ids"] = post.offender_ids;
  j["defender_ids"] = post.defender_ids;
  j["defender_group"] = post.defender_group;
  j["off_coef"] = mat_json(post.off_coef);
  j["off_sd"] = mat_json(post.off_sd);
  j["def_coef"] = mat_json(post.def_coef);
  j["def_sd"] = mat_json(post.def_sd);
  std::vector<double> om(post.off_mean.data(), post.off_mean.data() + post.off_mean.size());
  j["off_mean"] = om;
  j["def_group_mean"] = mat_json(post.def_group_mean);
  j["elbo_trace"] = post.elbo_trace;
  j["n_bases"] = post.n_bases;
  write_text(dir + "/frequency_posterior.json", j.dump() + "\n");
  ctx.freq = post;
  return {"frequency_offense.csv", "frequency_defense.csv", "frequency_posterior.json"};
}

std::vector<std::string> run_efficiency(Context& ctx, const std::string& dir) {
  auto& corpus = ctx.load_corpus();
  std::vector<std::string> warnings;
  const EfficiencyDesign design = build_efficiency_design(
      corpus, ctx.load_summaries(), ctx.load_basis(), ctx.geom,
      ctx.cfg.raw.get_double("outcomes.distance_cap_ft", 6.0, 0.1, 94.0), &warnings);
  McmcOptions mcmc;
  mcmc.chains = ctx.cfg.raw.get_int("efficiency.chains", 4, 1, 64);
  mcmc.samples = ctx.cfg.raw.get_int("efficiency.samples", 2000, 10, 1000000);
  mcmc.seed = ctx.cfg.seed;
  mcmc.threads = ctx.cfg.threads;
  const EfficiencyPosterior post = fit_efficiency_mcmc(design, ctx.load_graph(),
                                                       ctx.load_groups(), eff_priors(ctx.cfg),
                                                       mcmc);

  write_coef_csv(dir + "/efficiency_offense.csv", post.offender_ids, post.skill, post.skill_sd);
  write_coef_csv(dir + "/efficiency_defense.csv", post.defender_ids, post.contest,
                 post.contest_sd);
  json j;
  j["offender_ids"] = post.offender_ids;
  j["defender_ids"] = post.defender_ids;
  j["defender_group"] = post.defender_group;
  j["skill"] = mat_json(post.skill);
  j["skill_sd"] = mat_json(post.skill_sd);
  j["contest"] = mat_json(post.contest);
  j["contest_sd"] = mat_json(post.contest_sd);
  std::vector<double> slope(post.slope.data(), post.slope.data() + post.slope.size());
  std::vector<double> slope_sd(post.slope_sd.data(), post.slope_sd.data() + post.slope_sd.size());
  std::vector<double> skill_mean(post.skill_mean.data(),
                                 post.skill_mean.data() + post.skill_mean.size());
  j["slope"] = slope;
  j["slope_sd"] = slope_sd;
  j["skill_mean"] = skill_mean;
  j["contest_group_mean"] = mat_json(post.contest_group_mean);
  std::vector<double> rhat(post.rhat.data(), post.rhat.data() + post.rhat.size());
  j["rhat"] = rhat;
  j["max_rhat"] = post.max_rhat;
  j["rhat_ok"] = post.rhat_ok;
  j["divergences"] = post.divergences;
  j["warnings"] = warnings;
  j["n_bases"] = post.n_bases;
  write_text(dir + "/efficiency_posterior.json", j.dump() + "\n");
  ctx.eff = post;
  return {"efficiency_offense.csv", "efficiency_defense.csv", "efficiency_posterior.json"};
}

std::vector<std::string> run_crossval(Context& ctx, const std::string& dir) {
  auto& corpus = ctx.load_corpus();
  const FrequencyDesign freq_design =
      build_frequency_design(corpus, ctx.load_summaries(), ctx.load_basis(), ctx.geom);
  const EfficiencyDesign eff_design = build_efficiency_design(
      corpus, ctx.load_summaries(), ctx.load_basis(), ctx.geom,
      ctx.cfg.raw.get_double("outcomes.distance_cap_ft", 6.0, 0.1, 94.0), nullptr);
  CvOptions opts;
  opts.folds = ctx.cfg.raw.get_int("crossval.folds", 10, 2, 1000);
  opts.seed = ctx.cfg.seed;
  opts.efficiency_mcmc = ctx.cfg.raw.get_bool("crossval.mcmc", false);
  opts.threads = ctx.cfg.threads;
  const CvTable table = cross_validate(freq_design, eff_design, ctx.load_groups(),
                                       ctx.load_graph(), freq_priors(ctx.cfg),
                                       eff_priors(ctx.cfg), opts);

  CsvWriter w;
  w.field("metric");
  for (int c = 0; c < 4; ++c) w.field(CvTable::col_name(c));
  w.endrow();
  for (int r = 0; r < 4; ++r) {
    w.field(CvTable::row_name(r));
    for (int c = 0; c < 4; ++c) {
      if (table.cells[r][c].defined)
        w.field(table.cells[r][c].log_likelihood);
      else
        w.field("NA");
    }
    w.endrow();
  }
  w.save(dir + "/cv_table.csv");
  return {"cv_table.csv"};
}

std::vector<std::string> run_report(Context& ctx, const std::string& dir) {
  auto& corpus = ctx.load_corpus();
  const auto& basis = ctx.load_basis();
  const EfficiencyDesign design = build_efficiency_design(
      corpus, ctx.load_summaries(), basis, ctx.geom,
      ctx.cfg.raw.get_double("outcomes.distance_cap_ft", 6.0, 0.1, 94.0), nullptr);

  // reload fitted posteriors if a previous process produced them
  if (!ctx.freq) {
    const json j = load_json(ctx.dir_of("frequency") + "/frequency_posterior.json");
    FrequencyPosterior p;
    p.offender_ids = j.at("offender_ids").get<std::vector<int>>();
    p.defender_ids = j.at("defender_ids").get<std::vector<int>>();
    p.defender_group = j.at("defender_group").get<std::vector<int>>();
    p.off_coef = mat_from_json(j.at("off_coef"));
    p.off_sd = mat_from_json(j.at("off_sd"));
    p.def_coef = mat_from_json(j.at("def_coef"));
    p.def_sd = mat_from_json(j.at("def_sd"));
    const auto om = j.at("off_mean").get<std::vector<double>>();
    p.off_mean = Eigen::Map<const Eigen::VectorXd>(om.data(), om.size());
    p.def_group_mean = mat_from_json(j.at("def_group_mean"));
    p.n_bases = j.at("n_bases").get<int>();
    ctx.freq = std::move(p);
  }
  if (!ctx.eff) {
    const json j = load_json(ctx.dir_of("efficiency") + "/efficiency_posterior.json");
    EfficiencyPosterior p;
    p.offender_ids = j.at("offender_ids").get<std::vector<int>>();
    p.defender_ids = j.at("defender_ids").get<std::vector<int>>();
    p.defender_group = j.at("defender_group").get<std::vector<int>>();
    p.skill = mat_from_json(j.at("skill"));
    p.skill_sd = mat_from_json(j.at("skill_sd"));
    p.contest = mat_from_json(j.at("contest"));
    p.contest_sd = mat_from_json(j.at("contest_sd"));
    const auto sl = j.at("slope").get<std::vector<double>>();
    p.slope = Eigen::Map<const Eigen::VectorXd>(sl.data(), sl.size());
    const auto sls = j.at("slope_sd").get<std::vector<double>>();
    p.slope_sd = Eigen::Map<const Eigen::VectorXd>(sls.data(), sls.size());
    const auto sm = j.at("skill_mean").get<std::vector<double>>();
    p.skill_mean = Eigen::Map<const Eigen::VectorXd>(sm.data(), sm.size());
    p.contest_group_mean = mat_from_json(j.at("contest_group_mean"));
    p.n_bases = j.at("n_bases").get<int>();
    ctx.eff = std::move(p);
  }
  const auto& freq = *ctx.freq;
  const auto& eff = *ctx.eff;

  const std::vector<DefenderEffect> effects = defender_effect_table(freq, eff, design);
  CsvWriter w;
  w.field("defender_id")
      .field("basis")
      .field("freq_effect")
      .field("freq_sd")
      .field("eff_effect")
      .field("eff_sd")
      .field("median_distance_delta")
      .field("shots_faced")
      .field("prior_dominated")
      .field("rank");
  w.endrow();
  for (const auto& e : effects) {
    w.field(e.defender_id)
        .field(e.basis)
        .field(e.freq_effect)
        .field(e.freq_sd)
        .field(e.eff_effect)
        .field(e.eff_sd)
        .field(e.median_distance_delta)
        .field(static_cast<long>(e.shots_faced))
        .field(e.prior_dominated ? "1" : "0")
        .field(e.rank);
    w.endrow();
  }
  w.save(dir + "/defender_effects.csv");

  // expected points per possession for every offender/defender pair
  const std::vector<int> points = basis_point_values(basis, ctx.geom);
  CsvWriter epp;
  epp.field("offender_id");
  for (int j = 0; j < static_cast<int>(eff.defender_ids.size()); ++j)
    epp.field("d" + std::to_string(eff.defender_ids[j]));
  epp.endrow();
  for (int k = 0; k < static_cast<int>(freq.offender_ids.size()); ++k) {
    epp.field(freq.offender_ids[k]);
    for (int j = 0; j < static_cast<int>(eff.defender_ids.size()); ++j)
      epp.field(expected_points_per_possession(freq.offender_ids[k], eff.defender_ids[j], freq,
                                               eff, design, points));
    epp.endrow();
  }
  epp.save(dir + "/expected_points.csv");

  // defensive shot charts: quantiles of the per-basis effects
  std::vector<std::string> outputs = {"defender_effects.csv", "expected_points.csv"};
  const int B = eff.n_bases;
  const int n_def = static_cast<int>(eff.defender_ids.size());
  std::vector<std::vector<double>> eff_q(B, std::vector<double>(n_def, 0.5));
  std::vector<std::vector<double>> freq_q(B, std::vector<double>(n_def, 0.5));
  for (const auto& e : effects) {
    const int j = static_cast<int>(
        std::lower_bound(eff.defender_ids.begin(), eff.defender_ids.end(), e.defender_id) -
        eff.defender_ids.begin());
    eff_q[e.basis][j] = n_def > 1 ? static_cast<double>(e.rank - 1) / (n_def - 1) : 0.5;
  }
  for (int b = 0; b < B; ++b) {  // frequency quantiles from the centered effects
    std::vector<double> vals(n_def);
    for (const auto& e : effects)
      if (e.basis == b)
        vals[std::lower_bound(eff.defender_ids.begin(), eff.defender_ids.end(), e.defender_id) -
             eff.defender_ids.begin()] = e.freq_effect;
    std::vector<int> order(n_def);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int c) { return vals[a] < vals[c]; });
    for (int r = 0; r < n_def; ++r)
      freq_q[b][order[r]] = n_def > 1 ? static_cast<double>(r) / (n_def - 1) : 0.5;
  }

  fs::create_directories(dir + "/charts");
  for (int j = 0; j < n_def; ++j) {
    DefensiveShotChart chart;
    chart.defender_id = eff.defender_ids[j];
    for (const auto& row : design.rows) {
      if (row.defender != j) continue;
      ShotChartDot dot;
      dot.location = row.location;
      dot.basis = row.basis;
      dot.eff_quantile = eff_q[row.basis][j];
      dot.freq_quantile = freq_q[row.basis][j];
      chart.dots.push_back(dot);
    }
    if (chart.dots.empty()) continue;
    const std::string name = "charts/defender_" + std::to_string(chart.defender_id) + ".svg";
    write_text(dir + "/" + name, emit_shot_chart(chart, ctx.geom));
    outputs.push_back(name);
  }
  return outputs;
}

}  // namespace

std::vector<StageResult> run_pipeline(const PipelineConfig& config, Stage until,
                                      std::ostream* log) {
  Context ctx(config);
  fs::create_directories(ctx.out);
  const fs::path manifest_path = ctx.out / "manifest.json";
  if (fs::exists(manifest_path)) {
    try {
      ctx.manifest = load_json(manifest_path.string());
    } catch (...) {
      ctx.manifest = json::object();  // corrupted manifest: recompute
    }
  } else {
    ctx.manifest = json::object();
  }

  // dependency closure, in canonical order
  const std::vector<std::string> order = {"simulate", "ingest",     "matchups", "metrics",
                                          "surfaces", "basis",      "similarity", "frequency",
                                          "efficiency", "crossval", "report"};
  std::map<std::string, bool> wanted;
  std::vector<std::string> stack = {stage_name(until)};
  while (!stack.empty()) {
    const std::string s = stack.back();
    stack.pop_back();
    if (wanted[s]) continue;
    wanted[s] = true;
    for (const auto& d : stage_deps().at(s)) {
      if (d == "simulate" && !config.input_path.empty()) continue;  // external corpus
      stack.push_back(d);
    }
  }
  if (!config.input_path.empty()) wanted["simulate"] = false;

  std::vector<StageResult> results;
  std::map<std::string, std::string> keys;

  for (const auto& name : order) {
    if (!wanted[name]) continue;

    // cache key: settings slice plus the keys of every dependency
    std::string key_material = name;
    for (const auto& k : stage_config_keys().at(name))
      key_material += "|" + k + "=" + config.raw.get_string(k, "");
    for (const auto& d : stage_deps().at(name)) {
      if (d == "simulate" && !config.input_path.empty()) continue;
      key_material += "|dep:" + d + ":" + keys.at(d);
    }
    if (name == "ingest" && !config.input_path.empty())
      key_material += "|inputhash:" + hash_hex(file_hash(config.input_path));
    const std::string key = hash_hex(fnv1a64(key_material));
    keys[name] = key;

    const fs::path stage_path = ctx.out / (name + std::string("-") + key.substr(0, 12));
    bool fresh = false;
    if (ctx.manifest.contains(name) && ctx.manifest[name].value("key", "") == key) {
      fresh = true;  // verify recorded artifacts are intact
      for (const auto& [file, hash] : ctx.manifest[name]["outputs"].items()) {
        const fs::path f = stage_path / file;
        if (!fs::exists(f) || hash_hex(file_hash(f.string())) != hash.get<std::string>()) {
          fresh = false;
          break;
        }
      }
    }

    StageResult result;
    result.name = name;
    result.key = key;
    if (fresh) {
      result.skipped = true;
      ctx.stage_dir[name] = stage_path.string();
      if (log) (*log) << "[" << name << "] cached (" << key.substr(0, 12) << ")\n";
    } else {
      fs::create_directories(stage_path);
      ctx.stage_dir[name] = stage_path.string();
      if (log) (*log) << "[" << name << "] running...\n";
      std::vector<std::string> outputs;
      if (name == "simulate") outputs = run_simulate(ctx, stage_path.string());
      else if (name == "ingest") outputs = run_ingest(ctx, stage_path.string());
      else if (name == "matchups") outputs = run_matchups(ctx, stage_path.string());
      else if (name == "metrics") outputs = run_metrics(ctx, stage_path.string());
      else if (name == "surfaces") outputs = run_surfaces(ctx, stage_path.string());
      else if (name == "basis") outputs = run_basis(ctx, stage_path.string());
      else if (name == "similarity") outputs = run_similarity(ctx, stage_path.string());
      else if (name == "frequency") outputs = run_frequency(ctx, stage_path.string());
      else if (name == "efficiency") outputs = run_efficiency(ctx, stage_path.string());
      else if (name == "crossval") outputs = run_crossval(ctx, stage_path.string());
      else if (name == "report") outputs = run_report(ctx, stage_path.string());

      json entry;
      entry["key"] = key;
      json out_hashes = json::object();
      for (const auto& f : outputs)
        out_hashes[f] = hash_hex(file_hash((stage_path / f).string()));
      entry["outputs"] = std::move(out_hashes);
      entry["dir"] = stage_path.string();
      ctx.manifest[name] = std::move(entry);
      write_text(manifest_path.string(), ctx.manifest.dump(2) + "\n");
      result.outputs = outputs;
    }
    results.push_back(result);
  }
  return results;
}

}  // namespace hoopdef
