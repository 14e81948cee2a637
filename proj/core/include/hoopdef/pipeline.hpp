#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hoopdef/config.hpp"
#include "hoopdef/geometry.hpp"

namespace hoopdef {

enum class Stage {
  kSimulate,
  kIngest,
  kMatchups,
  kMetrics,
  kSurfaces,
  kBasis,
  kSimilarity,
  kFrequency,
  kEfficiency,
  kCrossval,
  kReport,
};

const char* stage_name(Stage s);

/// Validated pipeline settings. Values come from a flat key-value file
/// plus command-line overrides; hyperparameters are range-checked here.
struct PipelineConfig {
  KeyValueConfig raw;
  std::string out_dir = "out";
  std::string input_path;  // empty: the simulate stage provides the corpus
  std::uint64_t seed = 7;
  int threads = 1;

  static PipelineConfig load_file(const std::string& path);
  static PipelineConfig from_config(KeyValueConfig raw);
};

struct StageResult {
  std::string name;
  std::string key;
  bool skipped = false;
  std::vector<std::string> outputs;
};

/// Executes every stage up to and including `until`, in dependency
/// order, skipping stages whose inputs and settings are unchanged
/// (content-hashed artifacts; corrupted caches recompute).
std::vector<StageResult> run_pipeline(const PipelineConfig& config, Stage until,
                                      std::ostream* log = nullptr);

}  // namespace hoopdef
