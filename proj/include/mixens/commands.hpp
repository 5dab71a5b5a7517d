#pragma once

// Batch commands behind the `mixens` executable. Every command writes only
// under its output directory and is deterministic given its seed.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mixens/eval.hpp"
#include "mixens/imageprep.hpp"
#include "mixens/run_config.hpp"
#include "mixens/synth.hpp"

namespace mixens {

struct RunContext {
  RunConfig config;
  std::filesystem::path out;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
};

/// Loads and validates the config, applying --seed / --out overrides.
RunContext make_context(const std::filesystem::path& config_path,
                        std::optional<std::uint64_t> seed,
                        std::optional<std::filesystem::path> out, std::size_t threads);

struct BagOptions {
  std::vector<std::string> members;  // explicit member list; wins over top
  std::optional<std::size_t> top;    // first N predictors of the config ranking
  std::optional<std::size_t> sweep;  // also write sweep.csv for N = 1..value
};

/// Bags per task; weights are tuned on the ensemble-training split and the
/// report covers the evaluation split. Writes <out>/<task>/predictions.csv,
/// metrics.csv, metrics.json and (with a sweep) sweep.csv.
MetricsReport cmd_bag(const RunContext& ctx, const BagOptions& options);

struct BoostOptions {
  std::string group;                  // name of a mixture group
  std::vector<std::string> members;   // ad-hoc group; wins over `group`
  std::optional<std::string> preset;  // booster preset for an ad-hoc group
  std::optional<std::size_t> rounds;  // overrides the group's rounds
};

/// Trains one boosted group per task on the ensemble-training split, with a
/// k-fold CV report on that split (cv.csv), then refits on the whole split.
/// Writes <out>/<task>/model.json and predictions.csv plus metrics.
MetricsReport cmd_boost(const RunContext& ctx, const BoostOptions& options);

struct StrategyResult {
  std::string name;
  MetricsReport report;
};

/// Fits the configured mixture per task and evaluates every strategy.
/// Writes <out>/<task>/mixture/, <out>/<task>/predictions.csv (full
/// mixture), metrics and table.csv (one basic-precision row per strategy).
std::vector<StrategyResult> cmd_mix(const RunContext& ctx);

/// Scores <predictions_dir>/<task>/predictions.csv against the config labels.
MetricsReport cmd_eval(const RunContext& ctx, const std::filesystem::path& predictions_dir);

struct DiffReport {
  std::map<std::string, double> per_task;
  double mean = 0.0;
};

/// Disagreement between <a>/<task>/predictions.csv and <b>/<task>/predictions.csv.
/// Writes <out>/diff.csv.
DiffReport cmd_diff(const RunContext& ctx, const std::filesystem::path& a,
                    const std::filesystem::path& b);

struct SynthOptions {
  SynthSpec spec;
  std::size_t tasks = 8;
  std::filesystem::path out;
};

/// Writes the fixture plus a ready-to-run <out>/config.json.
void cmd_synth(const SynthOptions& options);

struct PrepOptions {
  std::filesystem::path in;
  std::filesystem::path out;
  std::size_t size = 256;
  Rgb pad = kDefaultPad;
  std::size_t augment = 0;  // augmented copies per image
  std::optional<std::uint64_t> seed;
  std::size_t threads = 1;
};

/// Letterboxes every .ppm/.pgm in `in` and writes <stem>.<ext> plus
/// <stem>_aug<i>.<ext> copies. Returns the number of files written.
std::size_t cmd_prep(const PrepOptions& options);

}  // namespace mixens
