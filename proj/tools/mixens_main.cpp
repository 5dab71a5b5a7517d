// Command-line entry point: bag, boost, mix, eval, diff, synth, prep.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include "mixens/commands.hpp"
#include "mixens/errors.hpp"

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::size_t threads = 1;
};

void add_common(CLI::App* cmd, Common& c, bool needs_config = true) {
  auto* opt = cmd->add_option("--config", c.config, "Run config (JSON)");
  if (needs_config) opt->required();
  cmd->add_option("--seed", c.seed, "Seed; overrides splits.seed in the config");
  cmd->add_option("--out", c.out, "Output directory; overrides output_dir in the config");
  cmd->add_option("--threads", c.threads, "Worker threads (tasks run in parallel)")
      ->check(CLI::Range(std::size_t{1}, std::size_t{256}));
}

mixens::RunContext context(const Common& c) {
  std::optional<std::filesystem::path> out;
  if (c.out) out = *c.out;
  return mixens::make_context(c.config, c.seed, out, c.threads);
}

void print_report(const mixens::MetricsReport& r) {
  for (const auto& [task, acc] : r.per_task_accuracy) std::printf("%s\t%.6f\n", task.c_str(), acc);
  std::printf("basic_precision\t%.6f\n", r.basic_precision);
}

mixens::Rgb parse_rgb(const std::vector<int>& v) {
  if (v.size() != 3) throw mixens::ConfigError("--pad expects three values R G B");
  mixens::Rgb out{};
  for (std::size_t i = 0; i < 3; ++i) {
    if (v[i] < 0 || v[i] > 255) throw mixens::ConfigError("--pad components must be 0..255");
    out[i] = static_cast<std::uint8_t>(v[i]);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-layer bagging and boosting mixtures of classifier outputs"};
  app.require_subcommand(1);

  Common common;

  auto* bag = app.add_subcommand("bag", "Soft-voting bag per task");
  add_common(bag, common);
  mixens::BagOptions bag_opts;
  bag->add_option("--members", bag_opts.members, "Predictor ids to bag")->delimiter(',');
  bag->add_option("--top", bag_opts.top, "Bag the first N predictors of the config");
  bag->add_option("--sweep", bag_opts.sweep, "Also write sweep.csv for N = 1..N_max");

  auto* boost = app.add_subcommand("boost", "Boosted trees on one predictor group");
  add_common(boost, common);
  mixens::BoostOptions boost_opts;
  boost->add_option("--group", boost_opts.group, "Group name from the config mixture");
  boost->add_option("--members", boost_opts.members, "Ad-hoc group members")->delimiter(',');
  boost->add_option("--preset", boost_opts.preset, "default | deep_slow | shallow_fast");
  boost->add_option("--rounds", boost_opts.rounds, "Override boosting rounds");

  auto* mix = app.add_subcommand("mix", "Two-layer mixture with a strategy table");
  add_common(mix, common);

  auto* eval = app.add_subcommand("eval", "Score a predictions directory");
  add_common(eval, common);
  std::string eval_dir;
  eval->add_option("--predictions", eval_dir, "Directory holding <task>/predictions.csv")
      ->required();

  auto* diff = app.add_subcommand("diff", "Disagreement between two predictions directories");
  add_common(diff, common);
  std::string diff_a, diff_b;
  diff->add_option("a", diff_a, "First directory")->required();
  diff->add_option("b", diff_b, "Second directory")->required();

  auto* synth = app.add_subcommand("synth", "Write a synthetic fixture and its config");
  add_common(synth, common, false);
  mixens::SynthOptions synth_opts;
  synth->add_option("--tasks", synth_opts.tasks, "Number of tasks");
  synth->add_option("--samples", synth_opts.spec.n_samples, "Samples per task");
  synth->add_option("--classes", synth_opts.spec.class_count, "Classes per task");
  synth->add_option("--correlation", synth_opts.spec.correlation, "Shared-error probability");
  synth->add_option("--accuracies", synth_opts.spec.predictor_accuracies,
                    "Predictor accuracies, best first")
      ->delimiter(',');
  synth->add_option("--sharpness", synth_opts.spec.sharpness, "Confidence sharpness");
  synth->add_option("--jitter", synth_opts.spec.confidence_jitter, "Log-normal sharpness jitter");
  synth->add_option("--error-confidence", synth_opts.spec.error_confidence,
                    "Sharpness factor on wrong predictions");
  synth->add_option("--neighbor-confusion", synth_opts.spec.neighbor_confusion,
                    "Share of errors landing on the next class");

  auto* prep = app.add_subcommand("prep", "Letterbox and augment PPM/PGM images");
  add_common(prep, common, false);
  mixens::PrepOptions prep_opts;
  std::string prep_in;
  std::vector<int> pad{128, 128, 128};
  prep->add_option("--in", prep_in, "Input directory")->required();
  prep->add_option("--size", prep_opts.size, "Output side length S");
  prep->add_option("--pad", pad, "Pad color R,G,B")->delimiter(',')->expected(3);
  prep->add_option("--augment", prep_opts.augment, "Augmented copies per image");

  CLI11_PARSE(app, argc, argv);

  try {
    if (bag->parsed()) {
      print_report(mixens::cmd_bag(context(common), bag_opts));
    } else if (boost->parsed()) {
      print_report(mixens::cmd_boost(context(common), boost_opts));
    } else if (mix->parsed()) {
      for (const auto& s : mixens::cmd_mix(context(common))) {
        std::printf("%s\t%.6f\n", s.name.c_str(), s.report.basic_precision);
      }
    } else if (eval->parsed()) {
      print_report(mixens::cmd_eval(context(common), eval_dir));
    } else if (diff->parsed()) {
      const auto r = mixens::cmd_diff(context(common), diff_a, diff_b);
      for (const auto& [task, d] : r.per_task) std::printf("%s\t%.6f\n", task.c_str(), d);
      std::printf("mean\t%.6f\n", r.mean);
    } else if (synth->parsed()) {
      if (!common.seed) throw mixens::ConfigError("synth needs --seed");
      if (!common.out) throw mixens::ConfigError("synth needs --out");
      synth_opts.spec.seed = *common.seed;
      synth_opts.out = *common.out;
      mixens::cmd_synth(synth_opts);
    } else if (prep->parsed()) {
      if (!common.out) throw mixens::ConfigError("prep needs --out");
      prep_opts.in = prep_in;
      prep_opts.out = *common.out;
      prep_opts.pad = parse_rgb(pad);
      prep_opts.seed = common.seed;
      prep_opts.threads = common.threads;
      std::printf("wrote %zu images\n", mixens::cmd_prep(prep_opts));
    }
  } catch (const mixens::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
