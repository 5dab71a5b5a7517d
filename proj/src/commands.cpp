#include "mixens/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "mixens/bagging.hpp"
#include "mixens/errors.hpp"
#include "mixens/gbdt.hpp"
#include "mixens/mixture.hpp"
#include "mixens/parallel.hpp"
#include "mixens/rng.hpp"

namespace mixens {
namespace {

namespace fs = std::filesystem;

// Stream offsets under the run seed. Task t (0-based, config order) draws its
// holdout split from stream t and its CV folds from stream kFoldStream + t.
constexpr std::uint64_t kFoldStream = 1000;

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write " + path.string());
  out << text;
  if (!out) throw FormatError("write failed for " + path.string());
}

std::string fmt(double v) { return format_probability(v); }

void write_report(const fs::path& dir, const MetricsReport& report) {
  std::ostringstream csv;
  write_metrics_csv(csv, report);
  write_text(dir / "metrics.csv", csv.str());
  write_text(dir / "metrics.json", metrics_json(report));
}

void write_prediction_file(const fs::path& path, const PredictionMatrix& m) {
  std::ostringstream out;
  write_predictions(out, m);
  write_text(path, out.str());
}

/// One task's labels and base-predictor outputs, split into the
/// ensemble-training part (held) and the evaluation part.
struct TaskInputs {
  LabelVector held_labels;
  LabelVector eval_labels;
  std::vector<PredictionMatrix> held;
  std::vector<PredictionMatrix> eval;
};

TaskInputs load_task(const RunContext& ctx, std::size_t t, const std::vector<PredictorId>& needed) {
  const auto& cfg = ctx.config;
  const TaskSpec& task = cfg.tasks[t];
  const auto labels_path = cfg.labels_path(task);
  const LabelVector labels = load_labels(labels_path, task);
  const auto split =
      holdout_split(labels, cfg.splits.holdout_fraction, derive_seed(ctx.seed, t));
  TaskInputs in{select_samples(labels, split.held_ids), select_samples(labels, split.train_ids),
                {}, {}};
  for (const auto& id : needed) {
    const auto it = std::find_if(cfg.predictors.begin(), cfg.predictors.end(),
                                 [&](const PredictorSource& p) { return p.id == id; });
    if (it == cfg.predictors.end()) {
      throw MissingPredictorError("predictor '" + id.str() + "' is not declared in the config");
    }
    const auto path = cfg.predictor_path(*it, task);
    const auto m = load_predictions(path, task, id);
    require_aligned(m.sample_ids(), labels.sample_ids(), path.string() + " vs " + labels_path.string());
    in.held.push_back(select_samples(m, split.held_ids));
    in.eval.push_back(select_samples(m, split.train_ids));
  }
  return in;
}

std::vector<PredictorId> union_ids(std::initializer_list<const std::vector<PredictorId>*> lists) {
  std::vector<PredictorId> out;
  std::set<PredictorId> seen;
  for (const auto* l : lists) {
    for (const auto& id : *l) {
      if (seen.insert(id).second) out.push_back(id);
    }
  }
  return out;
}

/// Runs `fn(t)` for every task and collects the per-task accuracies.
template <typename Fn>
MetricsReport per_task(const RunContext& ctx, Fn&& fn) {
  const auto& tasks = ctx.config.tasks;
  std::vector<double> acc(tasks.size());
  parallel_for(tasks.size(), ctx.threads, [&](std::size_t t) { acc[t] = fn(t); });
  std::map<std::string, double> per;
  for (std::size_t t = 0; t < tasks.size(); ++t) per[tasks[t].id()] = acc[t];
  return MetricsReport::from_tasks(std::move(per));
}

std::vector<PredictorId> resolve_bag_members(const RunConfig& cfg, const BagOptions& options) {
  if (!options.members.empty()) return to_predictor_ids(options.members);
  if (options.top) {
    const std::size_t n = *options.top;
    if (n == 0 || n > cfg.predictors.size()) {
      throw ConfigError("--top " + std::to_string(n) + " outside 1.." +
                        std::to_string(cfg.predictors.size()));
    }
    std::vector<PredictorId> ids;
    for (std::size_t i = 0; i < n; ++i) ids.push_back(cfg.predictors[i].id);
    return ids;
  }
  return cfg.mixture.bag_members;
}

GroupSpec resolve_group(const RunConfig& cfg, const BoostOptions& options) {
  GroupSpec g;
  if (!options.members.empty()) {
    g.members = to_predictor_ids(options.members);
    std::string name = "boost(";
    for (std::size_t i = 0; i < options.members.size(); ++i) {
      name += (i ? "," : "") + options.members[i];
    }
    g.name = name + ")";
    const std::string preset = options.preset.value_or("default");
    if (preset == "default") {
      g.booster_params = GbdtParams{};
    } else if (preset == "deep_slow") {
      g.booster_params = GbdtParams::deep_slow();
    } else if (preset == "shallow_fast") {
      g.booster_params = GbdtParams::shallow_fast();
    } else {
      throw ConfigError("unknown booster preset '" + preset + "'");
    }
  } else {
    if (cfg.mixture.groups.empty()) throw ConfigError("config defines no boosted groups");
    if (options.group.empty()) {
      g = cfg.mixture.groups.front();
    } else {
      const auto it = std::find_if(cfg.mixture.groups.begin(), cfg.mixture.groups.end(),
                                   [&](const GroupSpec& s) { return s.name == options.group; });
      if (it == cfg.mixture.groups.end()) {
        throw ConfigError("no group named '" + options.group + "' in the config");
      }
      g = *it;
    }
  }
  if (options.rounds) g.booster_params.rounds = *options.rounds;
  g.booster_params.validate();
  return g;
}

std::vector<PredictionMatrix> pick(const std::vector<PredictionMatrix>& all,
                                   const std::vector<std::string>& ids) {
  std::vector<PredictionMatrix> out;
  out.reserve(all.size());
  for (const auto& m : all) out.push_back(select_samples(m, ids));
  return out;
}

}  // namespace

RunContext make_context(const fs::path& config_path, std::optional<std::uint64_t> seed,
                        std::optional<fs::path> out, std::size_t threads) {
  RunContext ctx{load_run_config(config_path), {}, 0, threads == 0 ? 1 : threads};
  if (seed) ctx.config.splits.seed = seed;
  if (out) ctx.config.output_dir = *out;
  ctx.seed = ctx.config.seed();
  ctx.out = ctx.config.output_dir;
  ctx.config.validate();
  return ctx;
}

MetricsReport cmd_bag(const RunContext& ctx, const BagOptions& options) {
  const auto& cfg = ctx.config;
  const auto members = resolve_bag_members(cfg, options);
  std::vector<PredictorId> needed = members;
  if (options.sweep) {
    if (*options.sweep == 0 || *options.sweep > cfg.predictors.size()) {
      throw ConfigError("--sweep " + std::to_string(*options.sweep) + " outside 1.." +
                        std::to_string(cfg.predictors.size()));
    }
    const auto ranking = cfg.predictor_ids();
    needed = union_ids({&members, &ranking});
  }

  std::vector<std::optional<TaskData>> sweep_inputs(cfg.tasks.size());
  const auto report = per_task(ctx, [&](std::size_t t) {
    const auto in = load_task(ctx, t, needed);
    const std::span<const PredictionMatrix> held(in.held.data(), members.size());
    const std::span<const PredictionMatrix> eval(in.eval.data(), members.size());
    const auto weights = tune_weights(held, &in.held_labels, cfg.mixture.bag_weight_mode);
    const auto bagged = bag_predict(eval, weights);
    write_prediction_file(ctx.out / cfg.tasks[t].id() / "predictions.csv", bagged);
    if (options.sweep) {
      std::vector<PredictionMatrix> ranked;
      for (const auto& id : cfg.predictor_ids()) ranked.push_back(find_predictor(in.eval, id));
      sweep_inputs[t] = TaskData{cfg.tasks[t], std::move(ranked), in.eval_labels};
    }
    return top1_accuracy(argmax_labels(bagged), in.eval_labels);
  });
  write_report(ctx.out, report);

  if (options.sweep) {
    std::vector<TaskData> tasks;
    for (auto& s : sweep_inputs) tasks.push_back(std::move(*s));
    std::string csv = "n,basic_precision\n";
    for (const auto& p : sweep_bagging(tasks, *options.sweep)) {
      csv += std::to_string(p.n) + "," + fmt(p.basic_precision) + "\n";
    }
    write_text(ctx.out / "sweep.csv", csv);
  }
  return report;
}

MetricsReport cmd_boost(const RunContext& ctx, const BoostOptions& options) {
  const auto& cfg = ctx.config;
  const GroupSpec group = resolve_group(cfg, options);
  std::vector<std::vector<double>> fold_acc(cfg.tasks.size());

  const auto report = per_task(ctx, [&](std::size_t t) {
    const auto in = load_task(ctx, t, group.members);
    const auto folds =
        kfold_split(in.held_labels, cfg.splits.k, derive_seed(ctx.seed, kFoldStream + t),
                    cfg.splits.stratified);
    const auto& held_ids = in.held_labels.sample_ids();
    for (std::size_t f = 0; f < folds.k; ++f) {
      const auto train_ids = ids_at(held_ids, folds.members(f, true));
      const auto test_ids = ids_at(held_ids, folds.members(f));
      const auto model = fit(concat_features(pick(in.held, train_ids), group.members),
                             select_samples(in.held_labels, train_ids), group.booster_params,
                             group.members);
      const auto probs =
          predict_proba(model, concat_features(pick(in.held, test_ids), group.members));
      fold_acc[t].push_back(
          top1_accuracy(argmax_labels(probs), select_samples(in.held_labels, test_ids)));
    }

    const auto model = fit(concat_features(in.held, group.members), in.held_labels,
                           group.booster_params, group.members);
    const auto dir = ctx.out / cfg.tasks[t].id();
    fs::create_directories(dir);
    save_model(dir / "model.json", model);
    const auto probs = predict_proba(model, concat_features(in.eval, group.members));
    write_prediction_file(dir / "predictions.csv", probs);
    return top1_accuracy(argmax_labels(probs), in.eval_labels);
  });

  std::string cv = "task_id,fold,accuracy\n";
  for (std::size_t t = 0; t < cfg.tasks.size(); ++t) {
    double sum = 0.0;
    for (std::size_t f = 0; f < fold_acc[t].size(); ++f) {
      cv += cfg.tasks[t].id() + "," + std::to_string(f) + "," + fmt(fold_acc[t][f]) + "\n";
      sum += fold_acc[t][f];
    }
    cv += cfg.tasks[t].id() + ",mean," + fmt(sum / static_cast<double>(fold_acc[t].size())) + "\n";
  }
  write_text(ctx.out / "cv.csv", cv);
  write_report(ctx.out, report);
  return report;
}

std::vector<StrategyResult> cmd_mix(const RunContext& ctx) {
  const auto& cfg = ctx.config;
  const auto& mixture = cfg.mixture;
  const auto strategies = cfg.resolved_strategies();

  std::vector<PredictorId> needed = mixture.bag_members;
  for (const auto& g : mixture.groups) needed = union_ids({&needed, &g.members});

  // acc[s][t]: strategy s on task t.
  std::vector<std::vector<double>> acc(strategies.size(), std::vector<double>(cfg.tasks.size()));
  const auto report = per_task(ctx, [&](std::size_t t) {
    const auto in = load_task(ctx, t, needed);
    const auto boosted = fit_groups(in.held, in.held_labels, mixture.groups, 1);

    for (std::size_t s = 0; s < strategies.size(); ++s) {
      MixtureConfig sub = mixture;
      sub.groups.clear();
      std::vector<BoostedClassifier> models;
      for (const auto& name : strategies[s].groups) {
        for (std::size_t g = 0; g < mixture.groups.size(); ++g) {
          if (mixture.groups[g].name == name) {
            sub.groups.push_back(mixture.groups[g]);
            models.push_back(boosted[g]);
          }
        }
      }
      if (std::holds_alternative<ExplicitWeights>(sub.second_layer_mode) &&
          sub.groups.size() != mixture.groups.size()) {
        // Explicit second-layer weights only describe the full layout.
        sub.second_layer_mode = EqualWeights{};
      }
      const auto model = assemble_mixture(in.held, in.held_labels, sub, std::move(models));
      acc[s][t] = top1_accuracy(argmax_labels(predict_mixture(model, in.eval)), in.eval_labels);
    }

    const auto model = assemble_mixture(in.held, in.held_labels, mixture, boosted);
    const auto dir = ctx.out / cfg.tasks[t].id();
    save_mixture(dir / "mixture", model);
    const auto probs = predict_mixture(model, in.eval);
    write_prediction_file(dir / "predictions.csv", probs);
    return top1_accuracy(argmax_labels(probs), in.eval_labels);
  });
  write_report(ctx.out, report);

  std::vector<StrategyResult> results;
  std::string table = "strategy,basic_precision";
  for (const auto& t : cfg.tasks) table += "," + t.id();
  table += "\n";
  for (std::size_t s = 0; s < strategies.size(); ++s) {
    std::map<std::string, double> per;
    for (std::size_t t = 0; t < cfg.tasks.size(); ++t) per[cfg.tasks[t].id()] = acc[s][t];
    auto r = MetricsReport::from_tasks(std::move(per));
    table += strategies[s].name + "," + fmt(r.basic_precision);
    for (const double a : acc[s]) table += "," + fmt(a);
    table += "\n";
    results.push_back({strategies[s].name, std::move(r)});
  }
  write_text(ctx.out / "table.csv", table);
  return results;
}

MetricsReport cmd_eval(const RunContext& ctx, const fs::path& predictions_dir) {
  const auto& cfg = ctx.config;
  const auto report = per_task(ctx, [&](std::size_t t) {
    const auto& task = cfg.tasks[t];
    const auto labels = load_labels(cfg.labels_path(task), task);
    const auto m = load_predictions(predictions_dir / task.id() / "predictions.csv", task,
                                    PredictorId("eval"));
    return top1_accuracy(argmax_labels(m), select_samples(labels, m.sample_ids()));
  });
  write_report(ctx.out, report);
  return report;
}

DiffReport cmd_diff(const RunContext& ctx, const fs::path& a, const fs::path& b) {
  const auto& cfg = ctx.config;
  std::vector<double> values(cfg.tasks.size());
  parallel_for(cfg.tasks.size(), ctx.threads, [&](std::size_t t) {
    const auto& task = cfg.tasks[t];
    const auto pa = a / task.id() / "predictions.csv";
    const auto pb = b / task.id() / "predictions.csv";
    const auto ma = load_predictions(pa, task, PredictorId("a"));
    const auto mb = load_predictions(pb, task, PredictorId("b"));
    require_aligned(ma.sample_ids(), mb.sample_ids(), pa.string() + " vs " + pb.string());
    values[t] = disagreement(argmax_labels(ma), argmax_labels(mb));
  });
  DiffReport report;
  double sum = 0.0;
  std::string csv = "task_id,disagreement\n";
  for (std::size_t t = 0; t < cfg.tasks.size(); ++t) {
    report.per_task[cfg.tasks[t].id()] = values[t];
    csv += cfg.tasks[t].id() + "," + fmt(values[t]) + "\n";
    sum += values[t];
  }
  report.mean = sum / static_cast<double>(values.size());
  csv += "__mean__," + fmt(report.mean) + "\n";
  write_text(ctx.out / "diff.csv", csv);
  return report;
}

void cmd_synth(const SynthOptions& options) {
  options.spec.validate();
  if (options.tasks == 0) throw ConfigError("synth needs at least one task");
  const auto suites = gen_tasks(options.spec, options.tasks);
  for (const auto& s : suites) write_suite(options.out, s);

  RunConfig cfg;
  for (const auto& s : suites) cfg.tasks.push_back(s.labels.task());
  cfg.data_root = ".";
  for (const auto& m : suites.front().predictors) {
    cfg.predictors.push_back({m.predictor(), "{task}/" + m.predictor().str() + ".csv"});
  }
  const std::size_t k = cfg.predictors.size();
  if (k >= 12) {
    cfg.mixture = MixtureConfig::reference_layout();
  } else {
    cfg.mixture.bag_members = predictor_range(1, std::min<std::size_t>(7, k));
  }
  cfg.splits.seed = options.spec.seed;
  cfg.output_dir = "results";
  write_text(options.out / "config.json", run_config_to_json(cfg));
}

std::size_t cmd_prep(const PrepOptions& options) {
  if (options.size == 0) throw ConfigError("--size must be positive");
  if (options.augment > 0 && !options.seed) {
    throw ConfigError("augmentation needs a seed: pass --seed");
  }
  if (!fs::is_directory(options.in)) {
    throw FormatError("input directory not found: " + options.in.string());
  }
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(options.in)) {
    const auto ext = e.path().extension().string();
    if (e.is_regular_file() && (ext == ".ppm" || ext == ".pgm")) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  fs::create_directories(options.out);

  AugmentConfig aug;
  aug.pad = options.pad;
  parallel_for(files.size(), options.threads, [&](std::size_t i) {
    const auto& src = files[i];
    const auto ext = src.extension().string();
    const auto stem = src.stem().string();
    const auto boxed = resize_pad(read_pnm(src), options.size, options.pad);
    write_pnm(options.out / (stem + ext), boxed);
    for (std::size_t a = 0; a < options.augment; ++a) {
      const auto seed = derive_seed(derive_seed(*options.seed, i), a);
      write_pnm(options.out / (stem + "_aug" + std::to_string(a) + ext),
                augment(boxed, aug, seed));
    }
  });
  return files.size() * (1 + options.augment);
}

}  // namespace mixens
