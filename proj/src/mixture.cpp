#include "mixens/mixture.hpp"

#include <fstream>
#include <optional>
#include <set>
#include <sstream>

#include "json_util.hpp"
#include "mixens/errors.hpp"
#include "mixens/eval.hpp"
#include "mixens/parallel.hpp"

namespace mixens {
namespace {

using nlohmann::json;

std::vector<PredictionMatrix> gather(std::span<const PredictionMatrix> matrices,
                                     std::span<const PredictorId> ids) {
  std::vector<PredictionMatrix> out;
  out.reserve(ids.size());
  for (const auto& id : ids) out.push_back(find_predictor(matrices, id));
  return out;
}

json ids_to_json(const std::vector<PredictorId>& ids) {
  json out = json::array();
  for (const auto& id : ids) out.push_back(id.str());
  return out;
}

std::vector<PredictorId> ids_from_json(const json& j) {
  return to_predictor_ids(j.get<std::vector<std::string>>());
}

std::string group_file_name(std::size_t index) { return "group" + std::to_string(index) + ".json"; }

}  // namespace

void MixtureConfig::validate() const {
  if (bag_members.empty()) throw ConfigError("mixture needs at least one bagged predictor");
  std::set<PredictorId> bag(bag_members.begin(), bag_members.end());
  if (bag.size() != bag_members.size()) throw ConfigError("duplicate predictor in bag_members");
  std::set<std::string> names;
  for (const auto& g : groups) {
    if (g.name.empty()) throw ConfigError("group name must be nonempty");
    if (g.name == kBagLayerId) throw ConfigError("group name 'bag' is reserved");
    if (!names.insert(g.name).second) throw ConfigError("duplicate group name '" + g.name + "'");
    if (g.members.empty()) throw ConfigError("group '" + g.name + "' has no members");
    std::set<PredictorId> members(g.members.begin(), g.members.end());
    if (members.size() != g.members.size()) {
      throw ConfigError("group '" + g.name + "' lists a predictor twice");
    }
    g.booster_params.validate();
  }
  if (const auto* e = std::get_if<ExplicitWeights>(&bag_weight_mode);
      e != nullptr && e->values.size() != bag_members.size()) {
    throw ConfigError("explicit bag weights do not match bag_members");
  }
  if (const auto* e = std::get_if<ExplicitWeights>(&second_layer_mode);
      e != nullptr && e->values.size() != groups.size() + 1) {
    throw ConfigError("explicit second-layer weights need K+1 = " +
                      std::to_string(groups.size() + 1) + " entries");
  }
}

std::vector<PredictorId> predictor_range(std::size_t first, std::size_t last,
                                         const std::string& prefix) {
  std::vector<PredictorId> ids;
  for (std::size_t i = first; i <= last; ++i) ids.emplace_back(prefix + std::to_string(i));
  return ids;
}

MixtureConfig MixtureConfig::reference_layout() {
  MixtureConfig config;
  config.bag_members = predictor_range(1, 7);
  config.groups = {
      {"boost(M1-M6)", predictor_range(1, 6), GbdtParams::deep_slow()},
      {"boost(M1-M5)", predictor_range(1, 5), GbdtParams::shallow_fast()},
      {"boost(M8-M12)", predictor_range(8, 12), GbdtParams::deep_slow()},
  };
  return config;
}

std::vector<BoostedClassifier> fit_groups(std::span<const PredictionMatrix> train,
                                          const LabelVector& labels,
                                          std::span<const GroupSpec> groups,
                                          std::size_t threads) {
  // Features are built up front so missing predictors fail before any training.
  std::vector<FeatureMatrix> features;
  features.reserve(groups.size());
  for (const auto& g : groups) features.push_back(concat_features(train, g.members));

  std::vector<std::optional<BoostedClassifier>> slots(groups.size());
  parallel_for(groups.size(), threads, [&](std::size_t i) {
    slots[i] = fit(features[i], labels, groups[i].booster_params, groups[i].members);
  });
  std::vector<BoostedClassifier> models;
  models.reserve(groups.size());
  for (auto& s : slots) models.push_back(std::move(*s));
  return models;
}

MixtureModel assemble_mixture(std::span<const PredictionMatrix> train, const LabelVector& labels,
                              const MixtureConfig& config,
                              std::vector<BoostedClassifier> boosted) {
  config.validate();
  if (boosted.size() != config.groups.size()) {
    throw ConfigError("one fitted booster per group is required");
  }
  const auto bag_inputs = gather(train, config.bag_members);
  for (const auto& m : bag_inputs) {
    require_aligned(m.sample_ids(), labels.sample_ids(), "mixture training " + m.predictor().str());
  }
  MixtureModel model{labels.task(), config,
                     tune_weights(bag_inputs, &labels, config.bag_weight_mode),
                     std::move(boosted),
                     VotingWeights::normalized({{PredictorId(kBagLayerId), 1.0}})};
  const auto layer_one = layer_one_outputs(model, train);
  model.second_layer = tune_weights(layer_one, &labels, config.second_layer_mode);
  return model;
}

MixtureModel fit_mixture(std::span<const PredictionMatrix> train, const LabelVector& labels,
                         const MixtureConfig& config, std::size_t threads) {
  config.validate();
  // Resolve every referenced predictor before spending time on training.
  gather(train, config.bag_members);
  for (const auto& g : config.groups) gather(train, g.members);
  return assemble_mixture(train, labels, config,
                          fit_groups(train, labels, config.groups, threads));
}

std::vector<PredictionMatrix> layer_one_outputs(const MixtureModel& model,
                                                std::span<const PredictionMatrix> matrices) {
  std::vector<PredictionMatrix> outputs;
  outputs.reserve(model.boosted.size() + 1);
  outputs.push_back(bag_predict(gather(matrices, model.config.bag_members), model.first_layer_bag)
                        .renamed(PredictorId(kBagLayerId)));
  for (std::size_t g = 0; g < model.boosted.size(); ++g) {
    const auto& group = model.config.groups[g];
    outputs.push_back(predict_proba(model.boosted[g], concat_features(matrices, group.members),
                                    PredictorId(group.name)));
  }
  return outputs;
}

PredictionMatrix predict_mixture(const MixtureModel& model,
                                 std::span<const PredictionMatrix> matrices) {
  const auto layer_one = layer_one_outputs(model, matrices);
  return bag_predict(layer_one, model.second_layer).renamed(PredictorId("mixture"));
}

std::vector<SweepPoint> sweep_bagging(std::span<const TaskData> tasks, std::size_t n_max) {
  if (tasks.empty()) throw ConfigError("sweep needs at least one task");
  if (n_max == 0) throw ConfigError("sweep needs N_max >= 1");
  for (const auto& t : tasks) {
    if (n_max > t.predictions.size()) {
      throw ConfigError("N_max=" + std::to_string(n_max) + " exceeds the " +
                        std::to_string(t.predictions.size()) + " predictors of task '" +
                        t.task.id() + "'");
    }
  }
  std::vector<SweepPoint> curve;
  for (std::size_t n = 1; n <= n_max; ++n) {
    std::vector<double> accuracies;
    for (const auto& t : tasks) {
      const std::span<const PredictionMatrix> top(t.predictions.data(), n);
      const auto bagged = bag_predict(top, tune_weights(top, nullptr, EqualWeights{}));
      accuracies.push_back(top1_accuracy(argmax_labels(bagged), t.labels));
    }
    curve.push_back({n, basic_precision(accuracies)});
  }
  return curve;
}

void save_mixture(const std::filesystem::path& dir, const MixtureModel& model) {
  std::filesystem::create_directories(dir);
  json groups = json::array();
  for (std::size_t g = 0; g < model.config.groups.size(); ++g) {
    const auto& spec = model.config.groups[g];
    groups.push_back(json{{"name", spec.name},
                          {"members", ids_to_json(spec.members)},
                          {"model_file", group_file_name(g)}});
    save_model(dir / group_file_name(g), model.boosted[g]);
  }
  const json j{{"format_version", 1},
               {"task", {{"task_id", model.task.id()}, {"class_count", model.task.class_count()}}},
               {"bag_members", ids_to_json(model.config.bag_members)},
               {"bag_weight_mode", weight_mode_to_json(model.config.bag_weight_mode)},
               {"first_layer_bag", weights_to_json(model.first_layer_bag)},
               {"groups", std::move(groups)},
               {"second_layer_mode", weight_mode_to_json(model.config.second_layer_mode)},
               {"second_layer", weights_to_json(model.second_layer)}};
  std::ofstream out(dir / "mixture.json", std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write " + (dir / "mixture.json").string());
  out << j.dump(2) << "\n";
}

MixtureModel load_mixture(const std::filesystem::path& dir) {
  std::ifstream in(dir / "mixture.json", std::ios::binary);
  if (!in) throw FormatError("cannot open " + (dir / "mixture.json").string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    const json j = json::parse(buf.str());
    if (j.at("format_version").get<int>() != 1) {
      throw FormatError("unsupported mixture format_version");
    }
    const auto& t = j.at("task");
    TaskSpec task(t.at("task_id").get<std::string>(), t.at("class_count").get<std::size_t>());
    MixtureConfig config;
    config.bag_members = ids_from_json(j.at("bag_members"));
    config.bag_weight_mode = weight_mode_from_json(j.at("bag_weight_mode"));
    config.second_layer_mode = weight_mode_from_json(j.at("second_layer_mode"));
    std::vector<BoostedClassifier> boosted;
    for (const auto& g : j.at("groups")) {
      auto model = load_model(dir / g.at("model_file").get<std::string>());
      config.groups.push_back(
          {g.at("name").get<std::string>(), ids_from_json(g.at("members")), model.params});
      boosted.push_back(std::move(model));
    }
    config.validate();
    return MixtureModel{task, std::move(config), weights_from_json(j.at("first_layer_bag")),
                        std::move(boosted), weights_from_json(j.at("second_layer"))};
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed mixture.json: ") + e.what());
  }
}

}  // namespace mixens
