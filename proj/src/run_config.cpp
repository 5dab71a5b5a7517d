#include "mixens/run_config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json_util.hpp"
#include "mixens/errors.hpp"

namespace mixens {
namespace {

using nlohmann::json;

std::string expand_task(const std::string& tmpl, const std::string& task_id) {
  std::string out;
  std::size_t pos = 0;
  while (true) {
    const auto hit = tmpl.find("{task}", pos);
    out += tmpl.substr(pos, hit == std::string::npos ? std::string::npos : hit - pos);
    if (hit == std::string::npos) break;
    out += task_id;
    pos = hit + 6;
  }
  return out;
}

GbdtParams preset_params(const std::string& name) {
  if (name == "default") return GbdtParams{};
  if (name == "deep_slow") return GbdtParams::deep_slow();
  if (name == "shallow_fast") return GbdtParams::shallow_fast();
  throw ConfigError("unknown booster preset '" + name + "'");
}

GbdtParams booster_from_json(const json& j) {
  if (j.is_string()) return preset_params(j.get<std::string>());
  if (!j.is_object()) throw ConfigError("booster must be a preset name or a params object");
  const GbdtParams base = preset_params(j.value("preset", std::string("default")));
  json overrides = j;
  overrides.erase("preset");
  return params_from_json(overrides, base);
}

std::vector<PredictorId> ids_from(const json& j) {
  return to_predictor_ids(j.get<std::vector<std::string>>());
}

json ids_to(const std::vector<PredictorId>& ids) {
  json out = json::array();
  for (const auto& id : ids) out.push_back(id.str());
  return out;
}

MixtureConfig mixture_from_json(const json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "reference") return MixtureConfig::reference_layout();
    throw ConfigError("mixture must be \"reference\" or an object");
  }
  MixtureConfig m;
  m.bag_members = ids_from(j.at("bag_members"));
  if (j.contains("bag_weight_mode")) m.bag_weight_mode = weight_mode_from_json(j["bag_weight_mode"]);
  if (j.contains("second_layer_mode")) {
    m.second_layer_mode = weight_mode_from_json(j["second_layer_mode"]);
  }
  for (const auto& g : j.value("groups", json::array())) {
    m.groups.push_back({g.at("name").get<std::string>(), ids_from(g.at("members")),
                        booster_from_json(g.value("booster", json("default")))});
  }
  return m;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::filesystem::path& p) {
  return p.is_absolute() ? p : base / p;
}

}  // namespace

std::filesystem::path RunConfig::predictor_path(const PredictorSource& p,
                                                const TaskSpec& task) const {
  return data_root / expand_task(p.file_template, task.id());
}

std::filesystem::path RunConfig::labels_path(const TaskSpec& task) const {
  return data_root / expand_task(labels_template, task.id());
}

std::vector<PredictorId> RunConfig::predictor_ids() const {
  std::vector<PredictorId> ids;
  for (const auto& p : predictors) ids.push_back(p.id);
  return ids;
}

std::uint64_t RunConfig::seed() const {
  if (!splits.seed) {
    throw ConfigError("no seed given: set splits.seed in the config or pass --seed");
  }
  return *splits.seed;
}

std::vector<Strategy> RunConfig::resolved_strategies() const {
  if (!strategies.empty()) return strategies;
  std::vector<Strategy> out{{"bagging-only", {}}};
  std::vector<std::string> names;
  for (const auto& g : mixture.groups) {
    names.push_back(g.name);
    out.push_back({"bagging+" + std::to_string(names.size()), names});
  }
  if (out.size() > 1) out.back().name = "full";
  return out;
}

void RunConfig::validate() const {
  if (tasks.empty()) throw ConfigError("config lists no tasks");
  std::set<std::string> task_ids;
  for (const auto& t : tasks) {
    if (!task_ids.insert(t.id()).second) throw ConfigError("duplicate task '" + t.id() + "'");
  }
  if (predictors.empty()) throw ConfigError("config lists no predictors");
  std::set<PredictorId> ids;
  for (const auto& p : predictors) {
    if (!ids.insert(p.id).second) throw ConfigError("duplicate predictor '" + p.id.str() + "'");
  }
  mixture.validate();
  auto require_known = [&](const std::vector<PredictorId>& members, const std::string& where) {
    for (const auto& id : members) {
      if (!ids.contains(id)) {
        throw ConfigError(where + " references unknown predictor '" + id.str() + "'");
      }
    }
  };
  require_known(mixture.bag_members, "mixture.bag_members");
  for (const auto& g : mixture.groups) require_known(g.members, "group '" + g.name + "'");

  std::set<std::string> group_names;
  for (const auto& g : mixture.groups) group_names.insert(g.name);
  std::set<std::string> strategy_names;
  for (const auto& s : strategies) {
    if (!strategy_names.insert(s.name).second) {
      throw ConfigError("duplicate strategy '" + s.name + "'");
    }
    for (const auto& g : s.groups) {
      if (!group_names.contains(g)) {
        throw ConfigError("strategy '" + s.name + "' names unknown group '" + g + "'");
      }
    }
  }
  if (!(splits.holdout_fraction > 0.0 && splits.holdout_fraction < 1.0)) {
    throw ConfigError("splits.holdout_fraction must lie in (0, 1)");
  }
  if (splits.k < 2) throw ConfigError("splits.k must be >= 2");

  for (const auto& t : tasks) {
    const auto lp = labels_path(t);
    if (!std::filesystem::is_regular_file(lp)) {
      throw FormatError("labels file not found: " + lp.string());
    }
    for (const auto& p : predictors) {
      const auto pp = predictor_path(p, t);
      if (!std::filesystem::is_regular_file(pp)) {
        throw FormatError("predictor file not found: " + pp.string());
      }
    }
  }
}

RunConfig parse_run_config(const std::string& text, const std::filesystem::path& base_dir,
                           const std::string& source_name) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(source_name + ": " + e.what());
  }
  try {
    RunConfig c;
    for (const auto& t : j.at("tasks")) {
      c.tasks.emplace_back(t.at("task_id").get<std::string>(),
                           t.at("class_count").get<std::size_t>());
    }
    c.data_root = resolve(base_dir, j.value("data_root", std::string(".")));
    for (const auto& p : j.at("predictors")) {
      if (p.is_string()) {
        const auto id = p.get<std::string>();
        c.predictors.push_back({PredictorId(id), "{task}/" + id + ".csv"});
      } else {
        const auto id = p.at("id").get<std::string>();
        c.predictors.push_back(
            {PredictorId(id), p.value("file", "{task}/" + id + ".csv")});
      }
    }
    c.labels_template = j.value("labels", c.labels_template);
    c.mixture = j.contains("mixture") ? mixture_from_json(j["mixture"])
                                      : MixtureConfig::reference_layout();
    for (const auto& s : j.value("strategies", json::array())) {
      c.strategies.push_back(
          {s.at("name").get<std::string>(), s.value("groups", std::vector<std::string>{})});
    }
    if (j.contains("splits")) {
      const auto& s = j["splits"];
      c.splits.holdout_fraction = s.value("holdout_fraction", c.splits.holdout_fraction);
      c.splits.k = s.value("k", c.splits.k);
      c.splits.stratified = s.value("stratified", c.splits.stratified);
      if (s.contains("seed") && !s["seed"].is_null()) c.splits.seed = s["seed"].get<std::uint64_t>();
    }
    c.output_dir = resolve(base_dir, j.value("output_dir", std::string("results")));
    return c;
  } catch (const json::exception& e) {
    throw ConfigError(source_name + ": " + e.what());
  }
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open config file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str(), path.parent_path(), path.string());
}

std::string run_config_to_json(const RunConfig& c) {
  json tasks = json::array();
  for (const auto& t : c.tasks) {
    tasks.push_back(json{{"task_id", t.id()}, {"class_count", t.class_count()}});
  }
  json predictors = json::array();
  for (const auto& p : c.predictors) {
    predictors.push_back(json{{"id", p.id.str()}, {"file", p.file_template}});
  }
  json groups = json::array();
  for (const auto& g : c.mixture.groups) {
    groups.push_back(json{{"name", g.name},
                          {"members", ids_to(g.members)},
                          {"booster", params_to_json(g.booster_params)}});
  }
  json strategies = json::array();
  for (const auto& s : c.strategies) strategies.push_back(json{{"name", s.name}, {"groups", s.groups}});
  json splits{{"holdout_fraction", c.splits.holdout_fraction},
              {"k", c.splits.k},
              {"stratified", c.splits.stratified}};
  splits["seed"] = c.splits.seed ? json(*c.splits.seed) : json(nullptr);
  const json j{{"tasks", std::move(tasks)},
               {"data_root", c.data_root.generic_string()},
               {"predictors", std::move(predictors)},
               {"labels", c.labels_template},
               {"mixture",
                {{"bag_members", ids_to(c.mixture.bag_members)},
                 {"bag_weight_mode", weight_mode_to_json(c.mixture.bag_weight_mode)},
                 {"groups", std::move(groups)},
                 {"second_layer_mode", weight_mode_to_json(c.mixture.second_layer_mode)}}},
               {"strategies", std::move(strategies)},
               {"splits", std::move(splits)},
               {"output_dir", c.output_dir.generic_string()}};
  return j.dump(2) + "\n";
}

}  // namespace mixens
