#include "json_util.hpp"

#include "mixens/errors.hpp"

namespace mixens {

using nlohmann::json;

json params_to_json(const GbdtParams& p) {
  return json{{"rounds", p.rounds},
              {"max_depth", p.max_depth},
              {"learning_rate", p.learning_rate},
              {"l2_lambda", p.l2_lambda},
              {"gain_gamma", p.gain_gamma},
              {"min_hessian_sum", p.min_hessian_sum},
              {"seed", p.seed}};
}

GbdtParams params_from_json(const json& j, const GbdtParams& base) {
  if (!j.is_object()) throw ConfigError("booster params must be an object");
  GbdtParams p = base;
  p.rounds = j.value("rounds", p.rounds);
  p.max_depth = j.value("max_depth", p.max_depth);
  p.learning_rate = j.value("learning_rate", p.learning_rate);
  p.l2_lambda = j.value("l2_lambda", p.l2_lambda);
  p.gain_gamma = j.value("gain_gamma", p.gain_gamma);
  p.min_hessian_sum = j.value("min_hessian_sum", p.min_hessian_sum);
  p.seed = j.value("seed", p.seed);
  p.validate();
  return p;
}

json weight_mode_to_json(const WeightMode& mode) {
  if (const auto* e = std::get_if<ExplicitWeights>(&mode)) return json{{"explicit", e->values}};
  return weight_mode_name(mode);
}

WeightMode weight_mode_from_json(const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "equal") return EqualWeights{};
    if (s == "accuracy") return AccuracyProportional{};
    throw ConfigError("unknown weight mode '" + s + "'");
  }
  if (j.is_object() && j.contains("explicit")) {
    return ExplicitWeights{j.at("explicit").get<std::vector<double>>()};
  }
  if (j.is_array()) return ExplicitWeights{j.get<std::vector<double>>()};
  throw ConfigError("weight mode must be \"equal\", \"accuracy\" or {\"explicit\": [...]}");
}

json weights_to_json(const VotingWeights& w) {
  json out = json::array();
  for (const auto& e : w.entries()) {
    out.push_back(json{{"predictor", e.predictor.str()}, {"weight", e.weight}});
  }
  return out;
}

VotingWeights weights_from_json(const json& j) {
  std::vector<VotingWeights::Entry> entries;
  for (const auto& e : j) {
    entries.push_back({PredictorId(e.at("predictor").get<std::string>()),
                       e.at("weight").get<double>()});
  }
  return VotingWeights::restore(std::move(entries));
}

}  // namespace mixens
