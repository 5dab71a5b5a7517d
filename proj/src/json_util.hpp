#pragma once

// JSON conversions shared by the model, mixture and run-config readers.

#include <json.hpp>

#include "mixens/bagging.hpp"
#include "mixens/gbdt.hpp"

namespace mixens {

nlohmann::json params_to_json(const GbdtParams& p);

/// Fields missing from `j` keep the value from `base`. Validates the result.
GbdtParams params_from_json(const nlohmann::json& j, const GbdtParams& base = {});

/// "equal", "accuracy", or {"explicit": [w...]}.
nlohmann::json weight_mode_to_json(const WeightMode& mode);
WeightMode weight_mode_from_json(const nlohmann::json& j);

nlohmann::json weights_to_json(const VotingWeights& w);
VotingWeights weights_from_json(const nlohmann::json& j);

}  // namespace mixens
