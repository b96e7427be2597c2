// SystemState snapshot serialization. Field names follow the data model
// one-for-one so snapshots can be diffed, replayed, and golden-tested.
#pragma once

#include "ida/state.hpp"

#include <json.hpp>

namespace ida {

nlohmann::json to_json(const SystemState& state);
SystemState system_from_json(const nlohmann::json& j);

nlohmann::json pool_to_json(const PoolState& pool);
PoolState pool_from_json(const nlohmann::json& j);

} // namespace ida
