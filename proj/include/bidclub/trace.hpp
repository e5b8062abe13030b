#pragma once

#include <json.hpp>

#include "bidclub/environment.hpp"
#include "bidclub/experiments.hpp"
#include "bidclub/mechanisms.hpp"

namespace bidclub {

/// JSON views used by the per-trial audit trace (one object per line).
nlohmann::json to_json(const AuctionInstance& instance);
nlohmann::json to_json(const AuctionOutcome& outcome);
nlohmann::json to_json(const TrialRecord& record);

}  // namespace bidclub
