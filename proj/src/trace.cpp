#include "bidclub/trace.hpp"

namespace bidclub {

namespace {

template <typename Map>
nlohmann::json keyed(const Map& map) {
  nlohmann::json out = nlohmann::json::object();
  for (const auto& [key, value] : map) out[std::to_string(key)] = value;
  return out;
}

}  // namespace

nlohmann::json to_json(const AuctionInstance& instance) {
  nlohmann::json clubs = nlohmann::json::array();
  for (const Club& club : instance.clubs) {
    clubs.push_back({{"club_id", club.club_id}, {"members", club.members}});
  }
  nlohmann::json agents = nlohmann::json::object();
  for (const auto& [id, type] : instance.agents) {
    agents[std::to_string(id)] = {
        {"value", type.value},
        {"signal", type.signal ? nlohmann::json(*type.signal) : nlohmann::json(nullptr)}};
  }
  return {{"n_potential_coordinators", instance.n_potential_coordinators},
          {"clubs", std::move(clubs)},
          {"agents", std::move(agents)}};
}

nlohmann::json to_json(const AuctionOutcome& outcome) {
  nlohmann::json rejected = nlohmann::json::array();
  for (const RejectedBid& r : outcome.rejected) {
    rejected.push_back({{"agent", r.agent}, {"amount", r.amount}, {"reason", r.reason}});
  }
  return {{"winner", outcome.winner ? nlohmann::json(*outcome.winner) : nlohmann::json(nullptr)},
          {"transfers_to_center", keyed(outcome.transfers_to_center)},
          {"transfers_to_coordinator", keyed(outcome.transfers_to_coordinator)},
          {"allocation", keyed(outcome.allocation)},
          {"rejected", std::move(rejected)}};
}

nlohmann::json to_json(const TrialRecord& record) {
  nlohmann::json actions = nlohmann::json::array();
  for (const AgentAction& a : record.actions) {
    actions.push_back({{"agent", a.agent}, {"kind", a.kind}, {"amount", a.amount}});
  }
  return {{"trial", record.trial},
          {"instance", to_json(record.instance)},
          {"announced", record.announced},
          {"actions", std::move(actions)},
          {"outcome", to_json(record.outcome)},
          {"utilities", keyed(record.utilities)},
          {"coordinator_revenue", keyed(record.coordinator_revenue)},
          {"seller_revenue", record.seller_revenue}};
}

}  // namespace bidclub
