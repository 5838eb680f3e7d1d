#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "starwm/observation.hpp"

namespace starwm {

/// One command in the policy's JSON action format:
/// {"action": "BARRACKSTRAIN_MARINE", "units": [65], "target_unit": 12, "target_position": [30, 61]}.
struct PolicyAction {
    std::string action;
    std::vector<int> units;
    std::optional<int> target_unit;
    std::optional<Point> target_position;

    friend bool operator==(const PolicyAction&, const PolicyAction&) = default;
};

using ActionList = std::vector<PolicyAction>;

nlohmann::ordered_json to_json(const PolicyAction& a);
nlohmann::ordered_json to_json(const ActionList& actions);
PolicyAction policy_action_from_json(const nlohmann::json& j);
ActionList actions_from_json(const nlohmann::json& j);

/// Multiset equality over (action, sorted units, target); list order is ignored.
bool same_actions(const ActionList& a, const ActionList& b);

struct PhaseLatency {
    double propose_ms = 0.0;
    double simulate_ms = 0.0;
    double context_ms = 0.0;
    double refine_ms = 0.0;
};

struct AgentStepRecord {
    int t_s = 0;
    Observation observation;
    ActionList a_init;
    std::optional<Observation> predicted_obs;
    /// Set when the world model failed; the step then keeps a_init.
    std::string wm_error;
    std::string refinement_context;
    ActionList a_refined;
    bool revised = false;
    PhaseLatency latency;
};

/// Cumulative counters at the end of one game second.
struct SecondTelemetry {
    int t_s = 0;
    bool supply_blocked = false;
    long minerals_collected = 0;
    long gas_collected = 0;
    long minerals_spent = 0;
    long gas_spent = 0;
    long army_value_killed = 0;
    long army_value_lost = 0;
};

struct IssuedAction {
    int t_s = 0;
    std::string action;
    bool valid = true;
    std::string reason;
};

struct MatchLog {
    std::string episode_id;
    std::string ablation;
    std::vector<AgentStepRecord> steps;
    std::vector<SecondTelemetry> telemetry;
    std::vector<IssuedAction> issued;
    /// "win", "loss" or "draw".
    std::string result = "draw";
    int total_time_s = 0;
};

nlohmann::ordered_json to_json(const AgentStepRecord& r);
AgentStepRecord step_record_from_json(const nlohmann::json& j);
nlohmann::ordered_json to_json(const MatchLog& log);
MatchLog match_log_from_json(const nlohmann::json& j);

/// Lists consistency violations (non-monotone counters, time before the last step...).
std::vector<std::string> validate(const MatchLog& log);

}  // namespace starwm
