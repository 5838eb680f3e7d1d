#include "starwm/match_log.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "starwm/codec.hpp"

namespace starwm {

using nlohmann::json;
using nlohmann::ordered_json;

ordered_json to_json(const PolicyAction& a) {
    ordered_json j;
    j["action"] = a.action;
    j["units"] = a.units;
    if (a.target_unit) j["target_unit"] = *a.target_unit;
    if (a.target_position) j["target_position"] = {a.target_position->x, a.target_position->y};
    return j;
}

ordered_json to_json(const ActionList& actions) {
    ordered_json j = ordered_json::array();
    for (const auto& a : actions) j.push_back(to_json(a));
    return j;
}

PolicyAction policy_action_from_json(const json& j) {
    PolicyAction a;
    a.action = j.at("action").get<std::string>();
    if (j.contains("units")) {
        const auto& u = j.at("units");
        if (u.is_array()) {
            a.units = u.get<std::vector<int>>();
        } else {
            a.units.push_back(u.get<int>());
        }
    }
    if (j.contains("target_unit") && !j.at("target_unit").is_null()) {
        const auto& t = j.at("target_unit");
        a.target_unit = t.is_array() ? t.at(0).get<int>() : t.get<int>();
    }
    if (j.contains("target_position") && !j.at("target_position").is_null()) {
        const auto& p = j.at("target_position");
        a.target_position = Point{static_cast<int>(std::lround(p.at(0).get<double>())),
                                  static_cast<int>(std::lround(p.at(1).get<double>()))};
    }
    return a;
}

ActionList actions_from_json(const json& j) {
    ActionList out;
    for (const auto& a : j) out.push_back(policy_action_from_json(a));
    return out;
}

bool same_actions(const ActionList& a, const ActionList& b) {
    if (a.size() != b.size()) return false;
    using Key = std::tuple<std::string, std::vector<int>, int, int, int, int, int>;
    auto keys = [](const ActionList& list) {
        std::vector<Key> out;
        for (const auto& x : list) {
            std::vector<int> units = x.units;
            std::sort(units.begin(), units.end());
            out.emplace_back(x.action, units, x.target_unit.has_value(), x.target_unit.value_or(0),
                             x.target_position.has_value(), x.target_position ? x.target_position->x : 0,
                             x.target_position ? x.target_position->y : 0);
        }
        std::sort(out.begin(), out.end());
        return out;
    };
    return keys(a) == keys(b);
}

ordered_json to_json(const AgentStepRecord& r) {
    ordered_json j;
    j["t_s"] = r.t_s;
    j["observation"] = serialize_observation(r.observation);
    j["a_init"] = to_json(r.a_init);
    j["predicted_obs"] = r.predicted_obs ? ordered_json(serialize_observation(*r.predicted_obs)) : ordered_json();
    if (!r.wm_error.empty()) j["wm_error"] = r.wm_error;
    j["refinement_context"] = r.refinement_context;
    j["a_refined"] = to_json(r.a_refined);
    j["revised"] = r.revised;
    j["latency_ms"] = {{"propose", r.latency.propose_ms},
                       {"simulate", r.latency.simulate_ms},
                       {"context", r.latency.context_ms},
                       {"refine", r.latency.refine_ms}};
    return j;
}

AgentStepRecord step_record_from_json(const json& j) {
    AgentStepRecord r;
    r.t_s = j.value("t_s", 0);
    if (j.contains("observation")) r.observation = parse_observation(j.at("observation").get<std::string>());
    r.a_init = actions_from_json(j.value("a_init", json::array()));
    if (j.contains("predicted_obs") && j.at("predicted_obs").is_string()) {
        r.predicted_obs = parse_observation(j.at("predicted_obs").get<std::string>());
    }
    r.wm_error = j.value("wm_error", "");
    r.refinement_context = j.value("refinement_context", "");
    r.a_refined = actions_from_json(j.value("a_refined", json::array()));
    r.revised = j.value("revised", false);
    if (j.contains("latency_ms")) {
        const auto& l = j.at("latency_ms");
        r.latency = {l.value("propose", 0.0), l.value("simulate", 0.0), l.value("context", 0.0),
                     l.value("refine", 0.0)};
    }
    return r;
}

ordered_json to_json(const MatchLog& log) {
    ordered_json j;
    j["episode_id"] = log.episode_id;
    j["ablation"] = log.ablation;
    j["result"] = log.result;
    j["total_time_s"] = log.total_time_s;
    j["steps"] = ordered_json::array();
    for (const auto& s : log.steps) j["steps"].push_back(to_json(s));
    j["telemetry"] = ordered_json::array();
    for (const auto& t : log.telemetry) {
        j["telemetry"].push_back({{"t_s", t.t_s},
                                  {"supply_blocked", t.supply_blocked},
                                  {"minerals_collected", t.minerals_collected},
                                  {"gas_collected", t.gas_collected},
                                  {"minerals_spent", t.minerals_spent},
                                  {"gas_spent", t.gas_spent},
                                  {"army_value_killed", t.army_value_killed},
                                  {"army_value_lost", t.army_value_lost}});
    }
    j["issued"] = ordered_json::array();
    for (const auto& a : log.issued) {
        ordered_json x = {{"t_s", a.t_s}, {"action", a.action}, {"valid", a.valid}};
        if (!a.reason.empty()) x["reason"] = a.reason;
        j["issued"].push_back(x);
    }
    return j;
}

MatchLog match_log_from_json(const json& j) {
    MatchLog log;
    log.episode_id = j.value("episode_id", "");
    log.ablation = j.value("ablation", "");
    log.result = j.value("result", "draw");
    log.total_time_s = j.value("total_time_s", 0);
    for (const auto& s : j.value("steps", json::array())) log.steps.push_back(step_record_from_json(s));
    for (const auto& t : j.value("telemetry", json::array())) {
        SecondTelemetry x;
        x.t_s = t.value("t_s", 0);
        x.supply_blocked = t.value("supply_blocked", false);
        x.minerals_collected = t.value("minerals_collected", 0L);
        x.gas_collected = t.value("gas_collected", 0L);
        x.minerals_spent = t.value("minerals_spent", 0L);
        x.gas_spent = t.value("gas_spent", 0L);
        x.army_value_killed = t.value("army_value_killed", 0L);
        x.army_value_lost = t.value("army_value_lost", 0L);
        log.telemetry.push_back(x);
    }
    for (const auto& a : j.value("issued", json::array())) {
        log.issued.push_back({a.value("t_s", 0), a.value("action", ""), a.value("valid", true), a.value("reason", "")});
    }
    return log;
}

std::vector<std::string> validate(const MatchLog& log) {
    std::vector<std::string> problems;
    for (size_t i = 1; i < log.telemetry.size(); ++i) {
        const auto& a = log.telemetry[i - 1];
        const auto& b = log.telemetry[i];
        if (b.minerals_collected < a.minerals_collected || b.gas_collected < a.gas_collected ||
            b.minerals_spent < a.minerals_spent || b.gas_spent < a.gas_spent ||
            b.army_value_killed < a.army_value_killed || b.army_value_lost < a.army_value_lost) {
            problems.push_back("cumulative counters decrease at t=" + std::to_string(b.t_s));
        }
    }
    if (!log.steps.empty() && log.total_time_s < log.steps.back().t_s - (log.steps.front().t_s)) {
        problems.push_back("total_time_s is shorter than the span of decision steps");
    }
    if (log.result != "win" && log.result != "loss" && log.result != "draw") {
        problems.push_back("result must be win, loss or draw");
    }
    return problems;
}

}  // namespace starwm
