#include "starwm/agent_loop.hpp"

#include <algorithm>
#include <chrono>
#include <set>

#include "starwm/codec.hpp"
#include "starwm/prompts.hpp"

namespace starwm {

using nlohmann::json;

std::string_view to_string(Ablation a) {
    switch (a) {
        case Ablation::Generate: return "generate";
        case Ablation::RefineOnly: return "refine-only";
        case Ablation::ZeroShotWm: return "zeroshot-wm";
        case Ablation::Full: return "full";
    }
    return "full";
}

Ablation ablation_from_string(std::string_view name) {
    for (Ablation a : {Ablation::Generate, Ablation::RefineOnly, Ablation::ZeroShotWm, Ablation::Full}) {
        if (to_string(a) == name) return a;
    }
    throw std::invalid_argument("unknown ablation mode: " + std::string(name));
}

namespace {

bool townhall(std::string_view kind) {
    const std::string k = lower(kind);
    return k == "commandcenter" || k == "orbitalcommand" || k == "planetaryfortress";
}

bool producing(const Observation& o, int id) {
    return std::any_of(o.queue.begin(), o.queue.end(), [&](const QueueEntry& q) { return q.owner_id == id; });
}

bool builds_depot(const PolicyAction& a) { return lower(a.action).find("build_supplydepot") != std::string::npos; }

bool depot_underway(const Observation& o) {
    return std::any_of(o.queue.begin(), o.queue.end(), [](const QueueEntry& q) {
        return q.is_construction && lower(q.owner_kind) == "supplydepot";
    });
}

std::optional<int> pick_builder(const Observation& o) {
    for (const auto& w : o.my_workers) {
        if (lower(w.kind) == "scv" && w.status.rfind("constructing", 0) != 0) return w.id;
    }
    if (!o.workers.mining.empty()) return o.workers.mining.front();
    return std::nullopt;
}

std::optional<Point> depot_site(const Observation& o) {
    std::vector<Point> taken;
    for (const auto& s : o.my_structures) taken.push_back(s.pos);
    for (const auto& q : o.queue) {
        if (q.is_construction) taken.push_back(q.pos);
    }
    Point anchor{o.map_size.width / 2, o.map_size.height / 2};
    for (const auto& s : o.my_structures) {
        if (townhall(s.kind)) {
            anchor = s.pos;
            break;
        }
    }
    for (int dy : {8, 10, 12, -8, -10, -12}) {
        for (int dx = -8; dx <= 8; dx += 2) {
            const Point p{anchor.x + dx, anchor.y + dy};
            if (p.x < 0 || p.y < 0 || p.x > o.map_size.width || p.y > o.map_size.height) continue;
            const bool free = std::none_of(taken.begin(), taken.end(), [&](Point t) { return distance(t, p) < 2.0; });
            if (free) return p;
        }
    }
    return std::nullopt;
}

double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

ActionList macro_build_order(const Observation& obs) {
    ActionList out;
    int minerals = obs.minerals;
    for (const auto& s : obs.my_structures) {
        if (producing(obs, s.id) || minerals < 50) continue;
        if (townhall(s.kind)) {
            out.push_back({"COMMANDCENTERTRAIN_SCV", {s.id}, {}, {}});
            minerals -= 50;
        } else if (lower(s.kind) == "barracks") {
            out.push_back({"BARRACKSTRAIN_MARINE", {s.id}, {}, {}});
            minerals -= 50;
        }
    }
    return out;
}

ActionList checklist_refine(const RefinementRequest& req, const ChecklistOptions& options) {
    const Observation& s = req.predicted ? *req.predicted : req.current;
    ActionList out = req.initial;
    const int unused = s.supply_cap - s.supply_used;

    if (options.drop_surplus_depots && unused >= options.surplus_supply) {
        std::erase_if(out, builds_depot);
    }
    if (options.supply_guard && unused < options.low_supply && s.supply_cap < 200 &&
        std::none_of(out.begin(), out.end(), builds_depot) && !depot_underway(s) && !depot_underway(req.current)) {
        const auto builder = pick_builder(req.current);
        const auto site = depot_site(s);
        if (builder && site) out.push_back({"TERRANBUILD_SUPPLYDEPOT", {*builder}, {}, *site});
    }
    if (options.fill_idle_townhalls) {
        int minerals = s.minerals;
        for (const auto& hall : s.my_structures) {
            if (!townhall(hall.kind) || producing(s, hall.id) || minerals < 50) continue;
            const bool already = std::any_of(out.begin(), out.end(), [&](const PolicyAction& a) {
                return std::find(a.units.begin(), a.units.end(), hall.id) != a.units.end();
            });
            if (already) continue;
            out.push_back({"COMMANDCENTERTRAIN_SCV", {hall.id}, {}, {}});
            minerals -= 50;
        }
    }
    return out;
}

ActionList parse_action_reply(std::string_view reply) {
    const std::string body = strip_think_block(reply);
    const size_t open = body.find('[');
    const size_t close = body.rfind(']');
    if (open == std::string::npos || close == std::string::npos || close < open) {
        throw PolicyError("policy reply holds no JSON action list");
    }
    try {
        return actions_from_json(json::parse(body.substr(open, close - open + 1)));
    } catch (const json::exception& e) {
        throw PolicyError(std::string("policy reply is not a valid action list: ") + e.what());
    }
}

ChatPolicy::ChatPolicy(RemoteConfig cfg) : client_(std::move(cfg)) {}

std::string ChatPolicy::state_message(const Observation& obs) const {
    std::string msg = "### Current Game State\n" + serialize_observation(obs) +
                      "### Output\nReply with a JSON list of commands, each shaped like "
                      "{\"action\": \"BARRACKSTRAIN_MARINE\", \"units\": [65]} with an optional "
                      "\"target_unit\": <id> or \"target_position\": [x, y].";
    if (client_.config().no_think) msg += kNoThinkSuffix;
    return msg;
}

std::string ChatPolicy::ask(const std::vector<ChatMessage>& messages) const {
    const int attempts = client_.config().max_retries + 1;
    for (int attempt = 1;; ++attempt) {
        try {
            return client_.complete(messages);
        } catch (const PredictionError& e) {
            if (attempt >= attempts || !retryable(e)) throw PolicyError(e.what());
        }
    }
}

ActionList ChatPolicy::propose(const Observation& obs) {
    return parse_action_reply(ask({{"user", state_message(obs)}}));
}

ActionList ChatPolicy::refine(const RefinementRequest& req) {
    const std::string previous = "```\n" + to_json(req.initial).dump(4) + "\n```";
    return parse_action_reply(ask({{"user", state_message(req.current)},
                                   {"assistant", std::string(kEmptyThinkBlock) + "\n\n" + previous},
                                   {"user", req.context}}));
}

std::string normalize_command(std::string_view action) { return capitalize(action); }

std::vector<TimedAction> to_timed_actions(const ActionList& actions, const Observation& obs) {
    auto kind_of = [&](int id) -> std::string {
        for (const auto* list : {&obs.my_workers, &obs.my_army, &obs.my_structures, &obs.enemy_units,
                                 &obs.enemy_structures}) {
            for (const auto& e : *list) {
                if (e.id == id) return e.kind;
            }
        }
        const auto& w = obs.workers;
        if (std::find(w.mining.begin(), w.mining.end(), id) != w.mining.end()) return "Scv";
        if (std::find(w.mules.begin(), w.mules.end(), id) != w.mules.end()) return "Mule";
        return "Unknown";
    };
    std::vector<TimedAction> out;
    for (const auto& a : actions) {
        for (int unit : a.units) {
            TimedAction t;
            t.subject_id = unit;
            t.subject_kind = kind_of(unit);
            t.command = normalize_command(a.action);
            if (a.target_unit) {
                t.target = Target::unit(kind_of(*a.target_unit), *a.target_unit);
            } else if (a.target_position) {
                t.target = Target::at(*a.target_position);
            }
            out.push_back(std::move(t));
        }
    }
    return out;
}

std::string simulation_report(const Observation& predicted) {
    std::string text = serialize_observation(predicted);
    while (!text.empty() && text.back() == '\n') text.pop_back();
    return text;
}

AgentStepRecord gsr_step(const Observation& obs, Policy& policy, Predictor* world_model, const StepOptions& options) {
    AgentStepRecord r;
    r.t_s = obs.time_s;
    r.observation = obs;

    auto t0 = std::chrono::steady_clock::now();
    try {
        r.a_init = policy.propose(obs);
    } catch (const PolicyError&) {
        throw;
    } catch (const std::exception& e) {
        throw PolicyError(std::string("proposal failed: ") + e.what());
    }
    r.latency.propose_ms = ms_since(t0);

    if (options.ablation == Ablation::Generate) {
        r.a_refined = r.a_init;
        return r;
    }

    if (options.ablation == Ablation::RefineOnly) {
        t0 = std::chrono::steady_clock::now();
        r.refinement_context = render_self_reflection_prompt(options.no_think);
        r.latency.context_ms = ms_since(t0);
    } else {
        if (!world_model) throw std::invalid_argument("this ablation mode needs a world model");
        t0 = std::chrono::steady_clock::now();
        try {
            r.predicted_obs = world_model->predict(
                {obs, to_timed_actions(r.a_init, obs), options.horizon_s, options.player_id});
        } catch (const std::exception& e) {
            r.latency.simulate_ms = ms_since(t0);
            r.wm_error = e.what();
            r.a_refined = r.a_init;
            return r;
        }
        r.latency.simulate_ms = ms_since(t0);
        t0 = std::chrono::steady_clock::now();
        r.refinement_context = render_refinement_prompt(simulation_report(*r.predicted_obs), options.no_think);
        r.latency.context_ms = ms_since(t0);
    }

    t0 = std::chrono::steady_clock::now();
    const Observation* predicted = r.predicted_obs ? &*r.predicted_obs : nullptr;
    try {
        r.a_refined = policy.refine({obs, r.a_init, predicted, r.refinement_context});
    } catch (const PolicyError&) {
        throw;
    } catch (const std::exception& e) {
        throw PolicyError(std::string("refinement failed: ") + e.what());
    }
    r.latency.refine_ms = ms_since(t0);
    r.revised = !same_actions(r.a_init, r.a_refined);
    return r;
}

long army_value(const UnitTable& table, const std::string& kind) {
    const UnitSpec* u = table.find(kind);
    if (!u || u->is_structure || lower(kind) == "mule") return 0;
    return u->mineral_cost + u->gas_cost;
}

RuleSimEnvironment::RuleSimEnvironment(Observation initial, SimConfig cfg, int length_s)
    : obs_(std::move(initial)), cfg_(std::move(cfg)), end_time_s_(obs_.time_s + length_s) {
    had_enemies_ = !obs_.enemy_units.empty() || !obs_.enemy_structures.empty() ||
                   !obs_.snapshot_enemy_structures.empty();
}

long RuleSimEnvironment::value_of(const std::string& kind) const { return army_value(cfg_.units, kind); }

EnvAdvance RuleSimEnvironment::advance(const std::vector<TimedAction>& actions, int seconds) {
    SimLog log;
    obs_ = simulate(obs_, actions, seconds, cfg_, &log);
    EnvAdvance out;
    for (const auto& sec : log.seconds) {
        totals_.t_s = sec.t_s;
        totals_.supply_blocked = sec.supply_blocked;
        totals_.minerals_collected += sec.minerals_collected;
        totals_.gas_collected += sec.gas_collected;
        totals_.minerals_spent += sec.minerals_spent;
        totals_.gas_spent += sec.gas_spent;
        for (const auto& d : log.deaths) {
            if (d.t_s != sec.t_s) continue;
            (d.mine ? totals_.army_value_lost : totals_.army_value_killed) += value_of(d.kind);
        }
        out.seconds.push_back(totals_);
    }
    for (const auto& a : log.actions) {
        const bool ok = a.accepted();
        out.issued.push_back({a.t_s, format_action(a.action), ok, ok ? "" : std::string(to_string(a.outcome))});
    }
    return out;
}

bool RuleSimEnvironment::done() const { return obs_.time_s >= end_time_s_ || result() != "draw"; }

std::string RuleSimEnvironment::result() const {
    if (obs_.my_structures.empty()) return "loss";
    if (had_enemies_ && obs_.enemy_units.empty() && obs_.enemy_structures.empty() &&
        obs_.snapshot_enemy_structures.empty()) {
        return "win";
    }
    return "draw";
}

ReplayEnvironment::ReplayEnvironment(std::vector<TrajectoryRecord> records) : records_(std::move(records)) {
    if (records_.empty()) throw std::invalid_argument("replay needs at least one record");
}

Observation ReplayEnvironment::observe() { return parse_observation(records_[cursor_].obs_text); }

EnvAdvance ReplayEnvironment::advance(const std::vector<TimedAction>& actions, int seconds) {
    EnvAdvance out;
    const int t0 = records_[cursor_].t_s;
    for (const auto& a : actions) out.issued.push_back({t0, format_action(a), true, "not executed in replay"});
    const size_t target = std::min(records_.size() - 1, cursor_ + static_cast<size_t>(std::max(seconds, 0)));
    while (cursor_ < target) {
        ++cursor_;
        const Observation o = parse_observation(records_[cursor_].obs_text);
        SecondTelemetry t;
        t.t_s = records_[cursor_].t_s;
        t.supply_blocked = supply_blocked(o);
        out.seconds.push_back(t);
    }
    return out;
}

bool ReplayEnvironment::done() const { return cursor_ + 1 >= records_.size(); }

std::string ReplayEnvironment::result() const {
    const std::string r = lower(records_.back().meta.result);
    if (r == "win" || r == "victory") return "win";
    if (r == "loss" || r == "defeat") return "loss";
    return "draw";
}

MatchLog run_episode(Environment& env, Policy& policy, Predictor* world_model, const EpisodeOptions& options) {
    if (options.cadence_s < 1) throw std::invalid_argument("cadence must be at least 1 s");
    MatchLog log;
    log.episode_id = options.episode_id;
    log.ablation = std::string(to_string(options.step.ablation));
    int start = 0;
    bool started = false;
    try {
        while (!env.done() && (options.max_steps == 0 || static_cast<int>(log.steps.size()) < options.max_steps)) {
            const Observation obs = env.observe();
            if (!started) {
                start = obs.time_s;
                started = true;
            }
            AgentStepRecord rec = gsr_step(obs, policy, world_model, options.step);
            const auto actions = to_timed_actions(rec.a_refined, obs);
            log.steps.push_back(std::move(rec));
            EnvAdvance adv = env.advance(actions, options.cadence_s);
            for (auto& s : adv.seconds) {
                log.total_time_s = s.t_s - start;
                log.telemetry.push_back(s);
            }
            for (auto& a : adv.issued) log.issued.push_back(std::move(a));
        }
        log.result = env.result();
    } catch (const PolicyError&) {
        throw;
    } catch (const std::exception& e) {
        log.result = env.result();
        throw EpisodeError(e.what(), std::move(log));
    }
    return log;
}

}  // namespace starwm
