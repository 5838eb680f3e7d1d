#pragma once

#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "starwm/match_log.hpp"
#include "starwm/predictors.hpp"
#include "starwm/rule_sim.hpp"
#include "starwm/trajectory.hpp"

namespace starwm {

class PolicyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Generate: no refinement. RefineOnly: self-reflection without prediction.
/// ZeroShotWm and Full both simulate; they differ only in which world model is plugged in.
enum class Ablation { Generate, RefineOnly, ZeroShotWm, Full };

std::string_view to_string(Ablation a);
Ablation ablation_from_string(std::string_view name);

struct RefinementRequest {
    const Observation& current;
    const ActionList& initial;
    /// Null when no prediction is available (self-reflection).
    const Observation* predicted;
    const std::string& context;
};

class Policy {
public:
    virtual ~Policy() = default;
    virtual ActionList propose(const Observation& obs) = 0;
    virtual ActionList refine(const RefinementRequest& req) = 0;
};

class ScriptedPolicy : public Policy {
public:
    using ProposeFn = std::function<ActionList(const Observation&)>;
    using RefineFn = std::function<ActionList(const RefinementRequest&)>;

    /// Without a refine function the initial proposal is returned unchanged.
    explicit ScriptedPolicy(ProposeFn propose, RefineFn refine = {})
        : propose_(std::move(propose)), refine_(std::move(refine)) {}

    ActionList propose(const Observation& obs) override { return propose_(obs); }
    ActionList refine(const RefinementRequest& req) override { return refine_ ? refine_(req) : req.initial; }

private:
    ProposeFn propose_;
    RefineFn refine_;
};

/// Trains workers from idle townhalls and marines from idle barracks; never builds depots.
ActionList macro_build_order(const Observation& obs);

/// Deterministic stand-in for the refinement checklist, applied to the predicted state
/// (or the current one when there is no prediction).
struct ChecklistOptions {
    /// Add a depot when unused supply drops below low_supply.
    bool supply_guard = true;
    int low_supply = 3;
    /// Drop proposed depots when unused supply is at least surplus_supply.
    bool drop_surplus_depots = false;
    int surplus_supply = 7;
    /// Train a worker from every idle townhall that can afford one.
    bool fill_idle_townhalls = false;
};

ActionList checklist_refine(const RefinementRequest& req, const ChecklistOptions& options);

/// Chat-backed policy: one user turn with the game state, then the refinement turn.
class ChatPolicy : public Policy {
public:
    explicit ChatPolicy(RemoteConfig cfg);
    ActionList propose(const Observation& obs) override;
    ActionList refine(const RefinementRequest& req) override;

    std::string state_message(const Observation& obs) const;

private:
    ChatClient client_;
    std::string ask(const std::vector<ChatMessage>& messages) const;
};

/// Reads the first JSON array in a reply, tolerating a think block and code fences.
ActionList parse_action_reply(std::string_view reply);

/// "COMMANDCENTERTRAIN_SCV" -> "Commandcentertrain_scv".
std::string normalize_command(std::string_view action);

/// One TimedAction per acting unit at offset 0; kinds are looked up in obs.
std::vector<TimedAction> to_timed_actions(const ActionList& actions, const Observation& obs);

/// Report embedded in the refinement prompt: the serialized prediction without trailing blank lines.
std::string simulation_report(const Observation& predicted);

struct StepOptions {
    int horizon_s = 5;
    int player_id = 1;
    Ablation ablation = Ablation::Full;
    bool no_think = true;
};

/// Generate, simulate, build the refinement context, refine. A failing world model
/// leaves a_refined = a_init with the error noted.
AgentStepRecord gsr_step(const Observation& obs, Policy& policy, Predictor* world_model, const StepOptions& options);

struct EnvAdvance {
    std::vector<SecondTelemetry> seconds;
    std::vector<IssuedAction> issued;
};

class Environment {
public:
    virtual ~Environment() = default;
    virtual Observation observe() = 0;
    /// Applies actions at the start of the window and advances `seconds` game seconds.
    virtual EnvAdvance advance(const std::vector<TimedAction>& actions, int seconds) = 0;
    virtual bool done() const = 0;
    virtual std::string result() const = 0;
};

/// The rule simulator as a toy game. Ends at the time limit, when the player has no
/// structures left (loss), or when every enemy known at the start is gone (win).
class RuleSimEnvironment : public Environment {
public:
    RuleSimEnvironment(Observation initial, SimConfig cfg, int length_s);

    Observation observe() override { return obs_; }
    EnvAdvance advance(const std::vector<TimedAction>& actions, int seconds) override;
    bool done() const override;
    std::string result() const override;

private:
    Observation obs_;
    SimConfig cfg_;
    int end_time_s_;
    bool had_enemies_;
    SecondTelemetry totals_;
    long value_of(const std::string& kind) const;
};

/// Replays recorded observations; actions are logged but do not influence the game.
class ReplayEnvironment : public Environment {
public:
    explicit ReplayEnvironment(std::vector<TrajectoryRecord> records);

    Observation observe() override;
    EnvAdvance advance(const std::vector<TimedAction>& actions, int seconds) override;
    bool done() const override;
    std::string result() const override;

private:
    std::vector<TrajectoryRecord> records_;
    size_t cursor_ = 0;
};

/// Army value of a unit kind: mineral plus gas cost. Structures, MULEs and unknown kinds count 0.
long army_value(const UnitTable& table, const std::string& kind);

struct EpisodeOptions {
    StepOptions step;
    /// Seconds between decisions.
    int cadence_s = 5;
    std::string episode_id = "episode";
    /// 0 means no limit beyond the environment's own end.
    int max_steps = 0;
};

/// Thrown when the environment fails mid-episode; carries the log recorded so far.
class EpisodeError : public std::runtime_error {
public:
    EpisodeError(const std::string& what, MatchLog partial)
        : std::runtime_error(what), partial_(std::move(partial)) {}
    const MatchLog& partial() const noexcept { return partial_; }

private:
    MatchLog partial_;
};

MatchLog run_episode(Environment& env, Policy& policy, Predictor* world_model, const EpisodeOptions& options);

}  // namespace starwm
