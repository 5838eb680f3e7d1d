#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "starwm/observation.hpp"
#include "starwm/trajectory.hpp"
#include "starwm/unit_table.hpp"

namespace starwm {

struct SimConfig {
    double game_speed = 1.4;
    UnitTable units = UnitTable::builtin();
    /// Engagement range in map units.
    double combat_radius = 6.0;
    /// Minerals per minute contributed by each gathering worker.
    int income_per_worker = 60;
    int queue_limit = 5;
    int supply_limit = 200;

    void check() const;
};

enum class ActionOutcome {
    Accepted,
    InsufficientResources,
    SupplyBlocked,
    QueueFull,
    InvalidSubject,
    InvalidTarget,
    Unsupported,
};

std::string_view to_string(ActionOutcome outcome);

struct ActionRecord {
    /// Game second at which the action took effect.
    int t_s = 0;
    TimedAction action;
    ActionOutcome outcome = ActionOutcome::Accepted;
    bool accepted() const { return outcome == ActionOutcome::Accepted; }
};

struct DeathRecord {
    int t_s = 0;
    bool mine = false;
    int id = 0;
    std::string kind;
};

/// Flows of one simulated second.
struct SecondRecord {
    int t_s = 0;
    int minerals_collected = 0;
    int gas_collected = 0;
    int minerals_spent = 0;
    int gas_spent = 0;
    bool supply_blocked = false;
};

struct SimLog {
    std::vector<ActionRecord> actions;
    std::vector<DeathRecord> deaths;
    std::vector<SecondRecord> seconds;
    std::vector<std::string> warnings;
};

/// supply_used has reached supply_cap below the engine maximum.
bool supply_blocked(const Observation& obs, int supply_limit = 200);

/// Advances obs by delta_s one-second steps. An action with offset o (tenths of a
/// second) takes effect in step floor(o / 10), clamped to the last step; within a
/// step actions apply in list order. Throws UnknownKind when a production action
/// names a kind or upgrade missing from the unit table.
Observation simulate(const Observation& obs, const std::vector<TimedAction>& actions, int delta_s,
                     const SimConfig& cfg, SimLog* log = nullptr);

/// Percentage points gained per game second by a task of the given nominal build time.
double progress_per_second(double nominal_build_time_s, double game_speed);

/// Initial state plus actions with offsets measured from the scenario start.
struct Scenario {
    std::string name;
    Observation initial;
    std::vector<TimedAction> actions;
};

Scenario scenario_from_json(std::string_view text);
std::string scenario_to_json(const Scenario& scenario);

/// 1 Hz rollout of a scenario: record 0 is the initial state, record k the state after
/// simulate(record k-1, actions issued during second k, 1).
std::vector<TrajectoryRecord> generate_trajectory(const Scenario& scenario, int length_s, const SimConfig& cfg,
                                                  const TrajectoryMeta& meta = {});

/// Deterministic Terran-vs-Terran skirmish with a macro build order, an approaching
/// enemy squad, a scouted enemy base, and occasional army moves.
Scenario random_scenario(std::uint64_t seed, int length_s, const SimConfig& cfg);

}  // namespace starwm
