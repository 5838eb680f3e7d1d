#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace starwm {

struct Point {
    int x = 0;
    int y = 0;

    friend bool operator==(const Point&, const Point&) = default;
};

double distance(Point a, Point b);

struct MapSize {
    int width = 256;
    int height = 256;

    friend bool operator==(const MapSize&, const MapSize&) = default;
};

enum class Race { Terran, Protoss, Zerg, Unknown };

Race race_from_string(std::string_view name);

/// Any positioned, identified game object: a unit or a finished structure.
struct Entity {
    int id = 0;
    std::string kind;
    Point pos;
    int hp_pct = 100;
    std::optional<int> energy_pct;
    /// Free-form. Kinematics read "moving to (x,y)" / "attacking (x,y)".
    std::string status;

    friend bool operator==(const Entity&, const Entity&) = default;
};

/// Last-seen enemy structure under the fog; carries neither id nor hp.
struct SnapshotEntity {
    std::string kind;
    Point pos;

    friend bool operator==(const SnapshotEntity&, const SnapshotEntity&) = default;
};

struct QueueEntry {
    int owner_id = 0;
    std::string owner_kind;
    Point pos;
    /// Empty for constructions; task_name() yields the building kind then.
    std::string task;
    int progress_pct = 0;
    bool is_construction = false;

    const std::string& task_name() const { return is_construction ? owner_kind : task; }

    friend bool operator==(const QueueEntry&, const QueueEntry&) = default;
};

/// The aggregated "> Workers:" line: ids of gathering workers and MULEs.
struct WorkerSummary {
    std::vector<int> mining;
    std::vector<int> mules;

    friend bool operator==(const WorkerSummary&, const WorkerSummary&) = default;
};

struct Observation {
    int time_s = 0;
    std::string race;
    std::string enemy_race;
    std::string map_name;
    MapSize map_size;

    int minerals = 0;
    int minerals_rate = 0;
    int gas = 0;
    int gas_rate = 0;

    int supply_used = 0;
    int supply_cap = 0;
    std::optional<int> supply_army;
    std::optional<int> supply_workers;

    // Set semantics for scoring; kept ordered so text round-trips byte-exact.
    std::vector<std::string> alerts;
    std::vector<std::string> upgrades;

    std::vector<QueueEntry> queue;

    WorkerSummary workers;
    /// Workers listed individually under the Workers group (not gathering).
    std::vector<Entity> my_workers;
    std::vector<Entity> my_army;
    std::vector<Entity> my_structures;

    std::vector<Entity> enemy_units;
    std::vector<Entity> enemy_structures;
    std::vector<SnapshotEntity> snapshot_enemy_structures;

    /// Positioned self units: listed workers followed by army.
    std::vector<Entity> my_units() const;

    friend bool operator==(const Observation&, const Observation&) = default;
};

struct Target {
    enum class Kind { None, Point, Entity };
    Kind kind = Kind::None;
    Point point;
    std::string entity_kind;
    int entity_id = 0;

    static Target none() { return {}; }
    static Target at(Point p) { return {Kind::Point, p, {}, 0}; }
    static Target unit(std::string kind, int id) { return {Kind::Entity, {}, std::move(kind), id}; }

    friend bool operator==(const Target&, const Target&) = default;
};

/// Offsets are kept in tenths of a second so window rebasing stays exact.
struct TimedAction {
    int offset_ds = 0;
    std::string subject_kind;
    int subject_id = 0;
    std::string command;
    Target target;

    double offset_s() const { return offset_ds / 10.0; }

    friend bool operator==(const TimedAction&, const TimedAction&) = default;
};

bool is_worker_kind(std::string_view kind);

/// Map bounds by name; unknown maps get the engine's 256x256 maximum.
MapSize map_size_for(std::string_view map_name);

/// Workers count as rendered in Info, falling back to counting worker entities.
int worker_count(const Observation& obs);

/// Lists every invariant violation; empty when the observation is valid.
std::vector<std::string> validate(const Observation& obs);

std::string format_clock(int time_s);

}  // namespace starwm
