#include <algorithm>
#include <random>

#include <json.hpp>

#include "starwm/codec.hpp"
#include "starwm/rule_sim.hpp"

namespace starwm {

using nlohmann::json;

Scenario scenario_from_json(std::string_view text) {
    const json j = json::parse(text);
    Scenario s;
    s.name = j.value("name", "");
    s.initial = parse_observation(j.at("initial_obs").get<std::string>());
    for (const auto& line : j.value("actions", std::vector<std::string>{})) {
        s.actions.push_back(parse_action_line(line));
    }
    return s;
}

std::string scenario_to_json(const Scenario& s) {
    nlohmann::ordered_json j;
    j["name"] = s.name;
    j["initial_obs"] = serialize_observation(s.initial);
    j["actions"] = json::array();
    for (const auto& a : s.actions) j["actions"].push_back(format_action(a));
    return j.dump(1);
}

std::vector<TrajectoryRecord> generate_trajectory(const Scenario& scenario, int length_s, const SimConfig& cfg,
                                                  const TrajectoryMeta& meta) {
    if (length_s < 0) throw std::invalid_argument("length must be nonnegative");
    std::vector<std::vector<TimedAction>> per_second(static_cast<size_t>(length_s));
    for (const auto& a : scenario.actions) {
        const int second = a.offset_ds / 10;
        if (a.offset_ds < 0 || second >= length_s) continue;
        TimedAction local = a;
        local.offset_ds = a.offset_ds % 10;
        per_second[static_cast<size_t>(second)].push_back(std::move(local));
    }
    for (auto& acts : per_second) {
        std::stable_sort(acts.begin(), acts.end(),
                         [](const TimedAction& a, const TimedAction& b) { return a.offset_ds < b.offset_ds; });
    }

    std::vector<TrajectoryRecord> out;
    out.reserve(static_cast<size_t>(length_s) + 1);
    TrajectoryMeta m = meta;
    if (m.trajectory_id.empty()) m.trajectory_id = scenario.name;
    if (m.map.empty()) m.map = scenario.initial.map_name;

    Observation obs = scenario.initial;
    out.push_back({obs.time_s, serialize_observation(obs), {}, m});
    for (int k = 0; k < length_s; ++k) {
        const auto& acts = per_second[static_cast<size_t>(k)];
        obs = simulate(obs, acts, 1, cfg);
        TrajectoryRecord r{obs.time_s, serialize_observation(obs), {}, m};
        for (const auto& a : acts) r.actions.push_back(format_action(a));
        out.push_back(std::move(r));
    }
    return out;
}

namespace {

class Dice {
public:
    explicit Dice(std::uint64_t seed) : rng_(seed) {}
    /// Uniform in [lo, hi]; modulo reduction keeps the stream identical across standard libraries.
    int range(int lo, int hi) { return lo + static_cast<int>(rng_() % static_cast<std::uint64_t>(hi - lo + 1)); }
    bool chance(double p) { return static_cast<double>(rng_() % 1000000) < p * 1000000.0; }

private:
    std::mt19937_64 rng_;
};

Entity make(int id, std::string kind, Point pos) {
    Entity e;
    e.id = id;
    e.kind = std::move(kind);
    e.pos = pos;
    return e;
}

bool idle(const Observation& o, int owner) {
    return std::none_of(o.queue.begin(), o.queue.end(), [&](const QueueEntry& q) { return q.owner_id == owner; });
}

const Entity* find(const std::vector<Entity>& v, int id) {
    for (const auto& e : v) {
        if (e.id == id) return &e;
    }
    return nullptr;
}

}  // namespace

Scenario random_scenario(std::uint64_t seed, int length_s, const SimConfig& cfg) {
    Dice dice(seed);
    Scenario sc;
    sc.name = "scenario-" + std::to_string(seed);

    Observation& o = sc.initial;
    o.time_s = dice.range(60, 420);
    o.race = "Terran";
    o.enemy_race = "Terran";
    o.map_name = "Flat64";
    o.map_size = map_size_for(o.map_name);

    const Point cc{dice.range(18, 24), dice.range(58, 64)};
    o.my_structures.push_back(make(1, "Commandcenter", cc));
    o.my_structures.push_back(make(2, "Barracks", {cc.x + 10, cc.y - 6}));
    o.my_structures.push_back(make(3, "Barracks", {cc.x + 12, cc.y}));
    const int depots = dice.range(1, 3);
    for (int i = 0; i < depots; ++i) {
        o.my_structures.push_back(make(4 + i, "Supplydepotlowered", {cc.x - 4 + 2 * i, cc.y + 8}));
    }
    o.my_structures.push_back(make(8, "Refinery", {cc.x - 7, cc.y - 3}));
    o.my_structures.push_back(make(9, "Engineeringbay", {cc.x + 4, cc.y + 10}));

    const int miners = dice.range(12, 20);
    for (int i = 0; i < miners; ++i) o.workers.mining.push_back(20 + i);
    o.my_workers.push_back(make(50, "Scv", {cc.x + 3, cc.y + 3}));
    o.my_workers.push_back(make(51, "Scv", {cc.x - 3, cc.y + 4}));

    const Point rally{cc.x + 20 + dice.range(0, 6), cc.y - 8 + dice.range(0, 6)};
    const int marines = dice.range(3, 8);
    for (int i = 0; i < marines; ++i) {
        o.my_army.push_back(make(60 + i, "Marine", {rally.x + i % 3, rally.y + i / 3}));
    }
    const Point enemy_base{dice.range(64, 72), dice.range(22, 30)};
    o.my_army.push_back(make(59, "Marine", {enemy_base.x - 4, enemy_base.y + 4}));
    o.enemy_structures.push_back(make(200, "Barracks", {enemy_base.x, enemy_base.y}));
    o.enemy_structures.push_back(make(201, "Supplydepot", {enemy_base.x - 5, enemy_base.y + 1}));
    o.snapshot_enemy_structures.push_back({"Commandcenter", {enemy_base.x + 6, enemy_base.y - 6}});

    const int squad = dice.range(2, 5);
    for (int i = 0; i < squad; ++i) {
        Entity e = make(210 + i, "Marine", {rally.x + 8, rally.y - 2 + i});
        e.status = "attacking (" + std::to_string(rally.x) + "," + std::to_string(rally.y) + ")";
        o.enemy_units.push_back(e);
    }

    o.minerals = dice.range(50, 400);
    o.minerals_rate = cfg.income_per_worker * miners;
    o.gas = dice.range(100, 300);
    o.gas_rate = 54 * dice.range(1, 3);
    o.supply_workers = miners + 2;
    o.supply_army = marines + 1;
    o.supply_used = *o.supply_workers + *o.supply_army;
    o.supply_cap = std::min(cfg.supply_limit, 15 + 8 * depots);
    while (o.supply_cap < o.supply_used + 1) o.supply_cap += 8;
    if (o.supply_cap > cfg.supply_limit) throw std::logic_error("scenario supply above limit");

    Observation cur = o;
    bool researched = false;
    bool morphed = false;
    for (int t = 0; t < length_s; ++t) {
        std::vector<TimedAction> acts;
        auto issue = [&](const Entity& subject, std::string command, Target target = {}) {
            TimedAction a;
            a.offset_ds = dice.range(0, 9);
            a.subject_kind = subject.kind;
            a.subject_id = subject.id;
            a.command = std::move(command);
            a.target = std::move(target);
            acts.push_back(std::move(a));
        };
        const int free_supply = cur.supply_cap - cur.supply_used;

        if (const Entity* hall = find(cur.my_structures, 1)) {
            if (idle(cur, 1) && cur.minerals >= 50 && free_supply >= 1 && dice.chance(0.8)) {
                issue(*hall, "Commandcentertrain_scv");
            } else if (!morphed && idle(cur, 1) && cur.minerals >= 150 && dice.chance(0.05)) {
                issue(*hall, "Upgradetoorbital_orbitalcommand");
                morphed = true;
            }
        }
        for (int rax : {2, 3}) {
            const Entity* b = find(cur.my_structures, rax);
            if (b && idle(cur, rax) && cur.minerals >= 100 && free_supply >= 2 && dice.chance(0.6)) {
                issue(*b, "Barrackstrain_marine");
            }
        }
        const bool building_depot = std::any_of(cur.queue.begin(), cur.queue.end(), [](const QueueEntry& q) {
            return q.is_construction && q.owner_kind == "Supplydepot";
        });
        if (free_supply <= 3 && !building_depot && cur.minerals >= 100 && cur.supply_cap < cfg.supply_limit) {
            const Entity* builder = nullptr;
            for (const auto& w : cur.my_workers) {
                if (w.status.rfind("constructing", 0) != 0) builder = &w;
            }
            Entity fallback;
            if (!builder && !cur.workers.mining.empty()) {
                fallback = make(cur.workers.mining.front(), "Scv", cc);
                builder = &fallback;
            }
            if (builder) {
                issue(*builder, "Terranbuild_supplydepot",
                      Target::at({dice.range(cc.x - 8, cc.x + 8), dice.range(cc.y + 12, cc.y + 20)}));
            }
        }
        if (!researched && cur.minerals >= 100 && cur.gas >= 100 && dice.chance(0.1)) {
            if (const Entity* bay = find(cur.my_structures, 9)) {
                issue(*bay, "Engineeringbayresearch_terraninfantryweaponslevel1");
                researched = true;
            }
        }
        if (!cur.my_army.empty() && dice.chance(0.12)) {
            const Entity& m = cur.my_army[static_cast<size_t>(dice.range(0, static_cast<int>(cur.my_army.size()) - 1))];
            const Point dest{dice.range(rally.x - 12, rally.x + 12), dice.range(rally.y - 12, rally.y + 12)};
            issue(m, dice.chance(0.3) ? "Attack" : "Move", Target::at(dest));
        }
        if (const Entity* scout = find(cur.my_army, 59); scout && dice.chance(0.02)) {
            issue(*scout, "Move", Target::at(rally));
        }
        for (const auto& w : cur.my_workers) {
            if (w.status.empty() && dice.chance(0.03)) issue(w, "Harvest_gather", Target::unit("Mineralfield", 900));
        }

        cur = simulate(cur, acts, 1, cfg);
        for (auto& a : acts) {
            a.offset_ds += 10 * t;
            sc.actions.push_back(std::move(a));
        }
    }
    return sc;
}

}  // namespace starwm
