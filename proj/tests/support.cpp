#include "support.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace starwm::test {

std::string fixture(const std::string& relative) { return std::string(STARWM_FIXTURES) + "/" + relative; }

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("missing test file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int uniform(std::mt19937_64& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

double uniform_real(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

namespace {

const char* pick(std::mt19937_64& rng, std::initializer_list<const char*> xs) {
    return *(xs.begin() + uniform(rng, 0, static_cast<int>(xs.size()) - 1));
}

std::vector<std::string> subset(std::mt19937_64& rng, std::initializer_list<const char*> xs) {
    std::vector<std::string> out;
    for (const char* x : xs) {
        if (uniform(rng, 0, 3) == 0) out.emplace_back(x);
    }
    return out;
}

Point point(std::mt19937_64& rng) { return {uniform(rng, 0, 88), uniform(rng, 0, 96)}; }

std::string status(std::mt19937_64& rng) {
    switch (uniform(rng, 0, 6)) {
        case 0: return "";
        case 1: return "idle";
        case 2: return "moving to (" + std::to_string(uniform(rng, 0, 88)) + "," + std::to_string(uniform(rng, 0, 96)) + ")";
        case 3: return "attacking (" + std::to_string(uniform(rng, 0, 88)) + "," + std::to_string(uniform(rng, 0, 96)) + ")";
        case 4: return "constructing Supplydepot";
        case 5: return "collecting resources automatically";
        default: return "returning, carrying minerals";
    }
}

Entity entity(std::mt19937_64& rng, int id, const char* kind) {
    Entity e;
    e.id = id;
    e.kind = kind;
    e.pos = point(rng);
    e.hp_pct = uniform(rng, 1, 100);
    if (uniform(rng, 0, 4) == 0) e.energy_pct = uniform(rng, 0, 100);
    e.status = status(rng);
    return e;
}

}  // namespace

Observation random_observation(std::mt19937_64& rng) {
    Observation o;
    o.time_s = uniform(rng, 0, 3599);
    o.race = pick(rng, {"Terran", "Protoss", "Zerg"});
    o.enemy_race = pick(rng, {"Terran", "Protoss", "Zerg", "Unknown"});
    o.map_name = "Flat64";
    o.map_size = map_size_for(o.map_name);
    o.minerals = uniform(rng, 0, 5000);
    o.minerals_rate = uniform(rng, 0, 3000);
    o.gas = uniform(rng, 0, 3000);
    o.gas_rate = uniform(rng, 0, 1000);
    o.supply_cap = uniform(rng, 0, 200);
    o.supply_used = uniform(rng, 0, o.supply_cap);
    if (uniform(rng, 0, 3) != 0) {
        o.supply_workers = uniform(rng, 0, o.supply_used);
        o.supply_army = o.supply_used - *o.supply_workers;
    }
    o.alerts = subset(rng, {"Supply blocked", "Under attack", "Research complete", "Nuclear launch detected"});
    o.upgrades = subset(rng, {"Punishergrenades", "Stimpack", "Shieldwall", "Terraninfantryweaponslevel1"});

    std::set<int> used;
    auto fresh = [&] {
        int id;
        do {
            id = uniform(rng, 1, 999);
        } while (!used.insert(id).second);
        return id;
    };

    const int nq = uniform(rng, 0, 5);
    for (int i = 0; i < nq; ++i) {
        QueueEntry q;
        q.owner_id = uniform(rng, 1, 999);
        q.pos = point(rng);
        q.progress_pct = uniform(rng, 0, 99);
        if (uniform(rng, 0, 2) == 0) {
            q.is_construction = true;
            q.owner_kind = pick(rng, {"Supplydepot", "Barracks", "Refinery"});
        } else {
            q.owner_kind = pick(rng, {"Commandcenter", "Barracks", "Factory"});
            q.task = pick(rng, {"Train SCV", "Train Marine", "Research Stimpack", "Train Siegetank (Queued)"});
        }
        o.queue.push_back(q);
    }
    const int mining = uniform(rng, 0, 20);
    for (int i = 0; i < mining; ++i) o.workers.mining.push_back(fresh());
    const int mules = uniform(rng, 0, 2);
    for (int i = 0; i < mules; ++i) o.workers.mules.push_back(fresh());
    for (int i = uniform(rng, 0, 3); i > 0; --i) o.my_workers.push_back(entity(rng, fresh(), "Scv"));
    for (int i = uniform(rng, 0, 8); i > 0; --i) {
        o.my_army.push_back(entity(rng, fresh(), pick(rng, {"Marine", "Marauder", "Siegetank", "Medivac"})));
    }
    for (int i = uniform(rng, 0, 6); i > 0; --i) {
        o.my_structures.push_back(
            entity(rng, fresh(), pick(rng, {"Commandcenter", "Barracks", "Supplydepot", "Refinery", "Factory"})));
    }
    for (int i = uniform(rng, 0, 5); i > 0; --i) {
        o.enemy_units.push_back(entity(rng, fresh(), pick(rng, {"Marine", "Zergling", "Stalker", "Scv"})));
    }
    for (int i = uniform(rng, 0, 3); i > 0; --i) {
        o.enemy_structures.push_back(entity(rng, fresh(), pick(rng, {"Barracks", "Hatchery", "Pylon"})));
    }
    for (int i = uniform(rng, 0, 3); i > 0; --i) {
        o.snapshot_enemy_structures.push_back({pick(rng, {"Commandcenter", "Nexus", "Supplydepot"}), point(rng)});
    }
    return o;
}

}  // namespace starwm::test
