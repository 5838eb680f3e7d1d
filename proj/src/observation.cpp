#include "starwm/observation.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

namespace starwm {

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

void check_entities(const std::vector<Entity>& list, std::string_view name, MapSize map,
                    std::vector<std::string>& problems) {
    std::set<int> ids;
    for (const auto& e : list) {
        if (!ids.insert(e.id).second) {
            problems.push_back(std::string(name) + ": duplicate id " + std::to_string(e.id));
        }
        if (e.hp_pct < 1 || e.hp_pct > 100) {
            problems.push_back(std::string(name) + ": hp out of range for id " + std::to_string(e.id));
        }
        if (e.energy_pct && (*e.energy_pct < 0 || *e.energy_pct > 100)) {
            problems.push_back(std::string(name) + ": energy out of range for id " +
                               std::to_string(e.id));
        }
        if (e.pos.x < 0 || e.pos.y < 0 || e.pos.x > map.width || e.pos.y > map.height) {
            problems.push_back(std::string(name) + ": position out of bounds for id " +
                               std::to_string(e.id));
        }
    }
}

}  // namespace

double distance(Point a, Point b) {
    return std::hypot(static_cast<double>(a.x - b.x), static_cast<double>(a.y - b.y));
}

Race race_from_string(std::string_view name) {
    const auto l = lower(name);
    if (l == "terran") return Race::Terran;
    if (l == "protoss") return Race::Protoss;
    if (l == "zerg") return Race::Zerg;
    return Race::Unknown;
}

std::vector<Entity> Observation::my_units() const {
    std::vector<Entity> out;
    out.reserve(my_workers.size() + my_army.size());
    out.insert(out.end(), my_workers.begin(), my_workers.end());
    out.insert(out.end(), my_army.begin(), my_army.end());
    return out;
}

bool is_worker_kind(std::string_view kind) {
    const auto l = lower(kind);
    return l == "scv" || l == "mule" || l == "probe" || l == "drone";
}

MapSize map_size_for(std::string_view map_name) {
    // Absolute engine coordinates; the 64x64 playable area of Flat64 is offset inside.
    const auto l = lower(map_name);
    if (l == "flat32") return {56, 64};
    if (l == "flat48") return {72, 80};
    if (l == "flat64") return {88, 96};
    if (l == "flat96") return {120, 128};
    if (l == "flat128") return {152, 160};
    if (l == "simple64") return {88, 96};
    return {};
}

int worker_count(const Observation& obs) {
    if (obs.supply_workers) return *obs.supply_workers;
    int n = static_cast<int>(obs.workers.mining.size());
    for (const auto& e : obs.my_workers) {
        if (is_worker_kind(e.kind) && lower(e.kind) != "mule") ++n;
    }
    return n;
}

std::vector<std::string> validate(const Observation& obs) {
    std::vector<std::string> problems;
    if (obs.time_s < 0) problems.emplace_back("negative time");
    if (obs.minerals < 0 || obs.gas < 0) problems.emplace_back("negative resources");
    if (obs.minerals_rate < 0 || obs.gas_rate < 0) problems.emplace_back("negative income rate");
    if (obs.supply_used < 0) problems.emplace_back("negative supply used");
    if (obs.supply_cap < 0 || obs.supply_cap > 200) problems.emplace_back("supply cap outside [0,200]");
    if (obs.supply_army && obs.supply_workers &&
        *obs.supply_army + *obs.supply_workers != obs.supply_used) {
        problems.emplace_back("supply used != army + workers");
    }
    check_entities(obs.my_workers, "my workers", obs.map_size, problems);
    check_entities(obs.my_army, "my army", obs.map_size, problems);
    check_entities(obs.my_structures, "my structures", obs.map_size, problems);
    check_entities(obs.enemy_units, "enemy units", obs.map_size, problems);
    check_entities(obs.enemy_structures, "enemy structures", obs.map_size, problems);
    for (const auto& s : obs.snapshot_enemy_structures) {
        if (s.pos.x < 0 || s.pos.y < 0 || s.pos.x > obs.map_size.width ||
            s.pos.y > obs.map_size.height) {
            problems.emplace_back("snapshot position out of bounds");
        }
    }
    for (const auto& q : obs.queue) {
        if (q.progress_pct < 0 || q.progress_pct >= 100) {
            problems.push_back("queue progress outside [0,100) for " + std::to_string(q.owner_id));
        }
    }
    return problems;
}

std::string format_clock(int time_s) {
    const int minutes = time_s / 60;
    const int seconds = time_s % 60;
    std::string out;
    if (minutes < 10) out += '0';
    out += std::to_string(minutes);
    out += ':';
    if (seconds < 10) out += '0';
    out += std::to_string(seconds);
    return out;
}

}  // namespace starwm
