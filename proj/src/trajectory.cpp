#include "starwm/trajectory.hpp"

#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

namespace starwm {

using nlohmann::json;

std::string to_json_line(const TrajectoryRecord& r) {
    nlohmann::ordered_json j;
    j["t_s"] = r.t_s;
    j["obs_text"] = r.obs_text;
    j["actions"] = r.actions;
    j["meta"] = {{"trajectory_id", r.meta.trajectory_id},
                 {"player_id", r.meta.player_id},
                 {"map", r.meta.map},
                 {"opponent_level", r.meta.opponent_level},
                 {"result", r.meta.result}};
    return j.dump();
}

TrajectoryRecord record_from_json(std::string_view line) {
    const json j = json::parse(line);
    TrajectoryRecord r;
    r.t_s = j.at("t_s").get<int>();
    r.obs_text = j.at("obs_text").get<std::string>();
    r.actions = j.value("actions", std::vector<std::string>{});
    if (j.contains("meta")) {
        const auto& m = j.at("meta");
        r.meta.trajectory_id = m.value("trajectory_id", "");
        r.meta.player_id = m.value("player_id", 1);
        r.meta.map = m.value("map", "");
        r.meta.opponent_level = m.value("opponent_level", "");
        r.meta.result = m.value("result", "");
    }
    return r;
}

std::vector<TrajectoryRecord> read_trajectory(std::istream& in) {
    std::vector<TrajectoryRecord> out;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            out.push_back(record_from_json(line));
        } catch (const std::exception& e) {
            throw std::runtime_error("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

std::vector<TrajectoryRecord> read_trajectory_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    try {
        return read_trajectory(in);
    } catch (const std::exception& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

void write_trajectory(std::ostream& out, const std::vector<TrajectoryRecord>& records) {
    for (const auto& r : records) out << to_json_line(r) << '\n';
}

std::vector<std::vector<TrajectoryRecord>> split_by_trajectory(std::vector<TrajectoryRecord> records) {
    std::vector<std::vector<TrajectoryRecord>> groups;
    std::map<std::string, size_t> index;
    for (auto& r : records) {
        auto [it, fresh] = index.emplace(r.meta.trajectory_id, groups.size());
        if (fresh) groups.emplace_back();
        groups[it->second].push_back(std::move(r));
    }
    return groups;
}

}  // namespace starwm
