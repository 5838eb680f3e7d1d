#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "starwm/observation.hpp"

namespace starwm {

struct TrajectoryMeta {
    std::string trajectory_id;
    int player_id = 1;
    std::string map;
    std::string opponent_level;
    std::string result;

    friend bool operator==(const TrajectoryMeta&, const TrajectoryMeta&) = default;
};

/// One 1 Hz record. `actions` holds the action lines issued in (t_s - 1, t_s], their
/// offsets measured from t_s - 1.
struct TrajectoryRecord {
    int t_s = 0;
    std::string obs_text;
    std::vector<std::string> actions;
    TrajectoryMeta meta;

    friend bool operator==(const TrajectoryRecord&, const TrajectoryRecord&) = default;
};

std::string to_json_line(const TrajectoryRecord& record);
TrajectoryRecord record_from_json(std::string_view line);

/// Throws std::runtime_error naming the 1-based line on malformed input.
std::vector<TrajectoryRecord> read_trajectory(std::istream& in);
std::vector<TrajectoryRecord> read_trajectory_file(const std::string& path);
void write_trajectory(std::ostream& out, const std::vector<TrajectoryRecord>& records);

/// Groups records of one or more trajectories by meta.trajectory_id, keeping first-seen order.
std::vector<std::vector<TrajectoryRecord>> split_by_trajectory(std::vector<TrajectoryRecord> records);

}  // namespace starwm
