#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "starwm/observation.hpp"
#include "starwm/trajectory.hpp"

namespace starwm {

class GapInTrajectory : public std::runtime_error {
public:
    GapInTrajectory(const std::string& trajectory_id, int t_prev, int t_next);
};

/// A record whose observation does not parse; carries the record's locator.
class BadRecord : public std::runtime_error {
public:
    BadRecord(const std::string& trajectory_id, int t_s, const std::string& detail);
};

struct DynamicsSample {
    std::string trajectory_id;
    int t_start_s = 0;
    int horizon_s = 0;
    int player_id = 1;
    Observation start_obs;
    std::vector<TimedAction> actions;
    Observation target_obs;

    std::string id() const { return trajectory_id + ":" + std::to_string(t_start_s); }
};

/// Windows of `horizon_s` seconds every `step_s` seconds; each gathers the actions of
/// records (t_start, t_start + horizon_s] with offsets rebased to t_start.
std::vector<DynamicsSample> build_windows(const std::vector<TrajectoryRecord>& trajectory, int horizon_s,
                                          int step_s);

/// max(0, floor((span - horizon) / step) + 1)
long expected_window_count(long span_s, long horizon_s, long step_s);

struct SplitManifest {
    std::vector<std::string> train;
    std::vector<std::string> valid;
    std::vector<std::string> test;
    std::uint64_t seed = 0;
    std::array<int, 3> ratios{8, 1, 1};
};

/// Seeded shuffle, then largest-remainder sizing (ties go to the earlier split).
/// Each split is listed in sorted order.
SplitManifest split_trajectories(const std::vector<std::string>& ids, std::array<int, 3> ratios,
                                 std::uint64_t seed);

std::array<size_t, 3> largest_remainder(size_t n, std::array<int, 3> ratios);

nlohmann::ordered_json manifest_to_json(const SplitManifest& m);

struct ChatPair {
    std::string user;
    std::string assistant;
};

ChatPair render_world_model_prompt(const DynamicsSample& sample, int player_id, bool no_think = true);
nlohmann::ordered_json chat_record(const ChatPair& pair);

/// Sidecar line used to join predictions with ground truth.
nlohmann::ordered_json window_to_json(const DynamicsSample& sample);
DynamicsSample window_from_json(const nlohmann::json& j);
std::vector<DynamicsSample> read_windows_file(const std::string& path);

struct DatasetOptions {
    int horizon_s = 5;
    int step_s = 1;
    std::array<int, 3> ratios{8, 1, 1};
    std::uint64_t seed = 0;
    bool no_think = true;
    unsigned workers = 1;
};

struct DatasetSummary {
    SplitManifest manifest;
    std::array<size_t, 3> samples{};
};

/// Writes {train,valid,test}.jsonl chat records, windows_{split}.jsonl sidecars, and manifest.json.
DatasetSummary write_dataset(const std::string& out_dir, const std::vector<std::vector<TrajectoryRecord>>& trajectories,
                             const DatasetOptions& options);

}  // namespace starwm
