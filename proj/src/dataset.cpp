#include "starwm/dataset.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>

#include "starwm/codec.hpp"
#include "starwm/parallel.hpp"
#include "starwm/prompts.hpp"

namespace starwm {

using nlohmann::json;
using nlohmann::ordered_json;

GapInTrajectory::GapInTrajectory(const std::string& trajectory_id, int t_prev, int t_next)
    : std::runtime_error("trajectory " + trajectory_id + ": records at t=" + std::to_string(t_prev) + " and t=" +
                         std::to_string(t_next) + " are not 1 s apart") {}

BadRecord::BadRecord(const std::string& trajectory_id, int t_s, const std::string& detail)
    : std::runtime_error("trajectory " + trajectory_id + " t=" + std::to_string(t_s) + ": " + detail) {}

long expected_window_count(long span_s, long horizon_s, long step_s) {
    if (span_s < horizon_s) return 0;
    return (span_s - horizon_s) / step_s + 1;
}

std::vector<DynamicsSample> build_windows(const std::vector<TrajectoryRecord>& trajectory, int horizon_s,
                                          int step_s) {
    if (horizon_s < 1 || step_s < 1) throw std::invalid_argument("horizon and step must be at least 1");
    std::vector<DynamicsSample> out;
    if (trajectory.empty()) return out;
    const std::string& tid = trajectory.front().meta.trajectory_id;
    for (size_t i = 1; i < trajectory.size(); ++i) {
        if (trajectory[i].t_s - trajectory[i - 1].t_s != 1) {
            throw GapInTrajectory(tid, trajectory[i - 1].t_s, trajectory[i].t_s);
        }
    }

    std::vector<Observation> obs(trajectory.size());
    std::vector<std::vector<TimedAction>> acts(trajectory.size());
    for (size_t i = 0; i < trajectory.size(); ++i) {
        const auto& r = trajectory[i];
        try {
            obs[i] = parse_observation(r.obs_text);
            for (size_t k = 0; k < r.actions.size(); ++k) {
                acts[i].push_back(parse_action_line(r.actions[k], static_cast<int>(k) + 1));
            }
        } catch (const std::exception& e) {
            throw BadRecord(tid, r.t_s, e.what());
        }
        if (i > 0 && obs[i].time_s - obs[i - 1].time_s != 1) {
            throw GapInTrajectory(tid, obs[i - 1].time_s, obs[i].time_s);
        }
    }

    const size_t h = static_cast<size_t>(horizon_s);
    for (size_t s = 0; s + h < trajectory.size(); s += static_cast<size_t>(step_s)) {
        DynamicsSample d;
        d.trajectory_id = tid;
        d.t_start_s = trajectory[s].t_s;
        d.horizon_s = horizon_s;
        d.player_id = trajectory[s].meta.player_id;
        d.start_obs = obs[s];
        d.target_obs = obs[s + h];
        for (size_t k = 1; k <= h; ++k) {
            for (TimedAction a : acts[s + k]) {
                a.offset_ds += static_cast<int>(k - 1) * 10;
                d.actions.push_back(std::move(a));
            }
        }
        out.push_back(std::move(d));
    }
    return out;
}

std::array<size_t, 3> largest_remainder(size_t n, std::array<int, 3> ratios) {
    long total = 0;
    for (int r : ratios) {
        if (r < 0) throw std::invalid_argument("ratios must be nonnegative");
        total += r;
    }
    if (total == 0) throw std::invalid_argument("ratios must not all be zero");
    std::array<size_t, 3> counts{};
    std::array<long, 3> rem{};
    size_t assigned = 0;
    for (size_t k = 0; k < 3; ++k) {
        const long exact = static_cast<long>(n) * ratios[k];
        counts[k] = static_cast<size_t>(exact / total);
        rem[k] = exact % total;
        assigned += counts[k];
    }
    std::array<size_t, 3> order{0, 1, 2};
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) { return rem[a] > rem[b]; });
    for (size_t k = 0; assigned < n; k = (k + 1) % 3, ++assigned) counts[order[k]] += 1;
    return counts;
}

SplitManifest split_trajectories(const std::vector<std::string>& ids, std::array<int, 3> ratios,
                                 std::uint64_t seed) {
    if (ids.empty()) throw std::invalid_argument("no trajectory ids");
    if (std::set<std::string>(ids.begin(), ids.end()).size() != ids.size()) {
        throw std::invalid_argument("trajectory ids must be unique");
    }
    std::vector<std::string> order = ids;
    std::sort(order.begin(), order.end());
    std::mt19937_64 rng(seed);
    for (size_t i = order.size(); i > 1; --i) {
        const size_t j = static_cast<size_t>(rng() % i);
        std::swap(order[i - 1], order[j]);
    }
    const auto counts = largest_remainder(order.size(), ratios);
    SplitManifest m;
    m.seed = seed;
    m.ratios = ratios;
    auto first = order.begin();
    for (auto* part : {&m.train, &m.valid, &m.test}) {
        const size_t k = counts[static_cast<size_t>(part == &m.train ? 0 : part == &m.valid ? 1 : 2)];
        part->assign(first, first + static_cast<long>(k));
        std::sort(part->begin(), part->end());
        first += static_cast<long>(k);
    }
    return m;
}

ordered_json manifest_to_json(const SplitManifest& m) {
    ordered_json j;
    j["seed"] = m.seed;
    j["ratios"] = m.ratios;
    j["train"] = m.train;
    j["valid"] = m.valid;
    j["test"] = m.test;
    return j;
}

ChatPair render_world_model_prompt(const DynamicsSample& sample, int player_id, bool no_think) {
    ChatPair p;
    p.user = render_world_model_prompt(player_id, sample.horizon_s, serialize_observation(sample.start_obs),
                                       format_actions(sample.actions), no_think);
    p.assistant = render_assistant_observation(serialize_observation(sample.target_obs), no_think);
    return p;
}

ordered_json chat_record(const ChatPair& pair) {
    ordered_json j;
    j["messages"] = ordered_json::array();
    j["messages"].push_back({{"role", "user"}, {"content", pair.user}});
    j["messages"].push_back({{"role", "assistant"}, {"content", pair.assistant}});
    return j;
}

ordered_json window_to_json(const DynamicsSample& s) {
    ordered_json j;
    j["id"] = s.id();
    j["trajectory_id"] = s.trajectory_id;
    j["t_start_s"] = s.t_start_s;
    j["horizon_s"] = s.horizon_s;
    j["player_id"] = s.player_id;
    j["start_obs"] = serialize_observation(s.start_obs);
    j["actions"] = json::array();
    for (const auto& a : s.actions) j["actions"].push_back(format_action(a));
    j["target_obs"] = serialize_observation(s.target_obs);
    return j;
}

DynamicsSample window_from_json(const json& j) {
    DynamicsSample s;
    s.trajectory_id = j.value("trajectory_id", "");
    s.t_start_s = j.value("t_start_s", 0);
    s.horizon_s = j.at("horizon_s").get<int>();
    s.player_id = j.value("player_id", 1);
    s.start_obs = parse_observation(j.at("start_obs").get<std::string>());
    for (const auto& line : j.value("actions", std::vector<std::string>{})) {
        s.actions.push_back(parse_action_line(line));
    }
    if (j.contains("target_obs")) s.target_obs = parse_observation(j.at("target_obs").get<std::string>());
    return s;
}

std::vector<DynamicsSample> read_windows_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<DynamicsSample> out;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            out.push_back(window_from_json(json::parse(line)));
        } catch (const std::exception& e) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

DatasetSummary write_dataset(const std::string& out_dir, const std::vector<std::vector<TrajectoryRecord>>& trajectories,
                             const DatasetOptions& options) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    std::vector<std::string> ids;
    std::map<std::string, size_t> by_id;
    for (size_t i = 0; i < trajectories.size(); ++i) {
        if (trajectories[i].empty()) continue;
        ids.push_back(trajectories[i].front().meta.trajectory_id);
        by_id[ids.back()] = i;
    }
    DatasetSummary summary;
    summary.manifest = split_trajectories(ids, options.ratios, options.seed);

    std::vector<std::vector<DynamicsSample>> windows(trajectories.size());
    parallel_for(trajectories.size(), options.workers, [&](size_t i) {
        windows[i] = build_windows(trajectories[i], options.horizon_s, options.step_s);
    });

    const std::array<std::pair<const char*, const std::vector<std::string>*>, 3> parts = {
        std::pair{"train", &summary.manifest.train}, std::pair{"valid", &summary.manifest.valid},
        std::pair{"test", &summary.manifest.test}};
    for (size_t k = 0; k < parts.size(); ++k) {
        std::ofstream chat(fs::path(out_dir) / (std::string(parts[k].first) + ".jsonl"), std::ios::binary);
        std::ofstream side(fs::path(out_dir) / ("windows_" + std::string(parts[k].first) + ".jsonl"), std::ios::binary);
        if (!chat || !side) throw std::runtime_error("cannot write into " + out_dir);
        for (const auto& id : *parts[k].second) {
            for (const auto& w : windows[by_id.at(id)]) {
                chat << chat_record(render_world_model_prompt(w, w.player_id, options.no_think)).dump() << '\n';
                side << window_to_json(w).dump() << '\n';
                summary.samples[k] += 1;
            }
        }
    }

    ordered_json manifest = manifest_to_json(summary.manifest);
    manifest["horizon_s"] = options.horizon_s;
    manifest["step_s"] = options.step_s;
    manifest["no_think"] = options.no_think;
    manifest["prompt_version"] = std::string(kPromptVersion);
    manifest["samples"] = {{"train", summary.samples[0]}, {"valid", summary.samples[1]}, {"test", summary.samples[2]}};
    std::ofstream(fs::path(out_dir) / "manifest.json", std::ios::binary) << manifest.dump(2) << '\n';
    return summary;
}

}  // namespace starwm
