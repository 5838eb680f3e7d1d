#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "starwm/codec.hpp"
#include "starwm/dataset.hpp"
#include "starwm/rule_sim.hpp"
#include "support.hpp"

using namespace starwm;

namespace {

std::vector<TrajectoryRecord> rollout(const std::string& id, int length_s, std::uint64_t seed = 3) {
    const SimConfig cfg;
    TrajectoryMeta meta;
    meta.trajectory_id = id;
    return generate_trajectory(random_scenario(seed, length_s, cfg), length_s, cfg, meta);
}

std::vector<std::string> ids(size_t n) {
    std::vector<std::string> out;
    for (size_t i = 0; i < n; ++i) out.push_back("traj_" + std::to_string(1000 + i));
    return out;
}

}  // namespace

TEST_SUITE("dataset") {
    TEST_CASE("window counts") {
        CHECK(build_windows(rollout("a", 10), 5, 1).size() == 6);
        CHECK(build_windows(rollout("a", 5), 5, 1).size() == 1);
        CHECK(build_windows(rollout("a", 4), 5, 1).size() == 0);
        CHECK(expected_window_count(10, 5, 1) == 6);
        CHECK(expected_window_count(4, 5, 1) == 0);

        std::mt19937_64 rng(11);
        const auto long_run = rollout("b", 60);
        for (int trial = 0; trial < 40; ++trial) {
            const int span = test::uniform(rng, 0, 60);
            const int horizon = test::uniform(rng, 1, 10);
            const int step = test::uniform(rng, 1, 7);
            const std::vector<TrajectoryRecord> part(long_run.begin(), long_run.begin() + span + 1);
            // The windows start at t0, t0+step, ... while t + horizon stays in range.
            long manual = 0;
            for (int t = 0; t + horizon <= span; t += step) ++manual;
            const auto w = build_windows(part, horizon, step);
            CHECK(static_cast<long>(w.size()) == manual);
            CHECK(expected_window_count(span, horizon, step) == manual);
        }
    }

    TEST_CASE("windows rebase actions onto the window start") {
        const auto traj = rollout("c", 40);
        for (const auto& w : build_windows(traj, 5, 3)) {
            CHECK(w.target_obs.time_s == w.start_obs.time_s + 5);
            size_t expected = 0;
            for (const auto& r : traj) {
                if (r.t_s > w.t_start_s && r.t_s <= w.t_start_s + 5) expected += r.actions.size();
            }
            CHECK(w.actions.size() == expected);
            for (const auto& a : w.actions) {
                CHECK(a.offset_ds >= 0);
                CHECK(a.offset_ds < 50);
            }
            CHECK(std::is_sorted(w.actions.begin(), w.actions.end(),
                                 [](const TimedAction& a, const TimedAction& b) { return a.offset_ds < b.offset_ds; }));
        }
    }

    TEST_CASE("gaps and bad records are reported") {
        auto traj = rollout("d", 10);
        traj.erase(traj.begin() + 4);
        CHECK_THROWS_AS(build_windows(traj, 5, 1), GapInTrajectory);
        auto bad = rollout("d", 10);
        bad[3].obs_text = "[Info]\nnonsense\n";
        CHECK_THROWS_AS(build_windows(bad, 5, 1), BadRecord);
        CHECK_THROWS_AS(build_windows(rollout("d", 10), 0, 1), std::invalid_argument);
    }

    TEST_CASE("split sizes") {
        auto sizes = [](const SplitManifest& m) {
            return std::array<size_t, 3>{m.train.size(), m.valid.size(), m.test.size()};
        };
        CHECK(sizes(split_trajectories(ids(100), {8, 1, 1}, 0)) == std::array<size_t, 3>{80, 10, 10});
        CHECK(sizes(split_trajectories(ids(10), {8, 1, 1}, 0)) == std::array<size_t, 3>{8, 1, 1});
        CHECK(sizes(split_trajectories(ids(1), {8, 1, 1}, 0)) == std::array<size_t, 3>{1, 0, 0});
        CHECK(largest_remainder(4, {8, 1, 1}) == std::array<size_t, 3>{3, 1, 0});
        CHECK(largest_remainder(7, {1, 1, 1}) == std::array<size_t, 3>{3, 2, 2});
        CHECK_THROWS_AS(largest_remainder(3, {0, 0, 0}), std::invalid_argument);
        CHECK_THROWS_AS(split_trajectories({"x", "x"}, {8, 1, 1}, 0), std::invalid_argument);
    }

    TEST_CASE("splits partition the ids and depend only on the seed") {
        std::mt19937_64 rng(5);
        for (int trial = 0; trial < 50; ++trial) {
            const size_t n = static_cast<size_t>(test::uniform(rng, 1, 60));
            const std::array<int, 3> ratios{test::uniform(rng, 0, 9), test::uniform(rng, 0, 9), test::uniform(rng, 1, 9)};
            const auto seed = static_cast<std::uint64_t>(trial);
            const auto all = ids(n);
            const auto m = split_trajectories(all, ratios, seed);
            std::multiset<std::string> seen;
            for (const auto* part : {&m.train, &m.valid, &m.test}) {
                CHECK(std::is_sorted(part->begin(), part->end()));
                seen.insert(part->begin(), part->end());
            }
            CHECK(seen == std::multiset<std::string>(all.begin(), all.end()));
            const auto counts = largest_remainder(n, ratios);
            CHECK(m.train.size() == counts[0]);
            CHECK(m.valid.size() == counts[1]);
            CHECK(m.test.size() == counts[2]);

            auto shuffled = all;
            std::shuffle(shuffled.begin(), shuffled.end(), rng);
            const auto again = split_trajectories(shuffled, ratios, seed);
            CHECK(again.train == m.train);
            CHECK(again.valid == m.valid);
            CHECK(again.test == m.test);
        }
        const auto a = split_trajectories(ids(100), {8, 1, 1}, 1);
        const auto b = split_trajectories(ids(100), {8, 1, 1}, 2);
        CHECK(a.test != b.test);
    }

    TEST_CASE("golden world-model prompt") {
        DynamicsSample s;
        s.trajectory_id = "sample";
        s.horizon_s = 5;
        s.player_id = 1;
        s.start_obs = parse_observation(test::read_file(test::fixture("sample_window/start_obs.txt")));
        s.actions = parse_actions(test::read_file(test::fixture("sample_window/actions.txt")));
        s.target_obs = parse_observation(test::read_file(test::fixture("sample_window/target_obs.txt")));
        const auto pair = render_world_model_prompt(s, 1);
        CHECK(pair.user == test::read_file(test::fixture("sample_window/user_content.txt")));
        CHECK(pair.assistant == test::read_file(test::fixture("sample_window/assistant_content.txt")));
        const auto rec = chat_record(pair);
        CHECK(rec["messages"][0]["role"] == "user");
        CHECK(rec["messages"][1]["role"] == "assistant");

        const auto plain = render_world_model_prompt(s, 1, false);
        CHECK(plain.user.find("/no_think") == std::string::npos);
    }

    TEST_CASE("window sidecar round-trips") {
        for (const auto& w : build_windows(rollout("e", 20), 5, 2)) {
            const auto back = window_from_json(nlohmann::json::parse(window_to_json(w).dump()));
            CHECK(back.id() == w.id());
            CHECK(back.start_obs == w.start_obs);
            CHECK(back.actions == w.actions);
            CHECK(back.target_obs == w.target_obs);
        }
    }

    TEST_CASE("writing a dataset") {
        const auto dir = std::filesystem::temp_directory_path() / "starwm_dataset_test";
        std::filesystem::remove_all(dir);
        std::vector<std::vector<TrajectoryRecord>> trajs;
        for (int i = 0; i < 10; ++i) trajs.push_back(rollout("t" + std::to_string(i), 12, 40 + i));
        DatasetOptions opt;
        opt.workers = 3;
        const auto summary = write_dataset(dir.string(), trajs, opt);
        CHECK(summary.manifest.train.size() == 8);
        CHECK(summary.samples[0] + summary.samples[1] + summary.samples[2] == 80);
        for (const char* name : {"train.jsonl", "valid.jsonl", "test.jsonl", "manifest.json"}) {
            CHECK(std::filesystem::exists(dir / name));
        }
        std::ifstream in(dir / "train.jsonl");
        std::string line;
        size_t n = 0;
        while (std::getline(in, line)) {
            const auto j = nlohmann::json::parse(line);
            CHECK(j["messages"].size() == 2);
            ++n;
        }
        CHECK(n == summary.samples[0]);

        const auto serial_dir = dir.string() + "_serial";
        opt.workers = 1;
        write_dataset(serial_dir, trajs, opt);
        CHECK(test::read_file((dir / "train.jsonl").string()) == test::read_file(serial_dir + "/train.jsonl"));
        std::filesystem::remove_all(dir);
        std::filesystem::remove_all(serial_dir);
    }
}
