#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <thread>

#include "agent_fixtures.hpp"
#include "oracles.hpp"
#include "starwm/assignment.hpp"
#include "starwm/codec.hpp"
#include "starwm/dataset.hpp"
#include "starwm/match_metrics.hpp"
#include "starwm/offline_eval.hpp"
#include "starwm/prompts.hpp"
#include "stub_server.hpp"
#include "support.hpp"

using namespace starwm;
using Clock = std::chrono::steady_clock;

namespace {

constexpr double kOracleTol = 1e-9;
constexpr double kOracleBudgetS = 10.0;
constexpr double kAggregateTol = 0.005;
constexpr double kSmapeExampleTol = 1e-9;
constexpr double kSimSmapeMax = 0.01;
constexpr double kStaticProgressMin = 10.0;
constexpr double kSimBudgetS = 60.0;
constexpr double kMetricTol = 1e-9;
constexpr int kLoadRequests = 100;
constexpr int kMaxInFlight = 4;

struct Outcome {
    bool pass = true;
    std::string detail;
};

class Check {
public:
    void require(bool ok, const std::string& what) {
        if (!ok && failures_.size() < 5) failures_.push_back(what);
        if (!ok) ++failed_;
    }
    Outcome done(std::string detail) const {
        if (failed_ == 0) return {true, std::move(detail)};
        std::string d = std::to_string(failed_) + " violation(s): ";
        for (size_t i = 0; i < failures_.size(); ++i) d += (i ? "; " : "") + failures_[i];
        return {false, d};
    }

private:
    int failed_ = 0;
    std::vector<std::string> failures_;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double v, int precision = 4) {
    std::ostringstream os;
    os.precision(precision);
    os << v;
    return os.str();
}

std::vector<TypedPoint> random_points(std::mt19937_64& rng, int n, int extent) {
    static const char* kinds[] = {"Marine", "Scv", "Siegetank"};
    std::vector<TypedPoint> out;
    for (int i = 0; i < n; ++i) {
        out.push_back({kinds[test::uniform(rng, 0, 2)], {test::uniform(rng, 0, extent), test::uniform(rng, 0, extent)}});
    }
    return out;
}

Outcome assignment_oracle() {
    std::mt19937_64 rng(1);
    Check c;
    double worst = 0.0;
    const auto t0 = Clock::now();
    for (int i = 0; i < 500; ++i) {
        const int m = test::uniform(rng, 0, 7);
        const int n = test::uniform(rng, 0, 7 - m);
        const auto gt = random_points(rng, m, 30);
        const auto pred = random_points(rng, n, 30);
        const double lambda = test::uniform_real(rng, 1.0, 60.0);
        const double err = std::abs(awd(gt, pred, lambda).awd - test::enumerate_partitions(gt, pred, lambda));
        worst = std::max(worst, err);
        c.require(err <= kOracleTol, "pair " + std::to_string(i) + " differs by " + fmt(err));
    }
    const double secs = seconds_since(t0);
    c.require(secs < kOracleBudgetS, "took " + fmt(secs) + " s");
    return c.done("500 pairs, max |awd - oracle| = " + fmt(worst) + ", " + fmt(secs, 3) + " s");
}

Outcome awd_identities() {
    std::mt19937_64 rng(2);
    Check c;
    const double lambda = default_lambda();
    for (int i = 0; i < 100; ++i) {
        const auto s = random_points(rng, test::uniform(rng, 0, 12), 60);
        c.require(awd(s, s, lambda).awd == 0.0, "awd(S,S) != 0");
        if (!s.empty()) {
            c.require(awd(s, {}, lambda).awd == lambda, "all-miss != lambda");
            c.require(awd({}, s, lambda).awd == lambda, "all-hallucination != lambda");
        }
    }
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const auto g = random_points(rng, test::uniform(rng, 0, 8), 40);
        const auto p = random_points(rng, test::uniform(rng, 0, 8), 40);
        const Point shift{test::uniform(rng, -30, 30), test::uniform(rng, -30, 30)};
        auto moved = [&](std::vector<TypedPoint> v) {
            for (auto& x : v) x.pos = {x.pos.x + shift.x, x.pos.y + shift.y};
            return v;
        };
        const double err = std::abs(awd(g, p, lambda).awd - awd(moved(g), moved(p), lambda).awd);
        worst = std::max(worst, err);
        c.require(err <= kOracleTol, "translation changed awd by " + fmt(err));
    }
    const double example = awd({{"Marine", {0, 0}}}, {{"Marine", {3, 4}}}, 90.5).awd;
    c.require(example == 2.5, "worked example gave " + fmt(example, 17));
    c.require(std::abs(lambda - 90.51) < 0.01, "default lambda " + fmt(lambda));
    return c.done("identity, all-miss, 100 translations (max drift " + fmt(worst) + "), example = " + fmt(example));
}

Outcome aggregation_identity() {
    SampleEval s;
    s.category(Category::SelfUnit).awd = 5.96;
    s.category(Category::SelfStruct).awd = 0.96;
    s.category(Category::EnemyUnit).awd = 30.94;
    s.category(Category::EnemyStruct).awd = 15.17;
    s.category(Category::SnapshotEnemyStruct).awd = 8.16;
    const auto r = aggregate({s}, EvalConfig{});
    Check c;
    c.require(std::abs(r.self_awd - 3.46) <= kAggregateTol, "self " + fmt(r.self_awd));
    c.require(std::abs(r.enemy_awd - 18.09) <= kAggregateTol, "enemy " + fmt(r.enemy_awd));
    return c.done("self " + fmt(r.self_awd) + ", enemy " + fmt(r.enemy_awd));
}

Outcome codec_round_trip() {
    std::mt19937_64 rng(4);
    Check c;
    for (int i = 0; i < 1000; ++i) {
        const Observation o = test::random_observation(rng);
        const std::string text = serialize_observation(o);
        c.require(parse_observation(text) == o, "generated observation " + std::to_string(i));
        c.require(serialize_observation(parse_observation(text)) == text, "text of observation " + std::to_string(i));
    }
    for (const char* f : {"sample_window/start_obs.txt", "sample_window/target_obs.txt"}) {
        const std::string text = test::read_file(test::fixture(f));
        c.require(serialize_observation(parse_observation(text)) == text, f);
    }
    const auto actions = test::read_file(test::fixture("sample_window/actions.txt"));
    c.require(format_actions(parse_actions(actions)) == actions, "action fixture");
    return c.done("1000 generated observations and both fixtures round-trip");
}

Outcome smape_properties() {
    std::mt19937_64 rng(5);
    Check c;
    for (int i = 0; i < 1000; ++i) {
        const int n = test::uniform(rng, 1, 30);
        std::vector<double> x(static_cast<size_t>(n)), y(static_cast<size_t>(n));
        for (int k = 0; k < n; ++k) {
            x[static_cast<size_t>(k)] = test::uniform(rng, 0, 3) == 0 ? 0.0 : test::uniform_real(rng, 0.0, 5000.0);
            y[static_cast<size_t>(k)] = test::uniform(rng, 0, 3) == 0 ? 0.0 : test::uniform_real(rng, 0.0, 5000.0);
        }
        const double s = smape(x, y);
        c.require(s >= 0.0 && s <= 2.0, "out of bounds " + fmt(s));
        c.require(std::abs(s - smape(y, x)) <= 1e-12, "asymmetric");
        c.require(smape(x, x) == 0.0, "nonzero on identity");
        const std::vector<double> zeros(static_cast<size_t>(n), 0.0);
        c.require(smape(zeros, zeros) == 0.0, "zero series");
        const std::vector<double> tiny(static_cast<size_t>(n), 1e-12);
        const double z = smape(zeros, tiny);
        c.require(std::isfinite(z) && z <= 2.0, "unstable near zero: " + fmt(z));
    }
    const double a[] = {100}, b[] = {50};
    const double example = smape(a, b);
    c.require(std::abs(example - 2.0 / 3.0) <= kSmapeExampleTol, "worked example " + fmt(example, 17));
    return c.done("1000 series pairs; worked example " + fmt(example, 10));
}

Outcome simulator_consistency() {
    const auto t0 = Clock::now();
    const SimConfig cfg;
    std::vector<std::pair<Observation, Observation>> sim_pairs, static_pairs;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto traj = generate_trajectory(random_scenario(seed, 300, cfg), 300, cfg);
        for (const auto& w : build_windows(traj, 5, 1)) {
            const PredictionRequest req{w.start_obs, w.actions, 5, 1};
            sim_pairs.emplace_back(predict_rule_sim(req, cfg), w.target_obs);
            static_pairs.emplace_back(predict_static_bias(req), w.target_obs);
        }
    }
    const EvalConfig ec;
    const unsigned workers = std::max(1u, std::thread::hardware_concurrency());
    const auto sim = aggregate(evaluate_corpus(sim_pairs, ec, workers), ec);
    const auto stat = aggregate(evaluate_corpus(static_pairs, ec, workers), ec);
    const double secs = seconds_since(t0);

    Check c;
    const auto mae = sim.value("Progress(%) MAE");
    const auto f1 = sim.value("Queue F1");
    const auto static_mae = stat.value("Progress(%) MAE");
    c.require(mae && *mae == 0.0, "rule-sim Progress MAE " + (mae ? fmt(*mae) : std::string("n/a")));
    c.require(f1 && *f1 == 1.0, "rule-sim Queue F1 " + (f1 ? fmt(*f1) : std::string("n/a")));
    double worst_smape = 0.0;
    for (const auto& row : sim.rows) {
        if (row.name.size() < 6 || row.name.compare(row.name.size() - 5, 5, "SMAPE") != 0) continue;
        const double v = row.value.value_or(0.0);
        worst_smape = std::max(worst_smape, v);
        c.require(v <= kSimSmapeMax, row.name + " " + fmt(v));
    }
    c.require(static_mae && *static_mae >= kStaticProgressMin,
              "static Progress MAE " + (static_mae ? fmt(*static_mae) : std::string("n/a")));
    c.require(secs < kSimBudgetS, "took " + fmt(secs) + " s");
    return c.done(std::to_string(sim_pairs.size()) + " windows; rule-sim MAE " + fmt(mae.value_or(-1)) + ", Queue F1 " +
                  fmt(f1.value_or(-1)) + ", max SMAPE " + fmt(worst_smape) + "; static MAE " +
                  fmt(static_mae.value_or(-1)) + "; " + fmt(secs, 3) + " s");
}

Outcome dataset_builder() {
    Check c;
    const SimConfig cfg;
    TrajectoryMeta meta;
    meta.trajectory_id = "span";
    const auto run = generate_trajectory(random_scenario(7, 80, cfg), 80, cfg, meta);
    std::mt19937_64 rng(7);
    for (int i = 0; i < 100; ++i) {
        const int span = test::uniform(rng, 0, 80);
        const int horizon = test::uniform(rng, 1, 12);
        const int step = test::uniform(rng, 1, 9);
        const std::vector<TrajectoryRecord> part(run.begin(), run.begin() + span + 1);
        const long expected = span < horizon ? 0 : (span - horizon) / step + 1;
        c.require(static_cast<long>(build_windows(part, horizon, step).size()) == expected,
                  "span " + std::to_string(span) + " horizon " + std::to_string(horizon) + " step " + std::to_string(step));
    }

    std::vector<std::string> ids;
    for (int i = 0; i < 37; ++i) ids.push_back("g" + std::to_string(i));
    const auto m = split_trajectories(ids, {8, 1, 1}, 42);
    std::set<std::string> all;
    size_t total = 0;
    for (const auto* part : {&m.train, &m.valid, &m.test}) {
        all.insert(part->begin(), part->end());
        total += part->size();
    }
    c.require(total == ids.size() && all == std::set<std::string>(ids.begin(), ids.end()), "split is not a partition");
    auto reversed = ids;
    std::reverse(reversed.begin(), reversed.end());
    c.require(manifest_to_json(split_trajectories(reversed, {8, 1, 1}, 42)).dump() == manifest_to_json(m).dump(),
              "manifest depends on input order");

    namespace fs = std::filesystem;
    const fs::path root = fs::temp_directory_path() / "starwm_acceptance_dataset";
    fs::remove_all(root);
    std::vector<std::vector<TrajectoryRecord>> trajs;
    for (int i = 0; i < 6; ++i) {
        TrajectoryMeta tm;
        tm.trajectory_id = "g" + std::to_string(i);
        trajs.push_back(generate_trajectory(random_scenario(100 + static_cast<std::uint64_t>(i), 15, cfg), 15, cfg, tm));
    }
    DatasetOptions opt;
    opt.seed = 42;
    opt.workers = 4;
    write_dataset((root / "a").string(), trajs, opt);
    opt.workers = 1;
    write_dataset((root / "b").string(), trajs, opt);
    for (const char* f : {"train.jsonl", "valid.jsonl", "test.jsonl", "manifest.json"}) {
        c.require(test::read_file((root / "a" / f).string()) == test::read_file((root / "b" / f).string()),
                  std::string(f) + " differs between runs");
    }
    fs::remove_all(root);

    DynamicsSample s;
    s.horizon_s = 5;
    s.start_obs = parse_observation(test::read_file(test::fixture("sample_window/start_obs.txt")));
    s.actions = parse_actions(test::read_file(test::fixture("sample_window/actions.txt")));
    s.target_obs = parse_observation(test::read_file(test::fixture("sample_window/target_obs.txt")));
    const auto pair = render_world_model_prompt(s, 1);
    c.require(pair.user == test::read_file(test::fixture("sample_window/user_content.txt")), "user prompt differs");
    c.require(pair.assistant == test::read_file(test::fixture("sample_window/assistant_content.txt")),
              "assistant content differs");
    return c.done("100 random spans, partitioned seed-stable splits, byte-identical outputs, golden prompt");
}

Outcome hybrid_matcher() {
    std::mt19937_64 rng(8);
    Check c;
    const double delta = 10.0;
    int shortfall_instances = 0;
    long shortfall_total = 0;
    static const char* kinds[] = {"Marine", "Marauder"};
    for (int trial = 0; trial < 2000; ++trial) {
        const int m = test::uniform(rng, 0, 6);
        const int n = test::uniform(rng, 0, 6 - m);
        std::vector<Entity> gt, pred;
        for (int i = 0; i < m; ++i) {
            gt.push_back({test::uniform(rng, 1, 12), kinds[test::uniform(rng, 0, 1)],
                          {test::uniform(rng, 0, 25), test::uniform(rng, 0, 25)}, 100, std::nullopt, ""});
        }
        for (int i = 0; i < n; ++i) {
            pred.push_back({test::uniform(rng, 1, 12), kinds[test::uniform(rng, 0, 1)],
                            {test::uniform(rng, 0, 25), test::uniform(rng, 0, 25)}, 100, std::nullopt, ""});
        }
        auto dedupe = [](std::vector<Entity>& v) {
            std::set<int> seen;
            std::erase_if(v, [&](const Entity& e) { return !seen.insert(e.id).second; });
        };
        dedupe(gt);
        dedupe(pred);

        const auto r = match_entities(gt, pred, delta);
        const auto again = match_entities(gt, pred, delta);
        c.require(r.pairs == again.pairs, "nondeterministic");
        std::set<size_t> gi, pi;
        for (size_t k = 0; k < r.pairs.size(); ++k) {
            const auto [g, p] = r.pairs[k];
            c.require(gi.insert(g).second && pi.insert(p).second, "not one-to-one");
            if (r.via[k] == MatchVia::Spatial) {
                c.require(gt[g].kind == pred[p].kind, "spatial pair across kinds");
                c.require(distance(gt[g].pos, pred[p].pos) <= delta, "spatial pair beyond delta");
            } else {
                c.require(gt[g].id == pred[p].id, "id pair with different ids");
            }
        }
        std::vector<TypedPoint> rest_gt, rest_pred;
        size_t id_pairs = 0;
        for (size_t g = 0; g < gt.size(); ++g) {
            const auto it = std::find_if(pred.begin(), pred.end(), [&](const Entity& e) { return e.id == gt[g].id; });
            if (it != pred.end()) {
                ++id_pairs;
                const size_t p = static_cast<size_t>(it - pred.begin());
                bool found = false;
                for (size_t k = 0; k < r.pairs.size(); ++k) {
                    found |= r.pairs[k] == std::pair<size_t, size_t>{g, p} && r.via[k] == MatchVia::Id;
                }
                c.require(found, "equal ids left unmatched");
            } else {
                rest_gt.push_back({gt[g].kind, gt[g].pos});
            }
        }
        for (const auto& p : pred) {
            if (std::none_of(gt.begin(), gt.end(), [&](const Entity& e) { return e.id == p.id; })) {
                rest_pred.push_back({p.kind, p.pos});
            }
        }
        const size_t optimal = id_pairs + test::max_spatial_matching(rest_gt, rest_pred, delta);
        c.require(optimal_match_count(gt, pred, delta) == optimal, "optimal mode is not maximum");
        c.require(r.pairs.size() <= optimal, "greedy exceeds the maximum");
        if (r.pairs.size() < optimal) {
            ++shortfall_instances;
            shortfall_total += static_cast<long>(optimal - r.pairs.size());
        }
    }
    return c.done("2000 instances; greedy below the maximum matching on " + std::to_string(shortfall_instances) +
                  " (" + std::to_string(shortfall_total) + " true positives short, informational)");
}

Outcome online_metrics() {
    Check c;
    const auto m = match_metrics(test::synthetic_log());
    auto near = [](const std::optional<double>& v, double want) { return v && std::abs(*v - want) <= kMetricTol; };
    c.require(near(m.sbr, 10.0), "SBR");
    c.require(near(m.rcr, 82.0), "RCR");
    c.require(near(m.arr, 30.0), "ARR");
    c.require(near(m.var, 90.0), "VAR");
    c.require(near(m.klr, 200.0), "KLR");
    try {
        MatchLog empty;
        empty.episode_id = "empty";
        const auto e = match_metrics(empty);
        c.require(!e.sbr && !e.rcr && !e.klr && !e.var && !e.arr, "zero denominators should be absent");
        MatchLog no_losses = test::synthetic_log();
        for (auto& t : no_losses.telemetry) t.army_value_lost = 0;
        c.require(!match_metrics(no_losses).klr, "KLR with no losses should be absent");
    } catch (const std::exception& e) {
        c.require(false, std::string("zero denominator threw: ") + e.what());
    }
    return c.done("SBR " + fmt(*m.sbr) + ", RCR " + fmt(*m.rcr) + ", ARR " + fmt(*m.arr) + ", VAR " + fmt(*m.var) +
                  ", KLR " + fmt(*m.klr) + "; zero denominators absent");
}

Outcome agent_loop() {
    Check c;
    const auto start = parse_observation(test::read_file(test::fixture("sample_window/start_obs.txt")));
    const auto target = parse_observation(test::read_file(test::fixture("sample_window/target_obs.txt")));
    test::FixedPredictor stub_wm(target);
    ScriptedPolicy keep([](const Observation&) { return ActionList{{"BARRACKSTRAIN_MARINE", {65}, {}, {}}}; });
    const auto step = gsr_step(start, keep, &stub_wm, {});
    c.require(step.refinement_context == test::read_file(test::fixture("refinement/with_prediction.txt")),
              "refinement context differs from the golden file");

    test::FailingPredictor broken;
    ScriptedPolicy macro(macro_build_order, [](const RefinementRequest&) -> ActionList {
        throw std::logic_error("refine must not run without a prediction");
    });
    const auto degraded = gsr_step(test::surplus_current(), macro, &broken, {});
    c.require(degraded.a_refined == degraded.a_init && !degraded.wm_error.empty(), "world-model failure not degraded");

    test::FixedPredictor surplus_wm(test::surplus_predicted());
    const auto opts = test::surplus_checklist();
    ScriptedPolicy surplus([](const Observation&) { return test::surplus_initial(); },
                        [&](const RefinementRequest& r) { return checklist_refine(r, opts); });
    const auto revised = gsr_step(test::surplus_current(), surplus, &surplus_wm, {});
    c.require(revised.a_refined == ActionList{{"COMMANDCENTERTRAIN_SCV", {1}, {}, {}}} && revised.revised,
              "depot was not revised into a worker");
    RuleSimEnvironment env(test::surplus_current(), SimConfig{}, 30);
    const auto adv = env.advance(to_timed_actions(revised.a_refined, test::surplus_current()), 5);
    c.require(adv.issued.size() == 1 && adv.issued[0].valid, "revised action rejected by the environment");

    RuleSimPredictor sim_wm;
    auto episode = [&](Policy& p) {
        RuleSimEnvironment e(test::supply_constrained_start(), SimConfig{}, 300);
        return match_metrics(run_episode(e, p, &sim_wm, {}));
    };
    ScriptedPolicy plain(macro_build_order);
    ScriptedPolicy guarded(macro_build_order, [](const RefinementRequest& r) { return checklist_refine(r, {}); });
    const auto base = episode(plain);
    const auto guard = episode(guarded);
    c.require(base.sbr && guard.sbr && *guard.sbr < *base.sbr, "supply guard did not lower SBR");
    return c.done("golden context, degraded step, depot -> SCV, SBR " + fmt(base.sbr.value_or(-1)) + "% -> " +
                  fmt(guard.sbr.value_or(-1)) + "%");
}

Outcome remote_client() {
    using namespace std::chrono_literals;
    Check c;
    const std::string target = test::read_file(test::fixture("sample_window/target_obs.txt"));
    PredictionRequest req;
    req.start_obs = parse_observation(test::read_file(test::fixture("sample_window/start_obs.txt")));
    req.actions = parse_actions(test::read_file(test::fixture("sample_window/actions.txt")));

    {
        test::StubServer s([&](const httplib::Request&, httplib::Response& res, int call) {
            res.set_content(test::chat_envelope(call <= 2 ? "not an observation" : target), "application/json");
        });
        RemoteConfig rc;
        rc.endpoint = s.endpoint();
        rc.max_retries = 2;
        RemotePredictor p(rc);
        c.require(p.predict(req) == parse_observation(target), "prediction differs from the reply");
        c.require(s.calls() == 3, "expected 3 attempts, saw " + std::to_string(s.calls()));
        const auto body = nlohmann::json::parse(s.bodies().at(0));
        c.require(body["messages"][0]["content"] == test::read_file(test::fixture("sample_window/user_content.txt")),
                  "request body does not embed the rendered prompt");
    }
    {
        test::StubServer s([](const httplib::Request&, httplib::Response& res, int) { res.status = 500; });
        RemoteConfig rc;
        rc.endpoint = s.endpoint();
        rc.max_retries = 2;
        bool http_error = false;
        try {
            RemotePredictor(rc).predict(req);
        } catch (const PredictionError& e) {
            http_error = e.kind() == PredictionError::Kind::HttpError && e.status() == 500;
        }
        c.require(http_error && s.calls() == 3, "persistent 500 not surfaced after 3 attempts");
    }
    {
        test::StubServer s([&](const httplib::Request&, httplib::Response& res, int) {
            std::this_thread::sleep_for(600ms);
            res.set_content(test::chat_envelope(target), "application/json");
        });
        RemoteConfig rc;
        rc.endpoint = s.endpoint();
        rc.timeout_s = 0.15;
        rc.max_retries = 1;
        bool timeout = false;
        const auto t0 = Clock::now();
        try {
            RemotePredictor(rc).predict(req);
        } catch (const PredictionError& e) {
            timeout = e.kind() == PredictionError::Kind::Timeout;
        }
        c.require(timeout && s.calls() == 2 && seconds_since(t0) < 1.2, "timeout contract");
    }
    int peak = 0;
    {
        test::StubServer s([&](const httplib::Request&, httplib::Response& res, int) {
            std::this_thread::sleep_for(5ms);
            res.set_content(test::chat_envelope(target), "application/json");
        });
        RemoteConfig rc;
        rc.endpoint = s.endpoint();
        rc.max_in_flight = kMaxInFlight;
        RemotePredictor p(rc);
        const auto results = p.predict_batch(std::vector<PredictionRequest>(kLoadRequests, req), 16);
        const auto ok = std::count_if(results.begin(), results.end(), [](const BatchResult& r) { return r.obs.has_value(); });
        peak = s.peak_in_flight();
        c.require(ok == kLoadRequests, std::to_string(ok) + " of 100 requests succeeded");
        c.require(peak <= kMaxInFlight, "peak in flight " + std::to_string(peak));
    }
    return c.done("prompt embedded verbatim, 3 attempts on bad replies and on 500, timeout after 2 attempts, peak " +
                  std::to_string(peak) + " of " + std::to_string(kMaxInFlight) + " in flight under 100 requests");
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"assignment oracle", assignment_oracle},
        {"AWD identities", awd_identities},
        {"aggregation identity", aggregation_identity},
        {"codec round-trip", codec_round_trip},
        {"SMAPE properties", smape_properties},
        {"simulator self-consistency", simulator_consistency},
        {"dataset builder", dataset_builder},
        {"hybrid matcher", hybrid_matcher},
        {"online metrics", online_metrics},
        {"agent loop", agent_loop},
        {"remote client", remote_client},
    };
    int failed = 0;
    for (size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        if (!o.pass) ++failed;
        std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%zu of %zu criteria passed\n", criteria.size() - static_cast<size_t>(failed), criteria.size());
    return failed == 0 ? 0 : 1;
}
