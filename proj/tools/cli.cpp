#include "cli.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>

#include "starwm/agent_loop.hpp"
#include "starwm/codec.hpp"
#include "starwm/dataset.hpp"
#include "starwm/match_metrics.hpp"
#include "starwm/offline_eval.hpp"
#include "starwm/parallel.hpp"
#include "starwm/predictors.hpp"
#include "starwm/rule_sim.hpp"
#include "starwm/trajectory.hpp"

namespace starwm::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::uint64_t seed = 0;
    unsigned workers = default_workers();
    EvalConfig eval;
    SimConfig sim;
    std::string unit_table;
    RemoteConfig remote;
    RemoteConfig policy;
    std::string ablation = "full";
};

template <typename T>
void take(const json& j, const char* key, T& into) {
    if (j.contains(key) && !j.at(key).is_null()) into = j.at(key).get<T>();
}

void remote_from_json(const json& j, RemoteConfig& r) {
    take(j, "endpoint", r.endpoint);
    take(j, "model", r.model);
    take(j, "auth_env", r.auth_env);
    take(j, "timeout_s", r.timeout_s);
    take(j, "max_retries", r.max_retries);
    take(j, "max_in_flight", r.max_in_flight);
    take(j, "temperature", r.temperature);
    take(j, "no_think", r.no_think);
}

ordered_json remote_to_json(const RemoteConfig& r) {
    return {{"endpoint", r.endpoint},       {"model", r.model},
            {"auth_env", r.auth_env},       {"timeout_s", r.timeout_s},
            {"max_retries", r.max_retries}, {"max_in_flight", r.max_in_flight},
            {"temperature", r.temperature}, {"no_think", r.no_think}};
}

std::string spatial_name(SpatialMatching s) { return s == SpatialMatching::Optimal ? "optimal" : "greedy"; }

SpatialMatching spatial_from(const std::string& s) {
    if (s == "greedy") return SpatialMatching::Greedy;
    if (s == "optimal") return SpatialMatching::Optimal;
    throw UsageError("spatial matching must be greedy or optimal, got " + s);
}

RunConfig load_config(const std::string& path) {
    RunConfig c;
    if (path.empty()) return c;
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw UsageError("config " + path + " is not valid JSON: " + e.what());
    }
    take(j, "seed", c.seed);
    take(j, "workers", c.workers);
    take(j, "ablation", c.ablation);
    if (j.contains("eval")) {
        const auto& e = j.at("eval");
        take(e, "epsilon", c.eval.epsilon);
        take(e, "delta", c.eval.delta);
        take(e, "lambda", c.eval.lambda);
        take(e, "time_bin_s", c.eval.time_bin_s);
        take(e, "strict_id_kind", c.eval.strict_id_kind);
        take(e, "macro_f1", c.eval.macro_f1);
        if (e.contains("spatial")) c.eval.spatial = spatial_from(e.at("spatial").get<std::string>());
        if (e.contains("scalar_fields")) {
            c.eval.scalar_fields.clear();
            for (const auto& name : e.at("scalar_fields")) {
                const auto f = scalar_field_from_name(name.get<std::string>());
                if (!f) throw UsageError("unknown scalar field " + name.get<std::string>());
                c.eval.scalar_fields.push_back(*f);
            }
        }
    }
    if (j.contains("sim")) {
        const auto& s = j.at("sim");
        take(s, "game_speed", c.sim.game_speed);
        take(s, "combat_radius", c.sim.combat_radius);
        take(s, "income_per_worker", c.sim.income_per_worker);
        take(s, "queue_limit", c.sim.queue_limit);
        take(s, "supply_limit", c.sim.supply_limit);
        take(s, "unit_table", c.unit_table);
    }
    if (j.contains("remote")) remote_from_json(j.at("remote"), c.remote);
    if (j.contains("policy")) remote_from_json(j.at("policy"), c.policy);
    return c;
}

ordered_json config_to_json(const RunConfig& c) {
    ordered_json j;
    j["seed"] = c.seed;
    j["workers"] = c.workers;
    j["ablation"] = c.ablation;
    ordered_json fields = ordered_json::array();
    for (auto f : c.eval.scalar_fields) fields.push_back(std::string(display_name(f)));
    j["eval"] = {{"epsilon", c.eval.epsilon},
                 {"delta", c.eval.delta},
                 {"lambda", c.eval.lambda},
                 {"time_bin_s", c.eval.time_bin_s},
                 {"strict_id_kind", c.eval.strict_id_kind},
                 {"macro_f1", c.eval.macro_f1},
                 {"spatial", spatial_name(c.eval.spatial)},
                 {"scalar_fields", fields}};
    j["sim"] = {{"game_speed", c.sim.game_speed},
                {"combat_radius", c.sim.combat_radius},
                {"income_per_worker", c.sim.income_per_worker},
                {"queue_limit", c.sim.queue_limit},
                {"supply_limit", c.sim.supply_limit},
                {"unit_table", c.unit_table},
                {"unit_table_version", c.sim.units.version()}};
    j["remote"] = remote_to_json(c.remote);
    j["policy"] = remote_to_json(c.policy);
    return j;
}

/// Flags that override config file values.
struct RemoteFlags {
    std::optional<std::string> endpoint, model, auth_env;
    std::optional<double> timeout_s;
    std::optional<int> max_retries, max_in_flight;

    void add(CLI::App* app) {
        app->add_option("--endpoint", endpoint, "Chat completions URL");
        app->add_option("--model", model, "Model name sent with each request");
        app->add_option("--auth-env", auth_env, "Environment variable holding the bearer token");
        app->add_option("--timeout", timeout_s, "Request timeout in seconds");
        app->add_option("--max-retries", max_retries, "Re-sends after a failed attempt");
        app->add_option("--max-in-flight", max_in_flight, "Concurrent request bound");
    }
    void apply(RemoteConfig& r) const {
        if (endpoint) r.endpoint = *endpoint;
        if (model) r.model = *model;
        if (auth_env) r.auth_env = *auth_env;
        if (timeout_s) r.timeout_s = *timeout_s;
        if (max_retries) r.max_retries = *max_retries;
        if (max_in_flight) r.max_in_flight = *max_in_flight;
    }
};

struct Globals {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> workers;
};

RunConfig resolve(const Globals& g) {
    RunConfig c = load_config(g.config_path);
    if (g.seed) c.seed = *g.seed;
    if (g.workers) c.workers = *g.workers;
    if (c.workers < 1) throw UsageError("workers must be at least 1");
    if (!c.unit_table.empty()) c.sim.units = UnitTable::load(c.unit_table);
    try {
        c.eval.check();
        c.sim.check();
        c.remote.check();
        c.policy.check();
    } catch (const std::invalid_argument& e) {
        throw UsageError(std::string("bad configuration: ") + e.what());
    }
    return c;
}

void persist(const fs::path& dir, const std::string& command, const RunConfig& c, const ordered_json& args) {
    const fs::path target = dir.empty() ? fs::path(".") : dir;
    fs::create_directories(target);
    ordered_json j;
    j["command"] = command;
    j["args"] = args;
    j["config"] = config_to_json(c);
    std::ofstream(target / "run_config.json") << j.dump(2) << '\n';
}

fs::path parent_of(const std::string& file) { return fs::path(file).parent_path(); }

std::ofstream open_out(const std::string& path) {
    if (const auto dir = parent_of(path); !dir.empty()) fs::create_directories(dir);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    return out;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string locator(const TrajectoryRecord& r) {
    return "trajectory " + r.meta.trajectory_id + " at t=" + std::to_string(r.t_s);
}

// parse -----------------------------------------------------------------

struct ParseArgs {
    std::string in;
    std::string format = "auto";
    std::string out;
};

int cmd_parse(const ParseArgs& a, std::ostream& out) {
    const bool trajectory =
        a.format == "trajectory" || (a.format == "auto" && fs::path(a.in).extension() == ".jsonl");
    if (!trajectory) {
        const Observation obs = parse_observation(slurp(a.in));
        const auto problems = validate(obs);
        if (!problems.empty()) throw std::runtime_error(a.in + ": " + problems.front());
        if (!a.out.empty()) open_out(a.out) << serialize_observation(obs);
        out << a.in << ": valid observation at " << format_clock(obs.time_s) << '\n';
        return 0;
    }
    const auto records = read_trajectory_file(a.in);
    std::vector<Observation> parsed;
    for (size_t i = 0; i < records.size(); ++i) {
        const std::string where = a.in + ":" + std::to_string(i + 1) + " (" + locator(records[i]) + ")";
        Observation obs;
        try {
            obs = parse_observation(records[i].obs_text);
        } catch (const ParseError& e) {
            throw std::runtime_error(where + ": " + e.what());
        }
        for (size_t k = 0; k < records[i].actions.size(); ++k) {
            try {
                parse_action_line(records[i].actions[k], static_cast<int>(k + 1));
            } catch (const ParseError& e) {
                throw std::runtime_error(where + ": action " + std::to_string(k + 1) + ": " + e.what());
            }
        }
        const auto problems = validate(obs);
        if (!problems.empty()) throw std::runtime_error(where + ": " + problems.front());
        parsed.push_back(std::move(obs));
    }
    if (!a.out.empty()) {
        auto canon = records;
        for (size_t i = 0; i < canon.size(); ++i) canon[i].obs_text = serialize_observation(parsed[i]);
        auto f = open_out(a.out);
        write_trajectory(f, canon);
    }
    const auto groups = split_by_trajectory(records);
    out << a.in << ": " << records.size() << " records in " << groups.size() << " trajectories, all valid\n";
    return 0;
}

// build-dataset ---------------------------------------------------------

struct DatasetArgs {
    std::vector<std::string> in;
    std::string out;
    int horizon = 5;
    int step = 1;
    std::vector<int> ratios{8, 1, 1};
    bool think = false;
};

int cmd_build_dataset(const DatasetArgs& a, const RunConfig& c, std::ostream& out) {
    if (a.ratios.size() != 3) throw UsageError("--ratios takes three integers, e.g. 8,1,1");
    if (a.horizon < 1 || a.step < 1) throw UsageError("--horizon and --step must be at least 1");
    std::vector<TrajectoryRecord> all;
    for (const auto& f : a.in) {
        auto r = read_trajectory_file(f);
        all.insert(all.end(), std::make_move_iterator(r.begin()), std::make_move_iterator(r.end()));
    }
    DatasetOptions opts;
    opts.horizon_s = a.horizon;
    opts.step_s = a.step;
    opts.ratios = {a.ratios[0], a.ratios[1], a.ratios[2]};
    opts.seed = c.seed;
    opts.no_think = !a.think;
    opts.workers = c.workers;
    const auto summary = write_dataset(a.out, split_by_trajectory(std::move(all)), opts);
    persist(a.out, "build-dataset", c,
            {{"in", a.in}, {"out", a.out}, {"horizon", a.horizon}, {"step", a.step}, {"ratios", a.ratios},
             {"think", a.think}});
    out << "wrote " << summary.samples[0] << " train, " << summary.samples[1] << " valid, " << summary.samples[2]
        << " test samples to " << a.out << '\n';
    return 0;
}

// simulate --------------------------------------------------------------

struct SimulateArgs {
    std::string scenario;
    int length = 300;
    int count = 1;
    std::string out;
};

int cmd_simulate(const SimulateArgs& a, const RunConfig& c, std::ostream& out) {
    if (a.length < 0) throw UsageError("--length must be nonnegative");
    if (a.count < 1) throw UsageError("--count must be at least 1");
    if (!a.scenario.empty() && a.count != 1) throw UsageError("--count applies to random scenarios only");
    std::vector<std::vector<TrajectoryRecord>> runs(static_cast<size_t>(a.count));
    if (!a.scenario.empty()) {
        const Scenario sc = scenario_from_json(slurp(a.scenario));
        runs[0] = generate_trajectory(sc, a.length, c.sim);
    } else {
        parallel_for(runs.size(), c.workers, [&](size_t i) {
            const Scenario sc = random_scenario(c.seed + i, a.length, c.sim);
            runs[i] = generate_trajectory(sc, a.length, c.sim);
        });
    }
    auto f = open_out(a.out);
    size_t n = 0;
    for (const auto& r : runs) {
        write_trajectory(f, r);
        n += r.size();
    }
    persist(parent_of(a.out), "simulate", c,
            {{"scenario", a.scenario}, {"length", a.length}, {"count", a.count}, {"out", a.out}});
    out << "wrote " << runs.size() << " trajectories (" << n << " records) to " << a.out << '\n';
    return 0;
}

// predict ---------------------------------------------------------------

struct PredictArgs {
    std::string backend;
    std::string in;
    std::string out;
    RemoteFlags remote;
};

int cmd_predict(const PredictArgs& a, RunConfig& c, std::ostream& out, std::ostream& err) {
    a.remote.apply(c.remote);
    const auto windows = read_windows_file(a.in);
    std::vector<PredictionRequest> reqs;
    for (const auto& w : windows) reqs.push_back({w.start_obs, w.actions, w.horizon_s, w.player_id});

    std::vector<BatchResult> results(reqs.size());
    std::unique_ptr<Predictor> predictor;
    try {
        predictor = make_predictor(a.backend, c.sim, c.remote);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    if (auto* remote = dynamic_cast<RemotePredictor*>(predictor.get())) {
        results = remote->predict_batch(reqs, c.workers);
    } else {
        parallel_for(reqs.size(), c.workers, [&](size_t i) {
            results[i].index = i;
            results[i].obs = predictor->predict(reqs[i]);
        });
    }

    auto f = open_out(a.out);
    std::optional<std::string> first_failure;
    size_t failures = 0;
    for (size_t i = 0; i < results.size(); ++i) {
        ordered_json j;
        j["id"] = windows[i].id();
        j["backend"] = a.backend;
        if (results[i].obs) {
            j["pred_obs"] = serialize_observation(*results[i].obs);
        } else {
            const auto& e = *results[i].error;
            j["error"] = {{"kind", std::string(to_string(e.kind()))}, {"message", e.what()}, {"status", e.status()}};
            if (!e.raw().empty()) j["error"]["raw"] = e.raw();
            ++failures;
            if (!first_failure) first_failure = a.in + ":" + std::to_string(i + 1) + " (" + windows[i].id() + "): " + e.what();
        }
        f << j.dump() << '\n';
    }
    persist(parent_of(a.out), "predict", c, {{"backend", a.backend}, {"in", a.in}, {"out", a.out}});
    out << "predicted " << results.size() - failures << " of " << results.size() << " windows with " << a.backend
        << '\n';
    if (first_failure) {
        err << "error: " << failures << " predictions failed; first at " << *first_failure << '\n';
        return 1;
    }
    return 0;
}

// evaluate --------------------------------------------------------------

struct ObsLine {
    std::optional<std::string> id;
    Observation obs;
};

std::vector<ObsLine> read_obs_lines(const std::string& path, bool prediction) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<ObsLine> out;
    std::string line;
    for (int n = 1; std::getline(in, line); ++n) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const std::string where = path + ":" + std::to_string(n);
        try {
            const json j = json::parse(line);
            ObsLine o;
            if (j.contains("id")) {
                o.id = j.at("id").get<std::string>();
            } else if (j.contains("t_s") && j.contains("trajectory_id")) {
                o.id = j.at("trajectory_id").get<std::string>() + ":" + std::to_string(j.at("t_s").get<int>());
            }
            std::optional<std::string> text;
            const char* keys[] = {"pred_obs", "target_obs", "obs", "obs_text"};
            for (const char* k : keys) {
                if (j.contains(k) && j.at(k).is_string()) {
                    text = j.at(k).get<std::string>();
                    break;
                }
            }
            if (!text) {
                if (prediction && j.contains("error")) throw std::runtime_error("prediction failed upstream");
                throw std::runtime_error("no observation field");
            }
            o.obs = parse_observation(*text);
            out.push_back(std::move(o));
        } catch (const std::exception& e) {
            throw std::runtime_error(where + ": " + e.what());
        }
    }
    return out;
}

struct EvaluateArgs {
    std::string pred;
    std::string truth;
    std::string out;
    std::string csv;
    std::string time_series;
    std::optional<double> delta, lambda;
    std::optional<std::string> spatial;
    std::optional<bool> strict_id_kind, macro_f1;
};

int cmd_evaluate(const EvaluateArgs& a, RunConfig& c, std::ostream& out) {
    if (a.delta) c.eval.delta = *a.delta;
    if (a.lambda) c.eval.lambda = *a.lambda;
    if (a.spatial) c.eval.spatial = spatial_from(*a.spatial);
    if (a.strict_id_kind) c.eval.strict_id_kind = *a.strict_id_kind;
    if (a.macro_f1) c.eval.macro_f1 = *a.macro_f1;
    c.eval.check();

    const auto preds = read_obs_lines(a.pred, true);
    const auto truths = read_obs_lines(a.truth, false);
    std::vector<std::pair<Observation, Observation>> pairs;
    const bool by_id = std::all_of(preds.begin(), preds.end(), [](const ObsLine& o) { return o.id.has_value(); }) &&
                       std::all_of(truths.begin(), truths.end(), [](const ObsLine& o) { return o.id.has_value(); });
    if (by_id) {
        std::map<std::string, const Observation*> index;
        for (const auto& p : preds) index[*p.id] = &p.obs;
        for (size_t i = 0; i < truths.size(); ++i) {
            const auto it = index.find(*truths[i].id);
            if (it == index.end()) {
                throw std::runtime_error(a.truth + ":" + std::to_string(i + 1) + ": no prediction for " + *truths[i].id);
            }
            pairs.emplace_back(*it->second, truths[i].obs);
        }
    } else {
        if (preds.size() != truths.size()) {
            throw std::runtime_error("prediction and truth files differ in length (" + std::to_string(preds.size()) +
                                     " vs " + std::to_string(truths.size()) + ") and carry no ids to join on");
        }
        for (size_t i = 0; i < preds.size(); ++i) pairs.emplace_back(preds[i].obs, truths[i].obs);
    }

    const auto samples = evaluate_corpus(pairs, c.eval, c.workers);
    const EvalReport report = aggregate(samples, c.eval);
    if (!a.out.empty()) open_out(a.out) << report_to_json(report) << '\n';
    if (!a.csv.empty()) open_out(a.csv) << report_to_csv(report);
    if (!a.time_series.empty()) open_out(a.time_series) << time_series_to_csv(report);
    persist(a.out.empty() ? fs::path() : parent_of(a.out), "evaluate", c,
            {{"pred", a.pred}, {"truth", a.truth}, {"out", a.out}, {"csv", a.csv}, {"time_series", a.time_series}});

    out << report.sample_count << " samples\n";
    for (const auto& row : report.rows) {
        out << "  " << row.classification << " / " << row.name << ": ";
        if (row.value) {
            out << *row.value;
        } else {
            out << "n/a";
        }
        out << '\n';
    }
    out << "  self AWD " << report.self_awd << ", enemy AWD " << report.enemy_awd << '\n';
    return 0;
}

// agent run -------------------------------------------------------------

struct AgentArgs {
    std::string env = "rulesim";
    std::string scenario;
    std::string trajectory;
    int length = 300;
    int episodes = 1;
    std::string policy = "macro-checklist";
    std::string wm = "rulesim";
    std::optional<std::string> ablation;
    int cadence = 5;
    int horizon = 5;
    int max_steps = 0;
    bool think = false;
    std::string out;
    RemoteFlags remote;
};

std::unique_ptr<Policy> make_policy(const std::string& name, const RemoteConfig& cfg) {
    if (name == "macro") return std::make_unique<ScriptedPolicy>(macro_build_order);
    if (name == "macro-checklist") {
        return std::make_unique<ScriptedPolicy>(
            macro_build_order, [](const RefinementRequest& r) { return checklist_refine(r, {}); });
    }
    if (name == "chat") return std::make_unique<ChatPolicy>(cfg);
    throw UsageError("unknown policy " + name + " (macro, macro-checklist, chat)");
}

int cmd_agent_run(const AgentArgs& a, RunConfig& c, std::ostream& out, std::ostream& err) {
    if (a.ablation) c.ablation = *a.ablation;
    a.remote.apply(c.remote);
    Ablation ablation;
    try {
        ablation = ablation_from_string(c.ablation);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    if (a.env != "rulesim" && a.env != "replay") throw UsageError("--env must be rulesim or replay");
    if (a.env == "replay" && a.trajectory.empty()) throw UsageError("--env replay needs --trajectory");
    if (a.episodes < 1) throw UsageError("--episodes must be at least 1");
    // Validate backend names before any episode starts.
    make_policy(a.policy == "chat" ? "macro" : a.policy, c.policy);
    const bool needs_wm = ablation == Ablation::ZeroShotWm || ablation == Ablation::Full;
    if (needs_wm) {
        try {
            make_predictor(a.wm == "remote" ? "static" : a.wm, c.sim, c.remote);
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
    }

    std::vector<std::function<std::unique_ptr<Environment>()>> envs;
    std::vector<std::string> ids;
    if (a.env == "rulesim") {
        if (!a.scenario.empty()) {
            if (a.episodes != 1) throw UsageError("--episodes applies to random scenarios only");
            const Scenario sc = scenario_from_json(slurp(a.scenario));
            ids.push_back(sc.name);
            envs.emplace_back([sc, &a, &c] { return std::make_unique<RuleSimEnvironment>(sc.initial, c.sim, a.length); });
        } else {
            for (int i = 0; i < a.episodes; ++i) {
                const std::uint64_t seed = c.seed + static_cast<std::uint64_t>(i);
                ids.push_back("scenario-" + std::to_string(seed));
                envs.emplace_back([seed, &a, &c] {
                    return std::make_unique<RuleSimEnvironment>(random_scenario(seed, a.length, c.sim).initial, c.sim,
                                                                a.length);
                });
            }
        }
    } else {
        auto groups = split_by_trajectory(read_trajectory_file(a.trajectory));
        for (auto& g : groups) {
            ids.push_back(g.front().meta.trajectory_id);
            envs.emplace_back([g] { return std::make_unique<ReplayEnvironment>(g); });
        }
    }

    std::vector<std::optional<MatchLog>> logs(envs.size());
    std::vector<std::string> failures(envs.size());
    parallel_for(envs.size(), c.workers, [&](size_t i) {
        auto policy = make_policy(a.policy, c.policy);
        std::unique_ptr<Predictor> wm;
        if (needs_wm) wm = make_predictor(a.wm, c.sim, c.remote);
        EpisodeOptions opts;
        opts.step = {a.horizon, 1, ablation, !a.think};
        opts.cadence_s = a.cadence;
        opts.episode_id = ids[i];
        opts.max_steps = a.max_steps;
        try {
            auto env = envs[i]();
            logs[i] = run_episode(*env, *policy, wm.get(), opts);
        } catch (const EpisodeError& e) {
            logs[i] = e.partial();
            failures[i] = e.what();
        } catch (const std::exception& e) {
            failures[i] = e.what();
        }
    });

    auto f = open_out(a.out);
    std::vector<MatchLog> done;
    for (const auto& l : logs) {
        if (!l) continue;
        f << to_json(*l).dump() << '\n';
        done.push_back(*l);
    }
    f.close();
    persist(parent_of(a.out), "agent run", c,
            {{"env", a.env},       {"scenario", a.scenario}, {"trajectory", a.trajectory}, {"length", a.length},
             {"episodes", a.episodes}, {"policy", a.policy}, {"wm", a.wm},         {"cadence", a.cadence},
             {"horizon", a.horizon}, {"max_steps", a.max_steps}, {"out", a.out}});

    for (size_t i = 0; i < failures.size(); ++i) {
        if (!failures[i].empty()) {
            err << "error: episode " << ids[i] << " failed: " << failures[i] << '\n';
            return 1;
        }
    }
    out << "ran " << done.size() << " episodes (" << to_string(ablation) << ") to " << a.out << '\n';
    out << metric_table_to_text(compute_match_metrics(done));
    return 0;
}

// report online ---------------------------------------------------------

struct ReportArgs {
    std::string logs;
    std::string out;
    std::string csv;
};

int cmd_report_online(const ReportArgs& a, const RunConfig& c, std::ostream& out) {
    const auto logs = read_match_log_dir(a.logs);
    if (logs.empty()) throw std::runtime_error("no match logs under " + a.logs);
    const auto table = compute_match_metrics(logs);
    if (!a.out.empty()) open_out(a.out) << metric_table_to_json(table).dump(2) << '\n';
    if (!a.csv.empty()) open_out(a.csv) << metric_table_to_csv(table);
    persist(a.out.empty() ? fs::path() : parent_of(a.out), "report online", c,
            {{"logs", a.logs}, {"out", a.out}, {"csv", a.csv}});
    out << logs.size() << " match logs\n" << metric_table_to_text(table);
    return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"World-model toolkit: observations, datasets, simulation, evaluation, agent episodes"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--config", g.config_path, "JSON run configuration; flags override its values")
        ->check(CLI::ExistingFile);
    app.add_option("--seed", g.seed, "Seed for every random choice");
    app.add_option("--workers", g.workers, "Upper bound on worker threads");
    app.fallthrough();

    ParseArgs pa;
    auto* parse = app.add_subcommand("parse", "Parse and validate an observation file or trajectory JSONL");
    parse->add_option("--in", pa.in, "Input file")->required()->check(CLI::ExistingFile);
    parse->add_option("--format", pa.format, "auto, trajectory or obs")
        ->check(CLI::IsMember({"auto", "trajectory", "obs"}));
    parse->add_option("--out", pa.out, "Write the canonical re-serialization here");

    DatasetArgs da;
    auto* build = app.add_subcommand("build-dataset", "Slice trajectories into chat-format training samples");
    build->add_option("--in", da.in, "Trajectory JSONL files")->required()->check(CLI::ExistingFile);
    build->add_option("--out", da.out, "Output directory")->required();
    build->add_option("--horizon", da.horizon, "Prediction horizon in seconds");
    build->add_option("--step", da.step, "Window stride in seconds");
    build->add_option("--ratios", da.ratios, "Train,valid,test ratios")->delimiter(',')->expected(3);
    build->add_flag("--think", da.think, "Omit the /no_think suffix");

    SimulateArgs sa;
    auto* sim = app.add_subcommand("simulate", "Roll out scenarios with the rule simulator");
    sim->add_option("--scenario", sa.scenario, "Scenario JSON (default: random scenarios from --seed)")
        ->check(CLI::ExistingFile);
    sim->add_option("--length", sa.length, "Seconds to simulate");
    sim->add_option("--count", sa.count, "Number of random scenarios");
    sim->add_option("--out", sa.out, "Trajectory JSONL output")->required();

    PredictArgs pr;
    auto* predict = app.add_subcommand("predict", "Predict target observations for dataset windows");
    predict->add_option("--backend", pr.backend, "static, static-strict, rulesim or remote")
        ->required()
        ->check(CLI::IsMember({"static", "static-strict", "rulesim", "remote"}));
    predict->add_option("--in", pr.in, "windows_*.jsonl")->required()->check(CLI::ExistingFile);
    predict->add_option("--out", pr.out, "Predictions JSONL")->required();
    pr.remote.add(predict);

    EvaluateArgs ea;
    auto* evaluate = app.add_subcommand("evaluate", "Score predictions against ground truth");
    evaluate->add_option("--pred", ea.pred, "Predictions JSONL")->required()->check(CLI::ExistingFile);
    evaluate->add_option("--truth", ea.truth, "Ground truth JSONL")->required()->check(CLI::ExistingFile);
    evaluate->add_option("--out", ea.out, "Report JSON");
    evaluate->add_option("--csv", ea.csv, "Report CSV");
    evaluate->add_option("--time-series", ea.time_series, "Per-bin AWD CSV");
    evaluate->add_option("--delta", ea.delta, "Spatial matching radius");
    evaluate->add_option("--lambda", ea.lambda, "Miss and hallucination penalty");
    evaluate->add_option("--spatial", ea.spatial, "greedy or optimal")->check(CLI::IsMember({"greedy", "optimal"}));
    evaluate->add_option("--strict-id-kind", ea.strict_id_kind, "Id matches also require equal kinds");
    evaluate->add_option("--macro-f1", ea.macro_f1, "Per-sample macro F1 for alerts and upgrades");

    AgentArgs aa;
    auto* agent = app.add_subcommand("agent", "Agent episodes");
    agent->require_subcommand(1);
    auto* run_cmd = agent->add_subcommand("run", "Run Generate-Simulate-Refine episodes");
    run_cmd->add_option("--env", aa.env, "rulesim or replay")->check(CLI::IsMember({"rulesim", "replay"}));
    run_cmd->add_option("--scenario", aa.scenario, "Scenario JSON for --env rulesim")->check(CLI::ExistingFile);
    run_cmd->add_option("--trajectory", aa.trajectory, "Trajectory JSONL for --env replay")
        ->check(CLI::ExistingFile);
    run_cmd->add_option("--length", aa.length, "Episode length in seconds (rulesim)");
    run_cmd->add_option("--episodes", aa.episodes, "Random rulesim episodes, seeds from --seed upward");
    run_cmd->add_option("--policy", aa.policy, "macro, macro-checklist or chat");
    run_cmd->add_option("--wm", aa.wm, "static, static-strict, rulesim or remote");
    run_cmd->add_option("--ablation", aa.ablation, "generate, refine-only, zeroshot-wm or full");
    run_cmd->add_option("--cadence", aa.cadence, "Seconds between decisions");
    run_cmd->add_option("--horizon", aa.horizon, "World-model horizon in seconds");
    run_cmd->add_option("--max-steps", aa.max_steps, "Stop after this many decisions (0: no limit)");
    run_cmd->add_flag("--think", aa.think, "Omit the /no_think suffix");
    run_cmd->add_option("--out", aa.out, "MatchLog JSONL")->required();
    aa.remote.add(run_cmd);

    ReportArgs ra;
    auto* report = app.add_subcommand("report", "Summaries");
    report->require_subcommand(1);
    auto* online = report->add_subcommand("online", "Online metrics from match logs");
    online->add_option("--logs", ra.logs, "Directory of MatchLog JSONL files, or one file")
        ->required()
        ->check(CLI::ExistingPath);
    online->add_option("--out", ra.out, "Metric table JSON");
    online->add_option("--csv", ra.csv, "Metric table CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        RunConfig c = resolve(g);
        if (*parse) return cmd_parse(pa, out);
        if (*build) return cmd_build_dataset(da, c, out);
        if (*sim) return cmd_simulate(sa, c, out);
        if (*predict) return cmd_predict(pr, c, out, err);
        if (*evaluate) return cmd_evaluate(ea, c, out);
        if (*run_cmd) return cmd_agent_run(aa, c, out, err);
        if (*online) return cmd_report_online(ra, c, out);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}

}  // namespace starwm::cli
