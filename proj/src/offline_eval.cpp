#include "starwm/offline_eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "starwm/assignment.hpp"
#include "starwm/parallel.hpp"

namespace starwm {

std::string_view display_name(ScalarField field) {
    switch (field) {
        case ScalarField::Minerals: return "Minerals";
        case ScalarField::MineralsRate: return "Minerals Rate";
        case ScalarField::Gas: return "Gas";
        case ScalarField::GasRate: return "Gas Rate";
        case ScalarField::SupplyUsed: return "Supply Used";
        case ScalarField::SupplyCap: return "Supply Cap";
        case ScalarField::WorkersNum: return "Workers num";
    }
    return "";
}

std::optional<ScalarField> scalar_field_from_name(std::string_view name) {
    for (auto f : kAllScalarFields) {
        if (display_name(f) == name) return f;
    }
    return std::nullopt;
}

double scalar_value(const Observation& obs, ScalarField field) {
    switch (field) {
        case ScalarField::Minerals: return obs.minerals;
        case ScalarField::MineralsRate: return obs.minerals_rate;
        case ScalarField::Gas: return obs.gas;
        case ScalarField::GasRate: return obs.gas_rate;
        case ScalarField::SupplyUsed: return obs.supply_used;
        case ScalarField::SupplyCap: return obs.supply_cap;
        case ScalarField::WorkersNum: return worker_count(obs);
    }
    return 0.0;
}

std::string_view display_name(Category category) {
    switch (category) {
        case Category::SelfUnit: return "Self Unit";
        case Category::SelfStruct: return "Self Struct";
        case Category::EnemyUnit: return "Enemy Unit";
        case Category::EnemyStruct: return "Enemy Struct";
        case Category::SnapshotEnemyStruct: return "Snap Enemy Struct";
    }
    return "";
}

void EvalConfig::check() const {
    if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
    if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
    if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
    if (time_bin_s <= 0) throw std::invalid_argument("time_bin_s must be positive");
}

std::optional<double> Counts::precision() const {
    if (tp + fp == 0) return std::nullopt;
    return static_cast<double>(tp) / static_cast<double>(tp + fp);
}

std::optional<double> Counts::recall() const {
    if (tp + fn == 0) return std::nullopt;
    return static_cast<double>(tp) / static_cast<double>(tp + fn);
}

double Counts::f1() const {
    if (empty()) return 1.0;
    return 2.0 * static_cast<double>(tp) / static_cast<double>(2 * tp + fp + fn);
}

double smape_term(double truth, double pred, double epsilon) {
    return std::abs(truth - pred) / ((std::abs(truth) + std::abs(pred)) / 2.0 + epsilon);
}

double smape(std::span<const double> truth, std::span<const double> pred, double epsilon) {
    if (truth.size() != pred.size()) throw LengthMismatch();
    if (truth.empty()) throw EmptyInput();
    double sum = 0.0;
    for (size_t i = 0; i < truth.size(); ++i) sum += smape_term(truth[i], pred[i], epsilon);
    return sum / static_cast<double>(truth.size());
}

FrameSetCounts compare_sets(const std::vector<std::string>& truth, const std::vector<std::string>& pred) {
    const std::set<std::string> t(truth.begin(), truth.end());
    const std::set<std::string> p(pred.begin(), pred.end());
    FrameSetCounts out;
    out.active = !t.empty() || !p.empty();
    for (const auto& item : p) {
        if (t.count(item)) {
            ++out.counts.tp;
        } else {
            ++out.counts.fp;
        }
    }
    for (const auto& item : t) {
        if (!p.count(item)) ++out.counts.fn;
    }
    return out;
}

SetF1 active_frame_f1(const std::vector<std::vector<std::string>>& truth_sets,
                      const std::vector<std::vector<std::string>>& pred_sets) {
    if (truth_sets.size() != pred_sets.size()) throw LengthMismatch();
    SetF1 out;
    for (size_t i = 0; i < truth_sets.size(); ++i) {
        const auto frame = compare_sets(truth_sets[i], pred_sets[i]);
        if (!frame.active) continue;
        out.vacuous = false;
        out.counts += frame.counts;
    }
    out.f1 = out.counts.f1();
    return out;
}

QueueMetrics queue_metrics(const std::vector<QueueEntry>& truth, const std::vector<QueueEntry>& pred) {
    using Key = std::pair<int, std::string>;
    std::map<Key, std::vector<size_t>> pred_by_key;
    for (size_t j = 0; j < pred.size(); ++j) {
        pred_by_key[{pred[j].owner_id, pred[j].task_name()}].push_back(j);
    }
    std::map<Key, size_t> used;
    QueueMetrics out;
    for (const auto& t : truth) {
        const Key key{t.owner_id, t.task_name()};
        auto it = pred_by_key.find(key);
        size_t& k = used[key];
        if (it != pred_by_key.end() && k < it->second.size()) {
            const auto& p = pred[it->second[k++]];
            ++out.counts.tp;
            out.progress_abs_errors.push_back(std::abs(t.progress_pct - p.progress_pct));
        } else {
            ++out.counts.fn;
        }
    }
    out.counts.fp = static_cast<long>(pred.size()) - out.counts.tp;
    out.f1 = out.counts.f1();
    if (!out.progress_abs_errors.empty()) {
        double sum = 0.0;
        for (double e : out.progress_abs_errors) sum += e;
        out.progress_mae = sum / static_cast<double>(out.progress_abs_errors.size());
    }
    return out;
}

namespace {

struct MatchItem {
    std::optional<int> id;
    std::string kind;
    Point pos;
    std::optional<int> hp;
    std::optional<int> energy;
};

std::vector<MatchItem> items_of(const std::vector<Entity>& list) {
    std::vector<MatchItem> out;
    out.reserve(list.size());
    for (const auto& e : list) out.push_back({e.id, e.kind, e.pos, e.hp_pct, e.energy_pct});
    return out;
}

std::vector<MatchItem> items_of(const std::vector<SnapshotEntity>& list) {
    std::vector<MatchItem> out;
    out.reserve(list.size());
    for (const auto& s : list) out.push_back({std::nullopt, s.kind, s.pos, std::nullopt, std::nullopt});
    return out;
}

struct Candidate {
    double dist;
    size_t gi;
    size_t pi;
};

std::vector<Candidate> spatial_candidates(const std::vector<MatchItem>& gt, const std::vector<MatchItem>& pred,
                                          const std::vector<char>& gt_used, const std::vector<char>& pred_used,
                                          double delta) {
    std::vector<Candidate> out;
    for (size_t i = 0; i < gt.size(); ++i) {
        if (gt_used[i]) continue;
        for (size_t j = 0; j < pred.size(); ++j) {
            if (pred_used[j] || gt[i].kind != pred[j].kind) continue;
            const double d = distance(gt[i].pos, pred[j].pos);
            if (d <= delta) out.push_back({d, i, j});
        }
    }
    std::sort(out.begin(), out.end(), [](const Candidate& a, const Candidate& b) {
        if (a.dist != b.dist) return a.dist < b.dist;
        if (a.gi != b.gi) return a.gi < b.gi;
        return a.pi < b.pi;
    });
    return out;
}

void id_pass(const std::vector<MatchItem>& gt, const std::vector<MatchItem>& pred, bool strict,
             std::vector<char>& gt_used, std::vector<char>& pred_used,
             std::vector<std::pair<size_t, size_t>>& pairs, std::vector<MatchVia>& via) {
    std::map<int, size_t> pred_by_id;
    for (size_t j = 0; j < pred.size(); ++j) {
        if (pred[j].id) pred_by_id.emplace(*pred[j].id, j);
    }
    for (size_t i = 0; i < gt.size(); ++i) {
        if (!gt[i].id) continue;
        auto it = pred_by_id.find(*gt[i].id);
        if (it == pred_by_id.end() || pred_used[it->second]) continue;
        if (strict && gt[i].kind != pred[it->second].kind) continue;
        gt_used[i] = 1;
        pred_used[it->second] = 1;
        pairs.emplace_back(i, it->second);
        via.push_back(MatchVia::Id);
    }
}

// Kuhn's augmenting paths over the same-kind, within-delta bipartite graph.
std::vector<std::pair<size_t, size_t>> max_spatial(const std::vector<Candidate>& edges, size_t n_gt,
                                                   size_t n_pred) {
    std::vector<std::vector<size_t>> adj(n_gt);
    for (const auto& e : edges) adj[e.gi].push_back(e.pi);
    std::vector<long> owner(n_pred, -1);
    std::vector<char> seen;
    auto try_augment = [&](auto&& self, size_t g) -> bool {
        for (size_t p : adj[g]) {
            if (seen[p]) continue;
            seen[p] = 1;
            if (owner[p] < 0 || self(self, static_cast<size_t>(owner[p]))) {
                owner[p] = static_cast<long>(g);
                return true;
            }
        }
        return false;
    };
    for (size_t g = 0; g < n_gt; ++g) {
        seen.assign(n_pred, 0);
        try_augment(try_augment, g);
    }
    std::vector<std::pair<size_t, size_t>> out;
    for (size_t p = 0; p < n_pred; ++p) {
        if (owner[p] >= 0) out.emplace_back(static_cast<size_t>(owner[p]), p);
    }
    std::sort(out.begin(), out.end());
    return out;
}

MatchResult match_items(const std::vector<MatchItem>& gt, const std::vector<MatchItem>& pred,
                        const MatchOptions& opt) {
    if (!(opt.delta > 0.0)) throw std::invalid_argument("delta must be positive");
    MatchResult r;
    std::vector<char> gt_used(gt.size(), 0), pred_used(pred.size(), 0);
    id_pass(gt, pred, opt.strict_id_kind, gt_used, pred_used, r.pairs, r.via);

    const auto candidates = spatial_candidates(gt, pred, gt_used, pred_used, opt.delta);
    if (opt.spatial == SpatialMatching::Greedy) {
        for (const auto& c : candidates) {
            if (gt_used[c.gi] || pred_used[c.pi]) continue;
            gt_used[c.gi] = 1;
            pred_used[c.pi] = 1;
            r.pairs.emplace_back(c.gi, c.pi);
            r.via.push_back(MatchVia::Spatial);
        }
    } else {
        for (const auto& [g, p] : max_spatial(candidates, gt.size(), pred.size())) {
            gt_used[g] = 1;
            pred_used[p] = 1;
            r.pairs.emplace_back(g, p);
            r.via.push_back(MatchVia::Spatial);
        }
    }

    for (size_t i = 0; i < gt.size(); ++i) {
        if (!gt_used[i]) r.unmatched_gt.push_back(i);
    }
    for (size_t j = 0; j < pred.size(); ++j) {
        if (!pred_used[j]) r.unmatched_pred.push_back(j);
    }
    for (const auto& [g, p] : r.pairs) {
        if (gt[g].hp && pred[p].hp) r.hp_abs_errors.push_back(std::abs(*gt[g].hp - *pred[p].hp));
        if (gt[g].energy && pred[p].energy) {
            r.energy_abs_errors.push_back(std::abs(*gt[g].energy - *pred[p].energy));
        }
    }
    r.counts.tp = static_cast<long>(r.pairs.size());
    r.counts.fp = static_cast<long>(r.unmatched_pred.size());
    r.counts.fn = static_cast<long>(r.unmatched_gt.size());
    return r;
}

}  // namespace

MatchResult match_entities(const std::vector<Entity>& gt, const std::vector<Entity>& pred,
                           const MatchOptions& options) {
    return match_items(items_of(gt), items_of(pred), options);
}

MatchResult match_entities(const std::vector<Entity>& gt, const std::vector<Entity>& pred, double delta) {
    MatchOptions opt;
    opt.delta = delta;
    return match_entities(gt, pred, opt);
}

MatchResult match_snapshots(const std::vector<SnapshotEntity>& gt, const std::vector<SnapshotEntity>& pred,
                            const MatchOptions& options) {
    return match_items(items_of(gt), items_of(pred), options);
}

size_t optimal_match_count(const std::vector<Entity>& gt, const std::vector<Entity>& pred, double delta,
                           bool strict_id_kind) {
    MatchOptions opt;
    opt.delta = delta;
    opt.strict_id_kind = strict_id_kind;
    opt.spatial = SpatialMatching::Optimal;
    return match_entities(gt, pred, opt).pairs.size();
}

SampleEval evaluate_sample(const Observation& pred, const Observation& truth, const EvalConfig& cfg) {
    cfg.check();
    SampleEval s;
    s.game_time_s = truth.time_s;
    for (auto field : cfg.scalar_fields) {
        s.smape_terms.emplace_back(field, smape_term(scalar_value(truth, field), scalar_value(pred, field),
                                                     cfg.epsilon));
    }
    s.alerts = compare_sets(truth.alerts, pred.alerts);
    s.upgrades = compare_sets(truth.upgrades, pred.upgrades);
    s.queue = queue_metrics(truth.queue, pred.queue);

    MatchOptions opt;
    opt.delta = cfg.delta;
    opt.strict_id_kind = cfg.strict_id_kind;
    opt.spatial = cfg.spatial;

    auto fill = [&](Category c, const MatchResult& m, double awd_value) {
        auto& ce = s.category(c);
        ce.counts = m.counts;
        ce.hp_abs_errors = m.hp_abs_errors;
        ce.energy_abs_errors = m.energy_abs_errors;
        ce.awd = awd_value;
    };
    auto entity_category = [&](Category c, const std::vector<Entity>& gt, const std::vector<Entity>& pr) {
        fill(c, match_entities(gt, pr, opt), awd(typed_points(gt), typed_points(pr), cfg.lambda).awd);
    };

    entity_category(Category::SelfUnit, truth.my_units(), pred.my_units());
    entity_category(Category::SelfStruct, truth.my_structures, pred.my_structures);
    entity_category(Category::EnemyUnit, truth.enemy_units, pred.enemy_units);
    entity_category(Category::EnemyStruct, truth.enemy_structures, pred.enemy_structures);
    fill(Category::SnapshotEnemyStruct,
         match_snapshots(truth.snapshot_enemy_structures, pred.snapshot_enemy_structures, opt),
         awd(typed_points(truth.snapshot_enemy_structures), typed_points(pred.snapshot_enemy_structures),
             cfg.lambda)
             .awd);
    return s;
}

namespace {

std::optional<double> mean_of(const std::vector<double>& values) {
    if (values.empty()) return std::nullopt;
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
}

std::string awd_row_name(Category c) {
    if (c == Category::SnapshotEnemyStruct) return "Snapshot Enemy Struct AWD";
    return std::string(display_name(c)) + " AWD";
}

}  // namespace

std::optional<double> EvalReport::value(std::string_view name) const {
    for (const auto& row : rows) {
        if (row.name == name) return row.value;
    }
    return std::nullopt;
}

EvalReport aggregate(const std::vector<SampleEval>& samples, const EvalConfig& cfg) {
    if (samples.empty()) throw EmptyInput();
    EvalReport rep;
    rep.sample_count = samples.size();
    const double n = static_cast<double>(samples.size());

    constexpr const char* kMacro = "Macro-Situation Consistency";
    constexpr const char* kEconomy = "Economy & Status";
    constexpr const char* kDevelopment = "Development";
    constexpr const char* kMicro = "Micro Entity Attributes";

    std::array<double, 5> awd_mean{};
    for (auto c : kAllCategories) {
        double sum = 0.0;
        for (const auto& s : samples) sum += s.category(c).awd;
        awd_mean[static_cast<size_t>(c)] = sum / n;
        rep.rows.push_back({kMacro, awd_row_name(c), sum / n});
    }
    rep.self_awd = (awd_mean[0] + awd_mean[1]) / 2.0;
    rep.enemy_awd = (awd_mean[2] + awd_mean[3] + awd_mean[4]) / 3.0;
    rep.rows.push_back({kMacro, "Self AWD", rep.self_awd});
    rep.rows.push_back({kMacro, "Enemy AWD", rep.enemy_awd});

    auto scalar_row = [&](ScalarField f) {
        std::vector<double> terms;
        for (const auto& s : samples) {
            for (const auto& [field, v] : s.smape_terms) {
                if (field == f) terms.push_back(v);
            }
        }
        if (terms.empty()) return;
        rep.rows.push_back({kEconomy, std::string(display_name(f)) + " SMAPE", mean_of(terms)});
    };
    for (auto f : kAllScalarFields) {
        if (f != ScalarField::WorkersNum) scalar_row(f);
    }

    auto set_row = [&](const char* name, auto member) {
        Counts pooled;
        std::vector<double> per_frame;
        for (const auto& s : samples) {
            const FrameSetCounts& fc = s.*member;
            if (!fc.active) continue;
            pooled += fc.counts;
            per_frame.push_back(fc.counts.f1());
        }
        if (per_frame.empty()) {
            rep.notes.push_back(std::string(name) + ": no active frames, reported as vacuous 1.0");
            rep.rows.push_back({kEconomy, name, 1.0});
            return;
        }
        rep.rows.push_back({kEconomy, name, cfg.macro_f1 ? mean_of(per_frame) : pooled.f1()});
    };
    set_row("Alerts F1", &SampleEval::alerts);
    set_row("Upgrades F1", &SampleEval::upgrades);
    scalar_row(ScalarField::WorkersNum);
    rep.notes.push_back("Workers num counts the Info worker supply when present, else worker entities");

    Counts queue_counts;
    std::vector<double> queue_f1s;
    std::vector<double> progress_errors;
    for (const auto& s : samples) {
        queue_counts += s.queue.counts;
        queue_f1s.push_back(s.queue.f1);
        progress_errors.insert(progress_errors.end(), s.queue.progress_abs_errors.begin(),
                               s.queue.progress_abs_errors.end());
    }
    rep.rows.push_back({kDevelopment, "Queue F1", cfg.macro_f1 ? mean_of(queue_f1s) : queue_counts.f1()});
    rep.rows.push_back({kDevelopment, "Progress(%) MAE", mean_of(progress_errors)});

    for (auto c : kAllCategories) {
        Counts pooled;
        std::vector<double> f1s, hp, energy;
        for (const auto& s : samples) {
            const auto& ce = s.category(c);
            pooled += ce.counts;
            f1s.push_back(ce.counts.f1());
            hp.insert(hp.end(), ce.hp_abs_errors.begin(), ce.hp_abs_errors.end());
            energy.insert(energy.end(), ce.energy_abs_errors.begin(), ce.energy_abs_errors.end());
        }
        const std::string prefix(display_name(c));
        rep.rows.push_back({kMicro, prefix + " F1", cfg.macro_f1 ? mean_of(f1s) : pooled.f1()});
        rep.rows.push_back({kMicro, prefix + " Prec.", pooled.precision()});
        rep.rows.push_back({kMicro, prefix + " Recall", pooled.recall()});
        if (c != Category::SnapshotEnemyStruct) rep.rows.push_back({kMicro, prefix + " HP(%) MAE", mean_of(hp)});
        if (c == Category::SelfUnit || c == Category::SelfStruct || c == Category::EnemyUnit) {
            rep.rows.push_back({kMicro, prefix + " Energy(%) MAE", mean_of(energy)});
        }
    }

    // Time series: mean AWD per bin of ground-truth game time.
    std::map<int, std::vector<const SampleEval*>> bins;
    for (const auto& s : samples) bins[(s.game_time_s / cfg.time_bin_s) * cfg.time_bin_s].push_back(&s);
    for (const auto& [start, members] : bins) {
        const double m = static_cast<double>(members.size());
        std::array<double, 5> sums{};
        for (const auto* s : members) {
            for (auto c : kAllCategories) sums[static_cast<size_t>(c)] += s->category(c).awd;
        }
        for (auto c : kAllCategories) {
            rep.time_series.push_back({start, awd_row_name(c), sums[static_cast<size_t>(c)] / m, members.size()});
        }
        rep.time_series.push_back({start, "Self AWD", (sums[0] + sums[1]) / (2.0 * m), members.size()});
        rep.time_series.push_back(
            {start, "Enemy AWD", (sums[2] + sums[3] + sums[4]) / (3.0 * m), members.size()});
    }
    return rep;
}

std::vector<SampleEval> evaluate_corpus(const std::vector<std::pair<Observation, Observation>>& pred_truth,
                                        const EvalConfig& cfg, unsigned workers) {
    std::vector<SampleEval> out(pred_truth.size());
    parallel_for(pred_truth.size(), workers,
                 [&](size_t i) { out[i] = evaluate_sample(pred_truth[i].first, pred_truth[i].second, cfg); });
    return out;
}

std::string report_to_json(const EvalReport& report, int indent) {
    nlohmann::ordered_json j;
    j["sample_count"] = report.sample_count;
    auto rows = nlohmann::ordered_json::array();
    for (const auto& r : report.rows) {
        nlohmann::ordered_json row;
        row["classification"] = r.classification;
        row["metric"] = r.name;
        row["value"] = r.value ? nlohmann::ordered_json(*r.value) : nlohmann::ordered_json(nullptr);
        rows.push_back(row);
    }
    j["metrics"] = rows;
    j["self_awd"] = report.self_awd;
    j["enemy_awd"] = report.enemy_awd;
    j["notes"] = report.notes;
    return j.dump(indent);
}

std::string report_to_csv(const EvalReport& report) {
    std::ostringstream out;
    out.precision(10);
    out << "classification,metric,value\n";
    for (const auto& r : report.rows) {
        out << '"' << r.classification << "\"," << '"' << r.name << "\",";
        if (r.value) out << *r.value;
        out << '\n';
    }
    return out.str();
}

std::string time_series_to_csv(const EvalReport& report) {
    std::ostringstream out;
    out.precision(10);
    out << "bin_start_s,category,mean_awd\n";
    for (const auto& b : report.time_series) {
        out << b.bin_start_s << ',' << b.category << ',' << b.mean_awd << '\n';
    }
    return out.str();
}

}  // namespace starwm
