#pragma once

#include <array>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "starwm/observation.hpp"

namespace starwm {

class LengthMismatch : public std::invalid_argument {
public:
    LengthMismatch() : std::invalid_argument("series lengths differ") {}
};

class EmptyInput : public std::invalid_argument {
public:
    EmptyInput() : std::invalid_argument("nothing to aggregate") {}
};

enum class ScalarField { Minerals, MineralsRate, Gas, GasRate, SupplyUsed, SupplyCap, WorkersNum };

inline constexpr std::array<ScalarField, 7> kAllScalarFields = {
    ScalarField::Minerals,   ScalarField::MineralsRate, ScalarField::Gas,       ScalarField::GasRate,
    ScalarField::SupplyUsed, ScalarField::SupplyCap,    ScalarField::WorkersNum};

std::string_view display_name(ScalarField field);
std::optional<ScalarField> scalar_field_from_name(std::string_view name);
double scalar_value(const Observation& obs, ScalarField field);

enum class Category { SelfUnit, SelfStruct, EnemyUnit, EnemyStruct, SnapshotEnemyStruct };

inline constexpr std::array<Category, 5> kAllCategories = {Category::SelfUnit, Category::SelfStruct,
                                                           Category::EnemyUnit, Category::EnemyStruct,
                                                           Category::SnapshotEnemyStruct};

std::string_view display_name(Category category);

enum class SpatialMatching { Greedy, Optimal };

struct EvalConfig {
    double epsilon = 1e-8;
    double delta = 10.0;
    double lambda = 90.5;
    std::vector<ScalarField> scalar_fields{kAllScalarFields.begin(), kAllScalarFields.end()};
    int time_bin_s = 30;
    /// ID-anchored matches additionally require equal kinds.
    bool strict_id_kind = false;
    /// Per-sample macro F1 instead of pooled micro F1.
    bool macro_f1 = false;
    SpatialMatching spatial = SpatialMatching::Greedy;

    void check() const;
};

struct Counts {
    long tp = 0;
    long fp = 0;
    long fn = 0;

    Counts& operator+=(const Counts& o) {
        tp += o.tp;
        fp += o.fp;
        fn += o.fn;
        return *this;
    }
    bool empty() const { return tp + fp + fn == 0; }
    std::optional<double> precision() const;
    std::optional<double> recall() const;
    /// 1.0 when there is nothing to score on either side.
    double f1() const;
};

double smape_term(double truth, double pred, double epsilon);
double smape(std::span<const double> truth, std::span<const double> pred, double epsilon = 1e-8);

struct SetF1 {
    double f1 = 1.0;
    /// No frame had an item on either side.
    bool vacuous = true;
    Counts counts;
};

/// One frame's set comparison; `active` is false when both sides are empty.
struct FrameSetCounts {
    Counts counts;
    bool active = false;
};

FrameSetCounts compare_sets(const std::vector<std::string>& truth, const std::vector<std::string>& pred);

SetF1 active_frame_f1(const std::vector<std::vector<std::string>>& truth_sets,
                      const std::vector<std::vector<std::string>>& pred_sets);

struct QueueMetrics {
    Counts counts;
    double f1 = 1.0;
    std::vector<double> progress_abs_errors;
    /// Absent when no entries matched.
    std::optional<double> progress_mae;
};

/// Multiset match on (owner_id, task); repeated keys pair up in list order.
QueueMetrics queue_metrics(const std::vector<QueueEntry>& truth, const std::vector<QueueEntry>& pred);

enum class MatchVia { Id, Spatial };

struct MatchResult {
    std::vector<std::pair<size_t, size_t>> pairs;  // (gt index, pred index)
    std::vector<MatchVia> via;
    std::vector<size_t> unmatched_gt;
    std::vector<size_t> unmatched_pred;
    std::vector<double> hp_abs_errors;
    std::vector<double> energy_abs_errors;
    Counts counts;
};

struct MatchOptions {
    double delta = 10.0;
    bool strict_id_kind = false;
    SpatialMatching spatial = SpatialMatching::Greedy;
};

/// Hybrid matching: equal ids first, then same-kind pairs within delta by ascending distance.
MatchResult match_entities(const std::vector<Entity>& gt, const std::vector<Entity>& pred,
                           const MatchOptions& options);
MatchResult match_entities(const std::vector<Entity>& gt, const std::vector<Entity>& pred, double delta);
/// Snapshots have no id, so only the spatial pass applies.
MatchResult match_snapshots(const std::vector<SnapshotEntity>& gt, const std::vector<SnapshotEntity>& pred,
                            const MatchOptions& options);

/// Size of a maximum matching of the spatial pass (same kind, within delta) after the id pass.
size_t optimal_match_count(const std::vector<Entity>& gt, const std::vector<Entity>& pred, double delta,
                           bool strict_id_kind = false);

struct CategoryEval {
    Counts counts;
    std::vector<double> hp_abs_errors;
    std::vector<double> energy_abs_errors;
    double awd = 0.0;
};

struct SampleEval {
    int game_time_s = 0;
    std::vector<std::pair<ScalarField, double>> smape_terms;
    FrameSetCounts alerts;
    FrameSetCounts upgrades;
    QueueMetrics queue;
    std::array<CategoryEval, 5> categories{};

    CategoryEval& category(Category c) { return categories[static_cast<size_t>(c)]; }
    const CategoryEval& category(Category c) const { return categories[static_cast<size_t>(c)]; }
};

SampleEval evaluate_sample(const Observation& pred, const Observation& truth, const EvalConfig& cfg);

struct ReportRow {
    std::string classification;
    std::string name;
    std::optional<double> value;
};

struct TimeBin {
    int bin_start_s = 0;
    std::string category;
    double mean_awd = 0.0;
    size_t samples = 0;
};

struct EvalReport {
    size_t sample_count = 0;
    std::vector<ReportRow> rows;
    double self_awd = 0.0;
    double enemy_awd = 0.0;
    std::vector<TimeBin> time_series;
    std::vector<std::string> notes;

    std::optional<double> value(std::string_view name) const;
};

EvalReport aggregate(const std::vector<SampleEval>& samples, const EvalConfig& cfg);

/// Evaluates (pred, truth) pairs on up to `workers` threads; output order matches input order.
std::vector<SampleEval> evaluate_corpus(const std::vector<std::pair<Observation, Observation>>& pred_truth,
                                        const EvalConfig& cfg, unsigned workers);

std::string report_to_json(const EvalReport& report, int indent = 2);
std::string report_to_csv(const EvalReport& report);
std::string time_series_to_csv(const EvalReport& report);

}  // namespace starwm
