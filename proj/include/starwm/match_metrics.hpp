#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "starwm/match_log.hpp"

namespace starwm {

/// Column order of the online results table.
inline constexpr std::array<const char*, 6> kMatchMetricNames = {"Win", "SBR", "RCR", "KLR", "VAR", "ARR"};

/// All values in percent; absent when the denominator is zero.
struct MatchMetrics {
    std::string episode_id;
    std::optional<double> win;
    std::optional<double> sbr;
    std::optional<double> rcr;
    std::optional<double> klr;
    std::optional<double> var;
    std::optional<double> arr;

    std::array<std::optional<double>, 6> values() const { return {win, sbr, rcr, klr, var, arr}; }
};

struct MetricSummary {
    std::optional<double> mean;
    /// Population standard deviation.
    std::optional<double> std;
    /// Logs that contributed a value.
    size_t n = 0;
};

struct MetricTable {
    std::vector<MatchMetrics> per_log;
    std::array<MetricSummary, 6> summary;
};

/// Throws std::invalid_argument if the log fails validate() or a value leaves its range.
MatchMetrics match_metrics(const MatchLog& log);
/// Throws std::invalid_argument on an empty list.
MetricTable compute_match_metrics(const std::vector<MatchLog>& logs);

nlohmann::ordered_json metric_table_to_json(const MetricTable& table);
std::string metric_table_to_csv(const MetricTable& table);
/// "Win 10.00 ± 30.00" style lines, one per metric.
std::string metric_table_to_text(const MetricTable& table);

/// One match log per line.
std::vector<MatchLog> read_match_logs(const std::filesystem::path& file);
/// Every *.jsonl file in the directory, in name order.
std::vector<MatchLog> read_match_log_dir(const std::filesystem::path& dir);
void write_match_log(const std::filesystem::path& file, const std::vector<MatchLog>& logs);

}  // namespace starwm
