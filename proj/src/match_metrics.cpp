#include "starwm/match_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace starwm {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::optional<double> percent(double num, double den) {
    if (den == 0.0) return std::nullopt;
    return num / den * 100.0;
}

void check_range(const std::string& id, const char* name, const std::optional<double>& v, bool bounded) {
    if (!v) return;
    if (*v < 0.0 || (bounded && *v > 100.0 + 1e-9)) {
        throw std::invalid_argument("log " + id + ": " + name + " out of range: " + std::to_string(*v));
    }
}

ordered_json opt_json(const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(); }

std::string opt_text(const std::optional<double>& v) {
    if (!v) return "";
    std::ostringstream os;
    os << std::setprecision(10) << *v;
    return os.str();
}

}  // namespace

MatchMetrics match_metrics(const MatchLog& log) {
    const auto problems = validate(log);
    if (!problems.empty()) throw std::invalid_argument("log " + log.episode_id + ": " + problems.front());

    MatchMetrics m;
    m.episode_id = log.episode_id;
    m.win = log.result == "win" ? 100.0 : 0.0;

    const auto blocked = std::count_if(log.telemetry.begin(), log.telemetry.end(),
                                       [](const SecondTelemetry& t) { return t.supply_blocked; });
    m.sbr = percent(static_cast<double>(blocked), static_cast<double>(log.total_time_s));

    if (!log.telemetry.empty()) {
        const auto& last = log.telemetry.back();
        m.rcr = percent(static_cast<double>(last.minerals_spent + last.gas_spent),
                        static_cast<double>(last.minerals_collected + last.gas_collected));
        m.klr = percent(static_cast<double>(last.army_value_killed), static_cast<double>(last.army_value_lost));
    }

    const auto valid = std::count_if(log.issued.begin(), log.issued.end(), [](const IssuedAction& a) { return a.valid; });
    m.var = percent(static_cast<double>(valid), static_cast<double>(log.issued.size()));

    const auto revised = std::count_if(log.steps.begin(), log.steps.end(), [](const AgentStepRecord& s) { return s.revised; });
    m.arr = percent(static_cast<double>(revised), static_cast<double>(log.steps.size()));

    const auto vals = m.values();
    for (size_t i = 0; i < vals.size(); ++i) check_range(log.episode_id, kMatchMetricNames[i], vals[i], i != 3);
    return m;
}

MetricTable compute_match_metrics(const std::vector<MatchLog>& logs) {
    if (logs.empty()) throw std::invalid_argument("no match logs to aggregate");
    MetricTable table;
    for (const auto& log : logs) table.per_log.push_back(match_metrics(log));
    for (size_t i = 0; i < kMatchMetricNames.size(); ++i) {
        std::vector<double> xs;
        for (const auto& m : table.per_log) {
            if (const auto v = m.values()[i]) xs.push_back(*v);
        }
        auto& s = table.summary[i];
        s.n = xs.size();
        if (xs.empty()) continue;
        double sum = 0.0;
        for (double x : xs) sum += x;
        const double mean = sum / static_cast<double>(xs.size());
        double sq = 0.0;
        for (double x : xs) sq += (x - mean) * (x - mean);
        s.mean = mean;
        s.std = std::sqrt(sq / static_cast<double>(xs.size()));
    }
    return table;
}

ordered_json metric_table_to_json(const MetricTable& table) {
    ordered_json j;
    ordered_json summary;
    for (size_t i = 0; i < kMatchMetricNames.size(); ++i) {
        const auto& s = table.summary[i];
        summary[kMatchMetricNames[i]] = {{"mean", opt_json(s.mean)}, {"std", opt_json(s.std)}, {"n", s.n}};
    }
    j["summary"] = summary;
    j["per_log"] = ordered_json::array();
    for (const auto& m : table.per_log) {
        ordered_json row;
        row["episode_id"] = m.episode_id;
        const auto vals = m.values();
        for (size_t i = 0; i < vals.size(); ++i) row[kMatchMetricNames[i]] = opt_json(vals[i]);
        j["per_log"].push_back(row);
    }
    return j;
}

std::string metric_table_to_csv(const MetricTable& table) {
    std::ostringstream os;
    os << "episode_id";
    for (const char* n : kMatchMetricNames) os << ',' << n;
    os << '\n';
    for (const auto& m : table.per_log) {
        os << m.episode_id;
        for (const auto& v : m.values()) os << ',' << opt_text(v);
        os << '\n';
    }
    for (const char* stat : {"mean", "std"}) {
        os << stat;
        for (const auto& s : table.summary) os << ',' << opt_text(std::string(stat) == "mean" ? s.mean : s.std);
        os << '\n';
    }
    return os.str();
}

std::string metric_table_to_text(const MetricTable& table) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(2);
    for (size_t i = 0; i < kMatchMetricNames.size(); ++i) {
        const auto& s = table.summary[i];
        os << std::left << std::setw(4) << kMatchMetricNames[i] << ' ';
        if (s.mean) {
            os << *s.mean << " ± " << *s.std;
        } else {
            os << "n/a";
        }
        os << "  (n=" << s.n << ")\n";
    }
    return os.str();
}

std::vector<MatchLog> read_match_logs(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open " + file.string());
    std::vector<MatchLog> out;
    std::string line;
    for (int n = 1; std::getline(in, line); ++n) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            out.push_back(match_log_from_json(json::parse(line)));
        } catch (const std::exception& e) {
            throw std::runtime_error(file.string() + ":" + std::to_string(n) + ": " + e.what());
        }
    }
    return out;
}

std::vector<MatchLog> read_match_log_dir(const std::filesystem::path& dir) {
    if (std::filesystem::is_regular_file(dir)) return read_match_logs(dir);
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(dir)) {
        if (e.is_regular_file() && e.path().extension() == ".jsonl") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    std::vector<MatchLog> out;
    for (const auto& f : files) {
        auto logs = read_match_logs(f);
        out.insert(out.end(), std::make_move_iterator(logs.begin()), std::make_move_iterator(logs.end()));
    }
    return out;
}

void write_match_log(const std::filesystem::path& file, const std::vector<MatchLog>& logs) {
    std::ofstream out(file);
    if (!out) throw std::runtime_error("cannot write " + file.string());
    for (const auto& log : logs) out << to_json(log).dump() << '\n';
}

}  // namespace starwm
