#pragma once

// Run report rendering: deterministic JSON document, aligned text tables,
// report comparison and seed-sweep aggregation.

#include "tsn5g/topology.hpp"

#include <json.hpp>

#include <map>
#include <string>
#include <vector>

namespace tsn5g {

nlohmann::json report_to_json(const RunReport& report);
std::string format_report_text(const RunReport& report);

/// Flat numeric view used by compare and sweep, e.g. "flow.high_prio.delay_warm_mean_ns".
std::map<std::string, double> headline_metrics(const nlohmann::json& report);

struct ComparisonRow {
    std::string metric;
    double a = 0.0;
    double b = 0.0;
    double delta = 0.0;
    /// b / a; nullopt when a == 0.
    std::optional<double> ratio;
};

struct Comparison {
    std::vector<ComparisonRow> rows;
    std::vector<std::string> warnings;
};

/// Rows for every metric present in both reports; one warning per metric present in only one.
Comparison compare_reports(const nlohmann::json& a, const nlohmann::json& b);
std::string format_comparison(const Comparison& comparison, const std::string& label_a, const std::string& label_b);

struct SweepStat {
    double mean = 0.0;
    double min = 0.0;
    double max = 0.0;
    double stddev = 0.0;
    std::size_t runs = 0;
};

std::map<std::string, SweepStat> aggregate_sweep(const std::vector<nlohmann::json>& reports);
nlohmann::json sweep_to_json(const std::map<std::string, SweepStat>& stats, const std::vector<std::uint64_t>& seeds);
std::string format_sweep(const std::map<std::string, SweepStat>& stats);

}  // namespace tsn5g
