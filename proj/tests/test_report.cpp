#include "tsn5g/report.hpp"

#include <doctest.h>

using namespace tsn5g;

namespace {

nlohmann::json short_report(std::size_t endpoints, std::uint64_t seed = 1)
{
    nlohmann::json doc = {{"horizon_ns", 500'000'000}, {"endpoint_count", endpoints}, {"seed", seed}};
    return report_to_json(run_scenario(parse_scenario(doc)));
}

}  // namespace

TEST_CASE("report document has the expected sections")
{
    const auto j = short_report(2);
    for (const char* key : {"scenario", "seed", "config", "run", "flows", "flow_totals", "endpoints", "gptp",
                            "residence", "af", "bmca", "components", "drops", "dropped_total", "invariant_checks"})
        CHECK(j.contains(key));
    CHECK(j["endpoints"].size() == 2);
    CHECK(j["bmca"]["valid"] == true);
    CHECK(j["gptp"]["messages_emitted"] == 2 * j["gptp"]["pairs_emitted"].get<int>());
    const auto& res = j["endpoints"][0]["residence"]["all"];
    CHECK(res["spread_ns"] == res["max_ns"].get<std::int64_t>() - res["min_ns"].get<std::int64_t>());
}

TEST_CASE("report serialisation is byte-stable")
{
    CHECK(short_report(1).dump() == short_report(1).dump());
}

TEST_CASE("comparing a report with itself gives zero deltas")
{
    const auto j = short_report(2);
    const auto c = compare_reports(j, j);
    CHECK_FALSE(c.rows.empty());
    CHECK(c.warnings.empty());
    for (const auto& row : c.rows) CHECK(row.delta == 0.0);
}

TEST_CASE("comparing different endpoint counts warns about unmatched metrics")
{
    const auto c = compare_reports(short_report(1), short_report(3));
    CHECK_FALSE(c.warnings.empty());
    bool has_mean = false;
    for (const auto& row : c.rows) has_mean = has_mean || row.metric == "flow.high_prio.delay_warm.mean_ns";
    CHECK(has_mean);
    CHECK(format_comparison(c, "a", "b").find("warning:") != std::string::npos);
}

TEST_CASE("sweep aggregation")
{
    std::vector<nlohmann::json> runs{short_report(1, 1), short_report(1, 2), short_report(1, 3)};
    const auto s = aggregate_sweep(runs);
    const auto& be = s.at("flow.best_effort.sent");
    CHECK(be.runs == 3);
    CHECK(be.min <= be.mean);
    CHECK(be.mean <= be.max);
    CHECK(be.stddev >= 0.0);
    CHECK(s.at("gptp.forwarded_total").stddev == 0.0);
    const auto j = sweep_to_json(s, {1, 2, 3});
    CHECK(j["seeds"].size() == 3);
    CHECK(format_sweep(s).find("flow.best_effort.sent") != std::string::npos);
}

TEST_CASE("text report has the delivery, latency, residence, AF and hierarchy blocks")
{
    nlohmann::json doc = {{"horizon_ns", 500'000'000}, {"endpoint_count", 2}};
    const std::string t = format_report_text(run_scenario(parse_scenario(doc)));
    for (const char* s : {"Packet delivery", "Latency per class", "Bridge residence", "TSN AF", "Clock hierarchy"})
        CHECK(t.find(s) != std::string::npos);
}
