#include "tsn5g/topology.hpp"

#include <doctest.h>

#include <sstream>

using namespace tsn5g;

namespace {

ScenarioConfig short_run(std::size_t endpoints, const char* channel = "ideal")
{
    nlohmann::json doc = {{"horizon_ns", 1'000'000'000},
                          {"warmup_ns", 100'000'000},
                          {"endpoint_count", endpoints},
                          {"channel", {{"mode", channel}}},
                          {"gptp", {{"drb_override", 1}}}};
    return parse_scenario(doc);
}

}  // namespace

TEST_CASE("wired transit examples")
{
    WiredLink gig("a", "b", Duration{1000}, 1'000'000'000);
    CHECK(wired_transit(gig, 100, SimTime{0}) == SimTime{1800});

    WiredLink zero("a", "b", Duration{0}, 1'000'000'000);
    CHECK(wired_transit(zero, 0, SimTime{500}) == SimTime{500});

    WiredLink fifo("a", "b", Duration{1000}, 1'000'000'000);
    const SimTime first = wired_transit(fifo, 1500, SimTime{0});
    const SimTime second = wired_transit(fifo, 64, SimTime{1});
    CHECK(first == SimTime{12'000 + 1000});
    CHECK(second > first);
    CHECK(second == SimTime{12'000 + 512 + 1000});
    CHECK(fifo.packets() == 2);
}

TEST_CASE("serialization rounds up to whole nanoseconds")
{
    WiredLink l("a", "b", Duration{0}, 3'000'000'000);
    CHECK(l.serialization(1) == Duration{3});
    WiredLink ten("a", "b", Duration{0}, 10'000'000'000);
    CHECK(ten.serialization(100) == Duration{80});
}

TEST_CASE("endpoints get sequential NR ids")
{
    Simulation sim(short_run(3));
    CHECK(sim.registry().find("ue0") == UeId{2049});
    CHECK(sim.registry().find("ue1") == UeId{2050});
    CHECK(sim.registry().find("ue2") == UeId{2051});
    REQUIRE(sim.bindings().size() == 3);
    CHECK(sim.bindings()[1].downstream_addr == parse_ipv4("10.0.1.2"));

    Simulation single(short_run(1));
    CHECK(single.bindings().size() == 1);
}

TEST_CASE("zero endpoints is a config error")
{
    nlohmann::json doc = {{"horizon_ns", 1'000'000'000}, {"endpoint_count", 0}};
    CHECK_THROWS_AS(parse_scenario(doc), ConfigError);
}

TEST_CASE("a short ideal run conserves packets and forwards every gPTP message")
{
    Simulation sim(short_run(2));
    const RunReport r = sim.run();
    CHECK(r.summary.final_time == SimTime{1'000'000'000});
    // 125, 250, ..., 875 ms
    CHECK(r.gptp_pairs_emitted == 7);
    CHECK(r.gptp_forwarded_total == 28);
    for (const auto& e : r.endpoints) {
        CHECK(e.ds_tt.gptp_forwarded == 14);
        CHECK(e.correction_mismatches == 0);
        CHECK(e.correction_checks == 14);
        CHECK(e.orphan_follow_ups == 0);
        CHECK(e.sync_samples == 7);
    }
    for (const auto& f : r.flows) CHECK(f.metrics.conserved());
    CHECK(r.total_drops() == 0);
    CHECK(r.bmca.valid());
    CHECK(r.invariant_checks > 0);
    CHECK(r.dl_scheduler.slots_audited == r.dl_scheduler.slots);
    CHECK(r.dl_scheduler.slots == 2000);
}

TEST_CASE("links cover the fixed path and each endpoint")
{
    Simulation sim(short_run(2));
    CHECK(sim.links().size() == 8 + 2 * 2);
    for (const auto& l : sim.links()) CHECK(l.rate_bps() == 10'000'000'000ULL);
}

TEST_CASE("lineage CSV has one row per packet")
{
    Simulation sim(short_run(1));
    const RunReport r = sim.run();
    std::ostringstream os;
    sim.write_lineage_csv(os);
    const std::string s = os.str();
    const auto rows = static_cast<std::uint64_t>(std::count(s.begin(), s.end(), '\n'));
    std::uint64_t sent = 0;
    for (const auto& f : r.flows) sent += f.metrics.sent;
    CHECK(rows == sent + 1);
    CHECK(s.rfind("lineage_id,flow,endpoint,pcp_src,sent_ns,fate,delivered_ns,pcp_sink\n", 0) == 0);
}

TEST_CASE("equal seeds reproduce, different seeds diverge")
{
    auto cfg = short_run(2, "fading");
    const RunReport a = run_scenario(cfg);
    const RunReport b = run_scenario(cfg);
    CHECK(a.residence_all->sum_ns == b.residence_all->sum_ns);
    CHECK(a.summary.event_count == b.summary.event_count);
    cfg.seed = 99;
    const RunReport c = run_scenario(cfg);
    auto be = [](const RunReport& r) {
        for (const auto& f : r.flow_totals)
            if (f.name == "best_effort") return f.metrics.sent;
        return std::uint64_t{0};
    };
    CHECK(be(c) != be(a));
    CHECK(c.residence_all->sum_ns != a.residence_all->sum_ns);
}

TEST_CASE("grant trace rows")
{
    std::ostringstream trace;
    RunOptions opt;
    opt.grant_trace = &trace;
    Simulation sim(short_run(1), opt);
    sim.run();
    const std::string s = trace.str();
    CHECK(s.rfind("slot_ns,dir,ue,drb,rbs,bytes,harq_failed,jobs_completed\n", 0) == 0);
    CHECK(std::count(s.begin(), s.end(), '\n') > 100);
}
