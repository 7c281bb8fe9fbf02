#include "tsn5g/scenario.hpp"

#include <doctest.h>

using namespace tsn5g;
using nlohmann::json;

namespace {

json minimal() { return {{"horizon_ns", 10'000'000'000LL}}; }

std::string error_of(const json& doc)
{
    try {
        parse_scenario(doc);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("bundled ideal_3ep loads")
{
    const auto c = load_config("ideal_3ep");
    CHECK(c.endpoint_count == 3);
    CHECK(c.ran.scheduler == SchedulerKind::MaxCi);
    CHECK(c.channel.mode == ChannelMode::Ideal);
    CHECK(c.horizon == SimTime{10'000'000'000});
    CHECK(c.warmup == SimTime{1'000'000'000});
    CHECK(c.ran.attach_time == Duration{8'000'000});
    REQUIRE(c.reservations.size() == 1);
    CHECK(c.reservations[0].max_latency_ns == 2'500'000);
    CHECK(c.gptp.drb_override == DrbId{1});
}

TEST_CASE("every bundled config parses")
{
    for (const char* name : {"ideal_3ep", "ideal_1ep", "fading_3ep", "contention_3ep"}) {
        CAPTURE(name);
        CHECK_NOTHROW(load_config(name));
    }
    CHECK_THROWS_AS(load_config("no_such_config"), ConfigError);
}

TEST_CASE("defaults fill in flows, bearers and bindings")
{
    const auto c = parse_scenario(minimal());
    CHECK(c.endpoint_count == 3);
    REQUIRE(c.flows.size() == 3);
    CHECK(c.flows[0].name == "high_prio");
    CHECK(c.flows[0].pcp == Pcp{6});
    CHECK(c.flows[2].direction == FlowDirection::Uplink);
    CHECK(c.flows[2].start == SimTime{1'000'000'000});
    CHECK(c.flows[2].stop == SimTime{9'000'000'000});
    CHECK(c.drb_configs.size() == 3);
    CHECK(c.bindings.size() == 3);
    CHECK(c.bindings[0].address == "10.0.1.1");
    CHECK(c.hierarchy.nodes.size() == 6);
}

TEST_CASE("duplicate QFI is rejected naming the QFI")
{
    json doc = minimal();
    doc["endpoint_count"] = 1;
    doc["drb_configs"] = json::array({{{"ue", "ue0"},
                                       {"entries", json::array({{{"drb", 0}, {"qfi_list", {0, 6}}},
                                                                {{"drb", 1}, {"qfi_list", {6}}, {"priority", 1}}})}}});
    const std::string err = error_of(doc);
    CHECK(err.find("QFI 6") != std::string::npos);
}

TEST_CASE("missing horizon is a schema error")
{
    CHECK(error_of(json::object()).find("horizon_ns") != std::string::npos);
}

TEST_CASE("unknown keys are rejected with their path")
{
    json doc = minimal();
    doc["ran"] = {{"num_rb", 10}};
    CHECK(error_of(doc).find("ran.num_rb") != std::string::npos);
    json top = minimal();
    top["colour"] = "red";
    CHECK(error_of(top).find("colour") != std::string::npos);
}

TEST_CASE("type errors name the field")
{
    json doc = minimal();
    doc["seed"] = "seven";
    CHECK(error_of(doc).find("seed") != std::string::npos);
    json ch = minimal();
    ch["channel"] = {{"mode", "stormy"}};
    CHECK_FALSE(error_of(ch).empty());
}

TEST_CASE("resolved config round trips")
{
    const auto c = load_config("fading_3ep");
    const json once = to_json(c);
    const json twice = to_json(parse_scenario(once));
    CHECK(once == twice);
}

TEST_CASE("overrides apply before validation")
{
    ConfigOverrides o;
    o.seed = 17;
    o.endpoints = 1;
    o.channel = ChannelMode::Fading;
    o.scheduler = SchedulerKind::Rr;
    const auto c = load_config("ideal_3ep", o);
    CHECK(c.seed == 17);
    CHECK(c.endpoint_count == 1);
    CHECK(c.channel.mode == ChannelMode::Fading);
    CHECK(c.ran.scheduler == SchedulerKind::Rr);
    CHECK(c.bindings.size() == 1);
    CHECK(c.hierarchy.nodes.size() == 4);
}

TEST_CASE("gPTP override must name a configured bearer")
{
    json doc = minimal();
    doc["gptp"] = {{"drb_override", 4}};
    CHECK_FALSE(error_of(doc).empty());
}

TEST_CASE("per-UE attach times resolve by name")
{
    json doc = minimal();
    doc["ran"] = {{"attach_time_per_ue_ns", {{"ue1", 4'000'000}}}};
    const auto c = parse_scenario(doc);
    CHECK(c.attach_time_per_ue.at("ue1") == Duration{4'000'000});
    json bad = minimal();
    bad["ran"] = {{"attach_time_per_ue_ns", {{"ue9", 1}}}};
    CHECK_FALSE(error_of(bad).empty());
}

TEST_CASE("name tables")
{
    CHECK(scheduler_from_string("pf") == SchedulerKind::Pf);
    CHECK(channel_mode_from_string("fading") == ChannelMode::Fading);
    CHECK_THROWS(scheduler_from_string("best"));
}
