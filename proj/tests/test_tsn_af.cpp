#include "tsn5g/tsn_af.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>

using namespace tsn5g;

namespace {

StreamReservation bound(std::int64_t ns) { return {"gptp", 1'000'000, ns}; }

ResidenceRecord rec(std::int64_t ns, std::uint64_t at)
{
    ResidenceRecord r;
    r.residence = Duration{ns};
    r.egress = SimTime{at};
    return r;
}

}  // namespace

TEST_CASE("bridge delay statistics")
{
    BridgeDelayStats s;
    CHECK(s.empty());
    s.observe(2'499'756);
    CHECK(s.min_ns() == 2'499'756);
    CHECK(s.max_ns() == 2'499'756);
    CHECK(s.mean_ns() == 2'499'756.0);
    s.observe(2'499'948);
    CHECK(s.min_ns() == 2'499'756);
    CHECK(s.max_ns() == 2'499'948);
    CHECK(s.mean_floor_ns() == 2'499'852);
    CHECK_THROWS_AS(s.observe(-1), InvariantViolation);

    BridgeDelayStats same;
    for (int i = 0; i < 1000; ++i) same.observe(2'499'852);
    CHECK(same.mean_floor_ns() == 2'499'852);
    CHECK(same.mean_ns() == 2'499'852.0);
    CHECK(same.count() == 1000);
}

TEST_CASE("violation checks compare strictly against each bound")
{
    CHECK(check_violation({bound(3'000'000)}, 2'500'000, SimTime{0}).empty());
    const auto v = check_violation({bound(2'500'000)}, 2'547'100, SimTime{7}, 2);
    REQUIRE(v.size() == 1);
    CHECK(v[0].measured_ns == 2'547'100);
    CHECK(v[0].bound_ns == 2'500'000);
    CHECK(v[0].time == SimTime{7});
    CHECK(v[0].endpoint == 2);
    CHECK(check_violation({bound(2'500'000)}, 2'500'000, SimTime{0}).empty());
    CHECK(check_violation({}, 1'000'000'000, SimTime{0}).empty());
}

TEST_CASE("per-sample and running-average modes differ on a single spike")
{
    // mean stays at 2,499,990 ns, the spike alone exceeds the bound
    TsnAf per(std::vector<StreamReservation>{bound(2'500'000)}, ViolationMode::PerSample, 1);
    TsnAf avg(std::vector<StreamReservation>{bound(2'500'000)}, ViolationMode::RunningAverage, 1);
    for (int i = 0; i < 9; ++i) {
        per.observe_residence(0, rec(2'499'900, static_cast<std::uint64_t>(i)));
        avg.observe_residence(0, rec(2'499'900, static_cast<std::uint64_t>(i)));
    }
    per.observe_residence(0, rec(2'500'800, 100));
    avg.observe_residence(0, rec(2'500'800, 100));
    CHECK(per.violations().size() == 1);
    CHECK(avg.violations().empty());
    CHECK(per.aggregate().count() == 10);
    CHECK(per.endpoint_stats(0).max_ns() == 2'500'800);
}

TEST_CASE("reservations must be positive")
{
    CHECK_THROWS_AS(StreamReservation({"x", 0, 1}).validate(), std::invalid_argument);
    CHECK_THROWS_AS(StreamReservation({"x", 1, 0}).validate(), std::invalid_argument);
    CHECK_NOTHROW(bound(1).validate());
}

TEST_CASE("violation mode names")
{
    CHECK(violation_mode_from_string("per_sample") == ViolationMode::PerSample);
    CHECK(violation_mode_from_string(to_string(ViolationMode::RunningAverage)) == ViolationMode::RunningAverage);
    CHECK_THROWS(violation_mode_from_string("mean"));
}

TEST_CASE("CNC reservation file")
{
    const auto r = parse_cnc_xml(R"(<cnc>
  <stream id="gptp" bandwidth_bps="1000000" max_latency_ns="2500000"/>
  <stream id="high_prio" bandwidth_bps="800000" max_latency_ns="3000000"/>
</cnc>)");
    REQUIRE(r.size() == 2);
    CHECK(r[0] == bound(2'500'000));
    CHECK(r[1].stream_id == "high_prio");
    CHECK(r[1].max_latency_ns == 3'000'000);

    CHECK_THROWS_AS(parse_cnc_xml("<cnc><stream id=\"a\" bandwidth_bps=\"1\"/></cnc>"), CncFormatError);
    CHECK_THROWS_AS(parse_cnc_xml("<cnc><stream id=\"a\" bandwidth_bps=\"x\" max_latency_ns=\"1\"/></cnc>"),
                    CncFormatError);
    CHECK_THROWS_AS(parse_cnc_xml("not xml <"), CncFormatError);
    CHECK_THROWS_AS(parse_cnc_xml("<other/>"), CncFormatError);

    const auto path = std::filesystem::temp_directory_path() / "tsn5g_cnc_test.xml";
    std::ofstream(path) << "<cnc><stream id=\"s\" bandwidth_bps=\"5\" max_latency_ns=\"6\"/></cnc>";
    CHECK(load_cnc_file(path.string()).size() == 1);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(load_cnc_file("/nonexistent/cnc.xml"), CncFormatError);
}
