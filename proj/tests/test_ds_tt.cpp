#include "tsn5g/ds_tt.hpp"

#include <doctest.h>

#include <sstream>

using namespace tsn5g;

namespace {

DsTtConfig config()
{
    DsTtConfig c;
    c.endpoint_id = 0;
    c.mac = MacAddress::from_u64(0x020000000201);
    c.device_mac = MacAddress::from_u64(0x020000000101);
    c.upstream_mac = MacAddress::from_u64(0x020000000001);
    c.upstream_addr = parse_ipv4("10.0.0.1");
    c.address = parse_ipv4("10.0.1.1");
    return c;
}

CoreDatagram tunnelled(const GptpMessage& msg, SimTime ingress)
{
    EthernetFrame f;
    f.dst = kGptpMulticastMac;
    f.src = MacAddress::from_u64(0x020000000001);
    f.ethertype = kEthertypeGptp;
    f.payload = encode_gptp(msg);
    CoreDatagram d;
    d.dst_addr = parse_ipv4("10.0.1.1");
    d.udp_src_port = kGptpTunnelPort;
    d.udp_dst_port = kGptpTunnelPort;
    d.payload = wrap_residence(encode_frame(f), ingress, 1);
    return d;
}

ResidenceRecord rec(std::int64_t ns)
{
    ResidenceRecord r;
    r.residence = Duration{ns};
    return r;
}

}  // namespace

TEST_CASE("Sync residence is added to the correction field")
{
    QosProfile p;
    DsTt ds(config(), p);
    GptpMessage sync;
    sync.sequence_id = 7;
    const auto out = ds.on_ue_ingress(tunnelled(sync, SimTime{1'000'000}), SimTime{3'499'852});
    REQUIRE(out);
    CHECK(out->is_gptp());
    CHECK(out->dst == kGptpMulticastMac);
    const auto msg = decode_gptp(out->payload);
    CHECK(msg.correction_field == 2'499'852LL * 65536);
    CHECK(msg.sequence_id == 7);
    REQUIRE(ds.residence_log().size() == 1);
    CHECK(ds.residence_log()[0].residence == Duration{2'499'852});
    CHECK(ds.counters().sync_forwarded == 1);
}

TEST_CASE("Follow_Up keeps its prior correction and its TLV")
{
    QosProfile p;
    DsTt ds(config(), p);
    GptpMessage fu;
    fu.message_type = GptpMessageType::FollowUp;
    fu.correction_field = 12345;
    fu.origin_timestamp = SimTime{125'000'000};
    int heard = 0;
    ds.subscribe([&](std::size_t ep, const ResidenceRecord& r) {
        CHECK(ep == 0);
        CHECK(r.correction_in == 12345);
        ++heard;
    });
    const auto out = ds.on_ue_ingress(tunnelled(fu, SimTime{100}), SimTime{600});
    REQUIRE(out);
    const auto msg = decode_follow_up(out->payload);
    CHECK(msg.correction_field == 12345 + 500LL * 65536);
    CHECK(msg.origin_timestamp == SimTime{125'000'000});
    CHECK(out->payload.size() == kFollowUpLen);
    CHECK(heard == 1);
    CHECK(ds.counters().follow_up_forwarded == 1);
}

TEST_CASE("data datagram DSCP 6 becomes a PCP 6 frame toward Device B")
{
    QosProfile p;
    DsTt ds(config(), p);
    CoreDatagram d;
    d.dscp = Dscp{6};
    d.dst_addr = parse_ipv4("10.0.1.1");
    const auto f = ds.on_ue_ingress(d, SimTime{0});
    REQUIRE(f);
    REQUIRE(f->vlan);
    CHECK(f->vlan->pcp() == Pcp{6});
    CHECK(f->dst == MacAddress::from_u64(0x020000000101));
    CHECK(ds.counters().data_forwarded_high == 1);
}

TEST_CASE("reverse frames map PCP to DSCP and keep the device MAC")
{
    QosProfile p;
    DsTt ds(config(), p);
    CoreDatagram d;
    d.src_addr = parse_ipv4("10.0.1.1");
    d.dst_addr = parse_ipv4("10.0.0.1");
    d.payload = Bytes(100, 1);
    EthernetFrame f;
    f.src = MacAddress::from_u64(0x020000000101);
    f.vlan = VlanTag{Pcp{0}, false, 100};
    f.payload = encode_datagram(d);
    for (int i = 0; i < 800; ++i) {
        const auto out = ds.on_tsn_ingress(f, SimTime{static_cast<std::uint64_t>(i)});
        REQUIRE(out);
        CHECK(out->datagram.dscp == Dscp{0});
        CHECK(out->datagram.dst_addr == parse_ipv4("10.0.0.1"));
        CHECK(out->source_mac == f.src);
    }
    CHECK(ds.counters().reverse_forwarded == 800);

    f.vlan = VlanTag{Pcp{6}, false, 100};
    CHECK(ds.on_tsn_ingress(f, SimTime{0})->datagram.dscp == Dscp{6});
}

TEST_CASE("malformed tunnel payloads are counted drops")
{
    QosProfile p;
    Diagnostics diag;
    DsTt ds(config(), p, &diag);
    CoreDatagram d;
    d.udp_dst_port = kGptpTunnelPort;
    d.payload = Bytes(4, 0);
    CHECK_FALSE(ds.on_ue_ingress(d, SimTime{10}));
    CHECK(ds.counters().dropped_malformed == 1);
    CHECK(diag.count() == 1);
}

TEST_CASE("a stamp later than now is an invariant violation")
{
    QosProfile p;
    DsTt ds(config(), p);
    CHECK_THROWS_AS(ds.on_ue_ingress(tunnelled(GptpMessage{}, SimTime{1000}), SimTime{999}), InvariantViolation);
}

TEST_CASE("residence statistics")
{
    const std::vector<ResidenceRecord> log{rec(2'499'756), rec(2'499'948), rec(2'499'852)};
    const auto s = residence_stats(log);
    REQUIRE(s);
    CHECK(s->min_ns == 2'499'756);
    CHECK(s->max_ns == 2'499'948);
    CHECK(s->spread_ns() == 192);
    CHECK(s->mean_floor_ns() == 2'499'852);

    const std::vector<ResidenceRecord> one{rec(777)};
    const auto s1 = residence_stats(one);
    CHECK(s1->min_ns == 777);
    CHECK(s1->max_ns == 777);
    CHECK(s1->mean_ns == 777.0);
    CHECK(s1->stddev_ns == 0.0);

    CHECK_FALSE(residence_stats({}));
}

TEST_CASE("residence CSV layout")
{
    QosProfile p;
    DsTt ds(config(), p);
    GptpMessage sync;
    sync.sequence_id = 3;
    ds.on_ue_ingress(tunnelled(sync, SimTime{10}), SimTime{25});
    std::ostringstream os;
    ds.write_residence_csv(os);
    CHECK(os.str() == "seq,type,ingress_ns,egress_ns,residence_ns\n3,Sync,10,25,15\n");
}
