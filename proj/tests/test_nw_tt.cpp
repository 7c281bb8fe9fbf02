#include "tsn5g/nw_tt.hpp"

#include <doctest.h>

using namespace tsn5g;

namespace {

struct Fixture {
    NodeRegistry registry;
    QosProfile profile;
    Diagnostics diag;
    std::vector<EndpointBinding> bindings;
    NwTtConfig cfg;

    Fixture()
    {
        std::vector<EndpointSpec> specs;
        for (int i = 0; i < 3; ++i) {
            const std::string ue = "ue" + std::to_string(i);
            registry.add_nr(ue);
            specs.push_back({"10.0.1." + std::to_string(i + 1), ue});
        }
        bindings = register_endpoints(specs, registry);
        cfg.address = parse_ipv4("10.0.0.254");
        cfg.mac = MacAddress::from_u64(0x020000000010);
        cfg.tsn_hosts[parse_ipv4("10.0.0.1")] = MacAddress::from_u64(0x020000000001);
    }
};

EthernetFrame data_frame(std::uint32_t dst, std::optional<int> pcp)
{
    CoreDatagram d;
    d.src_addr = parse_ipv4("10.0.0.1");
    d.dst_addr = dst;
    d.udp_src_port = 5000;
    d.udp_dst_port = 5000;
    d.payload = Bytes(100, 0xAB);
    EthernetFrame f;
    f.src = MacAddress::from_u64(0x020000000001);
    f.dst = MacAddress::from_u64(0x020000000101);
    if (pcp) f.vlan = VlanTag{Pcp{*pcp}, false, 100};
    f.payload = encode_datagram(d);
    return f;
}

}  // namespace

TEST_CASE("three endpoints bind to sequential NR ids")
{
    Fixture fx;
    REQUIRE(fx.bindings.size() == 3);
    CHECK(fx.bindings[0].ue_id == 2049);
    CHECK(fx.bindings[1].ue_id == 2050);
    CHECK(fx.bindings[2].ue_id == 2051);
    CHECK(fx.bindings[2].downstream_addr == parse_ipv4("10.0.1.3"));
}

TEST_CASE("binding errors")
{
    NodeRegistry reg;
    reg.add("lte", 1025);
    reg.add_nr("ue0");
    CHECK_THROWS_AS(register_endpoints({{"10.0.1.1", "lte"}}, reg), BindingError);
    CHECK_THROWS_AS(register_endpoints({{"10.0.1.1", "nobody"}}, reg), BindingError);
    CHECK_THROWS_AS(register_endpoints({{"10.0.1.1", "ue0"}, {"10.0.1.1", "ue0"}}, reg), BindingError);
    CHECK_THROWS_AS(register_endpoints({{"10.0.1", "ue0"}}, reg), BindingError);
    CHECK_THROWS_AS(register_endpoints({}, reg), BindingError);
}

TEST_CASE("gPTP ingress is wrapped and replicated per binding")
{
    Fixture fx;
    NwTt nw(fx.cfg, fx.profile, fx.bindings, &fx.diag);
    EthernetFrame sync;
    sync.dst = kGptpMulticastMac;
    sync.src = MacAddress::from_u64(0x020000000001);
    sync.ethertype = kEthertypeGptp;
    sync.payload = encode_sync(GptpMessage{});
    const SimTime now{125'000'000};
    const auto out = nw.on_tsn_ingress(sync, now);
    REQUIRE(out.size() == 3);
    for (std::size_t i = 0; i < out.size(); ++i) {
        CHECK(out[i].udp_dst_port == kGptpTunnelPort);
        CHECK(out[i].dst_addr == fx.bindings[i].downstream_addr);
        const auto u = unwrap_residence(out[i].payload);
        CHECK(u.header.ingress_timestamp == now);
        CHECK(u.frame == encode_frame(sync));
    }
    CHECK(nw.counters().gptp_wrapped == 3);
    CHECK(nw.conserved());
}

TEST_CASE("data ingress strips the VLAN tag and carries PCP as DSCP")
{
    Fixture fx;
    NwTt nw(fx.cfg, fx.profile, fx.bindings, &fx.diag);
    const auto out = nw.on_tsn_ingress(data_frame(fx.bindings[0].downstream_addr, 6), SimTime{0});
    REQUIRE(out.size() == 1);
    CHECK(out[0].dscp == Dscp{6});
    CHECK(out[0].payload == Bytes(100, 0xAB));

    const auto untagged = nw.on_tsn_ingress(data_frame(fx.bindings[0].downstream_addr, std::nullopt), SimTime{0});
    REQUIRE(untagged.size() == 1);
    CHECK(untagged[0].dscp == Dscp{0});
    CHECK(nw.conserved());
}

TEST_CASE("malformed ingress is dropped, counted and reported")
{
    Fixture fx;
    NwTt nw(fx.cfg, fx.profile, fx.bindings, &fx.diag);
    EthernetFrame bad = data_frame(fx.bindings[0].downstream_addr, 6);
    bad.payload.resize(10);
    CHECK(nw.on_tsn_ingress(bad, SimTime{5}).empty());
    CHECK(nw.on_tsn_ingress(Bytes(5, 0), SimTime{6}).empty());
    CHECK(nw.counters().dropped_malformed == 2);
    CHECK(fx.diag.count() == 2);
    CHECK(nw.conserved());
}

TEST_CASE("egress rebuilds a tagged frame toward the TSN host")
{
    Fixture fx;
    NwTt nw(fx.cfg, fx.profile, fx.bindings, &fx.diag);
    CoreDatagram rev;
    rev.src_addr = fx.bindings[1].downstream_addr;
    rev.dst_addr = parse_ipv4("10.0.0.1");
    rev.dscp = Dscp{0};
    const auto f = nw.on_core_egress(rev, SimTime{0});
    REQUIRE(f);
    CHECK(f->dst == MacAddress::from_u64(0x020000000001));
    REQUIRE(f->vlan);
    CHECK(f->vlan->pcp() == Pcp{0});
    CHECK(decode_datagram(f->payload) == rev);

    rev.dscp = Dscp{6};
    CHECK(nw.on_core_egress(rev, SimTime{0})->vlan->pcp() == Pcp{6});

    const auto before = nw.counters().egress_rebuilt;
    rev.dst_addr = parse_ipv4("192.168.0.1");
    CHECK_FALSE(nw.on_core_egress(rev, SimTime{0}));
    CHECK(nw.counters().routing_errors == 1);
    CHECK(nw.counters().egress_rebuilt == before);
}

TEST_CASE("tunnelled gPTP on the egress path is rejected")
{
    Fixture fx;
    NwTt nw(fx.cfg, fx.profile, fx.bindings, &fx.diag);
    CoreDatagram d;
    d.dst_addr = parse_ipv4("10.0.0.1");
    d.udp_dst_port = kGptpTunnelPort;
    CHECK_FALSE(nw.on_core_egress(d, SimTime{0}));
    CHECK(nw.counters().gptp_egress_rejected == 1);
    CHECK(fx.diag.count() == 1);
}
