#include "tsn5g/frames.hpp"

#include <doctest.h>

#include <fstream>
#include <map>
#include <random>
#include <sstream>

using namespace tsn5g;

namespace {

MacAddress mac(std::uint64_t v) { return MacAddress::from_u64(v); }

Bytes random_bytes(std::mt19937_64& g, std::size_t max_len)
{
    Bytes b(g() % (max_len + 1));
    for (auto& x : b) x = static_cast<std::uint8_t>(g());
    return b;
}

EthernetFrame random_frame(std::mt19937_64& g)
{
    EthernetFrame f;
    f.dst = mac(g() & 0xFFFFFFFFFFFFULL);
    f.src = mac(g() & 0xFFFFFFFFFFFFULL);
    if (g() % 2) f.vlan = VlanTag{Pcp{static_cast<int>(g() % 8)}, g() % 2 == 1, static_cast<std::uint16_t>(g() % 4096)};
    do {
        f.ethertype = static_cast<std::uint16_t>(g());
    } while (f.ethertype == kTpidVlan);
    f.payload = random_bytes(g, 200);
    return f;
}

GptpMessage random_gptp(std::mt19937_64& g)
{
    GptpMessage m;
    m.message_type = g() % 2 ? GptpMessageType::Sync : GptpMessageType::FollowUp;
    m.sequence_id = static_cast<std::uint16_t>(g());
    m.correction_field = static_cast<std::int64_t>(g());
    m.origin_timestamp = SimTime{g() % (1ULL << 62)};
    m.domain_number = static_cast<std::uint8_t>(g());
    return m;
}

CoreDatagram random_datagram(std::mt19937_64& g)
{
    CoreDatagram d;
    d.src_addr = static_cast<std::uint32_t>(g());
    d.dst_addr = static_cast<std::uint32_t>(g());
    d.dscp = Dscp{static_cast<int>(g() % 64)};
    d.protocol = g() % 4 == 0 ? TransportProtocol::Raw : TransportProtocol::Udp;
    if (d.protocol == TransportProtocol::Udp) {
        d.udp_src_port = static_cast<std::uint16_t>(g());
        d.udp_dst_port = static_cast<std::uint16_t>(g());
    }
    d.payload = random_bytes(g, 300);
    return d;
}

std::map<std::string, Bytes> load_golden()
{
    std::ifstream in(std::string{TSN5G_TEST_DATA_DIR} + "/golden_frames.hex");
    REQUIRE(in.good());
    std::map<std::string, Bytes> out;
    std::string name;
    std::string hex;
    while (in >> name >> hex) out[name] = from_hex(hex);
    return out;
}

// Every strict prefix must fail with a codec error; the full input must not.
template <typename Decode>
void check_prefixes(const Bytes& full, Decode decode)
{
    for (std::size_t n = 0; n < full.size(); ++n) {
        const Bytes prefix(full.begin(), full.begin() + static_cast<std::ptrdiff_t>(n));
        try {
            (void)decode(ByteView{prefix});
        } catch (const CodecError&) {
        }
    }
    CHECK_NOTHROW((void)decode(ByteView{full}));
}

}  // namespace

TEST_CASE("VLAN tag PCP 6 VID 100 encodes as 81 00 C0 64 at offset 12")
{
    EthernetFrame f;
    f.dst = mac(0x020000000101);
    f.src = mac(0x020000000010);
    f.vlan = VlanTag{Pcp{6}, false, 100};
    f.payload = {1, 2, 3};
    const Bytes b = encode_frame(f);
    REQUIRE(b.size() >= 16);
    CHECK(b[12] == 0x81);
    CHECK(b[13] == 0x00);
    CHECK(b[14] == 0xC0);
    CHECK(b[15] == 0x64);
}

TEST_CASE("untagged gPTP frame carries 88 F7 at offset 12")
{
    EthernetFrame f;
    f.ethertype = kEthertypeGptp;
    const Bytes b = encode_frame(f);
    CHECK(b[12] == 0x88);
    CHECK(b[13] == 0xF7);
}

TEST_CASE("13-byte input is malformed")
{
    const Bytes b(13, 0);
    CHECK_THROWS_AS(decode_frame(b), MalformedInput);
}

TEST_CASE("TCI C064 decodes to PCP 6, DEI 0, VID 100")
{
    Bytes b{0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 2, 0x81, 0x00, 0xC0, 0x64, 0x08, 0x00};
    const auto f = decode_frame(b);
    REQUIRE(f.vlan);
    CHECK(f.vlan->pcp() == Pcp{6});
    CHECK_FALSE(f.vlan->dei());
    CHECK(f.vlan->vid() == 100);
    CHECK(f.ethertype == kEthertypeIpv4);
}

TEST_CASE("gPTP frame with a Sync body decodes to Sync")
{
    GptpMessage m;
    m.sequence_id = 3;
    EthernetFrame f;
    f.dst = kGptpMulticastMac;
    f.ethertype = kEthertypeGptp;
    f.payload = encode_sync(m);
    const auto back = decode_frame(encode_frame(f));
    CHECK(back.is_gptp());
    CHECK(decode_gptp(back.payload).message_type == GptpMessageType::Sync);
}

TEST_CASE("correction field values survive encoding")
{
    GptpMessage sync;
    CHECK(decode_gptp(encode_gptp(sync)).correction_field == 0);
    GptpMessage fu;
    fu.message_type = GptpMessageType::FollowUp;
    fu.correction_field = 2'499'852LL * 65536;
    CHECK(decode_gptp(encode_gptp(fu)).correction_field == 2'499'852LL * 65536);
}

TEST_CASE("PdelayReq type nibble is unsupported")
{
    GptpMessage m;
    Bytes b = encode_sync(m);
    b[0] = static_cast<std::uint8_t>((b[0] & 0xF0) | 0x2);
    CHECK_THROWS_AS(decode_gptp(b), UnsupportedMessage);
    try {
        decode_gptp(b);
    } catch (const UnsupportedMessage& e) {
        CHECK(e.message_type() == 0x2);
    }
}

TEST_CASE("residence header wrap and unwrap")
{
    EthernetFrame f;
    f.dst = kGptpMulticastMac;
    f.ethertype = kEthertypeGptp;
    f.payload = encode_sync(GptpMessage{});
    const Bytes frame = encode_frame(f);

    const auto u = unwrap_residence(wrap_residence(frame, SimTime{1'000'000}, 1));
    CHECK(u.header.ingress_timestamp == SimTime{1'000'000});
    CHECK(u.header.origin_port_id == 1);
    CHECK(u.frame == frame);

    const Bytes zero = wrap_residence(frame, SimTime{0}, 1);
    for (int i = 0; i < 8; ++i) CHECK(zero[static_cast<std::size_t>(i)] == 0);

    CHECK_THROWS_AS(unwrap_residence(Bytes(9, 0)), MalformedInput);

    EthernetFrame data;
    CHECK_THROWS_AS(wrap_residence(encode_frame(data), SimTime{0}, 1), std::invalid_argument);
}

TEST_CASE("encoders match independently built golden vectors")
{
    const auto golden = load_golden();

    EthernetFrame tagged;
    tagged.dst = mac(0x020000000101);
    tagged.src = mac(0x020000000010);
    tagged.vlan = VlanTag{Pcp{6}, false, 100};
    tagged.ethertype = kEthertypeIpv4;
    for (int i = 0; i < 16; ++i) tagged.payload.push_back(static_cast<std::uint8_t>(i));
    CHECK(to_hex(encode_frame(tagged)) == to_hex(golden.at("tagged_data")));
    CHECK(decode_frame(golden.at("tagged_data")) == tagged);

    GptpMessage sync;
    sync.sequence_id = 5;
    sync.correction_field = 2'499'852LL << 16;
    sync.origin_timestamp = SimTime{125'000'000};
    CHECK(to_hex(encode_sync(sync)) == to_hex(golden.at("sync")));
    CHECK(decode_gptp(golden.at("sync")) == sync);

    GptpMessage fu;
    fu.message_type = GptpMessageType::FollowUp;
    fu.sequence_id = 5;
    fu.origin_timestamp = SimTime{1'125'000'000};
    CHECK(to_hex(encode_follow_up(fu)) == to_hex(golden.at("follow_up")));
    CHECK(decode_gptp(golden.at("follow_up")) == fu);

    EthernetFrame gptp;
    gptp.dst = kGptpMulticastMac;
    gptp.src = mac(0x020000000001);
    gptp.ethertype = kEthertypeGptp;
    gptp.payload = encode_sync(sync);
    CHECK(to_hex(encode_frame(gptp)) == to_hex(golden.at("gptp_frame")));

    CoreDatagram d;
    d.src_addr = parse_ipv4("10.0.0.1");
    d.dst_addr = parse_ipv4("10.0.1.1");
    d.dscp = Dscp{6};
    d.udp_src_port = 5000;
    d.udp_dst_port = 5000;
    d.payload = Bytes(100, 0);
    d.payload[7] = 42;
    CHECK(to_hex(encode_datagram(d)) == to_hex(golden.at("datagram")));
    CHECK(decode_datagram(golden.at("datagram")) == d);

    GtpuHeader h{0x10000 + 2049, Qfi{6}, PduDirection::Downlink};
    CHECK(to_hex(encode_gtpu(h, encode_datagram(d))) == to_hex(golden.at("gtpu")));
    const auto p = decode_gtpu(golden.at("gtpu"));
    CHECK(p.header == h);
    CHECK(p.payload == encode_datagram(d));

    CHECK(to_hex(wrap_residence(encode_frame(gptp), SimTime{1'000'000}, 1)) == to_hex(golden.at("residence_wrap")));
}

TEST_CASE("roundtrip identity over random values")
{
    std::mt19937_64 g(2024);
    constexpr int kCases = 10'000;
    SUBCASE("ethernet")
    {
        for (int i = 0; i < kCases; ++i) {
            const auto f = random_frame(g);
            REQUIRE(decode_frame(encode_frame(f)) == f);
        }
    }
    SUBCASE("gptp")
    {
        for (int i = 0; i < kCases; ++i) {
            const auto m = random_gptp(g);
            REQUIRE(decode_gptp(encode_gptp(m)) == m);
        }
    }
    SUBCASE("datagram")
    {
        for (int i = 0; i < kCases; ++i) {
            const auto d = random_datagram(g);
            REQUIRE(decode_datagram(encode_datagram(d)) == d);
        }
    }
    SUBCASE("gtpu")
    {
        for (int i = 0; i < kCases; ++i) {
            GtpuHeader h{static_cast<std::uint32_t>(g()), Qfi{static_cast<int>(g() % 64)},
                         g() % 2 ? PduDirection::Uplink : PduDirection::Downlink};
            const Bytes payload = random_bytes(g, 300);
            const auto p = decode_gtpu(encode_gtpu(h, payload));
            REQUIRE(p.header == h);
            REQUIRE(p.payload == payload);
        }
    }
    SUBCASE("residence header")
    {
        for (int i = 0; i < kCases; ++i) {
            EthernetFrame f = random_frame(g);
            f.ethertype = kEthertypeGptp;
            const Bytes frame = encode_frame(f);
            const SimTime t{g()};
            const auto port = static_cast<std::uint16_t>(g());
            const auto u = unwrap_residence(wrap_residence(frame, t, port));
            REQUIRE(u.header.ingress_timestamp == t);
            REQUIRE(u.header.origin_port_id == port);
            REQUIRE(u.frame == frame);
        }
    }
}

TEST_CASE("truncated inputs raise codec errors")
{
    std::mt19937_64 g(99);
    for (int i = 0; i < 200; ++i) {
        check_prefixes(encode_gptp(random_gptp(g)), [](ByteView b) { return decode_gptp(b); });
        check_prefixes(encode_datagram(random_datagram(g)), [](ByteView b) { return decode_datagram(b); });
        check_prefixes(encode_gtpu(GtpuHeader{1, Qfi{6}, PduDirection::Downlink}, random_bytes(g, 64)),
                       [](ByteView b) { return decode_gtpu(b); });
        check_prefixes(encode_frame(random_frame(g)), [](ByteView b) { return decode_frame(b); });
    }
    // Strict prefixes of fixed-length messages never decode.
    const Bytes sync = encode_sync(GptpMessage{});
    for (std::size_t n = 0; n < sync.size(); ++n)
        CHECK_THROWS_AS(decode_gptp(ByteView{sync.data(), n}), CodecError);
    const Bytes fu = encode_follow_up(GptpMessage{GptpMessageType::FollowUp});
    for (std::size_t n = 0; n < fu.size(); ++n) CHECK_THROWS_AS(decode_gptp(ByteView{fu.data(), n}), CodecError);
    const Bytes dg = encode_datagram(CoreDatagram{});
    for (std::size_t n = 0; n < dg.size(); ++n) CHECK_THROWS_AS(decode_datagram(ByteView{dg.data(), n}), CodecError);
}

TEST_CASE("random byte strings never escape as anything but codec errors")
{
    std::mt19937_64 g(5);
    for (int i = 0; i < 20'000; ++i) {
        const Bytes b = random_bytes(g, 96);
        // Each decoder reads from an exactly sized heap copy so over-reads show up under sanitizers.
        auto run = [&](auto decode) {
            try {
                (void)decode(ByteView{b});
            } catch (const CodecError&) {
            }
        };
        run([](ByteView v) { return decode_frame(v); });
        run([](ByteView v) { return decode_gptp(v); });
        run([](ByteView v) { return decode_datagram(v); });
        run([](ByteView v) { return decode_gtpu(v); });
        run([](ByteView v) { return unwrap_residence(v); });
    }
}

TEST_CASE("correction arithmetic is checked")
{
    CHECK(to_correction_units(Duration{2'499'852}) == 2'499'852LL * 65536);
    CHECK(add_residence(5, Duration{1}) == 5 + 65536);
    CHECK_THROWS_AS(add_residence(std::numeric_limits<std::int64_t>::max() - 10, Duration{1}), CorrectionOverflow);
    CHECK_THROWS_AS(to_correction_units(Duration{std::numeric_limits<std::int64_t>::max() / 1000}), CorrectionOverflow);
}

TEST_CASE("code points reject out-of-range values")
{
    CHECK_THROWS_AS(Pcp{8}, std::invalid_argument);
    CHECK_THROWS_AS(Dscp{64}, std::invalid_argument);
    CHECK_THROWS_AS(Qfi{-1}, std::invalid_argument);
    CHECK_THROWS_AS(VlanTag(Pcp{0}, false, 4096), std::invalid_argument);
}

TEST_CASE("IPv4 text conversion")
{
    CHECK(parse_ipv4("10.0.1.3") == 0x0A000103u);
    CHECK(format_ipv4(0x0A000103u) == "10.0.1.3");
    CHECK_THROWS_AS(parse_ipv4("10.0.1"), std::invalid_argument);
    CHECK_THROWS_AS(parse_ipv4("10.0.1.256"), std::invalid_argument);
    CHECK_THROWS_AS(parse_ipv4("a.b.c.d"), std::invalid_argument);
}
