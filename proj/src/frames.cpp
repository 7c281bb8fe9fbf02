#include "tsn5g/frames.hpp"

#include <cstdio>
#include <limits>
#include <sstream>

namespace tsn5g {

namespace {

class ByteWriter {
public:
    explicit ByteWriter(std::size_t reserve = 0) { out_.reserve(reserve); }

    void u8(std::uint8_t v) { out_.push_back(v); }
    void u16(std::uint16_t v)
    {
        u8(static_cast<std::uint8_t>(v >> 8));
        u8(static_cast<std::uint8_t>(v));
    }
    void u32(std::uint32_t v)
    {
        u16(static_cast<std::uint16_t>(v >> 16));
        u16(static_cast<std::uint16_t>(v));
    }
    void u48(std::uint64_t v)
    {
        u16(static_cast<std::uint16_t>(v >> 32));
        u32(static_cast<std::uint32_t>(v));
    }
    void u64(std::uint64_t v)
    {
        u32(static_cast<std::uint32_t>(v >> 32));
        u32(static_cast<std::uint32_t>(v));
    }
    void zeros(std::size_t n) { out_.insert(out_.end(), n, 0); }
    void bytes(ByteView b) { out_.insert(out_.end(), b.begin(), b.end()); }

    Bytes take() { return std::move(out_); }

private:
    Bytes out_;
};

class ByteReader {
public:
    ByteReader(ByteView in, const char* what) : in_{in}, what_{what} {}

    std::uint8_t u8()
    {
        need(1);
        return in_[pos_++];
    }
    std::uint16_t u16()
    {
        need(2);
        const auto v = static_cast<std::uint16_t>((in_[pos_] << 8) | in_[pos_ + 1]);
        pos_ += 2;
        return v;
    }
    std::uint32_t u32()
    {
        need(4);
        const std::uint32_t hi = u16();
        return (hi << 16) | u16();
    }
    std::uint64_t u48()
    {
        need(6);
        const std::uint64_t hi = u16();
        return (hi << 32) | u32();
    }
    std::uint64_t u64()
    {
        need(8);
        const std::uint64_t hi = u32();
        return (hi << 32) | u32();
    }
    void skip(std::size_t n)
    {
        need(n);
        pos_ += n;
    }
    Bytes take(std::size_t n)
    {
        need(n);
        Bytes out(in_.begin() + static_cast<std::ptrdiff_t>(pos_), in_.begin() + static_cast<std::ptrdiff_t>(pos_ + n));
        pos_ += n;
        return out;
    }
    Bytes rest() { return take(remaining()); }

    [[nodiscard]] std::size_t pos() const { return pos_; }
    [[nodiscard]] std::size_t remaining() const { return in_.size() - pos_; }

    [[noreturn]] void fail(const std::string& why) const { throw MalformedInput(std::string{what_} + ": " + why, pos_); }

private:
    void need(std::size_t n) const
    {
        if (in_.size() - pos_ < n) fail("truncated, need " + std::to_string(n) + " more bytes");
    }

    ByteView in_;
    const char* what_;
    std::size_t pos_ = 0;
};

constexpr std::uint64_t kNanosPerSecond = 1'000'000'000ULL;
constexpr std::uint8_t kMajorSdoIdGptp = 0x1;
constexpr std::uint8_t kPtpVersion = 0x02;
constexpr std::int8_t kLogSyncInterval = -3;  // 125 ms

void write_timestamp(ByteWriter& w, SimTime t)
{
    w.u48(t.ns() / kNanosPerSecond);
    w.u32(static_cast<std::uint32_t>(t.ns() % kNanosPerSecond));
}

SimTime read_timestamp(ByteReader& r)
{
    const std::uint64_t seconds = r.u48();
    const std::uint32_t nanos = r.u32();
    if (nanos >= kNanosPerSecond) r.fail("nanoseconds field >= 1e9");
    if (seconds > (std::numeric_limits<std::uint64_t>::max() - nanos) / kNanosPerSecond) r.fail("timestamp overflows");
    return SimTime{seconds * kNanosPerSecond + nanos};
}

void write_gptp_header(ByteWriter& w, const GptpMessage& msg, std::uint16_t length, std::uint16_t flags,
                       std::uint8_t control)
{
    w.u8(static_cast<std::uint8_t>((kMajorSdoIdGptp << 4) | static_cast<std::uint8_t>(msg.message_type)));
    w.u8(kPtpVersion);
    w.u16(length);
    w.u8(msg.domain_number);
    w.u8(0);  // minorSdoId
    w.u16(flags);
    w.u64(static_cast<std::uint64_t>(msg.correction_field));
    w.zeros(4);   // messageTypeSpecific
    w.zeros(10);  // sourcePortIdentity
    w.u16(msg.sequence_id);
    w.u8(control);
    w.u8(static_cast<std::uint8_t>(kLogSyncInterval));
}

GptpMessage read_gptp_header(ByteReader& r, GptpMessageType expected, std::size_t expected_len)
{
    GptpMessage msg;
    const std::uint8_t first = r.u8();
    const std::uint8_t type = first & 0x0F;
    if (type != static_cast<std::uint8_t>(expected)) r.fail("unexpected message type");
    msg.message_type = expected;
    r.skip(1);
    const std::uint16_t length = r.u16();
    if (length != expected_len) r.fail("messageLength " + std::to_string(length) + " != " + std::to_string(expected_len));
    msg.domain_number = r.u8();
    r.skip(3);
    msg.correction_field = static_cast<std::int64_t>(r.u64());
    r.skip(14);
    msg.sequence_id = r.u16();
    r.skip(2);
    return msg;
}

std::uint16_t peek_ethertype(ByteView frame)
{
    ByteReader r(frame, "ethernet frame");
    r.skip(12);
    std::uint16_t type = r.u16();
    if (type == kTpidVlan) {
        r.skip(2);
        type = r.u16();
    }
    return type;
}

}  // namespace

// --------------------------------------------------------------------------- Ethernet

MacAddress MacAddress::from_u64(std::uint64_t v)
{
    MacAddress mac;
    for (int i = 5; i >= 0; --i) {
        mac.octets[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(v & 0xFF);
        v >>= 8;
    }
    return mac;
}

std::string MacAddress::to_string() const
{
    char buf[18];
    std::snprintf(buf, sizeof buf, "%02x:%02x:%02x:%02x:%02x:%02x", octets[0], octets[1], octets[2], octets[3],
                  octets[4], octets[5]);
    return buf;
}

VlanTag::VlanTag(Pcp pcp, bool dei, std::uint16_t vid) : pcp_{pcp}, dei_{dei}, vid_{vid}
{
    if (vid > 0x0FFF) throw std::invalid_argument("VLAN id out of range: " + std::to_string(vid));
}

VlanTag VlanTag::from_tci(std::uint16_t tci)
{
    return VlanTag{Pcp{tci >> 13}, ((tci >> 12) & 1) != 0, static_cast<std::uint16_t>(tci & 0x0FFF)};
}

std::uint16_t VlanTag::tci() const
{
    return static_cast<std::uint16_t>((pcp_.value() << 13) | (dei_ ? 1 << 12 : 0) | vid_);
}

std::size_t EthernetFrame::wire_size() const
{
    return kEthernetHeaderLen + (vlan ? kVlanTagLen : 0) + payload.size();
}

Bytes encode_frame(const EthernetFrame& frame)
{
    if (frame.ethertype == kTpidVlan) throw std::invalid_argument("inner ethertype 0x8100 (double tagging) not supported");
    ByteWriter w(frame.wire_size());
    w.bytes(frame.dst.octets);
    w.bytes(frame.src.octets);
    if (frame.vlan) {
        w.u16(kTpidVlan);
        w.u16(frame.vlan->tci());
    }
    w.u16(frame.ethertype);
    w.bytes(frame.payload);
    return w.take();
}

EthernetFrame decode_frame(ByteView bytes)
{
    ByteReader r(bytes, "ethernet frame");
    if (bytes.size() < kEthernetHeaderLen) r.fail("shorter than 14-byte header");
    EthernetFrame frame;
    for (auto& o : frame.dst.octets) o = r.u8();
    for (auto& o : frame.src.octets) o = r.u8();
    std::uint16_t type = r.u16();
    if (type == kTpidVlan) {
        frame.vlan = VlanTag::from_tci(r.u16());
        type = r.u16();
        if (type == kTpidVlan) r.fail("double-tagged frames not supported");
    }
    frame.ethertype = type;
    frame.payload = r.rest();
    return frame;
}

// --------------------------------------------------------------------------- gPTP

const char* to_string(GptpMessageType type)
{
    return type == GptpMessageType::Sync ? "Sync" : "Follow_Up";
}

Bytes encode_sync(const GptpMessage& msg)
{
    ByteWriter w(kSyncLen);
    write_gptp_header(w, msg, kSyncLen, 0x0208, 0x00);
    write_timestamp(w, msg.origin_timestamp);
    return w.take();
}

Bytes encode_follow_up(const GptpMessage& msg)
{
    ByteWriter w(kFollowUpLen);
    write_gptp_header(w, msg, kFollowUpLen, 0x0008, 0x02);
    write_timestamp(w, msg.origin_timestamp);
    // Follow_Up information TLV (organization extension, 802.1 OUI 00-80-C2, subtype 1).
    w.u16(0x0003);
    w.u16(28);
    w.u8(0x00);
    w.u8(0x80);
    w.u8(0xC2);
    w.u8(0x00);
    w.u8(0x00);
    w.u8(0x01);
    w.zeros(22);  // rate offset, time base indicator, phase and frequency change
    return w.take();
}

Bytes encode_gptp(const GptpMessage& msg)
{
    switch (msg.message_type) {
    case GptpMessageType::Sync: return encode_sync(msg);
    case GptpMessageType::FollowUp: return encode_follow_up(msg);
    }
    throw std::invalid_argument("unknown gPTP message type");
}

GptpMessage decode_sync(ByteView bytes)
{
    ByteReader r(bytes, "gPTP Sync");
    GptpMessage msg = read_gptp_header(r, GptpMessageType::Sync, kSyncLen);
    msg.origin_timestamp = read_timestamp(r);
    return msg;
}

GptpMessage decode_follow_up(ByteView bytes)
{
    ByteReader r(bytes, "gPTP Follow_Up");
    GptpMessage msg = read_gptp_header(r, GptpMessageType::FollowUp, kFollowUpLen);
    msg.origin_timestamp = read_timestamp(r);
    if (r.u16() != 0x0003 || r.u16() != 28) r.fail("missing Follow_Up information TLV");
    r.skip(28);
    return msg;
}

GptpMessage decode_gptp(ByteView bytes)
{
    if (bytes.empty()) throw MalformedInput("gPTP message: empty", 0);
    const std::uint8_t type = bytes[0] & 0x0F;
    switch (type) {
    case static_cast<std::uint8_t>(GptpMessageType::Sync): return decode_sync(bytes);
    case static_cast<std::uint8_t>(GptpMessageType::FollowUp): return decode_follow_up(bytes);
    default: throw UnsupportedMessage(type, 0);
    }
}

std::int64_t to_correction_units(Duration residence)
{
    const std::int64_t ns = residence.count();
    constexpr std::int64_t kLimit = std::numeric_limits<std::int64_t>::max() >> 16;
    if (ns > kLimit || ns < -kLimit) throw CorrectionOverflow("residence too large for correction field");
    return ns * 65536;
}

std::int64_t add_residence(std::int64_t correction, Duration residence)
{
    std::int64_t out = 0;
    if (__builtin_add_overflow(correction, to_correction_units(residence), &out)) {
        throw CorrectionOverflow("correction field overflow");
    }
    return out;
}

// --------------------------------------------------------------------------- Core datagram

std::size_t CoreDatagram::wire_size() const
{
    return kDatagramHeaderLen + (protocol == TransportProtocol::Udp ? kUdpHeaderLen : 0) + payload.size();
}

Bytes encode_datagram(const CoreDatagram& d)
{
    const std::size_t total = d.wire_size();
    if (total > 0xFFFF) throw std::invalid_argument("datagram exceeds 65535 bytes");
    ByteWriter w(total);
    w.u8(0x45);
    w.u8(static_cast<std::uint8_t>(d.dscp.value() << 2));
    w.u16(static_cast<std::uint16_t>(total));
    w.u16(0);       // identification
    w.u16(0x4000);  // DF, never fragmented
    w.u8(64);
    w.u8(static_cast<std::uint8_t>(d.protocol));
    w.u16(0);  // checksum not modelled
    w.u32(d.src_addr);
    w.u32(d.dst_addr);
    if (d.protocol == TransportProtocol::Udp) {
        w.u16(d.udp_src_port);
        w.u16(d.udp_dst_port);
        w.u16(static_cast<std::uint16_t>(kUdpHeaderLen + d.payload.size()));
        w.u16(0);
    }
    w.bytes(d.payload);
    return w.take();
}

CoreDatagram decode_datagram(ByteView bytes)
{
    ByteReader r(bytes, "core datagram");
    CoreDatagram d;
    if (r.u8() != 0x45) r.fail("expected version 4, IHL 5");
    d.dscp = Dscp{r.u8() >> 2};
    const std::uint16_t total = r.u16();
    if (total < kDatagramHeaderLen || total > bytes.size()) r.fail("total length " + std::to_string(total) + " inconsistent");
    r.skip(5);
    const std::uint8_t proto = r.u8();
    if (proto == static_cast<std::uint8_t>(TransportProtocol::Udp)) {
        d.protocol = TransportProtocol::Udp;
    } else if (proto == static_cast<std::uint8_t>(TransportProtocol::Raw)) {
        d.protocol = TransportProtocol::Raw;
    } else {
        r.fail("unsupported protocol " + std::to_string(proto));
    }
    r.skip(2);
    d.src_addr = r.u32();
    d.dst_addr = r.u32();
    std::size_t body = total - kDatagramHeaderLen;
    if (d.protocol == TransportProtocol::Udp) {
        if (body < kUdpHeaderLen) r.fail("UDP header truncated by total length");
        d.udp_src_port = r.u16();
        d.udp_dst_port = r.u16();
        if (r.u16() != body) r.fail("UDP length disagrees with datagram length");
        r.skip(2);
        body -= kUdpHeaderLen;
    }
    d.payload = r.take(body);
    return d;
}

std::uint32_t parse_ipv4(const std::string& dotted)
{
    std::uint32_t out = 0;
    int parts = 0;
    std::size_t pos = 0;
    while (pos <= dotted.size()) {
        const std::size_t dot = dotted.find('.', pos);
        const std::string part = dotted.substr(pos, dot == std::string::npos ? std::string::npos : dot - pos);
        if (part.empty() || part.size() > 3 || part.find_first_not_of("0123456789") != std::string::npos) break;
        const int v = std::stoi(part);
        if (v > 255) break;
        out = (out << 8) | static_cast<std::uint32_t>(v);
        ++parts;
        if (dot == std::string::npos) {
            if (parts == 4) return out;
            break;
        }
        pos = dot + 1;
    }
    throw std::invalid_argument("invalid IPv4 address '" + dotted + "'");
}

std::string format_ipv4(std::uint32_t a)
{
    return std::to_string(a >> 24) + "." + std::to_string((a >> 16) & 0xFF) + "." + std::to_string((a >> 8) & 0xFF) +
           "." + std::to_string(a & 0xFF);
}

// --------------------------------------------------------------------------- GTP-U

Bytes encode_gtpu(const GtpuHeader& h, ByteView payload)
{
    const std::size_t after_mandatory = kGtpuHeaderLen - 8 + payload.size();
    if (after_mandatory > 0xFFFF) throw std::invalid_argument("GTP-U payload too large");
    ByteWriter w(kGtpuHeaderLen + payload.size());
    w.u8(0x34);  // version 1, PT=1, E=1
    w.u8(0xFF);  // G-PDU
    w.u16(static_cast<std::uint16_t>(after_mandatory));
    w.u32(h.teid);
    w.u16(0);     // sequence number
    w.u8(0);      // N-PDU number
    w.u8(0x85);   // next extension: PDU session container
    w.u8(1);      // extension length in 4-octet units
    w.u8(static_cast<std::uint8_t>(static_cast<std::uint8_t>(h.direction) << 4));
    w.u8(static_cast<std::uint8_t>(h.qfi.value()));
    w.u8(0);  // no further extension
    w.bytes(payload);
    return w.take();
}

GtpuPacket decode_gtpu(ByteView bytes)
{
    ByteReader r(bytes, "GTP-U");
    GtpuPacket p;
    const std::uint8_t flags = r.u8();
    if ((flags >> 5) != 1 || (flags & 0x10) == 0) r.fail("not GTPv1-U");
    if ((flags & 0x04) == 0) r.fail("PDU session container extension missing");
    if (r.u8() != 0xFF) r.fail("not a G-PDU");
    const std::uint16_t length = r.u16();
    p.header.teid = r.u32();
    if (length < kGtpuHeaderLen - 8 || length > bytes.size() - 8) r.fail("length field inconsistent");
    r.skip(3);
    if (r.u8() != 0x85) r.fail("expected PDU session container");
    if (r.u8() != 1) r.fail("unexpected extension length");
    const std::uint8_t pdu_type = r.u8() >> 4;
    if (pdu_type > 1) r.fail("unknown PDU type");
    p.header.direction = static_cast<PduDirection>(pdu_type);
    p.header.qfi = Qfi{r.u8() & 0x3F};
    if (r.u8() != 0) r.fail("unexpected chained extension");
    p.payload = r.take(length - (kGtpuHeaderLen - 8));
    return p;
}

// --------------------------------------------------------------------------- Residence header

Bytes wrap_residence(ByteView gptp_frame, SimTime ingress, std::uint16_t port_id)
{
    std::uint16_t type = 0;
    try {
        type = peek_ethertype(gptp_frame);
    } catch (const MalformedInput&) {
        throw std::invalid_argument("wrap_residence: input is not an Ethernet frame");
    }
    if (type != kEthertypeGptp) throw std::invalid_argument("wrap_residence: frame is not gPTP");
    ByteWriter w(kResidenceHeaderLen + gptp_frame.size());
    w.u64(ingress.ns());
    w.u16(port_id);
    w.bytes(gptp_frame);
    return w.take();
}

UnwrappedGptp unwrap_residence(ByteView bytes)
{
    ByteReader r(bytes, "residence header");
    UnwrappedGptp out;
    out.header.ingress_timestamp = SimTime{r.u64()};
    out.header.origin_port_id = r.u16();
    out.frame = r.rest();
    return out;
}

std::string to_hex(ByteView bytes)
{
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string s;
    s.reserve(bytes.size() * 2);
    for (auto b : bytes) {
        s.push_back(kDigits[b >> 4]);
        s.push_back(kDigits[b & 0xF]);
    }
    return s;
}

Bytes from_hex(std::string_view hex)
{
    auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        return -1;
    };
    Bytes out;
    int hi = -1;
    for (char c : hex) {
        if (c == ' ' || c == ':') continue;
        const int v = nibble(c);
        if (v < 0) throw std::invalid_argument("invalid hex digit");
        if (hi < 0) {
            hi = v;
        } else {
            out.push_back(static_cast<std::uint8_t>((hi << 4) | v));
            hi = -1;
        }
    }
    if (hi >= 0) throw std::invalid_argument("odd number of hex digits");
    return out;
}

}  // namespace tsn5g
