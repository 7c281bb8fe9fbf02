#pragma once

// Wire formats handled by the bridge: Ethernet II with an optional 802.1Q tag,
// gPTP Sync / Follow_Up, the IPv4/UDP-shaped core datagram, the GTP-U header
// with a PDU session container carrying the QFI, and the 10-byte residence
// header the NW-TT prepends to tunnelled gPTP frames.
//
// All multi-byte fields are big-endian. Decoders never read past the supplied
// span and report failures through CodecError.

#include "tsn5g/simkernel.hpp"

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace tsn5g {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

inline constexpr std::uint16_t kTpidVlan = 0x8100;
inline constexpr std::uint16_t kEthertypeIpv4 = 0x0800;
inline constexpr std::uint16_t kEthertypeGptp = 0x88F7;
inline constexpr std::uint16_t kGptpTunnelPort = 30001;
inline constexpr std::size_t kEthernetHeaderLen = 14;
inline constexpr std::size_t kVlanTagLen = 4;
inline constexpr std::size_t kDatagramHeaderLen = 20;
inline constexpr std::size_t kUdpHeaderLen = 8;
inline constexpr std::size_t kGtpuHeaderLen = 16;
inline constexpr std::size_t kResidenceHeaderLen = 10;
inline constexpr std::size_t kGptpHeaderLen = 34;
inline constexpr std::size_t kSyncLen = 44;
inline constexpr std::size_t kFollowUpLen = 76;

// ---------------------------------------------------------------------------
// Errors

class CodecError : public std::runtime_error {
public:
    CodecError(const std::string& what, std::size_t offset)
        : std::runtime_error(what + " (at offset " + std::to_string(offset) + ")"), offset_{offset}
    {
    }
    [[nodiscard]] std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

/// Truncated or structurally invalid input.
class MalformedInput : public CodecError {
public:
    using CodecError::CodecError;
};

/// A well-formed gPTP message of a type the bridge does not handle (PdelayReq etc.).
class UnsupportedMessage : public CodecError {
public:
    UnsupportedMessage(std::uint8_t message_type, std::size_t offset)
        : CodecError("unsupported gPTP message type 0x" + hex_nibble(message_type), offset), type_{message_type}
    {
    }
    [[nodiscard]] std::uint8_t message_type() const { return type_; }

private:
    static std::string hex_nibble(std::uint8_t v) { return std::string(1, "0123456789ABCDEF"[v & 0xF]); }
    std::uint8_t type_;
};

class CorrectionOverflow : public std::overflow_error {
public:
    using std::overflow_error::overflow_error;
};

// ---------------------------------------------------------------------------
// Bounded code points

template <typename Tag, int MaxValue>
class BoundedCode {
public:
    static constexpr int kMax = MaxValue;

    constexpr BoundedCode() = default;
    constexpr explicit BoundedCode(int value) : value_{static_cast<std::uint8_t>(value)}
    {
        if (value < 0 || value > MaxValue) {
            throw std::invalid_argument(std::string{Tag::name} + " out of range: " + std::to_string(value));
        }
    }

    [[nodiscard]] constexpr int value() const { return value_; }
    constexpr auto operator<=>(const BoundedCode&) const = default;

private:
    std::uint8_t value_ = 0;
};

struct PcpTag { static constexpr const char* name = "PCP"; };
struct DscpTag { static constexpr const char* name = "DSCP"; };
struct QfiTag { static constexpr const char* name = "QFI"; };

using Pcp = BoundedCode<PcpTag, 7>;
using Dscp = BoundedCode<DscpTag, 63>;
using Qfi = BoundedCode<QfiTag, 63>;

// ---------------------------------------------------------------------------
// Ethernet

struct MacAddress {
    std::array<std::uint8_t, 6> octets{};

    static MacAddress from_u64(std::uint64_t v);
    [[nodiscard]] std::string to_string() const;
    auto operator<=>(const MacAddress&) const = default;
};

inline const MacAddress kGptpMulticastMac{{0x01, 0x80, 0xC2, 0x00, 0x00, 0x0E}};

class VlanTag {
public:
    /// Throws std::invalid_argument for vid > 4095.
    VlanTag(Pcp pcp, bool dei, std::uint16_t vid);

    static VlanTag from_tci(std::uint16_t tci);

    [[nodiscard]] Pcp pcp() const { return pcp_; }
    [[nodiscard]] bool dei() const { return dei_; }
    [[nodiscard]] std::uint16_t vid() const { return vid_; }
    [[nodiscard]] std::uint16_t tci() const;

    bool operator==(const VlanTag&) const = default;

private:
    Pcp pcp_;
    bool dei_;
    std::uint16_t vid_;
};

struct EthernetFrame {
    MacAddress dst;
    MacAddress src;
    std::optional<VlanTag> vlan;
    std::uint16_t ethertype = kEthertypeIpv4;
    Bytes payload;

    [[nodiscard]] bool is_gptp() const { return ethertype == kEthertypeGptp; }
    [[nodiscard]] std::size_t wire_size() const;
    bool operator==(const EthernetFrame&) const = default;
};

Bytes encode_frame(const EthernetFrame& frame);
EthernetFrame decode_frame(ByteView bytes);

// ---------------------------------------------------------------------------
// gPTP (IEEE 802.1AS two-step Sync and Follow_Up)

enum class GptpMessageType : std::uint8_t { Sync = 0x0, FollowUp = 0x8 };

const char* to_string(GptpMessageType type);

struct GptpMessage {
    GptpMessageType message_type = GptpMessageType::Sync;
    std::uint16_t sequence_id = 0;
    /// Units of 2^-16 ns.
    std::int64_t correction_field = 0;
    SimTime origin_timestamp;
    std::uint8_t domain_number = 0;

    bool operator==(const GptpMessage&) const = default;
};

Bytes encode_gptp(const GptpMessage& msg);
Bytes encode_sync(const GptpMessage& msg);
Bytes encode_follow_up(const GptpMessage& msg);
GptpMessage decode_gptp(ByteView bytes);
GptpMessage decode_sync(ByteView bytes);
GptpMessage decode_follow_up(ByteView bytes);

/// Converts whole nanoseconds to correction-field units (left shift by 16), checked.
std::int64_t to_correction_units(Duration residence);
/// correction + residence in 2^-16 ns units; throws CorrectionOverflow instead of wrapping.
std::int64_t add_residence(std::int64_t correction, Duration residence);

// ---------------------------------------------------------------------------
// Core datagram (IPv4-shaped header, optional UDP header)

enum class TransportProtocol : std::uint8_t { Udp = 17, Raw = 253 };

struct CoreDatagram {
    std::uint32_t src_addr = 0;
    std::uint32_t dst_addr = 0;
    Dscp dscp;
    TransportProtocol protocol = TransportProtocol::Udp;
    std::uint16_t udp_src_port = 0;
    std::uint16_t udp_dst_port = 0;
    Bytes payload;

    [[nodiscard]] std::size_t wire_size() const;
    bool operator==(const CoreDatagram&) const = default;
};

Bytes encode_datagram(const CoreDatagram& datagram);
CoreDatagram decode_datagram(ByteView bytes);

std::uint32_t parse_ipv4(const std::string& dotted);
std::string format_ipv4(std::uint32_t addr);

// ---------------------------------------------------------------------------
// GTP-U with PDU session container

enum class PduDirection : std::uint8_t { Downlink = 0, Uplink = 1 };

struct GtpuHeader {
    std::uint32_t teid = 0;
    Qfi qfi;
    PduDirection direction = PduDirection::Downlink;

    bool operator==(const GtpuHeader&) const = default;
};

struct GtpuPacket {
    GtpuHeader header;
    Bytes payload;

    bool operator==(const GtpuPacket&) const = default;
};

Bytes encode_gtpu(const GtpuHeader& header, ByteView payload);
GtpuPacket decode_gtpu(ByteView bytes);

// ---------------------------------------------------------------------------
// Residence header: 8-byte ingress timestamp (ns) + 2-byte NW-TT port id

struct GptpResidenceHeader {
    SimTime ingress_timestamp;
    std::uint16_t origin_port_id = 0;

    bool operator==(const GptpResidenceHeader&) const = default;
};

struct UnwrappedGptp {
    GptpResidenceHeader header;
    Bytes frame;
};

/// Throws std::invalid_argument if `gptp_frame` is not an Ethernet frame with ethertype 0x88F7.
Bytes wrap_residence(ByteView gptp_frame, SimTime ingress, std::uint16_t port_id);
UnwrappedGptp unwrap_residence(ByteView bytes);

std::string to_hex(ByteView bytes);
Bytes from_hex(std::string_view hex);

}  // namespace tsn5g
