#pragma once

// Device-side TSN translator: the UE-side port of the logical bridge.

#include "tsn5g/frames.hpp"
#include "tsn5g/qos.hpp"
#include "tsn5g/simkernel.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace tsn5g {

struct ResidenceRecord {
    GptpMessageType message_type = GptpMessageType::Sync;
    std::uint16_t sequence_id = 0;
    SimTime ingress;
    SimTime egress;
    Duration residence{0};
    std::int64_t correction_in = 0;
    std::int64_t correction_out = 0;
};

struct ResidenceStats {
    std::int64_t min_ns = 0;
    std::int64_t max_ns = 0;
    std::uint64_t sum_ns = 0;
    std::uint64_t count = 0;
    double mean_ns = 0.0;
    double variance_ns2 = 0.0;
    double stddev_ns = 0.0;

    [[nodiscard]] std::int64_t spread_ns() const { return max_ns - min_ns; }
    /// Mean truncated to whole nanoseconds (sum / count).
    [[nodiscard]] std::int64_t mean_floor_ns() const { return static_cast<std::int64_t>(sum_ns / count); }
};

/// nullopt for an empty log.
std::optional<ResidenceStats> residence_stats(std::span<const ResidenceRecord> log);

struct DsTtConfig {
    std::size_t endpoint_id = 0;
    MacAddress mac;
    /// Downstream TSN device behind this DS-TT.
    MacAddress device_mac;
    /// Source MAC put on rebuilt downlink data frames.
    MacAddress upstream_mac;
    std::uint32_t upstream_addr = 0;
    std::uint32_t address = 0;
    std::uint16_t vid = 100;
};

struct DsTtCounters {
    std::uint64_t gptp_forwarded = 0;
    std::uint64_t sync_forwarded = 0;
    std::uint64_t follow_up_forwarded = 0;
    std::uint64_t data_forwarded_high = 0;
    std::uint64_t data_forwarded_be = 0;
    std::uint64_t reverse_forwarded = 0;
    std::uint64_t reverse_gptp_as_data = 0;
    std::uint64_t dropped_malformed = 0;
};

/// Reverse-path output: the datagram toward Device A plus the TSN device's MAC.
struct ReversePacket {
    CoreDatagram datagram;
    MacAddress source_mac;
};

class DsTt {
public:
    using ResidenceListener = std::function<void(std::size_t endpoint, const ResidenceRecord&)>;

    DsTt(DsTtConfig config, const QosProfile& profile, Diagnostics* diagnostics = nullptr);

    /// Forward path. Tunnelled gPTP (UDP dst 30001): residence = now - ingress stamp is
    /// added to the correction field and the original frame is re-emitted. Anything else
    /// is rebuilt as a VLAN-tagged frame with PCP from the DSCP. nullopt on a counted drop.
    std::optional<EthernetFrame> on_ue_ingress(const CoreDatagram& packet, SimTime now);

    /// Reverse path: frame from the downstream device -> datagram toward Device A.
    std::optional<ReversePacket> on_tsn_ingress(const EthernetFrame& frame, SimTime now);

    void subscribe(ResidenceListener listener) { listeners_.push_back(std::move(listener)); }

    [[nodiscard]] const std::vector<ResidenceRecord>& residence_log() const { return residence_log_; }
    [[nodiscard]] const DsTtCounters& counters() const { return counters_; }
    [[nodiscard]] const DsTtConfig& config() const { return config_; }

    /// Columns: seq,type,ingress_ns,egress_ns,residence_ns
    void write_residence_csv(std::ostream& out) const;

private:
    std::optional<EthernetFrame> forward_gptp(const CoreDatagram& packet, SimTime now);
    void drop(SimTime now, const std::string& why);

    DsTtConfig config_;
    const QosProfile* profile_;
    Diagnostics* diagnostics_;
    DsTtCounters counters_;
    std::vector<ResidenceRecord> residence_log_;
    std::vector<ResidenceListener> listeners_;
};

}  // namespace tsn5g
