#pragma once

// Traffic sources, per-packet lineage tracking and flow metrics.

#include "tsn5g/frames.hpp"
#include "tsn5g/simkernel.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace tsn5g {

enum class FlowDirection { Downlink, Uplink };

const char* to_string(FlowDirection direction);

struct CbrArrival {
    Duration period{0};
};

struct ExponentialArrival {
    Duration mean{0};
};

using Arrival = std::variant<CbrArrival, ExponentialArrival>;

struct FlowSpec {
    std::string name;
    FlowDirection direction = FlowDirection::Downlink;
    /// nullopt targets every endpoint (one independent source per endpoint).
    std::optional<std::size_t> endpoint;
    std::size_t payload_bytes = 100;
    Arrival arrival = CbrArrival{Duration{1'000'000}};
    Pcp pcp{0};
    SimTime start;
    SimTime stop;

    /// Throws std::invalid_argument on empty name, start >= stop, stop > horizon,
    /// non-positive period/mean or a payload too small to carry a lineage id.
    void validate(SimTime horizon, std::size_t endpoints) const;
};

/// Send times in [start, stop). Cbr: start, start + p, ...; Exponential: first send
/// at start + gap, gaps i.i.d. from the stream.
std::vector<SimTime> generate(const FlowSpec& flow, RngStream& rng);

enum class PacketFate { InFlight, Delivered, AttachLoss, Dropped };

struct PacketLineage {
    std::uint64_t lineage_id = 0;
    std::size_t flow = 0;
    std::size_t endpoint = 0;
    SimTime sent_time;
    std::optional<SimTime> delivered_time;
    Pcp pcp_at_source{0};
    std::optional<Pcp> pcp_at_sink;
    PacketFate fate = PacketFate::InFlight;
};

/// Issues lineage ids (1, 2, ...) and records each packet's fate. Fates change only
/// from InFlight; a second transition is an invariant violation.
class LineageTracker {
public:
    std::uint64_t issue(std::size_t flow, std::size_t endpoint, SimTime sent, Pcp pcp);
    void delivered(std::uint64_t id, SimTime at, Pcp pcp);
    void attach_loss(std::uint64_t id);
    void dropped(std::uint64_t id);

    [[nodiscard]] const PacketLineage& get(std::uint64_t id) const { return records_.at(id - 1); }
    [[nodiscard]] const std::vector<PacketLineage>& all() const { return records_; }

private:
    PacketLineage& settle(std::uint64_t id, PacketFate fate);
    std::vector<PacketLineage> records_;
};

struct DelayStats {
    std::uint64_t count = 0;
    double mean_ns = 0.0;
    std::int64_t min_ns = 0;
    std::int64_t p99_ns = 0;
    std::int64_t max_ns = 0;
};

/// nullopt for no samples. P99 is nearest-rank: the ceil(0.99 n)-th smallest value.
std::optional<DelayStats> delay_stats(std::vector<std::int64_t> delays_ns);

struct FlowMetrics {
    std::uint64_t sent = 0;
    std::uint64_t delivered = 0;
    std::uint64_t radio_attach_loss = 0;
    std::uint64_t dropped = 0;
    /// Still inside the bridge when the run stopped.
    std::uint64_t in_flight = 0;
    std::uint64_t pcp_mismatches = 0;
    /// Over every delivered packet.
    std::optional<DelayStats> delay_full;
    /// Over delivered packets sent at or after the warmup.
    std::optional<DelayStats> delay_warm;

    [[nodiscard]] bool conserved() const { return sent == delivered + radio_attach_loss + dropped + in_flight; }
};

FlowMetrics compute_metrics(std::span<const PacketLineage> lineages, SimTime warmup);

/// Packet body: 8-byte big-endian lineage id, zero padded to payload_bytes.
Bytes make_payload(std::uint64_t lineage_id, std::size_t payload_bytes);
/// Throws MalformedInput if the body is shorter than 8 bytes.
std::uint64_t payload_lineage(ByteView payload);

}  // namespace tsn5g
