#pragma once

// Network-side TSN translator. Ingress (TSN -> 5GS): data frames lose their
// VLAN tag and carry the PCP forward as DSCP; gPTP frames get a residence
// header stamped with the ingress time and are replicated as one UDP datagram
// per registered downstream device. Egress (5GS -> TSN): datagrams are framed
// again with a VLAN tag whose PCP comes from the DSCP.

#include "tsn5g/frames.hpp"
#include "tsn5g/qos.hpp"
#include "tsn5g/simkernel.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace tsn5g {

/// Name -> node identifier map for the radio nodes (the binder's node table).
class NodeRegistry {
public:
    /// Registers `name` with the next free NR identifier (2049, 2050, ...).
    UeId add_nr(const std::string& name);
    /// Registers `name` with an explicit identifier (any range; validated by consumers).
    void add(const std::string& name, UeId id);

    [[nodiscard]] std::optional<UeId> find(const std::string& name) const;
    [[nodiscard]] const std::map<std::string, UeId>& nodes() const { return nodes_; }

private:
    std::map<std::string, UeId> nodes_;
    UeId next_nr_ = kFirstNrNodeId;
};

class BindingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct EndpointSpec {
    std::string address;
    std::string ue;
};

struct EndpointBinding {
    std::uint32_t downstream_addr = 0;
    UeId ue_id = 0;

    bool operator==(const EndpointBinding&) const = default;
};

/// Resolves {address, ue} pairs against the registry. Throws BindingError for an
/// empty list, unknown UE name, duplicate address, bad address or a UE id
/// outside the NR range.
std::vector<EndpointBinding> register_endpoints(const std::vector<EndpointSpec>& specs, const NodeRegistry& registry);

struct NwTtConfig {
    std::uint16_t port_id = 1;
    std::uint32_t address = 0;
    MacAddress mac;
    std::uint16_t vid = 100;
    /// DSCP marked on tunnelled gPTP datagrams.
    Dscp gptp_dscp{0};
    /// Static address -> MAC table for TSN-side hosts reachable on egress.
    std::map<std::uint32_t, MacAddress> tsn_hosts;
};

struct NwTtCounters {
    std::uint64_t frames_in = 0;
    std::uint64_t gptp_frames_in = 0;
    std::uint64_t gptp_wrapped = 0;
    std::uint64_t data_translated = 0;
    std::uint64_t dropped_malformed = 0;
    std::uint64_t egress_rebuilt = 0;
    std::uint64_t routing_errors = 0;
    std::uint64_t gptp_egress_rejected = 0;
};

class NwTt {
public:
    NwTt(NwTtConfig config, const QosProfile& profile, std::vector<EndpointBinding> bindings,
         Diagnostics* diagnostics = nullptr);

    /// gPTP: one wrapped datagram per binding, all stamped with `now`.
    /// Data: exactly one datagram with dscp = PCP mapping (untagged -> PCP 0).
    /// Malformed data payloads are dropped, counted and reported.
    std::vector<CoreDatagram> on_tsn_ingress(const EthernetFrame& frame, SimTime now);
    std::vector<CoreDatagram> on_tsn_ingress(ByteView frame_bytes, SimTime now);

    /// Rebuilds the TSN-side frame; nullopt (counted) for unknown destinations or tunnelled gPTP.
    std::optional<EthernetFrame> on_core_egress(const CoreDatagram& datagram, SimTime now);

    [[nodiscard]] const std::vector<EndpointBinding>& bindings() const { return bindings_; }
    [[nodiscard]] const NwTtCounters& counters() const { return counters_; }
    [[nodiscard]] const NwTtConfig& config() const { return config_; }
    /// frames_in == gptp_wrapped / fan-out + data_translated + dropped_malformed
    [[nodiscard]] bool conserved() const;

private:
    void drop(SimTime now, const std::string& why);

    NwTtConfig config_;
    const QosProfile* profile_;
    std::vector<EndpointBinding> bindings_;
    Diagnostics* diagnostics_;
    NwTtCounters counters_;
};

}  // namespace tsn5g
