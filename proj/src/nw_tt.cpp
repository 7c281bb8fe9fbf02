#include "tsn5g/nw_tt.hpp"

#include <set>

namespace tsn5g {

UeId NodeRegistry::add_nr(const std::string& name)
{
    const UeId id = next_nr_++;
    add(name, id);
    return id;
}

void NodeRegistry::add(const std::string& name, UeId id)
{
    if (!nodes_.emplace(name, id).second) throw BindingError("node '" + name + "' registered twice");
}

std::optional<UeId> NodeRegistry::find(const std::string& name) const
{
    const auto it = nodes_.find(name);
    if (it == nodes_.end()) return std::nullopt;
    return it->second;
}

std::vector<EndpointBinding> register_endpoints(const std::vector<EndpointSpec>& specs, const NodeRegistry& registry)
{
    if (specs.empty()) throw BindingError("endpoint list is empty");
    std::vector<EndpointBinding> out;
    std::set<std::uint32_t> seen;
    for (const auto& spec : specs) {
        std::uint32_t addr = 0;
        try {
            addr = parse_ipv4(spec.address);
        } catch (const std::invalid_argument& e) {
            throw BindingError(e.what());
        }
        const auto ue = registry.find(spec.ue);
        if (!ue) throw BindingError("unknown UE '" + spec.ue + "'");
        if (*ue < kFirstNrNodeId) {
            throw BindingError("UE '" + spec.ue + "' has id " + std::to_string(*ue) +
                               ", outside the NR range (>= 2049)");
        }
        if (!seen.insert(addr).second) throw BindingError("duplicate downstream address " + spec.address);
        out.push_back({addr, *ue});
    }
    return out;
}

NwTt::NwTt(NwTtConfig config, const QosProfile& profile, std::vector<EndpointBinding> bindings,
           Diagnostics* diagnostics)
    : config_{std::move(config)}, profile_{&profile}, bindings_{std::move(bindings)}, diagnostics_{diagnostics}
{
    if (bindings_.empty()) throw BindingError("NW-TT needs at least one endpoint binding");
}

void NwTt::drop(SimTime now, const std::string& why)
{
    ++counters_.dropped_malformed;
    if (diagnostics_ != nullptr) diagnostics_->report(now, "nw_tt", why);
}

std::vector<CoreDatagram> NwTt::on_tsn_ingress(ByteView frame_bytes, SimTime now)
{
    try {
        return on_tsn_ingress(decode_frame(frame_bytes), now);
    } catch (const CodecError& e) {
        ++counters_.frames_in;
        drop(now, std::string{"malformed ingress frame: "} + e.what());
        return {};
    }
}

std::vector<CoreDatagram> NwTt::on_tsn_ingress(const EthernetFrame& frame, SimTime now)
{
    ++counters_.frames_in;
    std::vector<CoreDatagram> out;

    if (frame.is_gptp()) {
        ++counters_.gptp_frames_in;
        const Bytes wrapped = wrap_residence(encode_frame(frame), now, config_.port_id);
        out.reserve(bindings_.size());
        for (const auto& b : bindings_) {
            CoreDatagram d;
            d.src_addr = config_.address;
            d.dst_addr = b.downstream_addr;
            d.dscp = config_.gptp_dscp;
            d.protocol = TransportProtocol::Udp;
            d.udp_src_port = kGptpTunnelPort;
            d.udp_dst_port = kGptpTunnelPort;
            d.payload = wrapped;
            out.push_back(std::move(d));
        }
        counters_.gptp_wrapped += out.size();
        return out;
    }

    if (frame.ethertype != kEthertypeIpv4) {
        drop(now, "unsupported ethertype on data path");
        return out;
    }
    CoreDatagram d;
    try {
        d = decode_datagram(frame.payload);
    } catch (const CodecError& e) {
        drop(now, std::string{"malformed datagram in data frame: "} + e.what());
        return out;
    }
    const Pcp pcp = frame.vlan ? frame.vlan->pcp() : Pcp{0};
    d.dscp = map_pcp_to_dscp(*profile_, pcp);
    ++counters_.data_translated;
    out.push_back(std::move(d));
    return out;
}

std::optional<EthernetFrame> NwTt::on_core_egress(const CoreDatagram& datagram, SimTime now)
{
    if (datagram.protocol == TransportProtocol::Udp && datagram.udp_dst_port == kGptpTunnelPort) {
        ++counters_.gptp_egress_rejected;
        if (diagnostics_ != nullptr) diagnostics_->report(now, "nw_tt", "tunnelled gPTP on egress path rejected");
        return std::nullopt;
    }
    const auto host = config_.tsn_hosts.find(datagram.dst_addr);
    if (host == config_.tsn_hosts.end()) {
        ++counters_.routing_errors;
        if (diagnostics_ != nullptr) {
            diagnostics_->report(now, "nw_tt", "no TSN-side route to " + format_ipv4(datagram.dst_addr));
        }
        return std::nullopt;
    }
    EthernetFrame frame;
    frame.dst = host->second;
    frame.src = config_.mac;
    frame.vlan = VlanTag{map_dscp_to_pcp(*profile_, datagram.dscp), false, config_.vid};
    frame.ethertype = kEthertypeIpv4;
    frame.payload = encode_datagram(datagram);
    ++counters_.egress_rebuilt;
    return frame;
}

bool NwTt::conserved() const
{
    const std::uint64_t fan_out = bindings_.size();
    return counters_.gptp_wrapped == counters_.gptp_frames_in * fan_out &&
           counters_.frames_in == counters_.gptp_wrapped / fan_out + counters_.data_translated + counters_.dropped_malformed;
}

}  // namespace tsn5g
