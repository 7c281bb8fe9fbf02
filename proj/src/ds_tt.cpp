#include "tsn5g/ds_tt.hpp"

#include <cmath>
#include <ostream>

namespace tsn5g {

std::optional<ResidenceStats> residence_stats(std::span<const ResidenceRecord> log)
{
    if (log.empty()) return std::nullopt;
    ResidenceStats s;
    s.min_ns = log.front().residence.count();
    s.max_ns = s.min_ns;
    for (const auto& r : log) {
        const std::int64_t v = r.residence.count();
        s.min_ns = std::min(s.min_ns, v);
        s.max_ns = std::max(s.max_ns, v);
        s.sum_ns += static_cast<std::uint64_t>(v);
    }
    s.count = log.size();
    s.mean_ns = static_cast<double>(s.sum_ns) / static_cast<double>(s.count);
    double acc = 0.0;
    for (const auto& r : log) {
        const double d = static_cast<double>(r.residence.count()) - s.mean_ns;
        acc += d * d;
    }
    s.variance_ns2 = acc / static_cast<double>(s.count);
    s.stddev_ns = std::sqrt(s.variance_ns2);
    return s;
}

DsTt::DsTt(DsTtConfig config, const QosProfile& profile, Diagnostics* diagnostics)
    : config_{std::move(config)}, profile_{&profile}, diagnostics_{diagnostics}
{
}

void DsTt::drop(SimTime now, const std::string& why)
{
    ++counters_.dropped_malformed;
    if (diagnostics_ != nullptr) diagnostics_->report(now, "ds_tt[" + std::to_string(config_.endpoint_id) + "]", why);
}

std::optional<EthernetFrame> DsTt::on_ue_ingress(const CoreDatagram& packet, SimTime now)
{
    if (packet.protocol == TransportProtocol::Udp && packet.udp_dst_port == kGptpTunnelPort) {
        return forward_gptp(packet, now);
    }
    EthernetFrame frame;
    frame.dst = config_.device_mac;
    frame.src = config_.upstream_mac;
    const Pcp pcp = map_dscp_to_pcp(*profile_, packet.dscp);
    frame.vlan = VlanTag{pcp, false, config_.vid};
    frame.ethertype = kEthertypeIpv4;
    frame.payload = encode_datagram(packet);
    if (pcp.value() > 0) {
        ++counters_.data_forwarded_high;
    } else {
        ++counters_.data_forwarded_be;
    }
    return frame;
}

std::optional<EthernetFrame> DsTt::forward_gptp(const CoreDatagram& packet, SimTime now)
{
    UnwrappedGptp unwrapped;
    EthernetFrame frame;
    GptpMessage msg;
    try {
        unwrapped = unwrap_residence(packet.payload);
        frame = decode_frame(unwrapped.frame);
        if (!frame.is_gptp()) {
            drop(now, "tunnelled frame is not gPTP");
            return std::nullopt;
        }
        msg = decode_gptp(frame.payload);
    } catch (const CodecError& e) {
        drop(now, std::string{"bad tunnelled gPTP: "} + e.what());
        return std::nullopt;
    }

    const Duration residence = now - unwrapped.header.ingress_timestamp;
    require_invariant(residence.count() >= 0, "negative residence time at DS-TT");

    ResidenceRecord record;
    record.message_type = msg.message_type;
    record.sequence_id = msg.sequence_id;
    record.ingress = unwrapped.header.ingress_timestamp;
    record.egress = now;
    record.residence = residence;
    record.correction_in = msg.correction_field;

    msg.correction_field = add_residence(msg.correction_field, residence);
    record.correction_out = msg.correction_field;

    // Each message type goes back through its own encoder so the type-specific
    // body (Sync origin timestamp, Follow_Up TLV) is regenerated intact.
    switch (msg.message_type) {
    case GptpMessageType::Sync:
        frame.payload = encode_sync(msg);
        ++counters_.sync_forwarded;
        break;
    case GptpMessageType::FollowUp:
        frame.payload = encode_follow_up(msg);
        ++counters_.follow_up_forwarded;
        break;
    }
    ++counters_.gptp_forwarded;
    residence_log_.push_back(record);
    for (const auto& listener : listeners_) listener(config_.endpoint_id, record);
    return frame;
}

std::optional<ReversePacket> DsTt::on_tsn_ingress(const EthernetFrame& frame, SimTime now)
{
    const Pcp pcp = frame.vlan ? frame.vlan->pcp() : Pcp{0};
    if (frame.is_gptp()) {
        // No peer-delay or reverse sync handling: carry the frame as opaque data.
        ++counters_.reverse_gptp_as_data;
        if (diagnostics_ != nullptr) {
            diagnostics_->report(now, "ds_tt[" + std::to_string(config_.endpoint_id) + "]",
                                 "reverse gPTP frame forwarded as plain data");
        }
        CoreDatagram d;
        d.src_addr = config_.address;
        d.dst_addr = config_.upstream_addr;
        d.dscp = map_pcp_to_dscp(*profile_, pcp);
        d.protocol = TransportProtocol::Raw;
        d.payload = encode_frame(frame);
        ++counters_.reverse_forwarded;
        return ReversePacket{std::move(d), frame.src};
    }
    if (frame.ethertype != kEthertypeIpv4) {
        drop(now, "unsupported ethertype on reverse path");
        return std::nullopt;
    }
    CoreDatagram d;
    try {
        d = decode_datagram(frame.payload);
    } catch (const CodecError& e) {
        drop(now, std::string{"malformed reverse datagram: "} + e.what());
        return std::nullopt;
    }
    d.dscp = map_pcp_to_dscp(*profile_, pcp);
    ++counters_.reverse_forwarded;
    return ReversePacket{std::move(d), frame.src};
}

void DsTt::write_residence_csv(std::ostream& out) const
{
    out << "seq,type,ingress_ns,egress_ns,residence_ns\n";
    for (const auto& r : residence_log_) {
        out << r.sequence_id << ',' << to_string(r.message_type) << ',' << r.ingress.ns() << ',' << r.egress.ns() << ','
            << r.residence.count() << '\n';
    }
}

}  // namespace tsn5g
