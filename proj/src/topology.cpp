#include "tsn5g/topology.hpp"

#include <algorithm>
#include <ostream>
#include <tuple>

namespace tsn5g {

WiredLink::WiredLink(std::string a, std::string b, Duration propagation, std::uint64_t rate_bps)
    : a_{std::move(a)}, b_{std::move(b)}, propagation_{propagation}, rate_bps_{rate_bps}
{
    if (rate_bps_ == 0) throw std::invalid_argument("link rate must be > 0");
    if (propagation_.count() < 0) throw std::invalid_argument("link propagation must be >= 0");
}

namespace {
__extension__ typedef unsigned __int128 u128;  // bits * 1e9 overflows 64 bits for jumbo frames at high rates
}

Duration WiredLink::serialization(std::size_t packet_bytes) const
{
    const u128 bits = static_cast<u128>(packet_bytes) * 8u;
    const u128 ns = (bits * 1'000'000'000u + rate_bps_ - 1) / rate_bps_;
    return Duration{static_cast<std::int64_t>(ns)};
}

SimTime WiredLink::transit(std::size_t packet_bytes, SimTime depart)
{
    const SimTime start = std::max(depart, busy_until_);
    busy_until_ = start + serialization(packet_bytes);
    ++packets_;
    return busy_until_ + propagation_;
}

SimTime wired_transit(WiredLink& link, std::size_t packet_bytes, SimTime depart)
{
    return link.transit(packet_bytes, depart);
}

std::uint64_t RunReport::total_drops() const
{
    std::uint64_t n = 0;
    for (const auto& [name, v] : drops) n += v;
    return n;
}

namespace {

constexpr std::uint16_t kDataPort = 5000;

enum LinkId : std::size_t { kASw, kSwNwtt, kNwttSw, kSwA, kNwttUpf, kUpfNwtt, kUpfGnb, kGnbUpf, kFixedLinks };

struct FlowInstance {
    std::string name;
    FlowDirection direction;
    std::size_t endpoint;
    Pcp pcp;
};

struct Endpoint {
    std::string ue;
    UeId ue_id = 0;
    std::uint32_t address = 0;
    MacAddress device_mac;
    std::unique_ptr<DsTt> ds_tt;
    std::unique_ptr<SlaveRecorder> slave;
    std::size_t link_down = 0;
    std::size_t link_up = 0;
    std::uint64_t correction_checks = 0;
    std::uint64_t correction_mismatches = 0;
};

}  // namespace

struct Simulation::Impl {
    ScenarioConfig cfg;
    RunOptions options;
    Kernel kernel;
    NodeRegistry registry;
    std::vector<EndpointBinding> bindings;
    std::uint32_t device_a_addr = parse_ipv4("10.0.0.1");
    MacAddress device_a_mac = MacAddress::from_u64(0x020000000001);
    std::unique_ptr<NwTt> nw_tt;
    std::unique_ptr<Upf> upf;
    std::unique_ptr<Gnb> gnb;
    std::vector<Endpoint> endpoints;
    std::map<UeId, std::size_t> endpoint_by_ue;
    std::vector<WiredLink> links;
    TsnAf af;
    LineageTracker tracker;
    std::vector<FlowInstance> flows;
    std::map<std::tuple<std::size_t, GptpMessageType, std::uint16_t>, std::int64_t> corrections;
    std::uint64_t gptp_pairs = 0;
    std::uint64_t invariant_checks = 0;

    Impl(const ScenarioConfig& c, RunOptions o)
        : cfg{c},
          options{o},
          kernel{c.seed},
          af{c.reservations, c.violation_mode, c.endpoint_count}
    {
        build();
    }

    void check(bool ok, const char* what)
    {
        ++invariant_checks;
        require_invariant(ok, what);
    }

    void build()
    {
        if (cfg.endpoint_count < 1) throw ConfigError("endpoint_count must be >= 1");
        for (std::size_t i = 0; i < cfg.endpoint_count; ++i) registry.add_nr(ScenarioConfig::ue_name(i));
        bindings = register_endpoints(cfg.bindings, registry);

        const auto add_link = [&](const std::string& a, const std::string& b) {
            links.emplace_back(a, b, cfg.links.propagation, cfg.links.rate_bps);
            return links.size() - 1;
        };
        add_link("device_a", "switch");
        add_link("switch", "nw_tt");
        add_link("nw_tt", "switch");
        add_link("switch", "device_a");
        add_link("nw_tt", "upf");
        add_link("upf", "nw_tt");
        add_link("upf", "gnb");
        add_link("gnb", "upf");

        NwTtConfig nw;
        nw.port_id = 1;
        nw.address = parse_ipv4("10.0.0.254");
        nw.mac = MacAddress::from_u64(0x020000000010);
        nw.vid = 100;
        nw.gptp_dscp = Dscp{0};
        nw.tsn_hosts[device_a_addr] = device_a_mac;
        nw_tt = std::make_unique<NwTt>(nw, cfg.qos, bindings, &kernel.diagnostics());
        upf = std::make_unique<Upf>(cfg.qos, bindings, &kernel.diagnostics());

        RanConfig ran = cfg.ran;
        std::map<UeId, DrbConfig> drbs;
        for (const auto& spec : cfg.drb_configs) {
            const UeId id = *registry.find(spec.ue);
            drbs[id] = DrbConfig{id, spec.entries};
        }
        for (const auto& [name, d] : cfg.attach_time_per_ue) ran.attach_time_per_ue[*registry.find(name)] = d;
        gnb = std::make_unique<Gnb>(kernel, ran, cfg.channel, cfg.qos, drbs, cfg.gptp.drb_override);

        for (std::size_t i = 0; i < cfg.endpoint_count; ++i) {
            Endpoint ep;
            ep.ue = ScenarioConfig::ue_name(i);
            ep.ue_id = *registry.find(ep.ue);
            for (const auto& b : bindings) {
                if (b.ue_id == ep.ue_id) ep.address = b.downstream_addr;
            }
            ep.device_mac = MacAddress::from_u64(0x020000000100 + i + 1);
            DsTtConfig dc;
            dc.endpoint_id = i;
            dc.mac = MacAddress::from_u64(0x020000000200 + i + 1);
            dc.device_mac = ep.device_mac;
            dc.upstream_mac = device_a_mac;
            dc.upstream_addr = device_a_addr;
            dc.address = ep.address;
            dc.vid = 100;
            ep.ds_tt = std::make_unique<DsTt>(dc, cfg.qos, &kernel.diagnostics());
            ep.ds_tt->subscribe([this](std::size_t endpoint, const ResidenceRecord& r) {
                af.observe_residence(endpoint, r);
                corrections[{endpoint, r.message_type, r.sequence_id}] = r.correction_out;
            });
            ep.slave = std::make_unique<SlaveRecorder>(i);
            ep.link_down = add_link("ds_tt" + std::to_string(i), "device_b" + std::to_string(i));
            ep.link_up = add_link("device_b" + std::to_string(i), "ds_tt" + std::to_string(i));
            endpoint_by_ue[ep.ue_id] = i;
            endpoints.push_back(std::move(ep));
        }

        gnb->on_attach_loss([this](std::uint64_t lineage, UeId) {
            if (lineage != 0) tracker.attach_loss(lineage);
        });
        gnb->on_drop([this](std::uint64_t lineage, UeId) {
            if (lineage != 0) tracker.dropped(lineage);
        });
        gnb->on_downlink_sink([this](UeId ue, const CoreDatagram& d, std::uint64_t lineage) { ue_deliver(ue, d, lineage); });
        gnb->on_uplink_sink([this](Bytes gtpu, std::uint64_t lineage) {
            const SimTime at = links[kGnbUpf].transit(gtpu.size(), kernel.now());
            kernel.schedule(at, "upf", [this, g = std::move(gtpu), lineage] { upf_uplink(g, lineage); });
        });
        gnb->set_grant_trace(options.grant_trace);
        if (options.grant_trace != nullptr) *options.grant_trace << "slot_ns,dir,ue,drb,rbs,bytes,harq_failed,jobs_completed\n";

        schedule_gptp();
        schedule_traffic();
        gnb->start(cfg.horizon);
    }

    // -- downlink ----------------------------------------------------------------

    void send_from_a(EthernetFrame frame, std::uint64_t lineage)
    {
        const SimTime at = links[kASw].transit(frame.wire_size(), kernel.now());
        kernel.schedule(at, "switch", [this, f = std::move(frame), lineage]() mutable {
            const SimTime at2 = links[kSwNwtt].transit(f.wire_size(), kernel.now());
            kernel.schedule(at2, "nw_tt", [this, f2 = std::move(f), lineage] { nw_tt_ingress(f2, lineage); });
        });
    }

    void nw_tt_ingress(const EthernetFrame& frame, std::uint64_t lineage)
    {
        const SimTime now = kernel.now();
        auto out = nw_tt->on_tsn_ingress(frame, now);
        if (frame.is_gptp()) {
            check(out.size() == bindings.size(), "gPTP replication fan-out differs from binding count");
            for (const auto& d : out) {
                check(unwrap_residence(d.payload).header.ingress_timestamp == now, "ingress stamp differs from kernel time");
            }
        } else if (out.empty()) {
            if (lineage != 0) tracker.dropped(lineage);
            return;
        }
        for (auto& d : out) {
            const SimTime at = links[kNwttUpf].transit(d.wire_size(), now);
            kernel.schedule(at, "upf", [this, dg = std::move(d), lineage] { upf_downlink(dg, lineage); });
        }
    }

    void upf_downlink(const CoreDatagram& d, std::uint64_t lineage)
    {
        auto tunnelled = upf->classify_and_tunnel(d, kernel.now());
        if (!tunnelled) {
            if (lineage != 0) tracker.dropped(lineage);
            return;
        }
        Bytes bytes = encode_gtpu(tunnelled->first, encode_datagram(tunnelled->second));
        const SimTime at = links[kUpfGnb].transit(bytes.size(), kernel.now());
        kernel.schedule(at, "gnb", [this, b = std::move(bytes), lineage] { gnb->receive_downlink(b, lineage); });
    }

    void ue_deliver(UeId ue, const CoreDatagram& d, std::uint64_t lineage)
    {
        const std::size_t i = endpoint_by_ue.at(ue);
        Endpoint& ep = endpoints[i];
        auto frame = ep.ds_tt->on_ue_ingress(d, kernel.now());
        if (!frame) {
            if (lineage != 0) tracker.dropped(lineage);
            return;
        }
        const SimTime at = links[ep.link_down].transit(frame->wire_size(), kernel.now());
        kernel.schedule(at, "device_b", [this, i, f = std::move(*frame), lineage] { device_b_receive(i, f, lineage); });
    }

    void device_b_receive(std::size_t i, const EthernetFrame& frame, std::uint64_t lineage)
    {
        Endpoint& ep = endpoints[i];
        if (frame.is_gptp()) {
            const GptpMessage msg = decode_gptp(frame.payload);
            ep.slave->record(msg, kernel.now());
            const auto it = corrections.find({i, msg.message_type, msg.sequence_id});
            ++ep.correction_checks;
            if (it == corrections.end() || it->second != msg.correction_field) ++ep.correction_mismatches;
            check(it != corrections.end() && it->second == msg.correction_field,
                  "slave correction differs from DS-TT residence record");
            return;
        }
        const CoreDatagram d = decode_datagram(frame.payload);
        check(payload_lineage(d.payload) == lineage, "lineage id in payload does not match carried lineage");
        check(d.dst_addr == ep.address, "packet delivered to the wrong downstream device");
        tracker.delivered(lineage, kernel.now(), frame.vlan ? frame.vlan->pcp() : Pcp{0});
    }

    // -- uplink ------------------------------------------------------------------

    void send_from_b(std::size_t i, EthernetFrame frame, std::uint64_t lineage)
    {
        Endpoint& ep = endpoints[i];
        const SimTime at = links[ep.link_up].transit(frame.wire_size(), kernel.now());
        kernel.schedule(at, "ds_tt", [this, i, f = std::move(frame), lineage] {
            Endpoint& e = endpoints[i];
            auto rev = e.ds_tt->on_tsn_ingress(f, kernel.now());
            if (!rev) {
                tracker.dropped(lineage);
                return;
            }
            check(rev->source_mac == e.device_mac, "reverse path lost the device MAC");
            gnb->receive_uplink(e.ue_id, rev->datagram, lineage);
        });
    }

    void upf_uplink(const Bytes& gtpu, std::uint64_t lineage)
    {
        auto d = upf->decapsulate_uplink(gtpu, kernel.now());
        if (!d) {
            tracker.dropped(lineage);
            return;
        }
        const SimTime at = links[kUpfNwtt].transit(d->wire_size(), kernel.now());
        kernel.schedule(at, "nw_tt", [this, dg = std::move(*d), lineage] {
            auto frame = nw_tt->on_core_egress(dg, kernel.now());
            if (!frame) {
                tracker.dropped(lineage);
                return;
            }
            const SimTime at2 = links[kNwttSw].transit(frame->wire_size(), kernel.now());
            kernel.schedule(at2, "switch", [this, f = std::move(*frame), lineage]() mutable {
                const SimTime at3 = links[kSwA].transit(f.wire_size(), kernel.now());
                kernel.schedule(at3, "device_a", [this, f2 = std::move(f), lineage] { device_a_receive(f2, lineage); });
            });
        });
    }

    void device_a_receive(const EthernetFrame& frame, std::uint64_t lineage)
    {
        const CoreDatagram d = decode_datagram(frame.payload);
        check(payload_lineage(d.payload) == lineage, "lineage id in payload does not match carried lineage");
        tracker.delivered(lineage, kernel.now(), frame.vlan ? frame.vlan->pcp() : Pcp{0});
    }

    // -- sources -----------------------------------------------------------------

    void schedule_gptp()
    {
        for (const auto& e : grandmaster_emit(cfg.gptp.interval, cfg.gptp.start, cfg.horizon, cfg.gptp.domain)) {
            kernel.schedule(e.time, "device_a", [this, e] {
                ++gptp_pairs;
                EthernetFrame sync{kGptpMulticastMac, device_a_mac, std::nullopt, kEthertypeGptp, encode_sync(e.sync)};
                EthernetFrame fu{kGptpMulticastMac, device_a_mac, std::nullopt, kEthertypeGptp,
                                 encode_follow_up(e.follow_up)};
                send_from_a(std::move(sync), 0);
                send_from_a(std::move(fu), 0);
            });
        }
    }

    void schedule_traffic()
    {
        for (const auto& spec : cfg.flows) {
            std::vector<std::size_t> targets;
            if (spec.endpoint) {
                targets.push_back(*spec.endpoint);
            } else {
                for (std::size_t i = 0; i < endpoints.size(); ++i) targets.push_back(i);
            }
            for (std::size_t ep : targets) {
                const std::size_t fi = flows.size();
                flows.push_back({spec.name, spec.direction, ep, spec.pcp});
                RngStream rng = kernel.rng("traffic." + spec.name + "." + std::to_string(ep));
                for (SimTime t : generate(spec, rng)) {
                    kernel.schedule(t, spec.direction == FlowDirection::Downlink ? "device_a" : "device_b",
                                    [this, fi, t, bytes = spec.payload_bytes] { send_packet(fi, t, bytes); });
                }
            }
        }
    }

    void send_packet(std::size_t fi, SimTime t, std::size_t payload_bytes)
    {
        const FlowInstance& flow = flows[fi];
        const Endpoint& ep = endpoints[flow.endpoint];
        const std::uint64_t lineage = tracker.issue(fi, flow.endpoint, t, flow.pcp);
        CoreDatagram d;
        d.protocol = TransportProtocol::Udp;
        d.udp_src_port = kDataPort;
        d.udp_dst_port = kDataPort;
        d.payload = make_payload(lineage, payload_bytes);
        EthernetFrame frame;
        frame.vlan = VlanTag{flow.pcp, false, 100};
        frame.ethertype = kEthertypeIpv4;
        if (flow.direction == FlowDirection::Downlink) {
            d.src_addr = device_a_addr;
            d.dst_addr = ep.address;
            frame.dst = ep.device_mac;
            frame.src = device_a_mac;
            frame.payload = encode_datagram(d);
            send_from_a(std::move(frame), lineage);
        } else {
            d.src_addr = ep.address;
            d.dst_addr = device_a_addr;
            frame.dst = device_a_mac;
            frame.src = ep.device_mac;
            frame.payload = encode_datagram(d);
            send_from_b(flow.endpoint, std::move(frame), lineage);
        }
    }

    // -- report ------------------------------------------------------------------

    RunReport run()
    {
        RunReport r;
        r.scenario = cfg.name;
        r.seed = cfg.seed;
        r.config = to_json(cfg);
        r.bmca = validate_hierarchy(cfg.hierarchy);
        r.summary = kernel.run_until(cfg.horizon);
        check(r.summary.final_time == cfg.horizon, "run did not end at the horizon");
        check(nw_tt->conserved(), "NW-TT frame conservation");

        std::vector<std::vector<PacketLineage>> per_flow(flows.size());
        for (const auto& p : tracker.all()) per_flow[p.flow].push_back(p);
        for (std::size_t fi = 0; fi < flows.size(); ++fi) {
            FlowReport fr;
            fr.name = flows[fi].name;
            fr.direction = flows[fi].direction;
            fr.endpoint = flows[fi].endpoint;
            fr.pcp = flows[fi].pcp;
            fr.metrics = compute_metrics(per_flow[fi], cfg.warmup);
            check(fr.metrics.conserved(), "flow conservation");
            check(fr.metrics.pcp_mismatches == 0, "PCP changed between source and sink");
            r.flows.push_back(std::move(fr));
        }
        std::vector<std::string> names;
        for (const auto& f : flows) {
            if (std::find(names.begin(), names.end(), f.name) == names.end()) names.push_back(f.name);
        }
        for (const auto& name : names) {
            std::vector<PacketLineage> merged;
            FlowReport total;
            total.name = name;
            for (std::size_t fi = 0; fi < flows.size(); ++fi) {
                if (flows[fi].name != name) continue;
                total.direction = flows[fi].direction;
                total.pcp = flows[fi].pcp;
                merged.insert(merged.end(), per_flow[fi].begin(), per_flow[fi].end());
            }
            total.metrics = compute_metrics(merged, cfg.warmup);
            r.flow_totals.push_back(std::move(total));
        }

        std::vector<ResidenceRecord> all;
        for (std::size_t i = 0; i < endpoints.size(); ++i) {
            const Endpoint& ep = endpoints[i];
            EndpointReport er;
            er.index = i;
            er.ue = ep.ue;
            er.ue_id = ep.ue_id;
            er.address = format_ipv4(ep.address);
            er.ds_tt = ep.ds_tt->counters();
            const auto& log = ep.ds_tt->residence_log();
            check(er.ds_tt.gptp_forwarded == log.size(), "DS-TT gPTP counter differs from residence log length");
            er.residence = residence_stats(log);
            std::vector<ResidenceRecord> sync;
            std::vector<ResidenceRecord> fu;
            for (const auto& rec : log) {
                check(rec.correction_out - rec.correction_in == to_correction_units(rec.residence),
                      "correction delta differs from residence");
                (rec.message_type == GptpMessageType::Sync ? sync : fu).push_back(rec);
                all.push_back(rec);
            }
            er.residence_sync = residence_stats(sync);
            er.residence_follow_up = residence_stats(fu);
            er.af = af.endpoint_stats(i);
            if (er.residence) {
                check(er.af.min_ns() == er.residence->min_ns && er.af.max_ns() == er.residence->max_ns &&
                          er.af.sum_ns() == er.residence->sum_ns && er.af.count() == er.residence->count,
                      "incremental AF stats differ from batch recomputation");
            }
            er.sync_samples = ep.slave->samples().size();
            er.orphan_follow_ups = ep.slave->orphan_follow_ups();
            er.correction_checks = ep.correction_checks;
            er.correction_mismatches = ep.correction_mismatches;
            for (const auto& s : ep.slave->samples()) {
                er.implied_residual_min_ns = std::min(er.implied_residual_min_ns.value_or(s.implied_residual_ns),
                                                      s.implied_residual_ns);
                er.implied_residual_max_ns = std::max(er.implied_residual_max_ns.value_or(s.implied_residual_ns),
                                                      s.implied_residual_ns);
            }
            r.gptp_forwarded_total += er.ds_tt.gptp_forwarded;
            r.drops["ds_tt" + std::to_string(i)] = er.ds_tt.dropped_malformed;
            r.endpoints.push_back(std::move(er));
        }
        r.residence_all = residence_stats(all);
        r.gptp_pairs_emitted = gptp_pairs;
        r.af_aggregate = af.aggregate();
        r.reservations = af.reservations();
        r.violation_mode = af.mode();
        r.violations = af.violations();
        r.nw_tt = nw_tt->counters();
        r.upf = upf->counters();
        r.gnb = gnb->counters();
        r.dl_scheduler = gnb->downlink().stats();
        r.ul_scheduler = gnb->uplink().stats();
        r.drops["nw_tt"] = r.nw_tt.dropped_malformed + r.nw_tt.routing_errors + r.nw_tt.gptp_egress_rejected;
        r.drops["upf"] = r.upf.classified_drops + r.upf.uplink_drops;
        r.drops["gnb"] = r.gnb.dropped;
        const auto& diag = kernel.diagnostics();
        r.diagnostics_count = diag.count();
        for (std::size_t k = 0; k < diag.entries().size() && k < 50; ++k) {
            const auto& e = diag.entries()[k];
            r.diagnostics.push_back(std::to_string(e.time.ns()) + " " + e.component + ": " + e.message);
        }
        r.invariant_checks = invariant_checks;
        return r;
    }
};

Simulation::Simulation(const ScenarioConfig& config, RunOptions options)
    : impl_{std::make_unique<Impl>(config, options)}
{
}

Simulation::~Simulation() = default;

RunReport Simulation::run()
{
    return impl_->run();
}

const NodeRegistry& Simulation::registry() const
{
    return impl_->registry;
}

const std::vector<EndpointBinding>& Simulation::bindings() const
{
    return impl_->bindings;
}

const DsTt& Simulation::ds_tt(std::size_t endpoint) const
{
    return *impl_->endpoints.at(endpoint).ds_tt;
}

const LineageTracker& Simulation::lineage() const
{
    return impl_->tracker;
}

const std::vector<WiredLink>& Simulation::links() const
{
    return impl_->links;
}

void Simulation::write_lineage_csv(std::ostream& out) const
{
    static constexpr const char* kFate[] = {"in_flight", "delivered", "attach_loss", "dropped"};
    out << "lineage_id,flow,endpoint,pcp_src,sent_ns,fate,delivered_ns,pcp_sink\n";
    for (const auto& p : impl_->tracker.all()) {
        out << p.lineage_id << ',' << impl_->flows[p.flow].name << ',' << p.endpoint << ',' << p.pcp_at_source.value()
            << ',' << p.sent_time.ns() << ',' << kFate[static_cast<int>(p.fate)] << ',';
        if (p.delivered_time) out << p.delivered_time->ns();
        out << ',';
        if (p.pcp_at_sink) out << p.pcp_at_sink->value();
        out << '\n';
    }
}

RunReport run_scenario(const ScenarioConfig& config, RunOptions options)
{
    Simulation sim{config, options};
    return sim.run();
}

}  // namespace tsn5g
