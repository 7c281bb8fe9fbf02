#include "tsn5g/core5g.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <ostream>
#include <stdexcept>

namespace tsn5g {

const char* to_string(SchedulerKind kind)
{
    switch (kind) {
    case SchedulerKind::MaxCi: return "maxci";
    case SchedulerKind::Pf: return "pf";
    case SchedulerKind::Rr: return "rr";
    }
    return "?";
}

const char* to_string(ChannelMode mode)
{
    return mode == ChannelMode::Ideal ? "ideal" : "fading";
}

Duration RanConfig::attach_for(UeId ue) const
{
    const auto it = attach_time_per_ue.find(ue);
    return it == attach_time_per_ue.end() ? attach_time : it->second;
}

void RanConfig::validate() const
{
    if (num_rbs <= 0) throw std::invalid_argument("num_rbs must be > 0");
    if (slot_duration.count() <= 0) throw std::invalid_argument("slot_duration must be > 0");
    if (bytes_per_rb_per_slot <= 0) throw std::invalid_argument("bytes_per_rb_per_slot must be > 0");
    if (slot_offset.count() < 0 || slot_offset >= slot_duration) {
        throw std::invalid_argument("slot_offset must lie in [0, slot_duration)");
    }
    if (pipeline_delay.count() < 0) throw std::invalid_argument("pipeline_delay must be >= 0");
    if (attach_time.count() < 0) throw std::invalid_argument("attach_time must be >= 0");
    if (!(pf_smoothing > 0.0 && pf_smoothing <= 1.0)) throw std::invalid_argument("pf_smoothing must be in (0, 1]");
}

void ChannelModel::validate() const
{
    if (!(harq_bler >= 0.0 && harq_bler < 1.0)) throw std::invalid_argument("harq_bler must be in [0, 1)");
    if (mcs_sigma < 0.0) throw std::invalid_argument("mcs_sigma must be >= 0");
    if (!(mcs_min > 0.0 && mcs_min <= 1.0 && mcs_max >= 1.0)) {
        throw std::invalid_argument("mcs bounds must satisfy 0 < mcs_min <= 1 <= mcs_max");
    }
    if (harq_rtt_slots < 1) throw std::invalid_argument("harq_rtt_slots must be >= 1");
    if (max_retx < 0) throw std::invalid_argument("max_retx must be >= 0");
}

TransmissionOutcome channel_apply(const ChannelModel& model, const Grant&, RngStream& harq_rng, int prior_failures)
{
    if (model.mode == ChannelMode::Ideal) return {};
    // The draw is taken even for forced deliveries so the stream position does
    // not depend on the retransmission history.
    const bool failed = harq_rng.bernoulli(model.harq_bler);
    if (!failed || prior_failures >= model.max_retx) return {};
    return {false, model.harq_rtt_slots};
}

double draw_mcs_efficiency(const ChannelModel& model, RngStream& mcs_rng)
{
    if (model.mode == ChannelMode::Ideal) return 1.0;
    const double z = std::clamp(mcs_rng.standard_normal(), -3.0, 3.0);
    return std::clamp(std::exp(model.mcs_sigma * z), model.mcs_min, model.mcs_max);
}

MacScheduler::MacScheduler(RanConfig ran, ChannelModel channel, std::uint64_t seed, std::string name)
    : ran_{std::move(ran)}, channel_{channel}, seed_{seed}, name_{std::move(name)}
{
    ran_.validate();
    channel_.validate();
}

MacScheduler::UeChannel& MacScheduler::channel_for(UeId ue)
{
    auto it = ues_.find(ue);
    if (it == ues_.end()) {
        const std::string base = "ran." + name_ + ".ue" + std::to_string(ue);
        it = ues_.emplace(ue, UeChannel{RngStream{seed_, base + ".mcs"}, RngStream{seed_, base + ".harq"}, 1.0,
                                        ran_.bytes_per_rb_per_slot})
                 .first;
    }
    return it->second;
}

void MacScheduler::enqueue(UeId ue, DrbId drb, int priority, TransportJob job)
{
    if (job.payload_bytes == 0) throw std::invalid_argument("transport job with zero bytes");
    channel_for(ue);
    auto [it, inserted] = queues_.try_emplace({ue, drb});
    Queue& q = it->second;
    if (inserted) {
        q.ue = ue;
        q.drb = drb;
    }
    q.priority = priority;
    q.queued_bytes += job.payload_bytes;
    q.jobs.emplace_back(next_seq_++, std::move(job));
}

std::size_t MacScheduler::queued_jobs() const
{
    std::size_t n = 0;
    for (const auto& [key, q] : queues_) n += q.jobs.size();
    return n;
}

std::size_t MacScheduler::queued_jobs(UeId ue, DrbId drb) const
{
    const auto it = queues_.find({ue, drb});
    return it == queues_.end() ? 0 : it->second.jobs.size();
}

std::vector<MacScheduler::Queue*> MacScheduler::order(std::vector<Queue*> eligible)
{
    switch (ran_.scheduler) {
    case SchedulerKind::MaxCi:
        std::stable_sort(eligible.begin(), eligible.end(), [this](const Queue* a, const Queue* b) {
            if (a->priority != b->priority) return a->priority > b->priority;
            const double qa = ues_.at(a->ue).quality;
            const double qb = ues_.at(b->ue).quality;
            if (qa != qb) return qa > qb;
            return std::pair{a->ue, a->drb} < std::pair{b->ue, b->drb};
        });
        break;
    case SchedulerKind::Pf:
        std::stable_sort(eligible.begin(), eligible.end(), [this](const Queue* a, const Queue* b) {
            const double ma = ues_.at(a->ue).bytes_per_rb / a->avg_rate;
            const double mb = ues_.at(b->ue).bytes_per_rb / b->avg_rate;
            if (ma != mb) return ma > mb;
            return std::pair{a->ue, a->drb} < std::pair{b->ue, b->drb};
        });
        break;
    case SchedulerKind::Rr: {
        // eligible is already in key order; rotate so the cursor's queue comes first
        if (rr_next_) {
            const auto pivot = std::find_if(eligible.begin(), eligible.end(), [this](const Queue* q) {
                return std::pair{q->ue, q->drb} >= *rr_next_;
            });
            std::rotate(eligible.begin(), pivot, eligible.end());
        }
        break;
    }
    }
    return eligible;
}

void MacScheduler::credit(Queue& q, std::size_t bytes, SimTime completion, Grant& grant, SlotResult& result)
{
    while (bytes > 0 && !q.jobs.empty()) {
        auto& [seq, job] = q.jobs.front();
        const std::size_t need = job.payload_bytes - q.head_served;
        if (bytes < need) {
            q.head_served += bytes;
            q.queued_bytes -= bytes;
            return;
        }
        bytes -= need;
        q.queued_bytes -= need;
        q.head_served = 0;
        require_invariant(!q.any_completed || seq > q.last_completed_seq, "per-queue FIFO order violated");
        q.last_completed_seq = seq;
        q.any_completed = true;
        grant.jobs_served.push_back(job.lineage_id);
        result.completed.push_back({q.ue, q.drb, std::move(job), completion});
        q.jobs.pop_front();
        ++stats_.jobs_completed;
    }
}

SlotResult MacScheduler::schedule_slot(SimTime slot_start)
{
    SlotResult result;
    const std::uint64_t slot_index = stats_.slots++;
    const SimTime completion = slot_start + ran_.slot_duration + ran_.pipeline_delay;

    // Channel state is drawn for every known UE each slot so draw positions depend
    // only on the slot count, not on traffic.
    for (auto& [ue, ch] : ues_) {
        ch.quality = draw_mcs_efficiency(channel_, ch.mcs);
        ch.bytes_per_rb = std::max(1, static_cast<int>(std::floor(ran_.bytes_per_rb_per_slot * ch.quality)));
    }

    std::vector<Queue*> eligible;
    for (auto& [key, q] : queues_) {
        if (!q.jobs.empty() && q.blocked_until_slot <= slot_index) eligible.push_back(&q);
    }

    int remaining = ran_.num_rbs;
    bool all_satisfied = true;
    std::vector<std::pair<Queue*, std::size_t>> served;
    std::optional<std::pair<UeId, DrbId>> last_granted;
    for (Queue* q : order(std::move(eligible))) {
        if (remaining == 0) {
            all_satisfied = false;
            break;
        }
        UeChannel& ch = ues_.at(q->ue);
        const auto bpr = static_cast<std::size_t>(ch.bytes_per_rb);
        const int demand = static_cast<int>((q->queued_bytes + bpr - 1) / bpr);
        const int rbs = std::min(demand, remaining);
        if (rbs < demand) all_satisfied = false;
        remaining -= rbs;

        Grant grant;
        grant.ue = q->ue;
        grant.drb = q->drb;
        grant.rbs = rbs;
        grant.bytes = static_cast<std::size_t>(rbs) * bpr;
        ++stats_.transmissions;
        const TransmissionOutcome outcome = channel_apply(channel_, grant, ch.harq, q->harq_failures);
        if (outcome.success) {
            if (q->harq_failures >= channel_.max_retx && channel_.mode == ChannelMode::Fading &&
                q->harq_failures > 0) {
                ++stats_.forced_deliveries;
            }
            q->harq_failures = 0;
            credit(*q, grant.bytes, completion, grant, result);
            served.emplace_back(q, grant.bytes);
        } else {
            grant.harq_failed = true;
            ++q->harq_failures;
            ++stats_.harq_failures;
            q->blocked_until_slot = slot_index + static_cast<std::uint64_t>(outcome.retransmit_after_slots);
        }
        last_granted = std::pair{q->ue, q->drb};
        result.grants.push_back(std::move(grant));
    }
    result.rbs_used = ran_.num_rbs - remaining;

    // Work conservation over queues eligible this slot: RBs may only be left
    // idle when every eligible queue got its full demand.
    require_invariant(remaining == 0 || all_satisfied, "work conservation violated: idle RBs with backlog");
    ++stats_.slots_audited;

    if (ran_.scheduler == SchedulerKind::Pf) {
        for (auto& [key, q] : queues_) {
            std::size_t bytes = 0;
            for (const auto& [sq, b] : served) {
                if (sq == &q) bytes = b;
            }
            q.avg_rate = (1.0 - ran_.pf_smoothing) * q.avg_rate + ran_.pf_smoothing * static_cast<double>(bytes);
            q.avg_rate = std::max(q.avg_rate, 1e-9);
        }
    }
    if (ran_.scheduler == SchedulerKind::Rr && last_granted) {
        auto next = queues_.upper_bound(*last_granted);
        if (next == queues_.end()) next = queues_.begin();
        rr_next_ = next->first;
    }
    return result;
}

DrbId sdap_enqueue(MacScheduler& scheduler, const DrbConfig& config, const GtpuHeader& header, UeId ue,
                   TransportJob job)
{
    const DrbEntry& entry = resolve_drb_entry(config, header.qfi);
    scheduler.enqueue(ue, entry.drb, entry.priority, std::move(job));
    return entry.drb;
}

Upf::Upf(const QosProfile& profile, std::vector<EndpointBinding> bindings, Diagnostics* diagnostics)
    : profile_{&profile}, diagnostics_{diagnostics}
{
    for (const auto& b : bindings) routes_[b.downstream_addr] = b.ue_id;
}

std::optional<std::pair<GtpuHeader, CoreDatagram>> Upf::classify_and_tunnel(const CoreDatagram& datagram, SimTime now)
{
    const auto it = routes_.find(datagram.dst_addr);
    if (it == routes_.end()) {
        ++counters_.classified_drops;
        if (diagnostics_ != nullptr) {
            diagnostics_->report(now, "upf", "no tunnel for destination " + format_ipv4(datagram.dst_addr));
        }
        return std::nullopt;
    }
    ++counters_.classified;
    GtpuHeader header{teid_for_ue(it->second), map_dscp_to_qfi(*profile_, datagram.dscp), PduDirection::Downlink};
    return std::pair{header, datagram};
}

std::optional<CoreDatagram> Upf::decapsulate_uplink(ByteView gtpu, SimTime now)
{
    try {
        const GtpuPacket packet = decode_gtpu(gtpu);
        CoreDatagram d = decode_datagram(packet.payload);
        ++counters_.uplink_decapsulated;
        return d;
    } catch (const CodecError& e) {
        ++counters_.uplink_drops;
        if (diagnostics_ != nullptr) diagnostics_->report(now, "upf", std::string{"bad uplink tunnel packet: "} + e.what());
        return std::nullopt;
    }
}

Gnb::Gnb(Kernel& kernel, RanConfig ran, ChannelModel channel, const QosProfile& profile,
         std::map<UeId, DrbConfig> drb_configs, std::optional<DrbId> gptp_drb_override)
    : kernel_{&kernel},
      ran_{ran},
      profile_{&profile},
      drb_configs_{std::move(drb_configs)},
      gptp_drb_override_{gptp_drb_override},
      dl_{ran, channel, kernel.seed(), "dl"},
      ul_{ran, channel, kernel.seed(), "ul"}
{
    for (const auto& [ue, cfg] : drb_configs_) {
        dl_.add_ue(ue);
        ul_.add_ue(ue);
        const auto report = validate_drb_config(cfg);
        if (!report.valid()) {
            throw std::invalid_argument("invalid DRB config for UE " + std::to_string(ue) + ": " +
                                        report.issues.front().describe());
        }
        if (gptp_drb_override_) {
            const bool found = std::any_of(cfg.entries.begin(), cfg.entries.end(),
                                           [&](const DrbEntry& e) { return e.drb == *gptp_drb_override_; });
            if (!found) {
                throw std::invalid_argument("gPTP DRB override " + std::to_string(*gptp_drb_override_) +
                                            " not configured for UE " + std::to_string(ue));
            }
        }
    }
}

std::pair<DrbId, int> Gnb::select_bearer(UeId ue, Qfi qfi, bool is_gptp) const
{
    const DrbConfig& cfg = drb_configs_.at(ue);
    if (is_gptp && gptp_drb_override_) {
        for (const auto& e : cfg.entries) {
            if (e.drb == *gptp_drb_override_) return {e.drb, e.priority};
        }
    }
    const DrbEntry& entry = resolve_drb_entry(cfg, qfi);
    return {entry.drb, entry.priority};
}

namespace {

bool is_tunnelled_gptp(const CoreDatagram& d)
{
    return d.protocol == TransportProtocol::Udp && d.udp_dst_port == kGptpTunnelPort;
}

}  // namespace

void Gnb::receive_downlink(ByteView gtpu, std::uint64_t lineage)
{
    const SimTime now = kernel_->now();
    GtpuPacket packet;
    CoreDatagram inner;
    try {
        packet = decode_gtpu(gtpu);
        inner = decode_datagram(packet.payload);
    } catch (const CodecError& e) {
        ++counters_.dropped;
        kernel_->diagnostics().report(now, "gnb", std::string{"bad downlink tunnel packet: "} + e.what());
        if (drop_hook_) drop_hook_(lineage, 0);
        return;
    }
    const UeId ue = packet.header.teid - teid_for_ue(0);
    if (packet.header.teid < teid_for_ue(0) || !drb_configs_.contains(ue)) {
        ++counters_.dropped;
        kernel_->diagnostics().report(now, "gnb", "unknown TEID " + std::to_string(packet.header.teid));
        if (drop_hook_) drop_hook_(lineage, 0);
        return;
    }
    if (now < SimTime::from(ran_.attach_for(ue))) {
        ++counters_.radio_attach_loss;
        if (loss_hook_) loss_hook_(lineage, ue);
        return;
    }
    const auto [drb, priority] = select_bearer(ue, packet.header.qfi, is_tunnelled_gptp(inner));
    TransportJob job;
    job.payload_bytes = packet.payload.size();
    job.enqueue_time = now;
    job.lineage_id = lineage;
    job.payload = std::move(packet.payload);
    dl_.enqueue(ue, drb, priority, std::move(job));
    ++counters_.dl_enqueued;
}

void Gnb::receive_uplink(UeId ue, const CoreDatagram& datagram, std::uint64_t lineage)
{
    const SimTime now = kernel_->now();
    if (!drb_configs_.contains(ue)) {
        ++counters_.dropped;
        kernel_->diagnostics().report(now, "gnb", "uplink from unknown UE " + std::to_string(ue));
        if (drop_hook_) drop_hook_(lineage, ue);
        return;
    }
    if (now < SimTime::from(ran_.attach_for(ue))) {
        ++counters_.radio_attach_loss;
        if (loss_hook_) loss_hook_(lineage, ue);
        return;
    }
    const Qfi qfi = map_dscp_to_qfi(*profile_, datagram.dscp);
    const auto [drb, priority] = select_bearer(ue, qfi, is_tunnelled_gptp(datagram));
    TransportJob job;
    job.payload = encode_datagram(datagram);
    job.payload_bytes = job.payload.size();
    job.enqueue_time = now;
    job.lineage_id = lineage;
    ul_.enqueue(ue, drb, priority, std::move(job));
    ++counters_.ul_enqueued;
}

void Gnb::start(SimTime horizon)
{
    const SimTime first = SimTime::from(ran_.slot_offset);
    if (first > horizon) return;
    kernel_->schedule(first, "gnb", [this, first, horizon] { slot_tick(first, horizon); });
}

void Gnb::slot_tick(SimTime slot_start, SimTime horizon)
{
    SlotResult dl = dl_.schedule_slot(slot_start);
    SlotResult ul = ul_.schedule_slot(slot_start);
    if (trace_ != nullptr) {
        trace("dl", slot_start, dl);
        trace("ul", slot_start, ul);
    }
    for (auto& done : dl.completed) {
        auto shared = std::make_shared<CompletedJob>(std::move(done));
        kernel_->schedule(shared->completion, "ue", [this, shared] {
            CoreDatagram d = decode_datagram(shared->job.payload);
            ++counters_.dl_delivered;
            if (downlink_sink_) downlink_sink_(shared->ue, d, shared->job.lineage_id);
        });
    }
    for (auto& done : ul.completed) {
        auto shared = std::make_shared<CompletedJob>(std::move(done));
        kernel_->schedule(shared->completion, "gnb", [this, shared] {
            const CoreDatagram d = decode_datagram(shared->job.payload);
            const GtpuHeader header{teid_for_ue(shared->ue), map_dscp_to_qfi(*profile_, d.dscp), PduDirection::Uplink};
            ++counters_.ul_delivered;
            if (uplink_sink_) uplink_sink_(encode_gtpu(header, shared->job.payload), shared->job.lineage_id);
        });
    }
    const SimTime next = slot_start + ran_.slot_duration;
    if (next <= horizon) kernel_->schedule(next, "gnb", [this, next, horizon] { slot_tick(next, horizon); });
}

void Gnb::trace(const char* dir, SimTime slot, const SlotResult& result)
{
    for (const auto& g : result.grants) {
        *trace_ << slot.ns() << ',' << dir << ',' << g.ue << ',' << static_cast<int>(g.drb) << ',' << g.rbs << ','
                << g.bytes << ',' << (g.harq_failed ? 1 : 0) << ',' << g.jobs_served.size() << '\n';
    }
}

}  // namespace tsn5g
