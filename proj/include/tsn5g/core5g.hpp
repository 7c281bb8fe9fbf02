#pragma once

// Modelled 5G user plane: UPF traffic-flow filter and GTP-U tunnels, gNB SDAP
// bearer selection, a slotted per-DRB MAC scheduler and an ideal/fading
// channel abstraction.
//
// Timing model: slot boundaries sit at slot_offset + n * slot_duration. A job
// enqueued before a boundary competes in that slot; once its bytes are covered
// the job completes at slot_end + pipeline_delay and is handed to the UE side.

#include "tsn5g/frames.hpp"
#include "tsn5g/nw_tt.hpp"
#include "tsn5g/qos.hpp"
#include "tsn5g/simkernel.hpp"

#include <cstdint>
#include <deque>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace tsn5g {

enum class SchedulerKind { MaxCi, Pf, Rr };
enum class ChannelMode { Ideal, Fading };

const char* to_string(SchedulerKind kind);
const char* to_string(ChannelMode mode);

struct RanConfig {
    int num_rbs = 25;
    Duration slot_duration{500'000};
    /// Phase of the slot grid relative to the TSN time base.
    Duration slot_offset{25'000};
    int bytes_per_rb_per_slot = 64;
    SchedulerKind scheduler = SchedulerKind::MaxCi;
    Duration pipeline_delay{1'977'000};
    Duration attach_time{8'000'000};
    std::map<UeId, Duration> attach_time_per_ue;
    double pf_smoothing = 0.01;

    [[nodiscard]] Duration attach_for(UeId ue) const;
    /// Throws std::invalid_argument on non-positive sizes or durations.
    void validate() const;
};

struct ChannelModel {
    ChannelMode mode = ChannelMode::Ideal;
    /// Log-normal MCS efficiency multiplier: median 1, shape sigma, clamped to [mcs_min, mcs_max].
    double mcs_sigma = 0.3;
    double mcs_min = 0.1;
    double mcs_max = 2.0;
    double harq_bler = 0.1;
    int harq_rtt_slots = 2;
    int max_retx = 3;

    void validate() const;
};

struct TransportJob {
    std::size_t payload_bytes = 0;
    SimTime enqueue_time;
    std::uint64_t lineage_id = 0;
    Bytes payload;
};

struct Grant {
    UeId ue = 0;
    DrbId drb = 0;
    int rbs = 0;
    std::size_t bytes = 0;
    bool harq_failed = false;
    std::vector<std::uint64_t> jobs_served;
};

struct TransmissionOutcome {
    bool success = true;
    int retransmit_after_slots = 0;
};

/// One transport-block attempt. Ideal never fails; Fading fails with probability
/// harq_bler unless the block already failed max_retx times.
TransmissionOutcome channel_apply(const ChannelModel& model, const Grant& grant, RngStream& harq_rng,
                                  int prior_failures = 0);

/// Per-slot multiplier on bytes_per_rb. Always 1 in Ideal mode (no draw consumed).
double draw_mcs_efficiency(const ChannelModel& model, RngStream& mcs_rng);

struct CompletedJob {
    UeId ue = 0;
    DrbId drb = 0;
    TransportJob job;
    SimTime completion;
};

struct SlotResult {
    std::vector<Grant> grants;
    std::vector<CompletedJob> completed;
    int rbs_used = 0;
};

struct SchedulerStats {
    std::uint64_t slots = 0;
    std::uint64_t slots_audited = 0;
    std::uint64_t transmissions = 0;
    std::uint64_t harq_failures = 0;
    std::uint64_t forced_deliveries = 0;
    std::uint64_t jobs_completed = 0;
};

class MacScheduler {
public:
    MacScheduler(RanConfig ran, ChannelModel channel, std::uint64_t seed, std::string name);

    /// Registers a UE so its channel draws start from the first slot.
    void add_ue(UeId ue) { channel_for(ue); }
    void enqueue(UeId ue, DrbId drb, int priority, TransportJob job);
    /// Runs one slot starting at `slot_start`. Asserts work conservation and per-queue FIFO.
    SlotResult schedule_slot(SimTime slot_start);

    [[nodiscard]] std::size_t queued_jobs() const;
    [[nodiscard]] std::size_t queued_jobs(UeId ue, DrbId drb) const;
    [[nodiscard]] const SchedulerStats& stats() const { return stats_; }
    [[nodiscard]] const std::string& name() const { return name_; }

private:
    struct Queue {
        UeId ue = 0;
        DrbId drb = 0;
        int priority = 0;
        std::deque<std::pair<std::uint64_t, TransportJob>> jobs;  // (enqueue sequence, job)
        std::size_t head_served = 0;
        std::size_t queued_bytes = 0;
        std::uint64_t blocked_until_slot = 0;
        int harq_failures = 0;
        double avg_rate = 1.0;
        std::uint64_t last_completed_seq = 0;
        bool any_completed = false;
    };
    struct UeChannel {
        RngStream mcs;
        RngStream harq;
        double quality = 1.0;
        int bytes_per_rb = 0;
    };

    UeChannel& channel_for(UeId ue);
    std::vector<Queue*> order(std::vector<Queue*> eligible);
    void credit(Queue& q, std::size_t bytes, SimTime completion, Grant& grant, SlotResult& result);

    RanConfig ran_;
    ChannelModel channel_;
    std::uint64_t seed_;
    std::string name_;
    std::map<std::pair<UeId, DrbId>, Queue> queues_;
    std::map<UeId, UeChannel> ues_;
    std::uint64_t next_seq_ = 1;
    std::optional<std::pair<UeId, DrbId>> rr_next_;
    SchedulerStats stats_;
};

inline std::uint32_t teid_for_ue(UeId ue) { return 0x00010000u + ue; }

struct UpfCounters {
    std::uint64_t classified = 0;
    std::uint64_t classified_drops = 0;
    std::uint64_t uplink_decapsulated = 0;
    std::uint64_t uplink_drops = 0;
};

class Upf {
public:
    Upf(const QosProfile& profile, std::vector<EndpointBinding> bindings, Diagnostics* diagnostics = nullptr);

    /// qfi = DSCP mapping, teid from the destination's binding. nullopt (counted) if unbound.
    std::optional<std::pair<GtpuHeader, CoreDatagram>> classify_and_tunnel(const CoreDatagram& datagram, SimTime now);
    std::optional<CoreDatagram> decapsulate_uplink(ByteView gtpu, SimTime now);

    [[nodiscard]] const UpfCounters& counters() const { return counters_; }

private:
    const QosProfile* profile_;
    std::map<std::uint32_t, UeId> routes_;
    Diagnostics* diagnostics_;
    UpfCounters counters_;
};

struct GnbCounters {
    std::uint64_t dl_enqueued = 0;
    std::uint64_t ul_enqueued = 0;
    std::uint64_t dl_delivered = 0;
    std::uint64_t ul_delivered = 0;
    std::uint64_t radio_attach_loss = 0;
    std::uint64_t dropped = 0;
};

/// gNB plus the UE-side radio endpoints: SDAP bearer selection, downlink and uplink
/// schedulers sharing the same discipline over separate RB pools.
class Gnb {
public:
    using DownlinkSink = std::function<void(UeId, const CoreDatagram&, std::uint64_t lineage)>;
    using UplinkSink = std::function<void(Bytes gtpu, std::uint64_t lineage)>;
    using LossHook = std::function<void(std::uint64_t lineage, UeId)>;

    Gnb(Kernel& kernel, RanConfig ran, ChannelModel channel, const QosProfile& profile,
        std::map<UeId, DrbConfig> drb_configs, std::optional<DrbId> gptp_drb_override = std::nullopt);

    void on_downlink_sink(DownlinkSink sink) { downlink_sink_ = std::move(sink); }
    void on_uplink_sink(UplinkSink sink) { uplink_sink_ = std::move(sink); }
    void on_attach_loss(LossHook hook) { loss_hook_ = std::move(hook); }
    void on_drop(LossHook hook) { drop_hook_ = std::move(hook); }
    void set_grant_trace(std::ostream* out) { trace_ = out; }

    /// N3 arrival: decode GTP-U, drop if the UE is not attached yet, else SDAP-enqueue.
    void receive_downlink(ByteView gtpu, std::uint64_t lineage);
    /// Uplink datagram handed to UE `ue` by its DS-TT.
    void receive_uplink(UeId ue, const CoreDatagram& datagram, std::uint64_t lineage);

    /// Schedules slot ticks from the first boundary up to `horizon`.
    void start(SimTime horizon);

    [[nodiscard]] const GnbCounters& counters() const { return counters_; }
    [[nodiscard]] const MacScheduler& downlink() const { return dl_; }
    [[nodiscard]] const MacScheduler& uplink() const { return ul_; }

private:
    void slot_tick(SimTime slot_start, SimTime horizon);
    void trace(const char* dir, SimTime slot, const SlotResult& result);
    std::pair<DrbId, int> select_bearer(UeId ue, Qfi qfi, bool is_gptp) const;

    Kernel* kernel_;
    RanConfig ran_;
    const QosProfile* profile_;
    std::map<UeId, DrbConfig> drb_configs_;
    std::optional<DrbId> gptp_drb_override_;
    MacScheduler dl_;
    MacScheduler ul_;
    GnbCounters counters_;
    DownlinkSink downlink_sink_;
    UplinkSink uplink_sink_;
    LossHook loss_hook_;
    LossHook drop_hook_;
    std::ostream* trace_ = nullptr;
};

/// SDAP: appends `job` to the queue of (ue, DRB selected by qfi). Returns the DRB used.
DrbId sdap_enqueue(MacScheduler& scheduler, const DrbConfig& config, const GtpuHeader& header, UeId ue,
                   TransportJob job);

}  // namespace tsn5g
