#pragma once

// The validated network: Device A -> switch -> NW-TT -> UPF -> gNB -> UE_i/DS-TT_i -> Device B_i,
// wired FIFO links between the fixed nodes, and the run report.

#include "tsn5g/core5g.hpp"
#include "tsn5g/ds_tt.hpp"
#include "tsn5g/gptp.hpp"
#include "tsn5g/nw_tt.hpp"
#include "tsn5g/scenario.hpp"
#include "tsn5g/simkernel.hpp"
#include "tsn5g/traffic.hpp"
#include "tsn5g/tsn_af.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace tsn5g {

/// Point-to-point FIFO link. A packet starts serializing when the link is free.
class WiredLink {
public:
    WiredLink(std::string a, std::string b, Duration propagation, std::uint64_t rate_bps);

    /// arrival = max(depart, busy_until) + ceil(bits * 1e9 / rate) + propagation.
    SimTime transit(std::size_t packet_bytes, SimTime depart);

    [[nodiscard]] const std::string& a() const { return a_; }
    [[nodiscard]] const std::string& b() const { return b_; }
    [[nodiscard]] Duration propagation() const { return propagation_; }
    [[nodiscard]] std::uint64_t rate_bps() const { return rate_bps_; }
    [[nodiscard]] Duration serialization(std::size_t packet_bytes) const;
    [[nodiscard]] std::uint64_t packets() const { return packets_; }

private:
    std::string a_;
    std::string b_;
    Duration propagation_;
    std::uint64_t rate_bps_;
    SimTime busy_until_;
    std::uint64_t packets_ = 0;
};

SimTime wired_transit(WiredLink& link, std::size_t packet_bytes, SimTime depart);

struct FlowReport {
    std::string name;
    FlowDirection direction = FlowDirection::Downlink;
    std::size_t endpoint = 0;
    Pcp pcp{0};
    FlowMetrics metrics;
};

struct EndpointReport {
    std::size_t index = 0;
    std::string ue;
    UeId ue_id = 0;
    std::string address;
    DsTtCounters ds_tt;
    std::optional<ResidenceStats> residence;
    std::optional<ResidenceStats> residence_sync;
    std::optional<ResidenceStats> residence_follow_up;
    BridgeDelayStats af;
    std::uint64_t sync_samples = 0;
    std::uint64_t orphan_follow_ups = 0;
    std::uint64_t correction_checks = 0;
    std::uint64_t correction_mismatches = 0;
    std::optional<std::int64_t> implied_residual_min_ns;
    std::optional<std::int64_t> implied_residual_max_ns;
};

struct RunReport {
    std::string scenario;
    std::uint64_t seed = 0;
    nlohmann::json config;
    RunSummary summary;
    std::vector<FlowReport> flows;
    /// One entry per flow name over all of its endpoints (endpoint field unused).
    std::vector<FlowReport> flow_totals;
    std::vector<EndpointReport> endpoints;
    std::uint64_t gptp_pairs_emitted = 0;
    std::uint64_t gptp_forwarded_total = 0;
    std::optional<ResidenceStats> residence_all;
    BridgeDelayStats af_aggregate;
    std::vector<StreamReservation> reservations;
    ViolationMode violation_mode = ViolationMode::PerSample;
    std::vector<Violation> violations;
    HierarchyReport bmca;
    NwTtCounters nw_tt;
    UpfCounters upf;
    GnbCounters gnb;
    SchedulerStats dl_scheduler;
    SchedulerStats ul_scheduler;
    /// Component name -> packets dropped inside the bridge.
    std::map<std::string, std::uint64_t> drops;
    std::uint64_t diagnostics_count = 0;
    std::vector<std::string> diagnostics;
    std::uint64_t invariant_checks = 0;

    [[nodiscard]] std::uint64_t total_drops() const;
};

struct RunOptions {
    /// Per-slot grant rows (slot_ns,dir,ue,drb,rbs,bytes,harq_failed,jobs_completed).
    std::ostream* grant_trace = nullptr;
};

class Simulation {
public:
    /// Builds the component graph. Throws ConfigError / BindingError on an inconsistent config.
    explicit Simulation(const ScenarioConfig& config, RunOptions options = {});
    ~Simulation();
    Simulation(const Simulation&) = delete;
    Simulation& operator=(const Simulation&) = delete;

    /// Runs to the horizon and collects the report; InvariantViolation propagates.
    RunReport run();

    [[nodiscard]] const NodeRegistry& registry() const;
    [[nodiscard]] const std::vector<EndpointBinding>& bindings() const;
    [[nodiscard]] const DsTt& ds_tt(std::size_t endpoint) const;
    [[nodiscard]] const LineageTracker& lineage() const;
    [[nodiscard]] const std::vector<WiredLink>& links() const;

    /// Per-packet rows: lineage_id,flow,endpoint,pcp_src,sent_ns,fate,delivered_ns,pcp_sink
    void write_lineage_csv(std::ostream& out) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Convenience: build + run.
RunReport run_scenario(const ScenarioConfig& config, RunOptions options = {});

}  // namespace tsn5g
