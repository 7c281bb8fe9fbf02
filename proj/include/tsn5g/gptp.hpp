#pragma once

// Two-step gPTP grandmaster schedule, endpoint slave recorders and the static
// clock hierarchy check that registers the 5G system as a transparent clock.

#include "tsn5g/frames.hpp"
#include "tsn5g/simkernel.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace tsn5g {

struct GptpEmission {
    SimTime time;
    GptpMessage sync;
    GptpMessage follow_up;
};

/// One (Sync, Follow_Up) pair at start + k * interval for every such time < horizon.
/// Throws std::invalid_argument when interval <= 0.
std::vector<GptpEmission> grandmaster_emit(Duration interval, SimTime start, SimTime horizon,
                                           std::uint8_t domain = 0);

struct SyncSample {
    std::size_t endpoint_id = 0;
    std::uint16_t sequence_id = 0;
    SimTime sync_rx_time;
    SimTime followup_rx_time;
    std::int64_t sync_correction = 0;
    /// Correction carried by the Follow_Up (2^-16 ns).
    std::int64_t correction_total = 0;
    SimTime origin_timestamp;
    /// sync_rx - origin - Sync correction: the part of the path not covered by the transparent clock.
    std::int64_t implied_residual_ns = 0;
};

class SlaveRecorder {
public:
    explicit SlaveRecorder(std::size_t endpoint_id) : endpoint_id_{endpoint_id} {}

    /// Pairs Sync and Follow_Up by sequence id. A Follow_Up with no pending Sync is an orphan.
    void record(const GptpMessage& msg, SimTime rx_time);

    [[nodiscard]] const std::vector<SyncSample>& samples() const { return samples_; }
    [[nodiscard]] std::uint64_t orphan_follow_ups() const { return orphans_; }
    [[nodiscard]] std::size_t pending_syncs() const { return pending_.size(); }
    [[nodiscard]] std::uint64_t syncs_received() const { return syncs_; }
    [[nodiscard]] std::uint64_t follow_ups_received() const { return follow_ups_; }

private:
    struct Pending {
        SimTime rx;
        std::int64_t correction;
    };
    std::size_t endpoint_id_;
    std::map<std::uint16_t, Pending> pending_;
    std::vector<SyncSample> samples_;
    std::uint64_t orphans_ = 0;
    std::uint64_t syncs_ = 0;
    std::uint64_t follow_ups_ = 0;
};

enum class ClockRole { Unassigned, GrandMaster, Bridge, Slave, TransparentClock };

const char* to_string(ClockRole role);
/// Accepts the lowercase names produced by to_string; throws std::invalid_argument otherwise.
ClockRole clock_role_from_string(const std::string& name);

struct ClockNode {
    std::string name;
    ClockRole role = ClockRole::Unassigned;
};

struct ClockHierarchy {
    std::vector<ClockNode> nodes;
    /// parent -> child sync paths
    std::vector<std::pair<std::string, std::string>> edges;
};

struct HierarchyError {
    enum class Kind { DuplicateGrandmaster, NoGrandmaster, MissingRole, Unreachable, UnknownNode, DuplicateNode };
    Kind kind;
    std::string node;

    [[nodiscard]] std::string describe() const;
};

struct HierarchyReport {
    std::vector<HierarchyError> errors;
    std::vector<std::string> registered_transparent_clocks;

    [[nodiscard]] bool valid() const { return errors.empty(); }
    [[nodiscard]] std::size_t count(HierarchyError::Kind kind) const;
};

HierarchyReport validate_hierarchy(const ClockHierarchy& hierarchy);

/// Device A (grandmaster) -> switch (bridge) -> 5G system (transparent clock) -> one slave per endpoint.
ClockHierarchy default_hierarchy(std::size_t endpoints);

}  // namespace tsn5g
