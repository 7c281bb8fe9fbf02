#pragma once

// PCP -> DSCP -> QFI -> DRB mapping tables and the reverse DSCP -> PCP map.
// All lookups are total: anything unmapped falls back to best effort (0).

#include "tsn5g/frames.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace tsn5g {

using UeId = std::uint32_t;
using DrbId = std::uint8_t;

inline constexpr UeId kFirstNrNodeId = 2049;
inline constexpr UeId kFirstLteNodeId = 1025;

class QosProfile {
public:
    /// Identity PCP <-> DSCP on 0..7, DSCP d -> QFI d for d in 0..7.
    QosProfile();

    void set_pcp_to_dscp(Pcp pcp, Dscp dscp) { pcp_to_dscp_[idx(pcp)] = dscp; }
    void set_dscp_to_qfi(Dscp dscp, Qfi qfi) { dscp_to_qfi_[idx(dscp)] = qfi; }
    void set_dscp_to_pcp(Dscp dscp, Pcp pcp) { dscp_to_pcp_[idx(dscp)] = pcp; }
    void clear_dscp_to_qfi() { dscp_to_qfi_.fill(std::nullopt); }
    void clear_dscp_to_pcp() { dscp_to_pcp_.fill(std::nullopt); }

    [[nodiscard]] Dscp pcp_to_dscp(Pcp pcp) const { return pcp_to_dscp_[idx(pcp)]; }
    [[nodiscard]] std::optional<Qfi> explicit_qfi(Dscp dscp) const { return dscp_to_qfi_[idx(dscp)]; }
    [[nodiscard]] std::optional<Pcp> explicit_pcp(Dscp dscp) const { return dscp_to_pcp_[idx(dscp)]; }

    /// PCPs whose round trip through the tables does not return the same PCP.
    [[nodiscard]] std::vector<Pcp> class_preservation_violations() const;

private:
    template <typename Code>
    static std::size_t idx(Code c) { return static_cast<std::size_t>(c.value()); }

    std::array<Dscp, 8> pcp_to_dscp_;
    std::array<std::optional<Qfi>, 64> dscp_to_qfi_;
    std::array<std::optional<Pcp>, 64> dscp_to_pcp_;
};

Dscp map_pcp_to_dscp(const QosProfile& profile, Pcp pcp);
Qfi map_dscp_to_qfi(const QosProfile& profile, Dscp dscp);
Pcp map_dscp_to_pcp(const QosProfile& profile, Dscp dscp);

struct DrbEntry {
    DrbId drb = 0;
    std::vector<Qfi> qfi_list;
    /// Scheduling priority used by MaxCi; higher is served first.
    int priority = 0;
    /// Explicit default marker; when no entry sets it, the entry carrying QFI 0 is the default.
    bool is_default = false;

    bool operator==(const DrbEntry&) const = default;
};

struct DrbConfig {
    UeId ue_id = 0;
    std::vector<DrbEntry> entries;

    bool operator==(const DrbConfig&) const = default;
};

struct DrbIssue {
    enum class Kind { DuplicateQfi, MissingDefault, MultipleDefaults, EmptyEntry, DuplicateDrb };
    Kind kind;
    std::optional<int> qfi;
    std::optional<int> drb;
    [[nodiscard]] std::string describe() const;
};

struct DrbValidationReport {
    std::vector<DrbIssue> issues;
    [[nodiscard]] bool valid() const { return issues.empty(); }
    [[nodiscard]] bool has(DrbIssue::Kind kind) const;
};

DrbValidationReport validate_drb_config(const DrbConfig& config);

/// The entry that catches unmapped QFIs, if the configuration designates one.
const DrbEntry* default_drb_entry(const DrbConfig& config);

/// Entry whose qfi_list contains `qfi`, else the default entry. Requires a valid config.
const DrbEntry& resolve_drb_entry(const DrbConfig& config, Qfi qfi);
DrbId map_qfi_to_drb(const DrbConfig& config, Qfi qfi);

/// Two bearers per UE: DRB 0 carries QFI 0 (best effort), DRB 1 carries QFI 6 at higher priority.
DrbConfig two_bearer_drb_config(UeId ue);

}  // namespace tsn5g
