#include "tsn5g/qos.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace tsn5g {

QosProfile::QosProfile()
{
    for (int v = 0; v < 8; ++v) {
        pcp_to_dscp_[static_cast<std::size_t>(v)] = Dscp{v};
        dscp_to_qfi_[static_cast<std::size_t>(v)] = Qfi{v};
        dscp_to_pcp_[static_cast<std::size_t>(v)] = Pcp{v};
    }
}

std::vector<Pcp> QosProfile::class_preservation_violations() const
{
    std::vector<Pcp> bad;
    for (int v = 0; v < 8; ++v) {
        const Pcp pcp{v};
        if (map_dscp_to_pcp(*this, map_pcp_to_dscp(*this, pcp)) != pcp) bad.push_back(pcp);
    }
    return bad;
}

Dscp map_pcp_to_dscp(const QosProfile& profile, Pcp pcp)
{
    return profile.pcp_to_dscp(pcp);
}

Qfi map_dscp_to_qfi(const QosProfile& profile, Dscp dscp)
{
    return profile.explicit_qfi(dscp).value_or(Qfi{0});
}

Pcp map_dscp_to_pcp(const QosProfile& profile, Dscp dscp)
{
    return profile.explicit_pcp(dscp).value_or(Pcp{0});
}

std::string DrbIssue::describe() const
{
    switch (kind) {
    case Kind::DuplicateQfi: return "QFI " + std::to_string(qfi.value_or(-1)) + " mapped by more than one DRB";
    case Kind::MissingDefault: return "no default DRB (mark one entry default or map QFI 0)";
    case Kind::MultipleDefaults: return "more than one DRB marked default";
    case Kind::EmptyEntry: return "DRB " + std::to_string(drb.value_or(-1)) + " has an empty qfi list";
    case Kind::DuplicateDrb: return "DRB " + std::to_string(drb.value_or(-1)) + " listed twice";
    }
    return "unknown issue";
}

bool DrbValidationReport::has(DrbIssue::Kind kind) const
{
    return std::any_of(issues.begin(), issues.end(), [kind](const DrbIssue& i) { return i.kind == kind; });
}

DrbValidationReport validate_drb_config(const DrbConfig& config)
{
    DrbValidationReport report;
    std::map<int, int> qfi_owner;
    std::map<int, int> drb_seen;
    int explicit_defaults = 0;
    for (const auto& entry : config.entries) {
        if (++drb_seen[entry.drb] == 2) report.issues.push_back({DrbIssue::Kind::DuplicateDrb, std::nullopt, entry.drb});
        if (entry.qfi_list.empty()) report.issues.push_back({DrbIssue::Kind::EmptyEntry, std::nullopt, entry.drb});
        if (entry.is_default) ++explicit_defaults;
        for (auto qfi : entry.qfi_list) {
            if (++qfi_owner[qfi.value()] == 2) report.issues.push_back({DrbIssue::Kind::DuplicateQfi, qfi.value(), entry.drb});
        }
    }
    if (explicit_defaults > 1) report.issues.push_back({DrbIssue::Kind::MultipleDefaults, std::nullopt, std::nullopt});
    if (explicit_defaults == 0 && default_drb_entry(config) == nullptr) {
        report.issues.push_back({DrbIssue::Kind::MissingDefault, std::nullopt, std::nullopt});
    }
    return report;
}

const DrbEntry* default_drb_entry(const DrbConfig& config)
{
    for (const auto& e : config.entries) {
        if (e.is_default) return &e;
    }
    for (const auto& e : config.entries) {
        if (std::find(e.qfi_list.begin(), e.qfi_list.end(), Qfi{0}) != e.qfi_list.end()) return &e;
    }
    return nullptr;
}

const DrbEntry& resolve_drb_entry(const DrbConfig& config, Qfi qfi)
{
    for (const auto& e : config.entries) {
        if (std::find(e.qfi_list.begin(), e.qfi_list.end(), qfi) != e.qfi_list.end()) return e;
    }
    const DrbEntry* fallback = default_drb_entry(config);
    if (fallback == nullptr) throw std::logic_error("DRB config for UE " + std::to_string(config.ue_id) + " has no default");
    return *fallback;
}

DrbId map_qfi_to_drb(const DrbConfig& config, Qfi qfi)
{
    return resolve_drb_entry(config, qfi).drb;
}

DrbConfig two_bearer_drb_config(UeId ue)
{
    return DrbConfig{ue, {DrbEntry{0, {Qfi{0}}, 0, false}, DrbEntry{1, {Qfi{6}}, 1, false}}};
}

}  // namespace tsn5g
