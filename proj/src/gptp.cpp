#include "tsn5g/gptp.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <stdexcept>

namespace tsn5g {

std::vector<GptpEmission> grandmaster_emit(Duration interval, SimTime start, SimTime horizon, std::uint8_t domain)
{
    if (interval.count() <= 0) throw std::invalid_argument("gPTP interval must be > 0");
    std::vector<GptpEmission> out;
    std::uint16_t seq = 0;
    for (SimTime t = start; t < horizon; t += interval) {
        GptpEmission e;
        e.time = t;
        e.sync = GptpMessage{GptpMessageType::Sync, seq, 0, t, domain};
        e.follow_up = GptpMessage{GptpMessageType::FollowUp, seq, 0, t, domain};
        out.push_back(e);
        ++seq;
    }
    return out;
}

void SlaveRecorder::record(const GptpMessage& msg, SimTime rx_time)
{
    if (msg.message_type == GptpMessageType::Sync) {
        ++syncs_;
        pending_[msg.sequence_id] = Pending{rx_time, msg.correction_field};
        return;
    }
    ++follow_ups_;
    const auto it = pending_.find(msg.sequence_id);
    if (it == pending_.end()) {
        ++orphans_;
        return;
    }
    SyncSample s;
    s.endpoint_id = endpoint_id_;
    s.sequence_id = msg.sequence_id;
    s.sync_rx_time = it->second.rx;
    s.followup_rx_time = rx_time;
    s.sync_correction = it->second.correction;
    s.correction_total = msg.correction_field;
    s.origin_timestamp = msg.origin_timestamp;
    require_invariant(s.followup_rx_time >= s.sync_rx_time, "Follow_Up received before its Sync");
    // Correction units are 2^-16 ns; residences are whole ns so the shift is exact.
    s.implied_residual_ns = (s.sync_rx_time - s.origin_timestamp).count() - (s.sync_correction >> 16);
    samples_.push_back(s);
    pending_.erase(it);
}

const char* to_string(ClockRole role)
{
    switch (role) {
    case ClockRole::Unassigned: return "unassigned";
    case ClockRole::GrandMaster: return "grandmaster";
    case ClockRole::Bridge: return "bridge";
    case ClockRole::Slave: return "slave";
    case ClockRole::TransparentClock: return "transparent_clock";
    }
    return "?";
}

ClockRole clock_role_from_string(const std::string& name)
{
    for (ClockRole r : {ClockRole::Unassigned, ClockRole::GrandMaster, ClockRole::Bridge, ClockRole::Slave,
                        ClockRole::TransparentClock}) {
        if (name == to_string(r)) return r;
    }
    throw std::invalid_argument("unknown clock role '" + name + "'");
}

std::string HierarchyError::describe() const
{
    switch (kind) {
    case Kind::DuplicateGrandmaster: return "duplicate grandmaster: " + node;
    case Kind::NoGrandmaster: return "no grandmaster";
    case Kind::MissingRole: return "missing role: " + node;
    case Kind::Unreachable: return "unreachable from grandmaster: " + node;
    case Kind::UnknownNode: return "edge references unknown node: " + node;
    case Kind::DuplicateNode: return "node declared twice: " + node;
    }
    return "?";
}

std::size_t HierarchyReport::count(HierarchyError::Kind kind) const
{
    return static_cast<std::size_t>(
        std::count_if(errors.begin(), errors.end(), [kind](const HierarchyError& e) { return e.kind == kind; }));
}

HierarchyReport validate_hierarchy(const ClockHierarchy& h)
{
    using Kind = HierarchyError::Kind;
    HierarchyReport report;
    std::map<std::string, ClockRole> roles;
    std::vector<std::string> grandmasters;
    for (const auto& n : h.nodes) {
        if (!roles.emplace(n.name, n.role).second) {
            report.errors.push_back({Kind::DuplicateNode, n.name});
            continue;
        }
        if (n.role == ClockRole::GrandMaster) grandmasters.push_back(n.name);
        if (n.role == ClockRole::Unassigned) report.errors.push_back({Kind::MissingRole, n.name});
        if (n.role == ClockRole::TransparentClock) report.registered_transparent_clocks.push_back(n.name);
    }
    for (std::size_t i = 1; i < grandmasters.size(); ++i) {
        report.errors.push_back({Kind::DuplicateGrandmaster, grandmasters[i]});
    }
    if (grandmasters.empty()) report.errors.push_back({Kind::NoGrandmaster, ""});

    std::map<std::string, std::vector<std::string>> children;
    std::set<std::string> unknown;
    for (const auto& [parent, child] : h.edges) {
        for (const auto* end : {&parent, &child}) {
            if (!roles.contains(*end) && unknown.insert(*end).second) {
                report.errors.push_back({Kind::UnknownNode, *end});
            }
        }
        children[parent].push_back(child);
    }

    if (!grandmasters.empty()) {
        std::set<std::string> seen(grandmasters.begin(), grandmasters.end());
        std::deque<std::string> frontier(grandmasters.begin(), grandmasters.end());
        while (!frontier.empty()) {
            const std::string cur = frontier.front();
            frontier.pop_front();
            for (const auto& c : children[cur]) {
                if (seen.insert(c).second) frontier.push_back(c);
            }
        }
        for (const auto& [name, role] : roles) {
            if (!seen.contains(name)) report.errors.push_back({Kind::Unreachable, name});
        }
    }
    return report;
}

ClockHierarchy default_hierarchy(std::size_t endpoints)
{
    ClockHierarchy h;
    h.nodes.push_back({"device_a", ClockRole::GrandMaster});
    h.nodes.push_back({"switch", ClockRole::Bridge});
    h.nodes.push_back({"5gs", ClockRole::TransparentClock});
    h.edges.emplace_back("device_a", "switch");
    h.edges.emplace_back("switch", "5gs");
    for (std::size_t i = 0; i < endpoints; ++i) {
        const std::string name = "device_b" + std::to_string(i);
        h.nodes.push_back({name, ClockRole::Slave});
        h.edges.emplace_back("5gs", name);
    }
    return h;
}

}  // namespace tsn5g
