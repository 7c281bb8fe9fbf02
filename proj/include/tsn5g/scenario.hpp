#pragma once

// Scenario configuration document: strict JSON schema (unknown keys rejected with
// their path), defaults applied on load and echoed back in fully resolved form.

#include "tsn5g/core5g.hpp"
#include "tsn5g/gptp.hpp"
#include "tsn5g/nw_tt.hpp"
#include "tsn5g/qos.hpp"
#include "tsn5g/traffic.hpp"
#include "tsn5g/tsn_af.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace tsn5g {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct LinkParams {
    std::uint64_t rate_bps = 10'000'000'000;
    Duration propagation{1'000};
};

struct GptpParams {
    Duration interval{125'000'000};
    SimTime start{125'000'000};
    /// DRB carrying tunnelled gPTP; nullopt lets the QFI mapping decide.
    std::optional<DrbId> drb_override;
    std::uint8_t domain = 0;
};

struct DrbConfigSpec {
    std::string ue;
    std::vector<DrbEntry> entries;
};

struct ScenarioConfig {
    std::string name = "scenario";
    SimTime horizon;
    SimTime warmup;
    std::uint64_t seed = 1;
    std::size_t endpoint_count = 3;
    ChannelModel channel;
    RanConfig ran;
    /// Per-UE attach overrides keyed by UE name (resolved to ids at build time).
    std::map<std::string, Duration> attach_time_per_ue;
    QosProfile qos;
    std::vector<DrbConfigSpec> drb_configs;
    std::vector<FlowSpec> flows;
    GptpParams gptp;
    ClockHierarchy hierarchy;
    std::vector<StreamReservation> reservations;
    ViolationMode violation_mode = ViolationMode::PerSample;
    std::optional<std::string> cnc_file;
    LinkParams links;
    std::vector<EndpointSpec> bindings;

    [[nodiscard]] static std::string ue_name(std::size_t endpoint) { return "ue" + std::to_string(endpoint); }
};

struct ConfigOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> endpoints;
    std::optional<ChannelMode> channel;
    std::optional<SchedulerKind> scheduler;
};

/// Parses and validates a scenario document. Omitted DRB configs, bindings and the
/// clock hierarchy are derived from endpoint_count. `base_dir` resolves a relative cnc_file.
ScenarioConfig parse_scenario(const nlohmann::json& doc, const std::string& base_dir = ".");
/// Applies CLI overrides to the raw document before parsing.
nlohmann::json apply_overrides(nlohmann::json doc, const ConfigOverrides& overrides);
/// Reads a file (or a bundled config name such as "ideal_3ep") and parses it.
ScenarioConfig load_config(const std::string& path_or_name, const ConfigOverrides& overrides = {});
/// Bundled name -> file path; paths that exist are returned unchanged. Throws ConfigError if nothing matches.
std::string resolve_config_path(const std::string& path_or_name);

/// Fully resolved document; parse_scenario(to_json(c)) reproduces c.
nlohmann::json to_json(const ScenarioConfig& config);

ChannelMode channel_mode_from_string(const std::string& name);
SchedulerKind scheduler_from_string(const std::string& name);

}  // namespace tsn5g
