#include "tsn5g/scenario.hpp"

#include <filesystem>
#include <fstream>
#include <set>

namespace tsn5g {

using nlohmann::json;

namespace {

/// Object view that records which keys were read so leftovers can be rejected.
class Obj {
public:
    Obj(const json& j, std::string path) : j_{&j}, path_{std::move(path)}
    {
        if (!j.is_object()) fail("expected an object");
    }

    [[noreturn]] void fail(const std::string& what) const { throw ConfigError(path_ + ": " + what); }
    [[nodiscard]] std::string at(const std::string& key) const { return path_ + "." + key; }

    /// Marks an absent or null key as handled.
    void skip(const std::string& key) { used_.insert(key); }

    bool has(const std::string& key) const { return j_->contains(key) && !(*j_)[key].is_null(); }

    const json& raw(const std::string& key)
    {
        used_.insert(key);
        if (!j_->contains(key)) throw ConfigError(at(key) + ": required field missing");
        return (*j_)[key];
    }

    Obj obj(const std::string& key) { return Obj{raw(key), at(key)}; }

    std::uint64_t u64(const std::string& key)
    {
        const json& v = raw(key);
        if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
            throw ConfigError(at(key) + ": expected a non-negative integer");
        }
        return v.get<std::uint64_t>();
    }
    std::uint64_t u64(const std::string& key, std::uint64_t def) { return has(key) ? u64(key) : (used_.insert(key), def); }

    std::int64_t i64(const std::string& key)
    {
        const json& v = raw(key);
        if (!v.is_number_integer()) throw ConfigError(at(key) + ": expected an integer");
        return v.get<std::int64_t>();
    }

    int int_in(const std::string& key, int def, int lo, int hi)
    {
        if (!has(key)) {
            used_.insert(key);
            return def;
        }
        const std::int64_t v = i64(key);
        if (v < lo || v > hi) {
            throw ConfigError(at(key) + ": " + std::to_string(v) + " outside [" + std::to_string(lo) + ", " +
                              std::to_string(hi) + "]");
        }
        return static_cast<int>(v);
    }

    double num(const std::string& key, double def)
    {
        if (!has(key)) {
            used_.insert(key);
            return def;
        }
        const json& v = raw(key);
        if (!v.is_number()) throw ConfigError(at(key) + ": expected a number");
        return v.get<double>();
    }

    std::string str(const std::string& key)
    {
        const json& v = raw(key);
        if (!v.is_string()) throw ConfigError(at(key) + ": expected a string");
        return v.get<std::string>();
    }
    std::string str(const std::string& key, const std::string& def) { return has(key) ? str(key) : (used_.insert(key), def); }

    bool boolean(const std::string& key, bool def)
    {
        if (!has(key)) {
            used_.insert(key);
            return def;
        }
        const json& v = raw(key);
        if (!v.is_boolean()) throw ConfigError(at(key) + ": expected true or false");
        return v.get<bool>();
    }

    const json& array(const std::string& key)
    {
        const json& v = raw(key);
        if (!v.is_array()) throw ConfigError(at(key) + ": expected an array");
        return v;
    }

    void finish() const
    {
        for (const auto& [key, value] : j_->items()) {
            if (!used_.contains(key)) throw ConfigError(at(key) + ": unknown key");
        }
    }

    [[nodiscard]] const std::string& path() const { return path_; }

private:
    const json* j_;
    std::string path_;
    std::set<std::string> used_;
};

template <typename Code>
Code code(std::int64_t v, const std::string& path)
{
    try {
        return Code{static_cast<int>(v)};
    } catch (const std::invalid_argument& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

Duration dur(Obj& o, const std::string& key, Duration def)
{
    if (!o.has(key)) {
        o.u64(key, 0);
        return def;
    }
    return Duration{static_cast<std::int64_t>(o.u64(key))};
}

void parse_channel(Obj o, ChannelModel& c)
{
    if (o.has("mode")) {
        try {
            c.mode = channel_mode_from_string(o.str("mode"));
        } catch (const ConfigError& e) {
            throw ConfigError(o.at("mode") + ": " + e.what());
        }
    } else {
        o.skip("mode");
    }
    c.mcs_sigma = o.num("mcs_sigma", c.mcs_sigma);
    c.mcs_min = o.num("mcs_min", c.mcs_min);
    c.mcs_max = o.num("mcs_max", c.mcs_max);
    c.harq_bler = o.num("harq_bler", c.harq_bler);
    c.harq_rtt_slots = o.int_in("harq_rtt_slots", c.harq_rtt_slots, 1, 1000);
    c.max_retx = o.int_in("max_retx", c.max_retx, 0, 100);
    o.finish();
    try {
        c.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(o.path() + ": " + e.what());
    }
}

void parse_ran(Obj o, ScenarioConfig& cfg)
{
    RanConfig& r = cfg.ran;
    r.num_rbs = o.int_in("num_rbs", r.num_rbs, 1, 10000);
    r.slot_duration = dur(o, "slot_ns", r.slot_duration);
    r.slot_offset = dur(o, "slot_offset_ns", r.slot_offset);
    r.bytes_per_rb_per_slot = o.int_in("bytes_per_rb_per_slot", r.bytes_per_rb_per_slot, 1, 1'000'000);
    if (o.has("scheduler")) {
        try {
            r.scheduler = scheduler_from_string(o.str("scheduler"));
        } catch (const std::invalid_argument& e) {
            throw ConfigError(o.at("scheduler") + ": " + e.what());
        }
    } else {
        o.skip("scheduler");
    }
    r.pipeline_delay = dur(o, "pipeline_delay_ns", r.pipeline_delay);
    r.attach_time = dur(o, "attach_time_ns", r.attach_time);
    if (o.has("attach_time_per_ue_ns")) {
        Obj per = o.obj("attach_time_per_ue_ns");
        for (const auto& [ue, v] : o.raw("attach_time_per_ue_ns").items()) {
            cfg.attach_time_per_ue[ue] = Duration{static_cast<std::int64_t>(per.u64(ue))};
        }
        per.finish();
    } else {
        o.skip("attach_time_per_ue_ns");
    }
    r.pf_smoothing = o.num("pf_smoothing", r.pf_smoothing);
    o.finish();
    try {
        r.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(o.path() + ": " + e.what());
    }
}

void parse_qos(Obj o, QosProfile& q)
{
    if (o.has("pcp_to_dscp")) {
        const json& arr = o.array("pcp_to_dscp");
        if (arr.size() != 8) throw ConfigError(o.at("pcp_to_dscp") + ": expected 8 entries");
        for (std::size_t p = 0; p < 8; ++p) {
            const std::string path = o.at("pcp_to_dscp") + "[" + std::to_string(p) + "]";
            if (!arr[p].is_number_integer()) throw ConfigError(path + ": expected an integer");
            q.set_pcp_to_dscp(Pcp{static_cast<int>(p)}, code<Dscp>(arr[p].get<std::int64_t>(), path));
        }
    } else {
        o.skip("pcp_to_dscp");
    }
    auto table = [&](const std::string& key, auto setter, auto clear, auto make) {
        if (!o.has(key)) {
            o.u64(key, 0);
            return;
        }
        Obj t = o.obj(key);
        clear();
        for (const auto& [k, v] : o.raw(key).items()) {
            std::int64_t dscp = 0;
            try {
                std::size_t used = 0;
                dscp = std::stoll(k, &used);
                if (used != k.size()) throw std::invalid_argument(k);
            } catch (const std::exception&) {
                throw ConfigError(t.at(k) + ": key must be a DSCP number");
            }
            setter(code<Dscp>(dscp, t.at(k)), make(t.i64(k), t.at(k)));
        }
        t.finish();
    };
    table(
        "dscp_to_qfi", [&](Dscp d, Qfi v) { q.set_dscp_to_qfi(d, v); }, [&] { q.clear_dscp_to_qfi(); },
        [](std::int64_t v, const std::string& p) { return code<Qfi>(v, p); });
    table(
        "dscp_to_pcp", [&](Dscp d, Pcp v) { q.set_dscp_to_pcp(d, v); }, [&] { q.clear_dscp_to_pcp(); },
        [](std::int64_t v, const std::string& p) { return code<Pcp>(v, p); });
    o.finish();
    const auto broken = q.class_preservation_violations();
    if (!broken.empty()) {
        throw ConfigError(o.path() + ": PCP " + std::to_string(broken.front().value()) +
                          " does not map back to itself through DSCP");
    }
}

DrbConfigSpec parse_drb_config(Obj o)
{
    DrbConfigSpec spec;
    spec.ue = o.str("ue");
    const json& entries = o.array("entries");
    for (std::size_t i = 0; i < entries.size(); ++i) {
        Obj e{entries[i], o.at("entries") + "[" + std::to_string(i) + "]"};
        DrbEntry entry;
        if (!e.has("drb")) e.fail("field 'drb' is required");
        entry.drb = static_cast<DrbId>(e.int_in("drb", 0, 0, 31));
        const json& qfis = e.array("qfi_list");
        for (std::size_t k = 0; k < qfis.size(); ++k) {
            const std::string path = e.at("qfi_list") + "[" + std::to_string(k) + "]";
            if (!qfis[k].is_number_integer()) throw ConfigError(path + ": expected an integer");
            entry.qfi_list.push_back(code<Qfi>(qfis[k].get<std::int64_t>(), path));
        }
        entry.priority = e.int_in("priority", 0, -1000, 1000);
        entry.is_default = e.boolean("default", false);
        e.finish();
        spec.entries.push_back(std::move(entry));
    }
    o.finish();
    return spec;
}

FlowSpec parse_flow(Obj o, const ScenarioConfig& cfg)
{
    FlowSpec f;
    f.name = o.str("name");
    const std::string dir = o.str("direction", "downlink");
    if (dir == "downlink") {
        f.direction = FlowDirection::Downlink;
    } else if (dir == "uplink") {
        f.direction = FlowDirection::Uplink;
    } else {
        throw ConfigError(o.at("direction") + ": expected downlink or uplink");
    }
    if (o.has("endpoint")) {
        const json& ep = o.raw("endpoint");
        if (ep.is_string() && ep.get<std::string>() == "all") {
            f.endpoint.reset();
        } else if (ep.is_number_unsigned()) {
            f.endpoint = ep.get<std::size_t>();
        } else {
            throw ConfigError(o.at("endpoint") + ": expected \"all\" or an endpoint index");
        }
    } else {
        o.skip("endpoint");
    }
    f.payload_bytes = o.u64("payload_bytes", f.payload_bytes);
    Obj a = o.obj("arrival");
    const std::string type = a.str("type");
    if (type == "cbr") {
        f.arrival = CbrArrival{Duration{static_cast<std::int64_t>(a.u64("period_ns"))}};
    } else if (type == "exponential") {
        f.arrival = ExponentialArrival{Duration{static_cast<std::int64_t>(a.u64("mean_ns"))}};
    } else {
        throw ConfigError(a.at("type") + ": expected cbr or exponential");
    }
    a.finish();
    f.pcp = Pcp{o.int_in("pcp", 0, 0, 7)};
    f.start = SimTime{o.u64("start_ns", 0)};
    f.stop = SimTime{o.u64("stop_ns", cfg.horizon.ns())};
    o.finish();
    try {
        f.validate(cfg.horizon, cfg.endpoint_count);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(o.path() + ": " + e.what());
    }
    return f;
}

std::vector<FlowSpec> default_flows(SimTime horizon)
{
    std::vector<FlowSpec> out;
    FlowSpec hp;
    hp.name = "high_prio";
    hp.payload_bytes = 100;
    hp.arrival = CbrArrival{Duration{1'000'000}};
    hp.pcp = Pcp{6};
    hp.start = SimTime{0};
    hp.stop = horizon;
    out.push_back(hp);
    FlowSpec be;
    be.name = "best_effort";
    be.payload_bytes = 500;
    be.arrival = ExponentialArrival{Duration{2'000'000}};
    be.pcp = Pcp{0};
    be.start = SimTime{0};
    be.stop = horizon;
    out.push_back(be);
    const SimTime rev_start{1'000'000'000};
    const SimTime rev_stop = std::min(horizon, SimTime{9'000'000'000});
    if (rev_start < rev_stop) {
        FlowSpec rev;
        rev.name = "reverse";
        rev.direction = FlowDirection::Uplink;
        rev.payload_bytes = 100;
        rev.arrival = CbrArrival{Duration{10'000'000}};
        rev.pcp = Pcp{0};
        rev.start = rev_start;
        rev.stop = rev_stop;
        out.push_back(rev);
    }
    return out;
}

ClockHierarchy parse_hierarchy(Obj o)
{
    ClockHierarchy h;
    const json& nodes = o.array("nodes");
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        Obj n{nodes[i], o.at("nodes") + "[" + std::to_string(i) + "]"};
        ClockNode node;
        node.name = n.str("name");
        try {
            node.role = clock_role_from_string(n.str("role", "unassigned"));
        } catch (const std::invalid_argument& e) {
            throw ConfigError(n.at("role") + ": " + e.what());
        }
        n.finish();
        h.nodes.push_back(std::move(node));
    }
    const json& edges = o.array("edges");
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const json& e = edges[i];
        if (!e.is_array() || e.size() != 2 || !e[0].is_string() || !e[1].is_string()) {
            throw ConfigError(o.at("edges") + "[" + std::to_string(i) + "]: expected [parent, child]");
        }
        h.edges.emplace_back(e[0].get<std::string>(), e[1].get<std::string>());
    }
    o.finish();
    return h;
}

void parse_af(Obj o, ScenarioConfig& cfg, const std::string& base_dir)
{
    if (o.has("reservations")) {
        const json& arr = o.array("reservations");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            Obj r{arr[i], o.at("reservations") + "[" + std::to_string(i) + "]"};
            StreamReservation res;
            res.stream_id = r.str("stream_id");
            res.bandwidth_bps = r.u64("bandwidth_bps");
            res.max_latency_ns = static_cast<std::int64_t>(r.u64("max_latency_ns"));
            r.finish();
            try {
                res.validate();
            } catch (const std::invalid_argument& e) {
                throw ConfigError(r.path() + ": " + e.what());
            }
            cfg.reservations.push_back(std::move(res));
        }
    } else {
        o.skip("reservations");
    }
    try {
        cfg.violation_mode = violation_mode_from_string(o.str("violation_mode", "per_sample"));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(o.at("violation_mode") + ": " + e.what());
    }
    if (o.has("cnc_file")) {
        std::filesystem::path p = o.str("cnc_file");
        if (p.is_relative()) p = std::filesystem::path{base_dir} / p;
        cfg.cnc_file = p.lexically_normal().string();
        try {
            for (auto& r : load_cnc_file(*cfg.cnc_file)) cfg.reservations.push_back(std::move(r));
        } catch (const CncFormatError& e) {
            throw ConfigError(o.at("cnc_file") + ": " + e.what());
        }
    } else {
        o.skip("cnc_file");
    }
    o.finish();
}

}  // namespace

ChannelMode channel_mode_from_string(const std::string& name)
{
    if (name == "ideal") return ChannelMode::Ideal;
    if (name == "fading") return ChannelMode::Fading;
    throw ConfigError("unknown channel mode '" + name + "' (expected ideal or fading)");
}

SchedulerKind scheduler_from_string(const std::string& name)
{
    if (name == "maxci") return SchedulerKind::MaxCi;
    if (name == "pf") return SchedulerKind::Pf;
    if (name == "rr") return SchedulerKind::Rr;
    throw std::invalid_argument("unknown scheduler '" + name + "' (expected maxci, pf or rr)");
}

ScenarioConfig parse_scenario(const json& doc, const std::string& base_dir)
{
    Obj root{doc, "config"};
    ScenarioConfig cfg;
    cfg.name = root.str("name", cfg.name);
    cfg.horizon = SimTime{root.u64("horizon_ns")};
    if (cfg.horizon.ns() == 0) throw ConfigError("config.horizon_ns: must be > 0");
    cfg.warmup = SimTime{root.u64("warmup_ns", 0)};
    if (cfg.warmup >= cfg.horizon) throw ConfigError("config.warmup_ns: must be below horizon_ns");
    cfg.seed = root.u64("seed", cfg.seed);
    cfg.endpoint_count = root.u64("endpoint_count", cfg.endpoint_count);
    if (cfg.endpoint_count < 1) throw ConfigError("config.endpoint_count: at least one endpoint is required");
    if (cfg.endpoint_count > 200) throw ConfigError("config.endpoint_count: at most 200 endpoints are supported");

    if (root.has("channel")) {
        parse_channel(root.obj("channel"), cfg.channel);
    } else {
        root.skip("channel");
    }
    if (root.has("ran")) {
        parse_ran(root.obj("ran"), cfg);
    } else {
        root.skip("ran");
    }
    if (root.has("qos")) {
        parse_qos(root.obj("qos"), cfg.qos);
    } else {
        root.skip("qos");
    }

    if (root.has("drb_configs")) {
        const json& arr = root.array("drb_configs");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            cfg.drb_configs.push_back(parse_drb_config(Obj{arr[i], "config.drb_configs[" + std::to_string(i) + "]"}));
        }
    } else {
        root.skip("drb_configs");
        for (std::size_t i = 0; i < cfg.endpoint_count; ++i) {
            cfg.drb_configs.push_back({ScenarioConfig::ue_name(i), two_bearer_drb_config(0).entries});
        }
    }
    std::set<std::string> drb_ues;
    for (std::size_t i = 0; i < cfg.drb_configs.size(); ++i) {
        const auto& spec = cfg.drb_configs[i];
        const std::string path = "config.drb_configs[" + std::to_string(i) + "]";
        if (!drb_ues.insert(spec.ue).second) throw ConfigError(path + ".ue: duplicate DRB config for " + spec.ue);
        const auto report = validate_drb_config(DrbConfig{0, spec.entries});
        if (!report.valid()) throw ConfigError(path + ": " + report.issues.front().describe());
    }
    for (std::size_t i = 0; i < cfg.endpoint_count; ++i) {
        if (!drb_ues.contains(ScenarioConfig::ue_name(i))) {
            throw ConfigError("config.drb_configs: no DRB config for " + ScenarioConfig::ue_name(i));
        }
    }
    for (const auto& ue : drb_ues) {
        bool known = false;
        for (std::size_t i = 0; i < cfg.endpoint_count; ++i) known = known || ue == ScenarioConfig::ue_name(i);
        if (!known) throw ConfigError("config.drb_configs: DRB config for unknown UE " + ue);
    }
    for (const auto& [ue, d] : cfg.attach_time_per_ue) {
        if (!drb_ues.contains(ue)) throw ConfigError("config.ran.attach_time_per_ue_ns." + ue + ": unknown UE");
    }

    if (root.has("flows")) {
        const json& arr = root.array("flows");
        std::set<std::string> names;
        for (std::size_t i = 0; i < arr.size(); ++i) {
            FlowSpec f = parse_flow(Obj{arr[i], "config.flows[" + std::to_string(i) + "]"}, cfg);
            if (!names.insert(f.name).second) {
                throw ConfigError("config.flows[" + std::to_string(i) + "].name: duplicate flow name " + f.name);
            }
            cfg.flows.push_back(std::move(f));
        }
    } else {
        root.skip("flows");
        cfg.flows = default_flows(cfg.horizon);
    }

    if (root.has("gptp")) {
        Obj g = root.obj("gptp");
        cfg.gptp.interval = dur(g, "interval_ns", cfg.gptp.interval);
        if (cfg.gptp.interval.count() <= 0) throw ConfigError("config.gptp.interval_ns: must be > 0");
        cfg.gptp.start = SimTime{g.u64("start_ns", cfg.gptp.start.ns())};
        if (g.has("drb_override")) {
            cfg.gptp.drb_override = static_cast<DrbId>(g.int_in("drb_override", 0, 0, 31));
        } else {
            g.skip("drb_override");
        }
        cfg.gptp.domain = static_cast<std::uint8_t>(g.int_in("domain", 0, 0, 255));
        g.finish();
        if (cfg.gptp.drb_override) {
            for (const auto& spec : cfg.drb_configs) {
                const bool found = std::any_of(spec.entries.begin(), spec.entries.end(),
                                               [&](const DrbEntry& e) { return e.drb == *cfg.gptp.drb_override; });
                if (!found) {
                    throw ConfigError("config.gptp.drb_override: DRB " + std::to_string(*cfg.gptp.drb_override) +
                                      " not configured for " + spec.ue);
                }
            }
        }
    } else {
        root.skip("gptp");
    }

    if (root.has("hierarchy")) {
        cfg.hierarchy = parse_hierarchy(root.obj("hierarchy"));
    } else {
        root.skip("hierarchy");
        cfg.hierarchy = default_hierarchy(cfg.endpoint_count);
    }

    if (root.has("af")) {
        parse_af(root.obj("af"), cfg, base_dir);
    } else {
        root.skip("af");
    }

    if (root.has("topology")) {
        Obj t = root.obj("topology");
        cfg.links.rate_bps = t.u64("link_rate_bps", cfg.links.rate_bps);
        if (cfg.links.rate_bps == 0) throw ConfigError("config.topology.link_rate_bps: must be > 0");
        cfg.links.propagation = dur(t, "propagation_ns", cfg.links.propagation);
        t.finish();
    } else {
        root.skip("topology");
    }

    if (root.has("bindings")) {
        const json& arr = root.array("bindings");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            Obj b{arr[i], "config.bindings[" + std::to_string(i) + "]"};
            EndpointSpec spec;
            spec.address = b.str("address");
            spec.ue = b.str("ue");
            b.finish();
            cfg.bindings.push_back(std::move(spec));
        }
    } else {
        root.skip("bindings");
        for (std::size_t i = 0; i < cfg.endpoint_count; ++i) {
            cfg.bindings.push_back({"10.0.1." + std::to_string(i + 1), ScenarioConfig::ue_name(i)});
        }
    }
    // Every UE needs exactly one downstream device behind it.
    std::map<std::string, std::size_t> per_ue;
    for (const auto& b : cfg.bindings) ++per_ue[b.ue];
    for (std::size_t i = 0; i < cfg.endpoint_count; ++i) {
        const auto n = per_ue[ScenarioConfig::ue_name(i)];
        if (n != 1) {
            throw ConfigError("config.bindings: " + ScenarioConfig::ue_name(i) + " has " + std::to_string(n) +
                              " bindings, expected 1");
        }
    }
    root.finish();
    return cfg;
}

json apply_overrides(json doc, const ConfigOverrides& o)
{
    if (!doc.is_object()) return doc;
    if (o.seed) doc["seed"] = *o.seed;
    if (o.endpoints) doc["endpoint_count"] = *o.endpoints;
    if (o.channel) {
        if (!doc.contains("channel") || doc["channel"].is_null()) doc["channel"] = json::object();
        doc["channel"]["mode"] = to_string(*o.channel);
    }
    if (o.scheduler) {
        if (!doc.contains("ran") || doc["ran"].is_null()) doc["ran"] = json::object();
        doc["ran"]["scheduler"] = to_string(*o.scheduler);
    }
    return doc;
}

std::string resolve_config_path(const std::string& path_or_name)
{
    namespace fs = std::filesystem;
    if (fs::is_regular_file(path_or_name)) return path_or_name;
    const fs::path bundled = fs::path{TSN5G_CONFIG_DIR} / path_or_name;
    if (fs::is_regular_file(bundled)) return bundled.string();
    const fs::path with_ext = fs::path{TSN5G_CONFIG_DIR} / (path_or_name + ".json");
    if (fs::is_regular_file(with_ext)) return with_ext.string();
    throw ConfigError("config not found: " + path_or_name);
}

ScenarioConfig load_config(const std::string& path_or_name, const ConfigOverrides& overrides)
{
    const std::string path = resolve_config_path(path_or_name);
    std::ifstream in{path};
    if (!in) throw ConfigError("cannot open " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path + ": " + e.what());
    }
    const std::string base = std::filesystem::path{path}.parent_path().string();
    return parse_scenario(apply_overrides(std::move(doc), overrides), base.empty() ? "." : base);
}

json to_json(const ScenarioConfig& c)
{
    json j;
    j["name"] = c.name;
    j["horizon_ns"] = c.horizon.ns();
    j["warmup_ns"] = c.warmup.ns();
    j["seed"] = c.seed;
    j["endpoint_count"] = c.endpoint_count;
    j["channel"] = {{"mode", to_string(c.channel.mode)},
                    {"mcs_sigma", c.channel.mcs_sigma},
                    {"mcs_min", c.channel.mcs_min},
                    {"mcs_max", c.channel.mcs_max},
                    {"harq_bler", c.channel.harq_bler},
                    {"harq_rtt_slots", c.channel.harq_rtt_slots},
                    {"max_retx", c.channel.max_retx}};
    json per_ue = json::object();
    for (const auto& [ue, d] : c.attach_time_per_ue) per_ue[ue] = d.count();
    j["ran"] = {{"num_rbs", c.ran.num_rbs},
                {"slot_ns", c.ran.slot_duration.count()},
                {"slot_offset_ns", c.ran.slot_offset.count()},
                {"bytes_per_rb_per_slot", c.ran.bytes_per_rb_per_slot},
                {"scheduler", to_string(c.ran.scheduler)},
                {"pipeline_delay_ns", c.ran.pipeline_delay.count()},
                {"attach_time_ns", c.ran.attach_time.count()},
                {"attach_time_per_ue_ns", per_ue},
                {"pf_smoothing", c.ran.pf_smoothing}};
    json pcp = json::array();
    json qfi = json::object();
    json back = json::object();
    for (int p = 0; p < 8; ++p) pcp.push_back(c.qos.pcp_to_dscp(Pcp{p}).value());
    for (int d = 0; d < 64; ++d) {
        if (auto q = c.qos.explicit_qfi(Dscp{d})) qfi[std::to_string(d)] = q->value();
        if (auto p = c.qos.explicit_pcp(Dscp{d})) back[std::to_string(d)] = p->value();
    }
    j["qos"] = {{"pcp_to_dscp", pcp}, {"dscp_to_qfi", qfi}, {"dscp_to_pcp", back}};
    json drbs = json::array();
    for (const auto& spec : c.drb_configs) {
        json entries = json::array();
        for (const auto& e : spec.entries) {
            json q = json::array();
            for (auto v : e.qfi_list) q.push_back(v.value());
            entries.push_back({{"drb", e.drb}, {"qfi_list", q}, {"priority", e.priority}, {"default", e.is_default}});
        }
        drbs.push_back({{"ue", spec.ue}, {"entries", entries}});
    }
    j["drb_configs"] = drbs;
    json flows = json::array();
    for (const auto& f : c.flows) {
        json arrival;
        if (const auto* cbr = std::get_if<CbrArrival>(&f.arrival)) {
            arrival = {{"type", "cbr"}, {"period_ns", cbr->period.count()}};
        } else {
            arrival = {{"type", "exponential"}, {"mean_ns", std::get<ExponentialArrival>(f.arrival).mean.count()}};
        }
        flows.push_back({{"name", f.name},
                         {"direction", to_string(f.direction)},
                         {"endpoint", f.endpoint ? json(*f.endpoint) : json("all")},
                         {"payload_bytes", f.payload_bytes},
                         {"arrival", arrival},
                         {"pcp", f.pcp.value()},
                         {"start_ns", f.start.ns()},
                         {"stop_ns", f.stop.ns()}});
    }
    j["flows"] = flows;
    j["gptp"] = {{"interval_ns", c.gptp.interval.count()},
                 {"start_ns", c.gptp.start.ns()},
                 {"drb_override", c.gptp.drb_override ? json(*c.gptp.drb_override) : json(nullptr)},
                 {"domain", c.gptp.domain}};
    json nodes = json::array();
    for (const auto& n : c.hierarchy.nodes) nodes.push_back({{"name", n.name}, {"role", to_string(n.role)}});
    json edges = json::array();
    for (const auto& [a, b] : c.hierarchy.edges) edges.push_back({a, b});
    j["hierarchy"] = {{"nodes", nodes}, {"edges", edges}};
    json res = json::array();
    for (const auto& r : c.reservations) {
        res.push_back({{"stream_id", r.stream_id}, {"bandwidth_bps", r.bandwidth_bps}, {"max_latency_ns", r.max_latency_ns}});
    }
    // Reservations from a CNC file are already merged into the list above.
    j["af"] = {{"reservations", res}, {"violation_mode", to_string(c.violation_mode)}};
    j["topology"] = {{"link_rate_bps", c.links.rate_bps}, {"propagation_ns", c.links.propagation.count()}};
    json bindings = json::array();
    for (const auto& b : c.bindings) bindings.push_back({{"address", b.address}, {"ue", b.ue}});
    j["bindings"] = bindings;
    return j;
}

}  // namespace tsn5g
