#include "tsn5g/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <set>
#include <sstream>

namespace tsn5g {

using nlohmann::json;

namespace {

json delay_json(const std::optional<DelayStats>& d)
{
    if (!d) return nullptr;
    return {{"count", d->count}, {"mean_ns", d->mean_ns}, {"min_ns", d->min_ns}, {"p99_ns", d->p99_ns}, {"max_ns", d->max_ns}};
}

json residence_json(const std::optional<ResidenceStats>& s)
{
    if (!s) return nullptr;
    return {{"count", s->count},
            {"min_ns", s->min_ns},
            {"max_ns", s->max_ns},
            {"sum_ns", s->sum_ns},
            {"mean_ns", s->mean_ns},
            {"spread_ns", s->spread_ns()},
            {"variance_ns2", s->variance_ns2},
            {"stddev_ns", s->stddev_ns}};
}

json bridge_json(const BridgeDelayStats& s)
{
    if (s.empty()) return {{"count", 0}};
    return {{"count", s.count()}, {"min_ns", s.min_ns()}, {"max_ns", s.max_ns()}, {"mean_ns", s.mean_ns()}, {"sum_ns", s.sum_ns()}};
}

// Expected arrivals for a flow's window; the Poisson sigma only applies to exponential arrivals.
struct Expectation {
    double expected = 0.0;
    std::optional<double> sigma;
};

std::optional<Expectation> expectation_for(const json& config, const std::string& flow)
{
    if (!config.contains("flows")) return std::nullopt;
    for (const auto& f : config["flows"]) {
        if (f.value("name", "") != flow) continue;
        const double window = static_cast<double>(f["stop_ns"].get<std::uint64_t>() - f["start_ns"].get<std::uint64_t>());
        const auto& a = f["arrival"];
        Expectation e;
        if (a["type"] == "cbr") {
            e.expected = std::ceil(window / a["period_ns"].get<double>());
        } else {
            e.expected = window / a["mean_ns"].get<double>();
            e.sigma = std::sqrt(e.expected);
        }
        return e;
    }
    return std::nullopt;
}

json metrics_json(const FlowMetrics& m)
{
    return {{"sent", m.sent},
            {"delivered", m.delivered},
            {"radio_attach_loss", m.radio_attach_loss},
            {"dropped", m.dropped},
            {"in_flight", m.in_flight},
            {"pcp_mismatches", m.pcp_mismatches},
            {"conserved", m.conserved()},
            {"delivery_ratio", m.sent == 0 ? 0.0 : static_cast<double>(m.delivered) / static_cast<double>(m.sent)},
            {"delay_full", delay_json(m.delay_full)},
            {"delay_warm", delay_json(m.delay_warm)}};
}

json scheduler_json(const SchedulerStats& s)
{
    return {{"slots", s.slots},
            {"slots_audited", s.slots_audited},
            {"transmissions", s.transmissions},
            {"harq_failures", s.harq_failures},
            {"forced_deliveries", s.forced_deliveries},
            {"jobs_completed", s.jobs_completed}};
}

std::string fmt(double v, int precision = 3)
{
    std::ostringstream os;
    os << std::fixed << std::setprecision(precision) << v;
    return os.str();
}

std::string us(double ns, int precision = 3) { return fmt(ns / 1000.0, precision); }

// Left column left-aligned, the rest right-aligned.
class Table {
public:
    explicit Table(std::vector<std::string> header) : rows_{std::move(header)} {}
    void add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }

    void print(std::ostream& os) const
    {
        std::vector<std::size_t> width;
        for (const auto& r : rows_)
            for (std::size_t i = 0; i < r.size(); ++i) {
                if (width.size() <= i) width.push_back(0);
                width[i] = std::max(width[i], r[i].size());
            }
        for (std::size_t n = 0; n < rows_.size(); ++n) {
            const auto& r = rows_[n];
            for (std::size_t i = 0; i < r.size(); ++i) {
                if (i > 0) os << "  ";
                if (i == 0)
                    os << std::left << std::setw(static_cast<int>(width[i])) << r[i];
                else
                    os << std::right << std::setw(static_cast<int>(width[i])) << r[i];
            }
            os << '\n';
            if (n == 0) {
                std::size_t total = 0;
                for (auto w : width) total += w;
                os << std::string(total + 2 * (width.size() - 1), '-') << '\n';
            }
        }
    }

private:
    std::vector<std::vector<std::string>> rows_;
};

}  // namespace

json report_to_json(const RunReport& r)
{
    json doc;
    doc["scenario"] = r.scenario;
    doc["seed"] = r.seed;
    doc["config"] = r.config;
    doc["run"] = {{"events", r.summary.event_count}, {"final_time_ns", r.summary.final_time.ns()}};

    json flows = json::array();
    for (const auto& f : r.flows) {
        json j = metrics_json(f.metrics);
        j["name"] = f.name;
        j["direction"] = to_string(f.direction);
        j["endpoint"] = f.endpoint;
        j["pcp"] = f.pcp.value();
        if (auto e = expectation_for(r.config, f.name)) {
            j["expected_arrivals"] = e->expected;
            if (e->sigma) {
                const double z = (static_cast<double>(f.metrics.delivered) - e->expected) / *e->sigma;
                j["delivered_z"] = z;
                j["outlier_3sigma"] = std::fabs(z) > 3.0;
            }
        }
        flows.push_back(std::move(j));
    }
    doc["flows"] = std::move(flows);

    json totals = json::array();
    for (const auto& f : r.flow_totals) {
        json j = metrics_json(f.metrics);
        j["name"] = f.name;
        j["direction"] = to_string(f.direction);
        j["pcp"] = f.pcp.value();
        totals.push_back(std::move(j));
    }
    doc["flow_totals"] = std::move(totals);

    json endpoints = json::array();
    json per_ep_gptp = json::array();
    for (const auto& e : r.endpoints) {
        json j;
        j["index"] = e.index;
        j["ue"] = e.ue;
        j["ue_id"] = e.ue_id;
        j["address"] = e.address;
        j["ds_tt"] = {{"gptp_forwarded", e.ds_tt.gptp_forwarded},
                      {"sync_forwarded", e.ds_tt.sync_forwarded},
                      {"follow_up_forwarded", e.ds_tt.follow_up_forwarded},
                      {"data_forwarded_high", e.ds_tt.data_forwarded_high},
                      {"data_forwarded_be", e.ds_tt.data_forwarded_be},
                      {"reverse_forwarded", e.ds_tt.reverse_forwarded},
                      {"reverse_gptp_as_data", e.ds_tt.reverse_gptp_as_data},
                      {"dropped_malformed", e.ds_tt.dropped_malformed}};
        j["residence"] = {{"all", residence_json(e.residence)},
                          {"sync", residence_json(e.residence_sync)},
                          {"follow_up", residence_json(e.residence_follow_up)}};
        j["af"] = bridge_json(e.af);
        j["slave"] = {{"sync_samples", e.sync_samples},
                      {"orphan_follow_ups", e.orphan_follow_ups},
                      {"correction_checks", e.correction_checks},
                      {"correction_mismatches", e.correction_mismatches},
                      {"implied_residual_min_ns", e.implied_residual_min_ns ? json(*e.implied_residual_min_ns) : json(nullptr)},
                      {"implied_residual_max_ns", e.implied_residual_max_ns ? json(*e.implied_residual_max_ns) : json(nullptr)}};
        per_ep_gptp.push_back(e.ds_tt.gptp_forwarded);
        endpoints.push_back(std::move(j));
    }
    doc["endpoints"] = std::move(endpoints);

    doc["gptp"] = {{"pairs_emitted", r.gptp_pairs_emitted},
                   {"messages_emitted", 2 * r.gptp_pairs_emitted},
                   {"forwarded_total", r.gptp_forwarded_total},
                   {"per_endpoint", per_ep_gptp}};
    doc["residence"] = residence_json(r.residence_all);

    json reservations = json::array();
    for (const auto& res : r.reservations)
        reservations.push_back(
            {{"stream_id", res.stream_id}, {"bandwidth_bps", res.bandwidth_bps}, {"max_latency_ns", res.max_latency_ns}});
    json violations = json::array();
    for (const auto& v : r.violations)
        violations.push_back({{"stream_id", v.stream_id},
                              {"measured_ns", v.measured_ns},
                              {"bound_ns", v.bound_ns},
                              {"time_ns", v.time.ns()},
                              {"endpoint", v.endpoint}});
    doc["af"] = {{"reservations", reservations},
                 {"violation_mode", to_string(r.violation_mode)},
                 {"violation_count", r.violations.size()},
                 {"violations", violations},
                 {"aggregate", bridge_json(r.af_aggregate)}};

    json errors = json::array();
    for (const auto& e : r.bmca.errors) errors.push_back(e.describe());
    doc["bmca"] = {{"valid", r.bmca.valid()},
                   {"errors", errors},
                   {"registered_transparent_clocks", r.bmca.registered_transparent_clocks}};

    doc["components"] = {
        {"nw_tt",
         {{"frames_in", r.nw_tt.frames_in},
          {"gptp_frames_in", r.nw_tt.gptp_frames_in},
          {"gptp_wrapped", r.nw_tt.gptp_wrapped},
          {"data_translated", r.nw_tt.data_translated},
          {"dropped_malformed", r.nw_tt.dropped_malformed},
          {"egress_rebuilt", r.nw_tt.egress_rebuilt},
          {"routing_errors", r.nw_tt.routing_errors},
          {"gptp_egress_rejected", r.nw_tt.gptp_egress_rejected}}},
        {"upf",
         {{"classified", r.upf.classified},
          {"classified_drops", r.upf.classified_drops},
          {"uplink_decapsulated", r.upf.uplink_decapsulated},
          {"uplink_drops", r.upf.uplink_drops}}},
        {"gnb",
         {{"dl_enqueued", r.gnb.dl_enqueued},
          {"ul_enqueued", r.gnb.ul_enqueued},
          {"dl_delivered", r.gnb.dl_delivered},
          {"ul_delivered", r.gnb.ul_delivered},
          {"radio_attach_loss", r.gnb.radio_attach_loss},
          {"dropped", r.gnb.dropped}}},
        {"scheduler_dl", scheduler_json(r.dl_scheduler)},
        {"scheduler_ul", scheduler_json(r.ul_scheduler)}};
    doc["drops"] = r.drops;
    doc["dropped_total"] = r.total_drops();
    doc["diagnostics"] = {{"count", r.diagnostics_count}, {"first", r.diagnostics}};
    doc["invariant_checks"] = r.invariant_checks;
    return doc;
}

std::string format_report_text(const RunReport& r)
{
    std::ostringstream os;
    os << "scenario " << r.scenario << "  seed " << r.seed << "  endpoints " << r.endpoints.size() << "  events "
       << r.summary.event_count << "  final_time " << fmt(static_cast<double>(r.summary.final_time.ns()) / 1e9, 6)
       << " s\n\n";

    os << "Packet delivery\n";
    {
        std::vector<std::string> head{"metric"};
        for (const auto& e : r.endpoints) head.push_back("EP" + std::to_string(e.index + 1));
        head.push_back("total");
        Table t(head);
        std::set<std::string> names;
        for (const auto& f : r.flow_totals) {
            std::vector<std::string> sent{f.name + " sent"};
            std::vector<std::string> delivered{f.name + " delivered"};
            for (const auto& e : r.endpoints) {
                auto it = std::find_if(r.flows.begin(), r.flows.end(),
                                       [&](const FlowReport& x) { return x.name == f.name && x.endpoint == e.index; });
                sent.push_back(it == r.flows.end() ? "-" : std::to_string(it->metrics.sent));
                delivered.push_back(it == r.flows.end() ? "-" : std::to_string(it->metrics.delivered));
            }
            sent.push_back(std::to_string(f.metrics.sent));
            delivered.push_back(std::to_string(f.metrics.delivered));
            t.add(sent);
            t.add(delivered);
        }
        std::vector<std::string> gptp{"gPTP forwarded"};
        std::vector<std::string> drops{"packets dropped"};
        for (const auto& e : r.endpoints) {
            gptp.push_back(std::to_string(e.ds_tt.gptp_forwarded));
            drops.push_back(std::to_string(e.ds_tt.dropped_malformed));
        }
        gptp.push_back(std::to_string(r.gptp_forwarded_total));
        drops.push_back(std::to_string(r.total_drops()));
        t.add(gptp);
        t.add(drops);
        t.print(os);
    }

    os << "\nLatency per class (after warmup, us)\n";
    {
        Table t({"flow", "pcp", "samples", "mean", "p99", "max"});
        for (const auto& f : r.flow_totals) {
            const auto& d = f.metrics.delay_warm;
            t.add({f.name, std::to_string(f.pcp.value()), d ? std::to_string(d->count) : "0", d ? us(d->mean_ns) : "-",
                   d ? us(static_cast<double>(d->p99_ns)) : "-", d ? us(static_cast<double>(d->max_ns)) : "-"});
        }
        t.print(os);
    }

    os << "\nBridge residence (us)\n";
    {
        Table t({"endpoint", "samples", "avg", "min", "max", "max-min", "stddev"});
        auto row = [&](const std::string& name, const std::optional<ResidenceStats>& s) {
            if (!s) {
                t.add({name, "0", "-", "-", "-", "-", "-"});
                return;
            }
            t.add({name, std::to_string(s->count), us(s->mean_ns), us(static_cast<double>(s->min_ns)),
                   us(static_cast<double>(s->max_ns)), us(static_cast<double>(s->spread_ns())), us(s->stddev_ns)});
        };
        for (const auto& e : r.endpoints) row("EP" + std::to_string(e.index + 1), e.residence);
        row("all", r.residence_all);
        t.print(os);
    }

    os << "\nTSN AF (" << to_string(r.violation_mode) << ")\n";
    {
        Table t({"stream", "bound_us", "violations"});
        for (const auto& res : r.reservations) {
            auto n = std::count_if(r.violations.begin(), r.violations.end(),
                                   [&](const Violation& v) { return v.stream_id == res.stream_id; });
            t.add({res.stream_id, us(static_cast<double>(res.max_latency_ns)), std::to_string(n)});
        }
        t.print(os);
    }

    os << "\nClock hierarchy: " << (r.bmca.valid() ? "valid" : "INVALID") << ", " << r.bmca.errors.size()
       << " configuration errors";
    if (!r.bmca.registered_transparent_clocks.empty()) {
        os << ", transparent clocks:";
        for (const auto& tc : r.bmca.registered_transparent_clocks) os << ' ' << tc;
    }
    os << '\n';
    for (const auto& e : r.bmca.errors) os << "  " << e.describe() << '\n';
    if (r.diagnostics_count > 0) os << "\nDiagnostics: " << r.diagnostics_count << '\n';
    return os.str();
}

std::map<std::string, double> headline_metrics(const json& report)
{
    std::map<std::string, double> m;
    auto put_delay = [&](const std::string& prefix, const json& d) {
        if (d.is_null()) return;
        m[prefix + ".mean_ns"] = d["mean_ns"].get<double>();
        m[prefix + ".p99_ns"] = d["p99_ns"].get<double>();
        m[prefix + ".max_ns"] = d["max_ns"].get<double>();
    };
    for (const auto& f : report.at("flow_totals")) {
        const std::string p = "flow." + f["name"].get<std::string>();
        m[p + ".sent"] = f["sent"].get<double>();
        m[p + ".delivered"] = f["delivered"].get<double>();
        put_delay(p + ".delay_warm", f["delay_warm"]);
    }
    for (const auto& f : report.at("flows")) {
        const std::string p = "flow." + f["name"].get<std::string>() + ".ep" + std::to_string(f["endpoint"].get<int>());
        m[p + ".delivered"] = f["delivered"].get<double>();
        put_delay(p + ".delay_warm", f["delay_warm"]);
    }
    for (const auto& e : report.at("endpoints")) {
        const std::string p = "residence.ep" + std::to_string(e["index"].get<int>());
        const auto& s = e["residence"]["all"];
        if (s.is_null()) continue;
        m[p + ".mean_ns"] = s["mean_ns"].get<double>();
        m[p + ".spread_ns"] = s["spread_ns"].get<double>();
        m[p + ".max_ns"] = s["max_ns"].get<double>();
    }
    if (const auto& s = report.at("residence"); !s.is_null()) {
        m["residence.all.mean_ns"] = s["mean_ns"].get<double>();
        m["residence.all.spread_ns"] = s["spread_ns"].get<double>();
        m["residence.all.max_ns"] = s["max_ns"].get<double>();
    }
    m["gptp.forwarded_total"] = report["gptp"]["forwarded_total"].get<double>();
    m["af.violation_count"] = report["af"]["violation_count"].get<double>();
    m["drops.total"] = report["dropped_total"].get<double>();
    return m;
}

Comparison compare_reports(const json& a, const json& b)
{
    Comparison c;
    const auto ma = headline_metrics(a);
    const auto mb = headline_metrics(b);
    for (const auto& [k, va] : ma) {
        auto it = mb.find(k);
        if (it == mb.end()) {
            c.warnings.push_back(k + " only in first report");
            continue;
        }
        ComparisonRow row{k, va, it->second, it->second - va, std::nullopt};
        if (va != 0.0) row.ratio = it->second / va;
        c.rows.push_back(row);
    }
    for (const auto& [k, vb] : mb)
        if (!ma.contains(k)) c.warnings.push_back(k + " only in second report");
    if (a.contains("config") && b.contains("config")) {
        const auto& ca = a["config"];
        const auto& cb = b["config"];
        for (const char* key : {"horizon_ns", "warmup_ns"})
            if (ca.value(key, json()) != cb.value(key, json()))
                c.warnings.push_back(std::string{key} + " differs between reports");
    }
    return c;
}

std::string format_comparison(const Comparison& c, const std::string& label_a, const std::string& label_b)
{
    std::ostringstream os;
    Table t({"metric", label_a, label_b, "delta", "ratio"});
    for (const auto& row : c.rows)
        t.add({row.metric, fmt(row.a), fmt(row.b), fmt(row.delta), row.ratio ? fmt(*row.ratio, 4) : "-"});
    t.print(os);
    for (const auto& w : c.warnings) os << "warning: " << w << '\n';
    return os.str();
}

std::map<std::string, SweepStat> aggregate_sweep(const std::vector<json>& reports)
{
    std::map<std::string, std::vector<double>> samples;
    for (const auto& r : reports)
        for (const auto& [k, v] : headline_metrics(r)) samples[k].push_back(v);
    std::map<std::string, SweepStat> out;
    for (const auto& [k, xs] : samples) {
        SweepStat s;
        s.runs = xs.size();
        s.min = *std::min_element(xs.begin(), xs.end());
        s.max = *std::max_element(xs.begin(), xs.end());
        double sum = 0.0;
        for (double x : xs) sum += x;
        s.mean = sum / static_cast<double>(xs.size());
        double ss = 0.0;
        for (double x : xs) ss += (x - s.mean) * (x - s.mean);
        s.stddev = xs.size() > 1 ? std::sqrt(ss / static_cast<double>(xs.size() - 1)) : 0.0;
        out[k] = s;
    }
    return out;
}

json sweep_to_json(const std::map<std::string, SweepStat>& stats, const std::vector<std::uint64_t>& seeds)
{
    json metrics = json::object();
    for (const auto& [k, s] : stats)
        metrics[k] = {{"mean", s.mean}, {"min", s.min}, {"max", s.max}, {"stddev", s.stddev}, {"runs", s.runs}};
    return {{"seeds", seeds}, {"metrics", metrics}};
}

std::string format_sweep(const std::map<std::string, SweepStat>& stats)
{
    std::ostringstream os;
    Table t({"metric", "runs", "mean", "min", "max", "stddev"});
    for (const auto& [k, s] : stats)
        t.add({k, std::to_string(s.runs), fmt(s.mean), fmt(s.min), fmt(s.max), fmt(s.stddev)});
    t.print(os);
    return os.str();
}

}  // namespace tsn5g
