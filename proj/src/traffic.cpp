#include "tsn5g/traffic.hpp"

#include <algorithm>
#include <stdexcept>

namespace tsn5g {

const char* to_string(FlowDirection direction)
{
    return direction == FlowDirection::Downlink ? "downlink" : "uplink";
}

void FlowSpec::validate(SimTime horizon, std::size_t endpoints) const
{
    if (name.empty()) throw std::invalid_argument("flow without a name");
    const std::string where = "flow '" + name + "': ";
    if (start >= stop) throw std::invalid_argument(where + "start must be before stop");
    if (stop > horizon) throw std::invalid_argument(where + "stop beyond the run horizon");
    if (endpoint && *endpoint >= endpoints) {
        throw std::invalid_argument(where + "endpoint " + std::to_string(*endpoint) + " does not exist");
    }
    if (payload_bytes < 8) throw std::invalid_argument(where + "payload_bytes must be >= 8");
    if (payload_bytes > 1472) throw std::invalid_argument(where + "payload_bytes must be <= 1472");
    std::visit(
        [&](const auto& a) {
            using T = std::decay_t<decltype(a)>;
            if constexpr (std::is_same_v<T, CbrArrival>) {
                if (a.period.count() <= 0) throw std::invalid_argument(where + "period must be > 0");
            } else {
                if (a.mean.count() <= 0) throw std::invalid_argument(where + "mean must be > 0");
            }
        },
        arrival);
}

std::vector<SimTime> generate(const FlowSpec& flow, RngStream& rng)
{
    std::vector<SimTime> out;
    if (const auto* cbr = std::get_if<CbrArrival>(&flow.arrival)) {
        if (cbr->period.count() <= 0) throw std::invalid_argument("period must be > 0");
        for (SimTime t = flow.start; t < flow.stop; t += cbr->period) out.push_back(t);
        return out;
    }
    const auto& exp = std::get<ExponentialArrival>(flow.arrival);
    for (SimTime t = flow.start + draw_exponential(rng, exp.mean); t < flow.stop; t += draw_exponential(rng, exp.mean)) {
        out.push_back(t);
    }
    return out;
}

std::uint64_t LineageTracker::issue(std::size_t flow, std::size_t endpoint, SimTime sent, Pcp pcp)
{
    PacketLineage rec;
    rec.lineage_id = records_.size() + 1;
    rec.flow = flow;
    rec.endpoint = endpoint;
    rec.sent_time = sent;
    rec.pcp_at_source = pcp;
    records_.push_back(rec);
    return rec.lineage_id;
}

PacketLineage& LineageTracker::settle(std::uint64_t id, PacketFate fate)
{
    require_invariant(id >= 1 && id <= records_.size(), "unknown lineage id");
    PacketLineage& rec = records_[id - 1];
    require_invariant(rec.fate == PacketFate::InFlight, "packet settled twice");
    rec.fate = fate;
    return rec;
}

void LineageTracker::delivered(std::uint64_t id, SimTime at, Pcp pcp)
{
    PacketLineage& rec = settle(id, PacketFate::Delivered);
    require_invariant(at >= rec.sent_time, "packet delivered before it was sent");
    rec.delivered_time = at;
    rec.pcp_at_sink = pcp;
}

void LineageTracker::attach_loss(std::uint64_t id)
{
    settle(id, PacketFate::AttachLoss);
}

void LineageTracker::dropped(std::uint64_t id)
{
    settle(id, PacketFate::Dropped);
}

std::optional<DelayStats> delay_stats(std::vector<std::int64_t> delays)
{
    if (delays.empty()) return std::nullopt;
    std::sort(delays.begin(), delays.end());
    DelayStats s;
    s.count = delays.size();
    long double sum = 0;
    for (auto d : delays) sum += static_cast<long double>(d);
    s.mean_ns = static_cast<double>(sum / static_cast<long double>(delays.size()));
    s.min_ns = delays.front();
    s.max_ns = delays.back();
    // nearest rank: ceil(0.99 n), computed in integers
    const std::size_t rank = (99 * delays.size() + 99) / 100;
    s.p99_ns = delays[std::max<std::size_t>(rank, 1) - 1];
    return s;
}

FlowMetrics compute_metrics(std::span<const PacketLineage> lineages, SimTime warmup)
{
    FlowMetrics m;
    std::vector<std::int64_t> full;
    std::vector<std::int64_t> warm;
    for (const auto& p : lineages) {
        ++m.sent;
        switch (p.fate) {
        case PacketFate::InFlight: ++m.in_flight; break;
        case PacketFate::AttachLoss: ++m.radio_attach_loss; break;
        case PacketFate::Dropped: ++m.dropped; break;
        case PacketFate::Delivered: {
            ++m.delivered;
            const std::int64_t d = (*p.delivered_time - p.sent_time).count();
            full.push_back(d);
            if (p.sent_time >= warmup) warm.push_back(d);
            if (!p.pcp_at_sink || *p.pcp_at_sink != p.pcp_at_source) ++m.pcp_mismatches;
            break;
        }
        }
    }
    m.delay_full = delay_stats(std::move(full));
    m.delay_warm = delay_stats(std::move(warm));
    return m;
}

Bytes make_payload(std::uint64_t lineage_id, std::size_t payload_bytes)
{
    Bytes out(std::max<std::size_t>(payload_bytes, 8), 0);
    for (int i = 0; i < 8; ++i) out[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(lineage_id >> (56 - 8 * i));
    return out;
}

std::uint64_t payload_lineage(ByteView payload)
{
    if (payload.size() < 8) throw MalformedInput("payload too short for lineage id", payload.size());
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < 8; ++i) v = (v << 8) | payload[i];
    return v;
}

}  // namespace tsn5g
