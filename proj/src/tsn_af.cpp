#include "tsn5g/tsn_af.hpp"

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace tsn5g {

void StreamReservation::validate() const
{
    if (stream_id.empty()) throw std::invalid_argument("reservation without stream id");
    if (bandwidth_bps == 0) throw std::invalid_argument("reservation '" + stream_id + "': bandwidth_bps must be > 0");
    if (max_latency_ns <= 0) throw std::invalid_argument("reservation '" + stream_id + "': max_latency_ns must be > 0");
}

void BridgeDelayStats::observe(std::int64_t sample_ns)
{
    require_invariant(sample_ns >= 0, "negative bridge delay sample");
    if (count_ == 0) {
        min_ = max_ = sample_ns;
    } else {
        min_ = std::min(min_, sample_ns);
        max_ = std::max(max_, sample_ns);
    }
    sum_ += static_cast<std::uint64_t>(sample_ns);
    ++count_;
}

double BridgeDelayStats::mean_ns() const
{
    return count_ == 0 ? 0.0 : static_cast<double>(sum_) / static_cast<double>(count_);
}

std::int64_t BridgeDelayStats::mean_floor_ns() const
{
    return count_ == 0 ? 0 : static_cast<std::int64_t>(sum_ / count_);
}

const char* to_string(ViolationMode mode)
{
    return mode == ViolationMode::PerSample ? "per_sample" : "running_average";
}

ViolationMode violation_mode_from_string(const std::string& name)
{
    if (name == "per_sample") return ViolationMode::PerSample;
    if (name == "running_average") return ViolationMode::RunningAverage;
    throw std::invalid_argument("unknown violation mode '" + name + "'");
}

std::vector<Violation> check_violation(const std::vector<StreamReservation>& reservations, std::int64_t measured_ns,
                                       SimTime time, std::size_t endpoint)
{
    std::vector<Violation> out;
    for (const auto& r : reservations) {
        if (measured_ns > r.max_latency_ns) out.push_back({r.stream_id, measured_ns, r.max_latency_ns, time, endpoint});
    }
    return out;
}

TsnAf::TsnAf(std::vector<StreamReservation> reservations, ViolationMode mode, std::size_t endpoints)
    : reservations_{std::move(reservations)}, mode_{mode}, per_endpoint_(endpoints)
{
    for (const auto& r : reservations_) r.validate();
}

void TsnAf::observe_residence(std::size_t endpoint, const ResidenceRecord& record)
{
    const std::int64_t sample = record.residence.count();
    BridgeDelayStats& stats = per_endpoint_.at(endpoint);
    stats.observe(sample);
    aggregate_.observe(sample);
    const std::int64_t measured = mode_ == ViolationMode::PerSample ? sample : stats.mean_floor_ns();
    for (auto& v : check_violation(reservations_, measured, record.egress, endpoint)) violations_.push_back(std::move(v));
}

namespace {

template <typename T>
T attribute(const boost::property_tree::ptree& node, const char* name, std::size_t index)
{
    const auto value = node.get_optional<T>(std::string{"<xmlattr>."} + name);
    if (!value) {
        throw CncFormatError("stream #" + std::to_string(index) + ": missing or invalid attribute '" + name + "'");
    }
    return *value;
}

}  // namespace

std::vector<StreamReservation> parse_cnc_xml(const std::string& text)
{
    namespace pt = boost::property_tree;
    pt::ptree tree;
    std::istringstream in{text};
    try {
        pt::read_xml(in, tree, pt::xml_parser::trim_whitespace);
    } catch (const pt::xml_parser_error& e) {
        throw CncFormatError(std::string{"CNC file is not well-formed XML: "} + e.what());
    }
    const auto root = tree.get_child_optional("cnc");
    if (!root) throw CncFormatError("CNC file has no <cnc> root element");

    std::vector<StreamReservation> out;
    std::set<std::string> ids;
    std::size_t index = 0;
    for (const auto& [tag, node] : *root) {
        if (tag == "<xmlattr>" || tag == "<xmlcomment>") continue;
        if (tag != "stream") throw CncFormatError("unexpected element <" + tag + "> in <cnc>");
        StreamReservation r;
        r.stream_id = attribute<std::string>(node, "id", index);
        r.bandwidth_bps = attribute<std::uint64_t>(node, "bandwidth_bps", index);
        r.max_latency_ns = attribute<std::int64_t>(node, "max_latency_ns", index);
        try {
            r.validate();
        } catch (const std::invalid_argument& e) {
            throw CncFormatError(e.what());
        }
        if (!ids.insert(r.stream_id).second) throw CncFormatError("duplicate stream id '" + r.stream_id + "'");
        out.push_back(std::move(r));
        ++index;
    }
    return out;
}

std::vector<StreamReservation> load_cnc_file(const std::string& path)
{
    std::ifstream in{path};
    if (!in) throw CncFormatError("cannot open CNC file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_cnc_xml(buf.str());
}

}  // namespace tsn5g
