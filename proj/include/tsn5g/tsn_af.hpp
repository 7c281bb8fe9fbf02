#pragma once

// TSN application function: bridge delay statistics fed by the DS-TT residence
// signal, stream reservations and latency-bound violation logging.

#include "tsn5g/ds_tt.hpp"
#include "tsn5g/simkernel.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace tsn5g {

struct StreamReservation {
    std::string stream_id;
    std::uint64_t bandwidth_bps = 0;
    std::int64_t max_latency_ns = 0;

    /// Throws std::invalid_argument unless both limits are positive.
    void validate() const;
    bool operator==(const StreamReservation&) const = default;
};

/// Incremental min/max/mean; the mean is kept exact as an integer sum and count.
class BridgeDelayStats {
public:
    /// sample_ns must be >= 0 (InvariantViolation otherwise).
    void observe(std::int64_t sample_ns);

    [[nodiscard]] bool empty() const { return count_ == 0; }
    [[nodiscard]] std::uint64_t count() const { return count_; }
    [[nodiscard]] std::int64_t min_ns() const { return min_; }
    [[nodiscard]] std::int64_t max_ns() const { return max_; }
    [[nodiscard]] std::uint64_t sum_ns() const { return sum_; }
    [[nodiscard]] double mean_ns() const;
    /// The mean as sum / count; exact when the result is a whole number.
    [[nodiscard]] std::int64_t mean_floor_ns() const;

private:
    std::int64_t min_ = 0;
    std::int64_t max_ = 0;
    std::uint64_t sum_ = 0;
    std::uint64_t count_ = 0;
};

struct Violation {
    std::string stream_id;
    std::int64_t measured_ns = 0;
    std::int64_t bound_ns = 0;
    SimTime time;
    std::size_t endpoint = 0;
};

enum class ViolationMode { PerSample, RunningAverage };

const char* to_string(ViolationMode mode);
ViolationMode violation_mode_from_string(const std::string& name);

/// One Violation per reservation whose bound is strictly below `measured_ns`.
std::vector<Violation> check_violation(const std::vector<StreamReservation>& reservations, std::int64_t measured_ns,
                                       SimTime time, std::size_t endpoint = 0);

class TsnAf {
public:
    TsnAf(std::vector<StreamReservation> reservations, ViolationMode mode, std::size_t endpoints);

    /// Residence listener; compares each sample (or the endpoint's running mean) with every bound.
    void observe_residence(std::size_t endpoint, const ResidenceRecord& record);

    [[nodiscard]] const BridgeDelayStats& endpoint_stats(std::size_t endpoint) const { return per_endpoint_.at(endpoint); }
    [[nodiscard]] const BridgeDelayStats& aggregate() const { return aggregate_; }
    [[nodiscard]] const std::vector<Violation>& violations() const { return violations_; }
    [[nodiscard]] const std::vector<StreamReservation>& reservations() const { return reservations_; }
    [[nodiscard]] ViolationMode mode() const { return mode_; }

private:
    std::vector<StreamReservation> reservations_;
    ViolationMode mode_;
    std::vector<BridgeDelayStats> per_endpoint_;
    BridgeDelayStats aggregate_;
    std::vector<Violation> violations_;
};

class CncFormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Standalone CNC reservation file:
///   <cnc><stream id="..." bandwidth_bps="..." max_latency_ns="..."/>...</cnc>
std::vector<StreamReservation> parse_cnc_xml(const std::string& text);
std::vector<StreamReservation> load_cnc_file(const std::string& path);

}  // namespace tsn5g
