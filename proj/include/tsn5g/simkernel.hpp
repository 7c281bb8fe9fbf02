#pragma once

// Deterministic discrete-event kernel: integer-nanosecond simulated time,
// (fire_time, sequence) ordered event delivery and seeded random streams.

#include <chrono>
#include <compare>
#include <cstdint>
#include <functional>
#include <limits>
#include <queue>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tsn5g {

using Duration = std::chrono::nanoseconds;

/// Simulated nanoseconds since run start.
class SimTime {
public:
    constexpr SimTime() = default;
    constexpr explicit SimTime(std::uint64_t ns) : ns_{ns} {}

    static constexpr SimTime from(Duration d) { return SimTime{static_cast<std::uint64_t>(d.count())}; }
    static constexpr SimTime max() { return SimTime{std::numeric_limits<std::uint64_t>::max()}; }

    [[nodiscard]] constexpr std::uint64_t ns() const { return ns_; }

    constexpr auto operator<=>(const SimTime&) const = default;

    constexpr SimTime operator+(Duration d) const
    {
        return SimTime{static_cast<std::uint64_t>(static_cast<std::int64_t>(ns_) + d.count())};
    }
    constexpr SimTime& operator+=(Duration d) { return *this = *this + d; }
    constexpr Duration operator-(SimTime other) const
    {
        return Duration{static_cast<std::int64_t>(ns_) - static_cast<std::int64_t>(other.ns_)};
    }

private:
    std::uint64_t ns_ = 0;
};

/// Thrown when a component schedules an event before now(); always a logic bug.
class SchedulingError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Always-on invariant failure. Aborts the run; the CLI maps it to a nonzero exit.
class InvariantViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

inline void require_invariant(bool ok, std::string_view what)
{
    if (!ok) throw InvariantViolation(std::string{what});
}

struct Event {
    SimTime fire_time;
    std::uint64_t sequence = 0;
    std::string target;
    std::function<void()> payload;
};

struct RunSummary {
    std::uint64_t event_count = 0;
    SimTime final_time;
};

/// Portable random stream keyed by (seed, stream_id). Draws are built from raw
/// mt19937_64 output so sequences do not depend on the standard library's
/// distribution implementations.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::string_view stream_id);

    [[nodiscard]] std::uint64_t seed() const { return seed_; }
    [[nodiscard]] const std::string& stream_id() const { return stream_id_; }

    std::uint64_t next_u64() { return engine_(); }
    /// Uniform in [0, 1) with 53 bits of resolution.
    double uniform();
    double standard_normal();
    bool bernoulli(double p) { return uniform() < p; }

private:
    std::uint64_t seed_;
    std::string stream_id_;
    std::mt19937_64 engine_;
};

/// Exponential inter-arrival sample rounded to whole nanoseconds, never zero.
/// Throws std::invalid_argument when mean <= 0.
Duration draw_exponential(RngStream& stream, Duration mean);

/// Warnings and counted drops. Nothing is dropped silently; every drop lands here.
class Diagnostics {
public:
    struct Entry {
        SimTime time;
        std::string component;
        std::string message;
    };

    void report(SimTime time, std::string component, std::string message);
    [[nodiscard]] const std::vector<Entry>& entries() const { return entries_; }
    [[nodiscard]] std::size_t count() const { return total_; }

private:
    static constexpr std::size_t kMaxStored = 1000;
    std::vector<Entry> entries_;
    std::size_t total_ = 0;
};

class Kernel {
public:
    explicit Kernel(std::uint64_t seed = 0) : seed_{seed} {}

    [[nodiscard]] SimTime now() const { return now_; }
    [[nodiscard]] std::uint64_t seed() const { return seed_; }

    void schedule(Event event);
    void schedule(SimTime at, std::string target, std::function<void()> payload);
    void schedule_in(Duration delay, std::string target, std::function<void()> payload);

    /// Delivers every event with fire_time <= horizon and leaves now() == horizon.
    /// Events past the horizon stay queued and are never delivered.
    RunSummary run_until(SimTime horizon);

    [[nodiscard]] RngStream rng(std::string_view stream_id) const { return RngStream{seed_, stream_id}; }
    [[nodiscard]] std::size_t pending() const { return queue_.size(); }

    Diagnostics& diagnostics() { return diagnostics_; }
    [[nodiscard]] const Diagnostics& diagnostics() const { return diagnostics_; }

private:
    struct Later {
        bool operator()(const Event& a, const Event& b) const
        {
            if (a.fire_time != b.fire_time) return a.fire_time > b.fire_time;
            return a.sequence > b.sequence;
        }
    };

    std::uint64_t seed_;
    SimTime now_;
    std::uint64_t next_sequence_ = 0;
    std::uint64_t delivered_ = 0;
    std::priority_queue<Event, std::vector<Event>, Later> queue_;
    Diagnostics diagnostics_;
};

}  // namespace tsn5g
