#include "tsn5g/simkernel.hpp"

#include <cmath>
#include <numbers>

namespace tsn5g {

namespace {

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s)
{
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::string_view stream_id)
    : seed_{seed}, stream_id_{stream_id}, engine_{splitmix64(splitmix64(seed) ^ fnv1a(stream_id))}
{
}

double RngStream::uniform()
{
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RngStream::standard_normal()
{
    // Box-Muller; the second variate is discarded so every call consumes two draws.
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Duration draw_exponential(RngStream& stream, Duration mean)
{
    if (mean.count() <= 0) throw std::invalid_argument("exponential mean must be positive");
    const double u = stream.uniform();
    const double sample = -std::log1p(-u) * static_cast<double>(mean.count());
    const auto ns = static_cast<std::int64_t>(std::llround(sample));
    return Duration{ns < 1 ? 1 : ns};
}

void Diagnostics::report(SimTime time, std::string component, std::string message)
{
    ++total_;
    if (entries_.size() < kMaxStored) entries_.push_back({time, std::move(component), std::move(message)});
}

void Kernel::schedule(Event event)
{
    if (event.fire_time < now_) {
        throw SchedulingError("event for '" + event.target + "' scheduled at " +
                              std::to_string(event.fire_time.ns()) + " ns, before now " +
                              std::to_string(now_.ns()) + " ns");
    }
    event.sequence = next_sequence_++;
    queue_.push(std::move(event));
}

void Kernel::schedule(SimTime at, std::string target, std::function<void()> payload)
{
    schedule(Event{at, 0, std::move(target), std::move(payload)});
}

void Kernel::schedule_in(Duration delay, std::string target, std::function<void()> payload)
{
    if (delay.count() < 0) throw SchedulingError("negative delay for '" + target + "'");
    schedule(now_ + delay, std::move(target), std::move(payload));
}

RunSummary Kernel::run_until(SimTime horizon)
{
    std::uint64_t count = 0;
    while (!queue_.empty() && queue_.top().fire_time <= horizon) {
        Event event = queue_.top();
        queue_.pop();
        require_invariant(event.fire_time >= now_, "simulated time went backwards");
        now_ = event.fire_time;
        ++count;
        ++delivered_;
        if (event.payload) event.payload();
    }
    if (horizon > now_) now_ = horizon;
    return RunSummary{count, now_};
}

}  // namespace tsn5g
