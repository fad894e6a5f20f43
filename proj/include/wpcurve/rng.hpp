#pragma once

#include <cstdint>
#include <vector>

namespace wpc {

/// Counter-based random stream. A draw is a pure function of
/// (seed, stream_id, counter), so any stream can be replayed or handed to an
/// independent unit of work without sequential coupling. Same (seed, stream)
/// always reproduces the same sequence bit for bit.
class RngStream {
public:
    RngStream() : RngStream(0, 0) {}
    RngStream(std::uint64_t seed, std::uint64_t streamId);

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t streamId() const noexcept { return streamId_; }

    /// Independent stream keyed off this one; does not disturb the counter.
    RngStream derive(std::uint64_t tag) const;

    std::uint64_t nextU64();

    /// Uniform draw strictly inside (0,1): endpoints excluded so log(u) and
    /// log(1-u) stay finite.
    double nextOpenUnit();

    std::vector<double> uniform(std::size_t n);

    /// Standard normal via Box-Muller; consumes two uniform draws per call.
    double nextNormal();

private:
    std::uint64_t seed_ = 0;
    std::uint64_t streamId_ = 0;
    std::uint64_t base_ = 0;
    std::uint64_t counter_ = 0;
};

} // namespace wpc
