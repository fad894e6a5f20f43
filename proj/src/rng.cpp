#include "wpcurve/rng.hpp"

#include <cmath>
#include <numbers>

namespace wpc {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

// splitmix64 finalizer
std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
}

} // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t streamId)
    : seed_(seed), streamId_(streamId) {
    base_ = mix64(seed + kGolden) ^ mix64(streamId * kGolden + 0x853C49E6748FEA9BULL);
}

RngStream RngStream::derive(std::uint64_t tag) const {
    return {seed_, mix64(streamId_ * kGolden + tag + 1)};
}

std::uint64_t RngStream::nextU64() {
    ++counter_;
    return mix64(base_ + counter_ * kGolden);
}

double RngStream::nextOpenUnit() {
    // (i + 0.5) / 2^53 with i in [0, 2^53): min 2^-54, max 1 - 2^-54.
    const std::uint64_t bits = nextU64() >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

std::vector<double> RngStream::uniform(std::size_t n) {
    std::vector<double> out(n);
    for (double& v : out) v = nextOpenUnit();
    return out;
}

double RngStream::nextNormal() {
    const double u1 = nextOpenUnit();
    const double u2 = nextOpenUnit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

} // namespace wpc
