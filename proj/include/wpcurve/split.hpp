#pragma once

#include "wpcurve/features.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace wpc {

enum class SplitMode {
    Chronological,
    Shuffled,
};

struct SplitConfig {
    std::array<double, 3> fractions = {0.7, 0.15, 0.15}; // train, validation, test
    SplitMode mode = SplitMode::Chronological;
    std::uint64_t seed = 0; // shuffled mode only
};

struct SplitIndices {
    std::vector<std::size_t> train, validation, test;
};

/// Disjoint exhaustive partition of [0, n). Rounding rule: floor(train),
/// floor(validation), remainder to test. Chronological keeps input order;
/// shuffled permutes with a seed-deterministic Fisher-Yates first.
/// Throws DataError if any split would be empty.
SplitIndices splitIndices(std::size_t n, const SplitConfig& config);

struct SplitDataset {
    FeatureSet train, validation, test;
    SplitConfig config;
};

FeatureSet gatherRows(const FeatureSet& set, const std::vector<std::size_t>& indices);

SplitDataset splitDataset(const FeatureSet& set, const SplitConfig& config);

} // namespace wpc
