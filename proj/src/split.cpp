#include "wpcurve/split.hpp"

#include "wpcurve/error.hpp"
#include "wpcurve/rng.hpp"

#include <cmath>
#include <numeric>

namespace wpc {

SplitIndices splitIndices(std::size_t n, const SplitConfig& config) {
    const auto& f = config.fractions;
    for (double frac : f) {
        if (!(frac > 0.0)) throw ConfigError("split fractions must all be positive");
    }
    if (std::abs(f[0] + f[1] + f[2] - 1.0) > 1e-9) {
        throw ConfigError("split fractions must sum to 1");
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    if (config.mode == SplitMode::Shuffled) {
        RngStream rng(config.seed, 0x53504C4954ULL); // "SPLIT" stream tag
        for (std::size_t i = n; i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(rng.nextU64() % i);
            std::swap(order[i - 1], order[j]);
        }
    }

    const auto nTrain = static_cast<std::size_t>(std::floor(f[0] * static_cast<double>(n)));
    const auto nVal = static_cast<std::size_t>(std::floor(f[1] * static_cast<double>(n)));
    if (nTrain == 0 || nVal == 0 || nTrain + nVal >= n) {
        throw DataError("split of " + std::to_string(n) +
                        " rows leaves an empty train, validation or test set");
    }

    SplitIndices out;
    out.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(nTrain));
    out.validation.assign(order.begin() + static_cast<std::ptrdiff_t>(nTrain),
                          order.begin() + static_cast<std::ptrdiff_t>(nTrain + nVal));
    out.test.assign(order.begin() + static_cast<std::ptrdiff_t>(nTrain + nVal), order.end());
    return out;
}

FeatureSet gatherRows(const FeatureSet& set, const std::vector<std::size_t>& indices) {
    FeatureSet out;
    out.spec = set.spec;
    out.hasPower = set.hasPower;
    out.x = Matrix(indices.size(), set.x.cols());
    out.powerKw.reserve(indices.size());
    out.windSpeed.reserve(indices.size());
    out.timestamps.reserve(indices.size());
    out.sourceRows.reserve(indices.size());
    for (std::size_t i = 0; i < indices.size(); ++i) {
        const std::size_t src = indices[i];
        for (std::size_t c = 0; c < set.x.cols(); ++c) out.x.at(i, c) = set.x.at(src, c);
        out.powerKw.push_back(set.powerKw[src]);
        out.windSpeed.push_back(set.windSpeed[src]);
        out.timestamps.push_back(set.timestamps[src]);
        out.sourceRows.push_back(set.sourceRows[src]);
    }
    return out;
}

SplitDataset splitDataset(const FeatureSet& set, const SplitConfig& config) {
    const SplitIndices idx = splitIndices(set.rows(), config);
    SplitDataset out;
    out.train = gatherRows(set, idx.train);
    out.validation = gatherRows(set, idx.validation);
    out.test = gatherRows(set, idx.test);
    out.config = config;
    return out;
}

} // namespace wpc
