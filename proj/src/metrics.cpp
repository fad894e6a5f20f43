#include "wpcurve/metrics.hpp"

#include "wpcurve/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

namespace wpc {

double mae(std::span<const double> yTrue, std::span<const double> yPred) {
    if (yTrue.size() != yPred.size()) {
        throw DataError("MAE: length mismatch (" + std::to_string(yTrue.size()) + " vs " +
                        std::to_string(yPred.size()) + ")");
    }
    if (yTrue.empty()) throw DataError("MAE of empty vectors");
    double acc = 0.0;
    for (std::size_t i = 0; i < yTrue.size(); ++i) acc += std::abs(yTrue[i] - yPred[i]);
    return acc / static_cast<double>(yTrue.size());
}

double improvementVsNominal(double modelMae, double nominalMae) {
    if (!(nominalMae > 0.0)) {
        throw DataError("improvement vs nominal needs a strictly positive nominal MAE");
    }
    return 100.0 * (nominalMae - modelMae) / nominalMae;
}

namespace {

std::vector<double> averageRanks(std::span<const double> values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        const double avg = 0.5 * static_cast<double>(i + j) + 1.0; // 1-based
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

} // namespace

std::optional<double> spearmanRank(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw DataError("spearman: length mismatch");
    if (a.size() < 2) return std::nullopt;

    const auto ra = averageRanks(a);
    const auto rb = averageRanks(b);
    const double meanA = std::accumulate(ra.begin(), ra.end(), 0.0) / static_cast<double>(ra.size());
    const double meanB = std::accumulate(rb.begin(), rb.end(), 0.0) / static_cast<double>(rb.size());

    double cov = 0.0, varA = 0.0, varB = 0.0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        const double da = ra[i] - meanA;
        const double db = rb[i] - meanB;
        cov += da * db;
        varA += da * da;
        varB += db * db;
    }
    if (varA <= 0.0 || varB <= 0.0) return 0.0; // fully tied on one side
    return cov / std::sqrt(varA * varB);
}

} // namespace wpc
