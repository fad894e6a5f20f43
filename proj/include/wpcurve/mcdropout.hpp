#pragma once

#include "wpcurve/matrix.hpp"
#include "wpcurve/network.hpp"
#include "wpcurve/standardizer.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace wpc {

struct McConfig {
    std::size_t passes = 100; // B, the number of stochastic forward evaluations
    std::uint64_t seed = 0;
    /// Hard Bernoulli masks are the default at inference; the relaxation is a
    /// training device. Off gives the deterministic single-path network.
    MaskMode maskMode = MaskMode::Hard;

    void validate() const;
};

/// Raw head outputs of B stochastic forward passes, draws[b] aligned with the
/// input rows. Draw b uses its own derived stream, so draw k is identical
/// whether B is 50 or 500.
struct McDraws {
    std::vector<std::vector<double>> mu;     // [draw][row]
    std::vector<std::vector<double>> logVar; // [draw][row]

    std::size_t passes() const noexcept { return mu.size(); }
    std::size_t rows() const noexcept { return mu.empty() ? 0 : mu.front().size(); }

    std::vector<double> muForRow(std::size_t row) const;
    std::vector<double> logVarForRow(std::size_t row) const;
};

McDraws mcSamples(const Network& net, const Matrix& x, const McConfig& config);

/// Arithmetic mean over draws. Throws DataError on an empty draw set.
double predictiveMean(std::span<const double> draws);

/// Population variance over draws (divisor B, not B-1).
double epistemicVariance(std::span<const double> draws);

/// Mean of exp(s_b) over draws: the Monte-Carlo average of the variance head.
/// Throws NumericError naming the draw if exp overflows.
double aleatoricVariance(std::span<const double> logVarDraws);

/// Point prediction with both uncertainty components, in physical units.
struct PredictiveSummary {
    double meanKw = 0.0;
    double epistemicVarKw2 = 0.0;
    double aleatoricVarKw2 = 0.0;

    double epistemicStdKw() const;
    double aleatoricStdKw() const;
};

/// Runs the Monte-Carlo loop on standardized inputs and destandardizes:
/// mean via the target affine map, variances by (target std)^2.
std::vector<PredictiveSummary> summarize(const Network& net, const Matrix& standardizedX,
                                         const McConfig& config,
                                         const Standardizer& standardizer);

} // namespace wpc
