#include "wpcurve/mcdropout.hpp"

#include "wpcurve/error.hpp"

#include <cmath>
#include <string>

namespace wpc {

void McConfig::validate() const {
    if (passes < 1) throw ConfigError("mc.passes must be >= 1");
}

std::vector<double> McDraws::muForRow(std::size_t row) const {
    std::vector<double> out;
    out.reserve(mu.size());
    for (const auto& draw : mu) out.push_back(draw[row]);
    return out;
}

std::vector<double> McDraws::logVarForRow(std::size_t row) const {
    std::vector<double> out;
    out.reserve(logVar.size());
    for (const auto& draw : logVar) out.push_back(draw[row]);
    return out;
}

McDraws mcSamples(const Network& net, const Matrix& x, const McConfig& config) {
    config.validate();
    McDraws draws;
    draws.mu.resize(config.passes);
    draws.logVar.resize(config.passes);

    const RngStream base(config.seed, 0x4D43ULL); // "MC"
    for (std::size_t b = 0; b < config.passes; ++b) {
        RngStream drawStream = base.derive(b);
        net.infer(x, config.maskMode, drawStream, draws.mu[b], draws.logVar[b]);
    }
    return draws;
}

double predictiveMean(std::span<const double> draws) {
    if (draws.empty()) throw DataError("predictive mean of an empty draw set");
    double acc = 0.0;
    for (double v : draws) acc += v;
    return acc / static_cast<double>(draws.size());
}

double epistemicVariance(std::span<const double> draws) {
    if (draws.empty()) throw DataError("epistemic variance of an empty draw set");
    const double mean = predictiveMean(draws);
    double acc = 0.0;
    for (double v : draws) {
        const double d = v - mean;
        acc += d * d;
    }
    return acc / static_cast<double>(draws.size());
}

double aleatoricVariance(std::span<const double> logVarDraws) {
    if (logVarDraws.empty()) throw DataError("aleatoric variance of an empty draw set");
    double acc = 0.0;
    for (std::size_t b = 0; b < logVarDraws.size(); ++b) {
        const double v = std::exp(logVarDraws[b]);
        if (!std::isfinite(v)) {
            throw NumericError("aleatoric variance overflow at draw " + std::to_string(b) +
                               " (log variance " + std::to_string(logVarDraws[b]) + ")");
        }
        acc += v;
    }
    return acc / static_cast<double>(logVarDraws.size());
}

double PredictiveSummary::epistemicStdKw() const { return std::sqrt(epistemicVarKw2); }
double PredictiveSummary::aleatoricStdKw() const { return std::sqrt(aleatoricVarKw2); }

std::vector<PredictiveSummary> summarize(const Network& net, const Matrix& standardizedX,
                                         const McConfig& config,
                                         const Standardizer& standardizer) {
    const McDraws draws = mcSamples(net, standardizedX, config);
    std::vector<PredictiveSummary> out(standardizedX.rows());
    for (std::size_t r = 0; r < standardizedX.rows(); ++r) {
        const auto mu = draws.muForRow(r);
        const auto lv = draws.logVarForRow(r);
        PredictiveSummary& s = out[r];
        s.meanKw = standardizer.destandardizeMean(predictiveMean(mu));
        s.epistemicVarKw2 = standardizer.destandardizeVariance(epistemicVariance(mu));
        s.aleatoricVarKw2 = standardizer.destandardizeVariance(aleatoricVariance(lv));
    }
    return out;
}

} // namespace wpc
