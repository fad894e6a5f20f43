#include "wpcurve/reports.hpp"

#include "wpcurve/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace wpc {

BinReport binnedUncertainty(const std::vector<PredictiveSummary>& predictions,
                            std::span<const double> windSpeed, double binWidth) {
    if (predictions.empty()) throw DataError("binned uncertainty: no predictions");
    if (predictions.size() != windSpeed.size()) {
        throw DataError("binned uncertainty: prediction/wind-speed length mismatch");
    }
    if (!(binWidth > 0.0)) throw DataError("binned uncertainty: bin width must be positive");

    struct Agg {
        double epi = 0.0;
        double alea = 0.0;
        std::size_t count = 0;
    };
    std::map<long, Agg> agg;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const long idx = static_cast<long>(std::floor(windSpeed[i] / binWidth));
        Agg& a = agg[idx];
        a.epi += predictions[i].epistemicStdKw();
        a.alea += predictions[i].aleatoricStdKw();
        ++a.count;
    }

    BinReport report;
    report.binWidth = binWidth;
    const double total = static_cast<double>(predictions.size());
    for (const auto& [idx, a] : agg) {
        BinReport::Bin bin;
        bin.center = (static_cast<double>(idx) + 0.5) * binWidth;
        bin.count = a.count;
        bin.frequency = static_cast<double>(a.count) / total;
        bin.meanEpistemicStdKw = a.epi / static_cast<double>(a.count);
        bin.meanAleatoricStdKw = a.alea / static_cast<double>(a.count);
        report.bins.push_back(bin);
    }

    std::vector<double> freq, epi;
    for (const auto& b : report.bins) {
        freq.push_back(b.frequency);
        epi.push_back(b.meanEpistemicStdKw);
    }
    report.spearmanFreqVsEpistemic = spearmanRank(freq, epi);
    return report;
}

PowerDistribution powerDistribution(std::span<const double> predictedKw,
                                    std::span<const double> actualKw, double binWidthKw) {
    if (predictedKw.empty() || actualKw.empty()) {
        throw DataError("power distribution: empty input");
    }
    if (!(binWidthKw > 0.0)) throw DataError("power distribution: bin width must be positive");

    double lo = predictedKw[0], hi = predictedKw[0];
    for (double v : predictedKw) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    for (double v : actualKw) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }

    const long first = static_cast<long>(std::floor(lo / binWidthKw));
    const long last = static_cast<long>(std::floor(hi / binWidthKw));
    const std::size_t nBins = static_cast<std::size_t>(last - first + 1);

    PowerDistribution dist;
    dist.binWidthKw = binWidthKw;
    dist.binLowEdgesKw.resize(nBins);
    dist.actualDensity.assign(nBins, 0.0);
    dist.predictedDensity.assign(nBins, 0.0);
    for (std::size_t i = 0; i < nBins; ++i) {
        dist.binLowEdgesKw[i] = static_cast<double>(first + static_cast<long>(i)) * binWidthKw;
    }

    auto fill = [&](std::span<const double> values, std::vector<double>& density) {
        for (double v : values) {
            const long idx = static_cast<long>(std::floor(v / binWidthKw)) - first;
            density[static_cast<std::size_t>(idx)] += 1.0;
        }
        for (double& d : density) d /= static_cast<double>(values.size());
    };
    fill(actualKw, dist.actualDensity);
    fill(predictedKw, dist.predictedDensity);

    double tv = 0.0;
    for (std::size_t i = 0; i < nBins; ++i) {
        tv += std::abs(dist.actualDensity[i] - dist.predictedDensity[i]);
    }
    dist.totalVariation = 0.5 * tv;
    return dist;
}

AblationReport runAblation(const std::vector<ScadaRecord>& records,
                           const std::vector<FeatureSpec>& featureSets,
                           const AblationConfig& config) {
    if (featureSets.empty()) throw ConfigError("ablation: no feature sets given");
    if (config.runsPerSet < 1) throw ConfigError("ablation: runs per set must be >= 1");
    {
        std::set<std::string> labels;
        for (const auto& spec : featureSets) {
            if (!labels.insert(spec.label()).second) {
                throw ConfigError("ablation: duplicate feature set '" + spec.label() + "'");
            }
        }
    }

    AblationReport report;
    report.runsPerSet = config.runsPerSet;

    for (const auto& spec : featureSets) {
        const FeatureSet features = buildFeatures(records, spec);
        const SplitDataset split = splitDataset(features, config.splitConfig);
        const Standardizer standardizer =
            Standardizer::fit(split.train.x, split.train.powerKw);

        const Matrix trainX = standardizer.apply(split.train.x);
        const Matrix valX = standardizer.apply(split.validation.x);
        const Matrix testX = standardizer.apply(split.test.x);
        const std::vector<double> trainY = standardizer.applyTarget(split.train.powerKw);
        const std::vector<double> valY = standardizer.applyTarget(split.validation.powerKw);

        AblationReport::Row row;
        row.label = spec.label();
        row.spec = spec;

        for (std::size_t run = 0; run < config.runsPerSet; ++run) {
            NetworkConfig netCfg = config.netConfig;
            netCfg.inputDim = spec.size();
            netCfg.initSeed = config.netConfig.initSeed + run;
            TrainConfig trainCfg = config.trainConfig;
            trainCfg.seed = config.trainConfig.seed + run;

            const TrainResult trained = train(netCfg, trainX, trainY, valX, valY, trainCfg,
                                              standardizer.targetStd());

            RngStream unused(0, 0);
            std::vector<double> mu, logVar;
            trained.net.infer(testX, MaskMode::Off, unused, mu, logVar);
            std::vector<double> predKw(mu.size());
            for (std::size_t i = 0; i < mu.size(); ++i) {
                predKw[i] = standardizer.destandardizeMean(mu[i]);
            }
            row.runMaeKw.push_back(mae(split.test.powerKw, predKw));
        }

        row.maeMeanKw = vectorMean(row.runMaeKw);
        row.maeStdKw = vectorStd(row.runMaeKw, row.maeMeanKw);
        report.rows.push_back(std::move(row));
    }
    return report;
}

} // namespace wpc
