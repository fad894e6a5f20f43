#pragma once

#include "wpcurve/features.hpp"
#include "wpcurve/mcdropout.hpp"
#include "wpcurve/metrics.hpp"
#include "wpcurve/split.hpp"
#include "wpcurve/trainer.hpp"

#include <optional>
#include <string>
#include <vector>

namespace wpc {

/// Wind-speed-binned uncertainty profile: how often samples land in a bin vs
/// how uncertain the model is there.
struct BinReport {
    struct Bin {
        double center = 0.0;
        double frequency = 0.0; // relative, sums to 1 over occupied bins
        double meanEpistemicStdKw = 0.0;
        double meanAleatoricStdKw = 0.0;
        std::size_t count = 0;
    };
    double binWidth = 0.0;
    std::vector<Bin> bins; // occupied bins, ascending center
    /// Rank correlation between frequency and mean epistemic std across
    /// occupied bins; empty when fewer than two bins are occupied.
    std::optional<double> spearmanFreqVsEpistemic;
};

BinReport binnedUncertainty(const std::vector<PredictiveSummary>& predictions,
                            std::span<const double> windSpeed, double binWidth);

/// Normalized histograms of predicted and actual power on a shared binning,
/// plus their total-variation distance in [0,1].
struct PowerDistribution {
    double binWidthKw = 0.0;
    std::vector<double> binLowEdgesKw;
    std::vector<double> actualDensity;
    std::vector<double> predictedDensity;
    double totalVariation = 0.0;
};

PowerDistribution powerDistribution(std::span<const double> predictedKw,
                                    std::span<const double> actualKw, double binWidthKw);

/// Per-feature-set accuracy, averaged over repeated training runs with
/// run-indexed seeds.
struct AblationReport {
    struct Row {
        std::string label;
        FeatureSpec spec;
        double maeMeanKw = 0.0;
        double maeStdKw = 0.0;
        std::vector<double> runMaeKw;
    };
    std::vector<Row> rows;
    std::size_t runsPerSet = 0;
};

struct AblationConfig {
    NetworkConfig netConfig; // inputDim is overwritten per feature set
    TrainConfig trainConfig; // seed is offset per run
    SplitConfig splitConfig;
    std::size_t runsPerSet = 3;
};

/// Trains one model per (feature set, run) on the same cleaned records and
/// reports test MAE in kW. Throws ConfigError on duplicate set labels.
AblationReport runAblation(const std::vector<ScadaRecord>& records,
                           const std::vector<FeatureSpec>& featureSets,
                           const AblationConfig& config);

} // namespace wpc
