#pragma once

#include "wpcurve/features.hpp"
#include "wpcurve/mcdropout.hpp"
#include "wpcurve/network.hpp"
#include "wpcurve/scada.hpp"
#include "wpcurve/split.hpp"
#include "wpcurve/synthetic.hpp"
#include "wpcurve/trainer.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace wpc {

enum class Command { Ingest, Train, Predict, Evaluate, Ablate, Synth };

const char* commandName(Command c);

struct DatasetConfig {
    std::string path;
    char delimiter = ',';
    ColumnMapping mapping = ColumnMapping::defaultLaHauteBorne();
    std::optional<std::string> turbine;
    std::optional<std::int64_t> fromTimestamp;
    std::optional<std::int64_t> toTimestamp;
};

struct AblationSets {
    std::vector<FeatureSpec> sets;
    std::size_t runsPerSet = 3;
};

/// One validated configuration tree per run. A single global seed feeds every
/// stochastic component (init, shuffling, dropout noise, MC passes, shuffled
/// splits); unknown keys anywhere in the document are rejected so typos
/// cannot silently fall back to defaults.
struct RunConfig {
    std::uint64_t seed = 0;
    std::string outputDir = "out";
    std::optional<DatasetConfig> dataset;
    FeatureSpec features = FeatureSpec::full();
    NetworkConfig network;
    TrainConfig training;
    McConfig mc;
    SplitConfig split;
    std::optional<std::string> nominalCurvePath;
    std::optional<std::string> checkpointPath;
    std::optional<std::string> vanillaCheckpointPath;
    std::optional<AblationSets> ablation;
    SyntheticScadaConfig synthetic;

    /// Parses and validates against the schema for `command`; checks that
    /// every referenced input path exists. Throws ConfigError with the
    /// offending key or path in the message.
    static RunConfig fromJsonText(const std::string& text, Command command);
};

} // namespace wpc
