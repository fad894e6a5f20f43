#include "wpcurve/config.hpp"

#include "wpcurve/error.hpp"
#include "wpcurve/timestamp.hpp"

#include <json.hpp>

#include <filesystem>
#include <initializer_list>
#include <set>

namespace wpc {

namespace {

using nlohmann::json;

void rejectUnknownKeys(const json& obj, const char* context,
                       std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) {
        throw ConfigError(std::string("config section '") + context + "' must be an object");
    }
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, value] : obj.items()) {
        if (!ok.contains(key)) {
            throw ConfigError("unknown config key '" + key + "' in " + context);
        }
    }
}

double number(const json& obj, const char* context, const char* key, double fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number()) {
        throw ConfigError(std::string(context) + "." + key + " must be a number");
    }
    return obj[key].get<double>();
}

std::size_t count(const json& obj, const char* context, const char* key, std::size_t fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number_unsigned()) {
        throw ConfigError(std::string(context) + "." + key + " must be a non-negative integer");
    }
    return obj[key].get<std::size_t>();
}

std::string text(const json& obj, const char* context, const char* key,
                 const std::string& fallback = {}) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_string()) {
        throw ConfigError(std::string(context) + "." + key + " must be a string");
    }
    return obj[key].get<std::string>();
}

void requirePathExists(const std::string& path, const std::string& what) {
    if (!std::filesystem::exists(path)) {
        throw ConfigError(what + " path does not exist: " + path);
    }
}

Channel channelFromKey(const std::string& key) {
    static const std::vector<Channel> all = {
        Channel::Timestamp,      Channel::WindSpeedAvg,   Channel::WindSpeedStd,
        Channel::WindSpeedMax,   Channel::WindSpeedAltAvg, Channel::TemperatureAvg,
        Channel::DirectionAvg,   Channel::PitchAvg,       Channel::NacelleAvg,
        Channel::PowerAvg,       Channel::TurbineName,
    };
    for (Channel c : all) {
        if (key == channelName(c)) return c;
    }
    throw ConfigError("unknown column mapping channel '" + key + "'");
}

DatasetConfig parseDataset(const json& obj) {
    rejectUnknownKeys(obj, "dataset",
                      {"path", "delimiter", "columns", "turbine", "time_range"});
    DatasetConfig ds;
    ds.path = text(obj, "dataset", "path");
    if (ds.path.empty()) throw ConfigError("dataset.path is required");

    const std::string delim = text(obj, "dataset", "delimiter", ",");
    if (delim.size() != 1) throw ConfigError("dataset.delimiter must be a single character");
    ds.delimiter = delim[0];

    if (obj.contains("columns")) {
        const json& cols = obj["columns"];
        if (!cols.is_object()) throw ConfigError("dataset.columns must be an object");
        ColumnMapping mapping;
        for (const auto& [key, value] : cols.items()) {
            if (!value.is_string()) {
                throw ConfigError("dataset.columns." + key + " must be a string");
            }
            mapping.bind(channelFromKey(key), value.get<std::string>());
        }
        ds.mapping = mapping;
    }

    const std::string turbine = text(obj, "dataset", "turbine");
    if (!turbine.empty()) ds.turbine = turbine;

    if (obj.contains("time_range")) {
        const json& tr = obj["time_range"];
        rejectUnknownKeys(tr, "dataset.time_range", {"from", "to"});
        const std::string from = text(tr, "dataset.time_range", "from");
        const std::string to = text(tr, "dataset.time_range", "to");
        if (!from.empty()) {
            const auto t = parseIso8601(from);
            if (!t) throw ConfigError("dataset.time_range.from is not ISO-8601: " + from);
            ds.fromTimestamp = *t;
        }
        if (!to.empty()) {
            const auto t = parseIso8601(to);
            if (!t) throw ConfigError("dataset.time_range.to is not ISO-8601: " + to);
            ds.toTimestamp = *t;
        }
    }
    return ds;
}

NetworkConfig parseNetwork(const json& obj, NetworkConfig base) {
    rejectUnknownKeys(obj, "network",
                      {"hidden_width", "init_dropout_p", "temperature", "length_scale_sq",
                       "regularizer_variant"});
    base.hiddenWidth = count(obj, "network", "hidden_width", base.hiddenWidth);
    base.initDropoutP = number(obj, "network", "init_dropout_p", base.initDropoutP);
    base.temperature = number(obj, "network", "temperature", base.temperature);
    base.lengthScaleSq = number(obj, "network", "length_scale_sq", base.lengthScaleSq);
    const std::string variant = text(obj, "network", "regularizer_variant", "paper");
    if (variant == "paper") {
        base.regVariant = RegularizerVariant::Paper;
    } else if (variant == "reference") {
        base.regVariant = RegularizerVariant::Reference;
    } else {
        throw ConfigError("network.regularizer_variant must be 'paper' or 'reference'");
    }
    return base;
}

TrainConfig parseTraining(const json& obj, TrainConfig base) {
    rejectUnknownKeys(obj, "training",
                      {"epochs", "batch_size", "lr_start", "lr_end", "loss_mode",
                       "early_stopping", "patience"});
    base.epochs = count(obj, "training", "epochs", base.epochs);
    base.batchSize = count(obj, "training", "batch_size", base.batchSize);
    base.lrStart = number(obj, "training", "lr_start", base.lrStart);
    base.lrEnd = number(obj, "training", "lr_end", base.lrEnd);
    const std::string mode = text(obj, "training", "loss_mode", "heteroscedastic");
    if (mode == "heteroscedastic") {
        base.lossMode = LossMode::Heteroscedastic;
    } else if (mode == "mse") {
        base.lossMode = LossMode::Mse;
    } else {
        throw ConfigError("training.loss_mode must be 'heteroscedastic' or 'mse'");
    }
    if (obj.contains("early_stopping")) {
        if (!obj["early_stopping"].is_boolean()) {
            throw ConfigError("training.early_stopping must be a boolean");
        }
        base.earlyStopping = obj["early_stopping"].get<bool>();
    }
    base.patience = count(obj, "training", "patience", base.patience);
    return base;
}

McConfig parseMc(const json& obj, McConfig base) {
    rejectUnknownKeys(obj, "mc", {"passes", "mask_mode"});
    base.passes = count(obj, "mc", "passes", base.passes);
    const std::string mode = text(obj, "mc", "mask_mode", "hard");
    if (mode == "hard") {
        base.maskMode = MaskMode::Hard;
    } else if (mode == "relaxed") {
        base.maskMode = MaskMode::Relaxed;
    } else if (mode == "off") {
        base.maskMode = MaskMode::Off;
    } else {
        throw ConfigError("mc.mask_mode must be 'hard', 'relaxed' or 'off'");
    }
    return base;
}

SplitConfig parseSplit(const json& obj, SplitConfig base) {
    rejectUnknownKeys(obj, "split", {"mode", "fractions"});
    const std::string mode = text(obj, "split", "mode", "chronological");
    if (mode == "chronological") {
        base.mode = SplitMode::Chronological;
    } else if (mode == "shuffled") {
        base.mode = SplitMode::Shuffled;
    } else {
        throw ConfigError("split.mode must be 'chronological' or 'shuffled'");
    }
    if (obj.contains("fractions")) {
        const json& fr = obj["fractions"];
        if (!fr.is_array() || fr.size() != 3) {
            throw ConfigError("split.fractions must be an array of three numbers");
        }
        for (std::size_t i = 0; i < 3; ++i) {
            if (!fr[i].is_number()) throw ConfigError("split.fractions entries must be numbers");
            base.fractions[i] = fr[i].get<double>();
        }
    }
    return base;
}

AblationSets parseAblation(const json& obj) {
    rejectUnknownKeys(obj, "ablation", {"sets", "runs"});
    if (!obj.contains("sets") || !obj["sets"].is_array() || obj["sets"].empty()) {
        throw ConfigError("ablation.sets must be a non-empty array of feature-name arrays");
    }
    AblationSets out;
    for (const json& set : obj["sets"]) {
        if (!set.is_array() || set.empty()) {
            throw ConfigError("each ablation set must be a non-empty array of feature names");
        }
        std::vector<std::string> names;
        for (const json& name : set) {
            if (!name.is_string()) throw ConfigError("ablation feature names must be strings");
            names.push_back(name.get<std::string>());
        }
        out.sets.push_back(FeatureSpec::fromNames(names));
    }
    out.runsPerSet = count(obj, "ablation", "runs", 3);
    if (out.runsPerSet < 1) throw ConfigError("ablation.runs must be >= 1");
    return out;
}

SyntheticScadaConfig parseSynthetic(const json& obj, SyntheticScadaConfig base) {
    rejectUnknownKeys(obj, "synthetic",
                      {"rows", "dirty_fraction", "ti_coupling", "start", "turbine_name"});
    base.rows = count(obj, "synthetic", "rows", base.rows);
    base.dirtyFraction = number(obj, "synthetic", "dirty_fraction", base.dirtyFraction);
    base.tiCoupling = number(obj, "synthetic", "ti_coupling", base.tiCoupling);
    const std::string start = text(obj, "synthetic", "start");
    if (!start.empty()) {
        const auto t = parseIso8601(start);
        if (!t) throw ConfigError("synthetic.start is not ISO-8601: " + start);
        base.startTimestamp = *t;
    }
    const std::string turbine = text(obj, "synthetic", "turbine_name");
    if (!turbine.empty()) base.turbineName = turbine;
    return base;
}

} // namespace

const char* commandName(Command c) {
    switch (c) {
        case Command::Ingest: return "ingest";
        case Command::Train: return "train";
        case Command::Predict: return "predict";
        case Command::Evaluate: return "evaluate";
        case Command::Ablate: return "ablate";
        case Command::Synth: return "synth";
    }
    return "?";
}

RunConfig RunConfig::fromJsonText(const std::string& textIn, Command command) {
    json root;
    try {
        root = json::parse(textIn);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }

    rejectUnknownKeys(root, "config root",
                      {"seed", "output_dir", "dataset", "features", "network", "training", "mc",
                       "split", "nominal_curve", "checkpoint", "vanilla_checkpoint", "ablation",
                       "synthetic"});

    RunConfig cfg;
    if (root.contains("seed")) {
        if (!root["seed"].is_number_unsigned()) {
            throw ConfigError("seed must be a non-negative integer");
        }
        cfg.seed = root["seed"].get<std::uint64_t>();
    }
    cfg.outputDir = text(root, "config root", "output_dir", "out");

    if (root.contains("dataset")) cfg.dataset = parseDataset(root["dataset"]);
    if (root.contains("features")) {
        const json& f = root["features"];
        if (!f.is_array() || f.empty()) {
            throw ConfigError("features must be a non-empty array of feature names");
        }
        std::vector<std::string> names;
        for (const json& n : f) {
            if (!n.is_string()) throw ConfigError("features entries must be strings");
            names.push_back(n.get<std::string>());
        }
        cfg.features = FeatureSpec::fromNames(names);
    }
    if (root.contains("network")) cfg.network = parseNetwork(root["network"], cfg.network);
    if (root.contains("training")) cfg.training = parseTraining(root["training"], cfg.training);
    if (root.contains("mc")) cfg.mc = parseMc(root["mc"], cfg.mc);
    if (root.contains("split")) cfg.split = parseSplit(root["split"], cfg.split);
    if (root.contains("nominal_curve")) {
        cfg.nominalCurvePath = text(root, "config root", "nominal_curve");
    }
    if (root.contains("checkpoint")) {
        cfg.checkpointPath = text(root, "config root", "checkpoint");
    }
    if (root.contains("vanilla_checkpoint")) {
        cfg.vanillaCheckpointPath = text(root, "config root", "vanilla_checkpoint");
    }
    if (root.contains("ablation")) cfg.ablation = parseAblation(root["ablation"]);
    if (root.contains("synthetic")) cfg.synthetic = parseSynthetic(root["synthetic"], cfg.synthetic);

    // One seed drives everything.
    cfg.network.initSeed = cfg.seed;
    cfg.training.seed = cfg.seed;
    cfg.mc.seed = cfg.seed;
    cfg.split.seed = cfg.seed;
    cfg.synthetic.seed = cfg.seed;

    // Per-command requirements, then existence checks for referenced inputs.
    const bool needsDataset = command == Command::Ingest || command == Command::Train ||
                              command == Command::Predict || command == Command::Evaluate ||
                              command == Command::Ablate;
    if (needsDataset && !cfg.dataset) {
        throw ConfigError(std::string("command '") + commandName(command) +
                          "' requires a dataset section");
    }
    if ((command == Command::Predict || command == Command::Evaluate) && !cfg.checkpointPath) {
        throw ConfigError(std::string("command '") + commandName(command) +
                          "' requires a checkpoint path");
    }
    if (command == Command::Ablate && !cfg.ablation) {
        throw ConfigError("command 'ablate' requires an ablation section");
    }

    cfg.network.validate();
    cfg.training.validate();
    cfg.mc.validate();

    // Existence checks only for the inputs this command will read.
    if (needsDataset) requirePathExists(cfg.dataset->path, "dataset");
    if (command == Command::Predict || command == Command::Evaluate) {
        requirePathExists(*cfg.checkpointPath, "checkpoint");
    }
    if (command == Command::Evaluate) {
        if (cfg.vanillaCheckpointPath) {
            requirePathExists(*cfg.vanillaCheckpointPath, "vanilla checkpoint");
        }
        if (cfg.nominalCurvePath) requirePathExists(*cfg.nominalCurvePath, "nominal curve");
    }

    return cfg;
}

} // namespace wpc
