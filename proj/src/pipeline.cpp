#include "wpcurve/pipeline.hpp"

#include "wpcurve/checkpoint.hpp"
#include "wpcurve/csv.hpp"
#include "wpcurve/error.hpp"
#include "wpcurve/mcdropout.hpp"
#include "wpcurve/metrics.hpp"
#include "wpcurve/powercurve.hpp"
#include "wpcurve/reports.hpp"
#include "wpcurve/svg.hpp"
#include "wpcurve/synthetic.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace wpc {

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

int logLevel() {
    // 0 = quiet, 1 = info, 2 = debug; from WPCURVE_LOG
    static const int level = [] {
        const char* env = std::getenv("WPCURVE_LOG");
        if (!env) return 0;
        const std::string v(env);
        if (v == "debug") return 2;
        if (v == "info") return 1;
        return 0;
    }();
    return level;
}

void logInfo(const std::string& message) {
    if (logLevel() >= 1) std::cerr << "[wpcurve] " << message << "\n";
}

std::string outPath(const RunConfig& config, const std::string& name) {
    fs::create_directories(config.outputDir);
    return (fs::path(config.outputDir) / name).string();
}

void writeSummaryFile(const RunConfig& config, const std::string& command,
                      const ordered_json& summary) {
    std::ofstream out(outPath(config, command + "_summary.json"));
    if (!out) throw DataError("cannot write summary for " + command);
    out << summary.dump(2) << "\n";
}

struct LoadedData {
    std::vector<ScadaRecord> cleaned;
    std::vector<RejectedRow> rejects; // parse rejects + cleaning drops
    std::size_t parsedRows = 0;
};

LoadedData loadAndClean(const DatasetConfig& ds, bool requirePower,
                        const std::optional<std::vector<Channel>>& requiredData = {}) {
    LoadOptions options;
    options.delimiter = ds.delimiter;
    options.requirePower = requirePower;
    options.requiredData = requiredData;
    options.turbineFilter = ds.turbine;
    options.fromTimestamp = ds.fromTimestamp;
    options.toTimestamp = ds.toTimestamp;

    LoadResult loaded = loadScada(ds.path, ds.mapping, options);

    CleanOptions cleanOpts;
    cleanOpts.requirePower = requirePower;
    cleanOpts.channels = requiredData;

    LoadedData out;
    out.parsedRows = loaded.records.size();
    CleanStats stats;
    out.cleaned = cleanRecords(loaded.records, &stats, cleanOpts);
    sortByTimestamp(out.cleaned);

    out.rejects = std::move(loaded.rejects);
    out.rejects.insert(out.rejects.end(), stats.dropped.begin(), stats.dropped.end());
    std::sort(out.rejects.begin(), out.rejects.end(),
              [](const RejectedRow& a, const RejectedRow& b) { return a.row < b.row; });
    return out;
}

struct PreparedSplit {
    SplitDataset split;
    Standardizer standardizer;
    Matrix trainX, valX, testX;
    std::vector<double> trainY, valY;
};

PreparedSplit prepare(const FeatureSet& features, const SplitConfig& splitCfg) {
    PreparedSplit out;
    out.split = splitDataset(features, splitCfg);
    out.standardizer = Standardizer::fit(out.split.train.x, out.split.train.powerKw);
    out.trainX = out.standardizer.apply(out.split.train.x);
    out.valX = out.standardizer.apply(out.split.validation.x);
    out.testX = out.standardizer.apply(out.split.test.x);
    out.trainY = out.standardizer.applyTarget(out.split.train.powerKw);
    out.valY = out.standardizer.applyTarget(out.split.validation.powerKw);
    return out;
}

void writeHistoryCsv(const std::string& path, const TrainHistory& history) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write training history: " + path);
    out << "epoch,loss,val_nll,val_mae,lr,p_1,p_2,p_3,p_4\n";
    for (std::size_t e = 0; e < history.epochs.size(); ++e) {
        const EpochStats& s = history.epochs[e];
        out << e << "," << formatDouble(s.trainLoss) << "," << formatDouble(s.valNll) << ","
            << formatDouble(s.valMaeKw) << "," << formatDouble(s.lr);
        for (double p : s.dropoutP) out << "," << formatDouble(p);
        out << "\n";
    }
}

void writePredictionsCsv(const std::string& path, const FeatureSet& features,
                         const std::vector<PredictiveSummary>& predictions, bool withActual) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write predictions: " + path);
    out << "row_id,wind_speed,power_pred_kw,epistemic_std_kw,aleatoric_std_kw";
    if (withActual) out << ",power_actual_kw";
    out << "\n";
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        out << features.sourceRows[i] << "," << formatDouble(features.windSpeed[i]) << ","
            << formatDouble(predictions[i].meanKw) << ","
            << formatDouble(predictions[i].epistemicStdKw()) << ","
            << formatDouble(predictions[i].aleatoricStdKw());
        if (withActual) out << "," << formatDouble(features.powerKw[i]);
        out << "\n";
    }
}

struct TrainedModel {
    Checkpoint checkpoint;
    TrainHistory history;
};

TrainedModel trainFromConfig(const RunConfig& config, const PreparedSplit& prep,
                             LossMode lossMode) {
    NetworkConfig netCfg = config.network;
    netCfg.inputDim = config.features.size();
    TrainConfig trainCfg = config.training;
    trainCfg.lossMode = lossMode;

    const EpochCallback progress = [&](std::size_t epoch, const EpochStats& stats,
                                       const Network&) {
        if (logLevel() >= 2 ||
            (logLevel() >= 1 &&
             (epoch + 1) % std::max<std::size_t>(1, trainCfg.epochs / 10) == 0)) {
            logInfo("epoch " + std::to_string(epoch + 1) + "/" + std::to_string(trainCfg.epochs) +
                    " loss " + formatDouble(stats.trainLoss) + " val MAE " +
                    formatDouble(stats.valMaeKw) + " kW");
        }
    };

    TrainResult result = train(netCfg, prep.trainX, prep.trainY, prep.valX, prep.valY, trainCfg,
                               prep.standardizer.targetStd(), progress);

    TrainedModel out;
    out.checkpoint = Checkpoint::fromTrained(
        result.net, prep.standardizer, config.features, trainCfg.seed,
        static_cast<std::uint32_t>(result.history.epochs.size()), lossMode);
    out.history = std::move(result.history);
    return out;
}

} // namespace

ordered_json runIngest(const RunConfig& config) {
    const LoadedData data = loadAndClean(*config.dataset, true);
    if (data.cleaned.empty()) {
        throw DataError("no usable records after cleaning: " + config.dataset->path);
    }

    // Table of per-variable statistics over the cleaned records.
    struct Row {
        const char* name;
        std::vector<double> values;
    };
    std::vector<Row> rows = {
        {"wind_speed_ms", {}}, {"temperature_c", {}},      {"direction_deg", {}},
        {"turbulence_intensity", {}}, {"gust_factor", {}}, {"wind_speed_ratio", {}},
        {"pitch_deg", {}},     {"nacelle_deg", {}},        {"power_kw", {}},
    };
    for (const ScadaRecord& r : data.cleaned) {
        rows[0].values.push_back(r.windSpeedAvg);
        rows[1].values.push_back(r.temperature);
        rows[2].values.push_back(r.direction);
        rows[3].values.push_back(turbulenceIntensity(r.windSpeedStd, r.windSpeedAvg));
        rows[4].values.push_back(gustFactor(r.windSpeedMax, r.windSpeedAvg));
        rows[5].values.push_back(windShearIndicator(r.windSpeedAvg, r.windSpeedAlt));
        rows[6].values.push_back(r.pitch);
        rows[7].values.push_back(r.nacelle);
        rows[8].values.push_back(r.power);
    }

    const std::string statsPath = outPath(config, "variable_stats.csv");
    std::ofstream stats(statsPath);
    if (!stats) throw DataError("cannot write variable stats: " + statsPath);
    stats << "variable,mean,std\n";
    ordered_json statsJson;
    for (const Row& row : rows) {
        const double mean = vectorMean(row.values);
        const double std = vectorStd(row.values, mean);
        stats << row.name << "," << formatDouble(mean) << "," << formatDouble(std) << "\n";
        statsJson[row.name] = {{"mean", mean}, {"std", std}};
    }

    const std::string rejectsPath = outPath(config, "rejects.csv");
    writeRejectsCsv(rejectsPath, data.rejects);

    ordered_json summary;
    summary["command"] = "ingest";
    summary["dataset"] = config.dataset->path;
    summary["rows_parsed"] = data.parsedRows;
    summary["rows_cleaned"] = data.cleaned.size();
    summary["rows_rejected"] = data.rejects.size();
    summary["variable_stats"] = statsJson;
    summary["artifacts"] = {{"variable_stats", statsPath}, {"rejects", rejectsPath}};
    writeSummaryFile(config, "ingest", summary);
    return summary;
}

ordered_json runTrain(const RunConfig& config) {
    const LoadedData data = loadAndClean(*config.dataset, true);
    logInfo("training on " + std::to_string(data.cleaned.size()) + " cleaned records");
    const FeatureSet features = buildFeatures(data.cleaned, config.features);
    const PreparedSplit prep = prepare(features, config.split);

    const TrainedModel trained = trainFromConfig(config, prep, config.training.lossMode);

    const std::string ckptPath = outPath(config, "model.ckpt");
    saveCheckpoint(trained.checkpoint, ckptPath);
    const std::string historyPath = outPath(config, "history.csv");
    writeHistoryCsv(historyPath, trained.history);

    ordered_json summary;
    summary["command"] = "train";
    summary["checkpoint"] = ckptPath;
    summary["history"] = historyPath;
    summary["epochs"] = trained.checkpoint.epochsCompleted;
    summary["loss_mode"] =
        config.training.lossMode == LossMode::Heteroscedastic ? "heteroscedastic" : "mse";
    summary["final_val_mae_kw"] = trained.history.epochs.back().valMaeKw;
    summary["final_dropout_p"] = trained.history.epochs.back().dropoutP;
    writeSummaryFile(config, "train", summary);
    return summary;
}

ordered_json runPredict(const RunConfig& config) {
    const Checkpoint ckpt = loadCheckpoint(*config.checkpointPath);
    const auto needed = channelsForSpec(ckpt.featureSpec);

    const LoadedData data = loadAndClean(*config.dataset, false, needed);
    if (data.cleaned.empty()) {
        throw DataError("no usable rows to predict on in " + config.dataset->path);
    }
    FeatureSet features = buildFeatures(data.cleaned, ckpt.featureSpec);

    const Network net = ckpt.buildNetwork();
    const Matrix x = ckpt.standardizer.apply(features.x);
    const std::vector<PredictiveSummary> predictions = summarize(net, x, config.mc,
                                                                 ckpt.standardizer);

    const bool withActual = features.hasPower;
    const std::string predPath = outPath(config, "predictions.csv");
    writePredictionsCsv(predPath, features, predictions, withActual);

    ordered_json summary;
    summary["command"] = "predict";
    summary["rows"] = predictions.size();
    summary["mc_passes"] = config.mc.passes;
    summary["predictions"] = predPath;
    writeSummaryFile(config, "predict", summary);
    return summary;
}

ordered_json runEvaluate(const RunConfig& config) {
    const Checkpoint ckpt = loadCheckpoint(*config.checkpointPath);
    const LoadedData data = loadAndClean(*config.dataset, true);
    FeatureSet features = buildFeatures(data.cleaned, ckpt.featureSpec);
    const SplitDataset split = splitDataset(features, config.split);

    const Network net = ckpt.buildNetwork();
    const Matrix testX = ckpt.standardizer.apply(split.test.x);
    const std::vector<PredictiveSummary> predictions =
        summarize(net, testX, config.mc, ckpt.standardizer);

    std::vector<double> predKw(predictions.size());
    for (std::size_t i = 0; i < predictions.size(); ++i) predKw[i] = predictions[i].meanKw;
    const std::vector<double>& actualKw = split.test.powerKw;

    ordered_json maeTable = ordered_json::array();
    const double modelMae = mae(actualKw, predKw);
    maeTable.push_back({{"predictor", "mc_dropout_nn"}, {"mae_kw", modelMae}});

    std::optional<double> vanillaMae;
    if (config.vanillaCheckpointPath) {
        const Checkpoint vanilla = loadCheckpoint(*config.vanillaCheckpointPath);
        if (vanilla.featureSpec != ckpt.featureSpec) {
            throw DataError("vanilla checkpoint was trained on a different feature set");
        }
        const Network vnet = vanilla.buildNetwork();
        RngStream unused(0, 0);
        std::vector<double> mu, logVar;
        vnet.infer(vanilla.standardizer.apply(split.test.x), MaskMode::Off, unused, mu, logVar);
        std::vector<double> vp(mu.size());
        for (std::size_t i = 0; i < mu.size(); ++i) {
            vp[i] = vanilla.standardizer.destandardizeMean(mu[i]);
        }
        vanillaMae = mae(actualKw, vp);
        maeTable.push_back({{"predictor", "vanilla_nn"}, {"mae_kw", *vanillaMae}});
    }

    const BinnedPowerCurve bins =
        BinnedPowerCurve::fit(split.train.windSpeed, split.train.powerKw, 0.5);
    std::vector<double> binsPred(actualKw.size());
    for (std::size_t i = 0; i < actualKw.size(); ++i) {
        binsPred[i] = bins.predict(split.test.windSpeed[i]);
    }
    const double binsMae = mae(actualKw, binsPred);
    maeTable.push_back({{"predictor", "method_of_bins"}, {"mae_kw", binsMae}});

    std::optional<double> nominalMae;
    bool nominalMissing = false;
    if (config.nominalCurvePath) {
        const NominalCurve nominal = NominalCurve::loadCsv(*config.nominalCurvePath);
        std::vector<double> nominalPred(actualKw.size());
        for (std::size_t i = 0; i < actualKw.size(); ++i) {
            nominalPred[i] = nominal.predict(split.test.windSpeed[i]);
        }
        nominalMae = mae(actualKw, nominalPred);
        maeTable.push_back({{"predictor", "nominal_curve"}, {"mae_kw", *nominalMae}});
    } else {
        nominalMissing = true;
        logInfo("no nominal curve configured; nominal baseline rows omitted");
    }

    const std::string maePath = outPath(config, "mae_table.csv");
    {
        std::ofstream out(maePath);
        if (!out) throw DataError("cannot write MAE table: " + maePath);
        out << "predictor,mae_kw,improvement_vs_nominal_pct\n";
        for (const auto& row : maeTable) {
            out << row["predictor"].get<std::string>() << ","
                << formatDouble(row["mae_kw"].get<double>()) << ",";
            if (nominalMae) {
                out << formatDouble(
                    improvementVsNominal(row["mae_kw"].get<double>(), *nominalMae));
            }
            out << "\n";
        }
    }

    const BinReport binReport = binnedUncertainty(predictions, split.test.windSpeed, 0.5);
    const std::string binPath = outPath(config, "bin_report.csv");
    {
        std::ofstream out(binPath);
        if (!out) throw DataError("cannot write bin report: " + binPath);
        out << "bin_center,frequency,mean_epistemic_std_kw,mean_aleatoric_std_kw,count\n";
        for (const auto& b : binReport.bins) {
            out << formatDouble(b.center) << "," << formatDouble(b.frequency) << ","
                << formatDouble(b.meanEpistemicStdKw) << ","
                << formatDouble(b.meanAleatoricStdKw) << "," << b.count << "\n";
        }
    }

    const PowerDistribution dist = powerDistribution(predKw, actualKw, 100.0);
    const std::string distPath = outPath(config, "power_distribution.csv");
    {
        std::ofstream out(distPath);
        if (!out) throw DataError("cannot write power distribution: " + distPath);
        out << "bin_low_kw,actual_density,predicted_density\n";
        for (std::size_t i = 0; i < dist.binLowEdgesKw.size(); ++i) {
            out << formatDouble(dist.binLowEdgesKw[i]) << ","
                << formatDouble(dist.actualDensity[i]) << ","
                << formatDouble(dist.predictedDensity[i]) << "\n";
        }
    }

    // Figure analogues
    std::vector<double> epiStd(predictions.size()), aleaStd(predictions.size());
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        epiStd[i] = predictions[i].epistemicStdKw();
        aleaStd[i] = predictions[i].aleatoricStdKw();
    }
    const std::string scatterEpiPath = outPath(config, "power_scatter_epistemic.svg");
    writeScatterSvg(scatterEpiPath, "Predicted power, shaded by epistemic std", "wind speed [m/s]",
                    "predicted power [kW]", split.test.windSpeed, predKw, epiStd,
                    "epistemic std [kW]");
    const std::string scatterAleaPath = outPath(config, "power_scatter_aleatoric.svg");
    writeScatterSvg(scatterAleaPath, "Predicted power, shaded by aleatoric std",
                    "wind speed [m/s]", "predicted power [kW]", split.test.windSpeed, predKw,
                    aleaStd, "aleatoric std [kW]");
    const std::string binSvgPath = outPath(config, "bin_report.svg");
    writeBinReportSvg(binSvgPath, binReport);
    const std::string distSvgPath = outPath(config, "power_distribution.svg");
    writePowerDistributionSvg(distSvgPath, dist);

    ordered_json summary;
    summary["command"] = "evaluate";
    summary["test_rows"] = actualKw.size();
    summary["mae_table"] = maeTable;
    summary["mae_model_kw"] = modelMae;
    if (vanillaMae) summary["mae_vanilla_kw"] = *vanillaMae;
    summary["mae_method_of_bins_kw"] = binsMae;
    if (nominalMae) {
        summary["mae_nominal_kw"] = *nominalMae;
        summary["improvement_vs_nominal_pct"] = improvementVsNominal(modelMae, *nominalMae);
    }
    if (nominalMissing) summary["warning"] = "nominal curve not configured; baseline omitted";
    if (binReport.spearmanFreqVsEpistemic) {
        summary["spearman_freq_vs_epistemic"] = *binReport.spearmanFreqVsEpistemic;
    }
    summary["total_variation_distance"] = dist.totalVariation;
    summary["artifacts"] = {{"mae_table", maePath},
                            {"bin_report", binPath},
                            {"power_distribution", distPath},
                            {"power_scatter_epistemic", scatterEpiPath},
                            {"power_scatter_aleatoric", scatterAleaPath},
                            {"bin_report_svg", binSvgPath},
                            {"power_distribution_svg", distSvgPath}};
    writeSummaryFile(config, "evaluate", summary);
    return summary;
}

ordered_json runAblate(const RunConfig& config) {
    const LoadedData data = loadAndClean(*config.dataset, true);

    AblationConfig ablCfg;
    ablCfg.netConfig = config.network;
    ablCfg.trainConfig = config.training;
    ablCfg.splitConfig = config.split;
    ablCfg.runsPerSet = config.ablation->runsPerSet;
    const AblationReport report = runAblation(data.cleaned, config.ablation->sets, ablCfg);

    const std::string ablPath = outPath(config, "ablation.csv");
    {
        std::ofstream out(ablPath);
        if (!out) throw DataError("cannot write ablation table: " + ablPath);
        out << "feature_set,mae_mean_kw,mae_std_kw,runs\n";
        for (const auto& row : report.rows) {
            out << row.label << "," << formatDouble(row.maeMeanKw) << ","
                << formatDouble(row.maeStdKw) << "," << row.runMaeKw.size() << "\n";
        }
    }
    const std::string ablSvgPath = outPath(config, "ablation.svg");
    writeAblationSvg(ablSvgPath, report);

    ordered_json summary;
    summary["command"] = "ablate";
    summary["runs_per_set"] = report.runsPerSet;
    ordered_json rows = ordered_json::array();
    for (const auto& row : report.rows) {
        rows.push_back({{"feature_set", row.label},
                        {"mae_mean_kw", row.maeMeanKw},
                        {"mae_std_kw", row.maeStdKw}});
    }
    summary["rows"] = rows;
    summary["artifacts"] = {{"ablation", ablPath}, {"ablation_svg", ablSvgPath}};
    writeSummaryFile(config, "ablate", summary);
    return summary;
}

ordered_json runSynth(const RunConfig& config) {
    const std::string scadaPath = outPath(config, "synthetic_scada.csv");
    writeScadaCsv(scadaPath, config.synthetic);
    const std::string nominalPath = outPath(config, "mm82_nominal.csv");
    writeNominalCurveCsv(nominalPath);

    ordered_json summary;
    summary["command"] = "synth";
    summary["rows"] = config.synthetic.rows;
    summary["artifacts"] = {{"scada", scadaPath}, {"nominal_curve", nominalPath}};
    writeSummaryFile(config, "synth", summary);
    return summary;
}

ordered_json runCommand(Command command, const RunConfig& config) {
    switch (command) {
        case Command::Ingest: return runIngest(config);
        case Command::Train: return runTrain(config);
        case Command::Predict: return runPredict(config);
        case Command::Evaluate: return runEvaluate(config);
        case Command::Ablate: return runAblate(config);
        case Command::Synth: return runSynth(config);
    }
    throw ConfigError("unknown command");
}

} // namespace wpc
