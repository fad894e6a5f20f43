#include <doctest.h>

#include "wpcurve.h"

#include "wpcurve/config.hpp"
#include "wpcurve/csv.hpp"
#include "wpcurve/error.hpp"
#include "wpcurve/synthetic.hpp"

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <unistd.h>

using namespace wpc;
using nlohmann::json;

namespace {

namespace fs = std::filesystem;

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / fs::path("wpc_pipe_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string readFile(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

json baseConfig(const TempDir& dir, const std::string& scadaPath) {
    json cfg;
    cfg["seed"] = 11;
    cfg["output_dir"] = dir.file("out");
    cfg["dataset"]["path"] = scadaPath;
    cfg["features"] = {"WS", "TI", "G"};
    cfg["network"]["hidden_width"] = 8;
    cfg["training"]["epochs"] = 4;
    cfg["training"]["batch_size"] = 512;
    cfg["mc"]["passes"] = 8;
    return cfg;
}

std::string makeScada(const TempDir& dir, std::size_t rows, std::uint64_t seed) {
    SyntheticScadaConfig synth;
    synth.rows = rows;
    synth.seed = seed;
    const std::string path = dir.file("scada.csv");
    writeScadaCsv(path, synth);
    return path;
}

} // namespace

TEST_CASE("config: unknown keys are rejected at every level") {
    CHECK_THROWS_AS(RunConfig::fromJsonText(R"({"sede": 1})", Command::Synth), ConfigError);
    try {
        RunConfig::fromJsonText(R"({"training": {"epochz": 3}})", Command::Synth);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("epochz") != std::string::npos);
    }
    CHECK_THROWS_AS(RunConfig::fromJsonText("{not json", Command::Synth), ConfigError);
}

TEST_CASE("config: lr_end > lr_start names the field") {
    const std::string cfg = R"({"training": {"lr_start": 1e-5, "lr_end": 1e-3}})";
    try {
        RunConfig::fromJsonText(cfg, Command::Synth);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("lr_start") != std::string::npos);
    }
}

TEST_CASE("config: per-command requirements and path existence") {
    CHECK_THROWS_AS(RunConfig::fromJsonText(R"({"seed": 1})", Command::Train), ConfigError);
    CHECK_THROWS_AS(
        RunConfig::fromJsonText(R"({"dataset": {"path": "/definitely/not/here.csv"}})",
                                Command::Ingest),
        ConfigError);
    const std::string noCkpt = R"({"dataset": {"path": "/tmp"}})";
    CHECK_THROWS_AS(RunConfig::fromJsonText(noCkpt, Command::Predict), ConfigError);
}

TEST_CASE("config: single seed fans out to every component") {
    const RunConfig cfg = RunConfig::fromJsonText(R"({"seed": 42})", Command::Synth);
    CHECK(cfg.network.initSeed == 42);
    CHECK(cfg.training.seed == 42);
    CHECK(cfg.mc.seed == 42);
    CHECK(cfg.split.seed == 42);
    CHECK(cfg.synthetic.seed == 42);
}

TEST_CASE("c api: full synthetic pipeline, with byte-identical reruns") {
    TempDir dir;
    const std::string scada = makeScada(dir, 2500, 3);

    json cfg = baseConfig(dir, scada);

    // ingest
    char* summary = nullptr;
    REQUIRE(wpc_cmd_ingest(cfg.dump().c_str(), &summary) == WPC_OK);
    {
        const json s = json::parse(summary);
        wpc_string_free(summary);
        CHECK(s["rows_cleaned"].get<std::size_t>() > 2000);
        // generator targets the site statistics
        const double wsMean = s["variable_stats"]["wind_speed_ms"]["mean"].get<double>();
        CHECK(wsMean > 5.1);
        CHECK(wsMean < 7.8);
        const double tiMean = s["variable_stats"]["turbulence_intensity"]["mean"].get<double>();
        CHECK(tiMean > 0.08);
        CHECK(tiMean < 0.19);
        CHECK(fs::exists(dir.file("out/variable_stats.csv")));
        CHECK(fs::exists(dir.file("out/rejects.csv")));
    }

    // train twice -> byte-identical checkpoints
    REQUIRE(wpc_cmd_train(cfg.dump().c_str(), &summary) == WPC_OK);
    json trainSummary = json::parse(summary);
    wpc_string_free(summary);
    CHECK(trainSummary["final_val_mae_kw"].get<double>() > 0.0);
    const std::string ckptBytes = readFile(dir.file("out/model.ckpt"));
    CHECK(fs::exists(dir.file("out/history.csv")));

    json cfg2 = cfg;
    cfg2["output_dir"] = dir.file("out2");
    REQUIRE(wpc_cmd_train(cfg2.dump().c_str(), nullptr) == WPC_OK);
    CHECK(readFile(dir.file("out2/model.ckpt")) == ckptBytes);

    // predict with dropout off and B=1: epistemic std column is all zero
    json predictCfg = cfg;
    predictCfg["checkpoint"] = dir.file("out/model.ckpt");
    predictCfg["mc"] = {{"passes", 1}, {"mask_mode", "off"}};
    REQUIRE(wpc_cmd_predict(predictCfg.dump().c_str(), &summary) == WPC_OK);
    wpc_string_free(summary);
    {
        std::ifstream in(dir.file("out/predictions.csv"));
        std::string header;
        std::getline(in, header);
        CHECK(header ==
              "row_id,wind_speed,power_pred_kw,epistemic_std_kw,aleatoric_std_kw,power_actual_kw");
        std::string line;
        std::size_t rows = 0;
        while (std::getline(in, line)) {
            const auto fields = splitCsvLine(line);
            REQUIRE(fields.size() == 6);
            CHECK(std::abs(*parseDouble(fields[3])) < 1e-6);
            ++rows;
        }
        CHECK(rows > 0);
    }

    // same seed twice -> identical prediction files
    const std::string predBytes = readFile(dir.file("out/predictions.csv"));
    predictCfg["output_dir"] = dir.file("out3");
    REQUIRE(wpc_cmd_predict(predictCfg.dump().c_str(), nullptr) == WPC_OK);
    CHECK(readFile(dir.file("out3/predictions.csv")) == predBytes);

    // evaluate with a nominal curve
    const std::string nominalPath = dir.file("nominal.csv");
    writeNominalCurveCsv(nominalPath);
    json evalCfg = cfg;
    evalCfg["checkpoint"] = dir.file("out/model.ckpt");
    evalCfg["nominal_curve"] = nominalPath;
    REQUIRE(wpc_cmd_evaluate(evalCfg.dump().c_str(), &summary) == WPC_OK);
    {
        const json s = json::parse(summary);
        wpc_string_free(summary);
        CHECK(s["mae_model_kw"].get<double>() > 0.0);
        CHECK(s.contains("mae_nominal_kw"));
        CHECK(s.contains("improvement_vs_nominal_pct"));
        CHECK(fs::exists(dir.file("out/mae_table.csv")));
        CHECK(fs::exists(dir.file("out/bin_report.csv")));
        CHECK(fs::exists(dir.file("out/power_distribution.csv")));
        CHECK(fs::exists(dir.file("out/power_scatter_epistemic.svg")));
        CHECK(fs::exists(dir.file("out/bin_report.svg")));
        CHECK(fs::exists(dir.file("out/power_distribution.svg")));
    }

    // evaluate without nominal curve: warning, still OK
    json evalNoNominal = evalCfg;
    evalNoNominal.erase("nominal_curve");
    evalNoNominal["output_dir"] = dir.file("out4");
    REQUIRE(wpc_cmd_evaluate(evalNoNominal.dump().c_str(), &summary) == WPC_OK);
    {
        const json s = json::parse(summary);
        wpc_string_free(summary);
        CHECK(s.contains("warning"));
        CHECK(!s.contains("mae_nominal_kw"));
    }

    // ablate: one set, one run
    json ablateCfg = cfg;
    ablateCfg["ablation"] = {{"sets", {{"WS"}}}, {"runs", 1}};
    REQUIRE(wpc_cmd_ablate(ablateCfg.dump().c_str(), &summary) == WPC_OK);
    {
        const json s = json::parse(summary);
        wpc_string_free(summary);
        REQUIRE(s["rows"].size() == 1);
        CHECK(s["rows"][0]["feature_set"] == "WS");
        CHECK(fs::exists(dir.file("out/ablation.csv")));
        CHECK(fs::exists(dir.file("out/ablation.svg")));
    }
}

TEST_CASE("c api: exit-code contract") {
    TempDir dir;

    // config error -> 2
    CHECK(wpc_cmd_train(R"({"bogus": 1})", nullptr) == WPC_ERR_CONFIG);
    CHECK(std::string(wpc_last_error()).find("bogus") != std::string::npos);
    CHECK(wpc_cmd_train(nullptr, nullptr) == WPC_ERR_CONFIG);

    // data error -> 3: missing mapped column, message names it
    const std::string bad = dir.file("bad.csv");
    {
        std::ofstream out(bad);
        out << "Date_time,P_avg\n2017-01-01T00:00:00,5\n";
    }
    json cfg = baseConfig(dir, bad);
    CHECK(wpc_cmd_ingest(cfg.dump().c_str(), nullptr) == WPC_ERR_DATA);
    CHECK(std::string(wpc_last_error()).find("wind_speed_avg") != std::string::npos);

    // numeric error -> 4: divergence via an absurd learning rate on real data
    const std::string scada = makeScada(dir, 600, 5);
    json divergent = baseConfig(dir, scada);
    divergent["training"]["lr_start"] = 1e18;
    divergent["training"]["lr_end"] = 1e18;
    divergent["training"]["epochs"] = 30;
    const wpc_status st = wpc_cmd_train(divergent.dump().c_str(), nullptr);
    CHECK(st == WPC_ERR_NUMERIC);
}

TEST_CASE("c api: model handle predicts in physical units") {
    TempDir dir;
    const std::string scada = makeScada(dir, 1500, 9);
    json cfg = baseConfig(dir, scada);
    REQUIRE(wpc_cmd_train(cfg.dump().c_str(), nullptr) == WPC_OK);

    wpc_model* model = nullptr;
    REQUIRE(wpc_model_open(dir.file("out/model.ckpt").c_str(), &model) == WPC_OK);
    REQUIRE(model != nullptr);
    CHECK(wpc_model_feature_count(model) == 3);
    CHECK(std::string(wpc_model_feature_name(model, 0)) == "WS");
    CHECK(std::string(wpc_model_feature_name(model, 1)) == "TI");
    CHECK(std::string(wpc_model_feature_name(model, 2)) == "G");
    CHECK(wpc_model_feature_name(model, 3) == nullptr);

    const double rows[6] = {
        6.0, 0.12, 1.4, // moderate wind
        12.0, 0.12, 1.4, // stronger wind
    };
    double mean[2], epi[2], alea[2];
    REQUIRE(wpc_model_predict(model, rows, 2, 3, 16, "hard", 7, mean, epi, alea) == WPC_OK);
    for (int i = 0; i < 2; ++i) {
        CHECK(std::isfinite(mean[i]));
        CHECK(epi[i] >= 0.0);
        CHECK(alea[i] > 0.0);
    }

    // wrong feature count -> data error
    CHECK(wpc_model_predict(model, rows, 1, 2, 4, "hard", 7, mean, epi, alea) == WPC_ERR_DATA);
    // unknown mask mode -> config error
    CHECK(wpc_model_predict(model, rows, 2, 3, 4, "sideways", 7, mean, epi, alea) ==
          WPC_ERR_CONFIG);

    wpc_model_close(model);

    // opening garbage fails cleanly
    wpc_model* bad = nullptr;
    CHECK(wpc_model_open(scada.c_str(), &bad) == WPC_ERR_DATA);
    CHECK(bad == nullptr);
}

TEST_CASE("synth command writes a loadable dataset and curve") {
    TempDir dir;
    json cfg;
    cfg["seed"] = 21;
    cfg["output_dir"] = dir.file("synth");
    cfg["synthetic"]["rows"] = 500;
    cfg["synthetic"]["dirty_fraction"] = 0.05;

    char* summary = nullptr;
    REQUIRE(wpc_cmd_synth(cfg.dump().c_str(), &summary) == WPC_OK);
    wpc_string_free(summary);

    json ingestCfg;
    ingestCfg["output_dir"] = dir.file("out");
    ingestCfg["dataset"]["path"] = dir.file("synth/synthetic_scada.csv");
    char* ingestSummary = nullptr;
    REQUIRE(wpc_cmd_ingest(ingestCfg.dump().c_str(), &ingestSummary) == WPC_OK);
    const json s = json::parse(ingestSummary);
    wpc_string_free(ingestSummary);
    // the dirty rows all land in the reject report
    CHECK(s["rows_rejected"].get<std::size_t>() > 0);
}
