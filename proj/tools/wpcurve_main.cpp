// Command-line front end. Deliberately a pure client of the C API: it parses
// arguments, merges flag overrides into the JSON config and forwards the
// result to the shared library.

#include "wpcurve.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

namespace {

using nlohmann::json;

struct CommonArgs {
    std::string configPath;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> outDir;
    std::optional<std::string> profile;
    std::optional<std::string> checkpoint;
    std::optional<std::string> input;
};

void addCommonFlags(CLI::App* cmd, CommonArgs& args, bool configRequired) {
    auto* opt = cmd->add_option("-c,--config", args.configPath, "JSON config file");
    if (configRequired) opt->required();
    cmd->add_option("--seed", args.seed, "override the global seed");
    cmd->add_option("--out", args.outDir, "override the output directory");
    cmd->add_option("--profile", args.profile,
                    "network size profile: desk (width 64) or paper (width 1024)")
        ->check(CLI::IsMember({"desk", "paper"}));
}

int fail(const std::string& message, int code) {
    std::cerr << "wpcurve: " << message << "\n";
    return code;
}

std::optional<json> loadConfig(const CommonArgs& args) {
    json config = json::object();
    if (!args.configPath.empty()) {
        std::ifstream in(args.configPath);
        if (!in) return std::nullopt;
        std::ostringstream buf;
        buf << in.rdbuf();
        try {
            config = json::parse(buf.str());
        } catch (const json::parse_error& e) {
            std::cerr << "wpcurve: failed to parse " << args.configPath << ": " << e.what()
                      << "\n";
            return std::nullopt;
        }
    }
    // Flags win over config leaves.
    if (args.seed) config["seed"] = *args.seed;
    if (args.outDir) config["output_dir"] = *args.outDir;
    if (args.profile) config["network"]["hidden_width"] = *args.profile == "paper" ? 1024 : 64;
    if (args.checkpoint) config["checkpoint"] = *args.checkpoint;
    if (args.input) config["dataset"]["path"] = *args.input;
    return config;
}

using CommandFn = wpc_status (*)(const char*, char**);

int runCommand(CommandFn fn, const CommonArgs& args, bool printSummary) {
    const auto config = loadConfig(args);
    if (!config) return fail("cannot read config file: " + args.configPath, WPC_ERR_CONFIG);

    char* summary = nullptr;
    const wpc_status status = fn(config->dump().c_str(), &summary);
    if (status != WPC_OK) {
        return fail(wpc_last_error(), static_cast<int>(status));
    }
    if (summary) {
        if (printSummary) std::cout << summary << "\n";
        wpc_string_free(summary);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"wpcurve — probabilistic wind-turbine power curve estimation"};
    app.set_version_flag("--version", std::string(wpc_version()));
    app.require_subcommand(1);

    CommonArgs ingestArgs, trainArgs, predictArgs, evaluateArgs, ablateArgs, synthArgs;

    auto* ingest = app.add_subcommand("ingest", "load, clean and summarize a SCADA dataset");
    addCommonFlags(ingest, ingestArgs, true);

    auto* trainCmd = app.add_subcommand("train", "train a model and write a checkpoint");
    addCommonFlags(trainCmd, trainArgs, true);

    auto* predict = app.add_subcommand("predict", "Monte-Carlo predictions for new inputs");
    addCommonFlags(predict, predictArgs, true);
    predict->add_option("--checkpoint", predictArgs.checkpoint, "checkpoint file to load");
    predict->add_option("--input", predictArgs.input, "input CSV (overrides dataset.path)");

    auto* evaluate = app.add_subcommand("evaluate", "accuracy and uncertainty reports");
    addCommonFlags(evaluate, evaluateArgs, true);
    evaluate->add_option("--checkpoint", evaluateArgs.checkpoint, "checkpoint file to load");

    auto* ablate = app.add_subcommand("ablate", "train and compare feature sets");
    addCommonFlags(ablate, ablateArgs, true);

    auto* synth = app.add_subcommand("synth", "generate the bundled synthetic SCADA dataset");
    addCommonFlags(synth, synthArgs, false);
    std::optional<std::uint64_t> synthRows;
    synth->add_option("--rows", synthRows, "number of 10-minute rows to generate");

    CLI11_PARSE(app, argc, argv);

    if (ingest->parsed()) return runCommand(&wpc_cmd_ingest, ingestArgs, true);
    if (trainCmd->parsed()) return runCommand(&wpc_cmd_train, trainArgs, true);
    if (predict->parsed()) return runCommand(&wpc_cmd_predict, predictArgs, true);
    if (evaluate->parsed()) return runCommand(&wpc_cmd_evaluate, evaluateArgs, true);
    if (ablate->parsed()) return runCommand(&wpc_cmd_ablate, ablateArgs, true);
    if (synth->parsed()) {
        auto config = loadConfig(synthArgs);
        if (!config) return fail("cannot read config file: " + synthArgs.configPath,
                                 WPC_ERR_CONFIG);
        if (synthRows) (*config)["synthetic"]["rows"] = *synthRows;
        char* summary = nullptr;
        const wpc_status status = wpc_cmd_synth(config->dump().c_str(), &summary);
        if (status != WPC_OK) return fail(wpc_last_error(), static_cast<int>(status));
        if (summary) {
            std::cout << summary << "\n";
            wpc_string_free(summary);
        }
        return 0;
    }
    return 0;
}
