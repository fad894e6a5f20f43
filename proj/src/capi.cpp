#include "wpcurve.h"

#include "wpcurve/checkpoint.hpp"
#include "wpcurve/config.hpp"
#include "wpcurve/error.hpp"
#include "wpcurve/mcdropout.hpp"
#include "wpcurve/pipeline.hpp"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <string>

namespace {

thread_local std::string gLastError;

wpc_status statusFor(const wpc::Error& e) {
    switch (e.category()) {
        case wpc::ErrorCategory::Config: return WPC_ERR_CONFIG;
        case wpc::ErrorCategory::Data: return WPC_ERR_DATA;
        case wpc::ErrorCategory::Numeric: return WPC_ERR_NUMERIC;
        case wpc::ErrorCategory::Internal: return WPC_ERR_INTERNAL;
    }
    return WPC_ERR_INTERNAL;
}

char* duplicate(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out) std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

template <typename Fn>
wpc_status guarded(Fn&& fn) {
    try {
        gLastError.clear();
        return fn();
    } catch (const wpc::Error& e) {
        gLastError = e.what();
        return statusFor(e);
    } catch (const std::exception& e) {
        gLastError = e.what();
        return WPC_ERR_INTERNAL;
    } catch (...) {
        gLastError = "unknown error";
        return WPC_ERR_INTERNAL;
    }
}

wpc_status runCommandJson(wpc::Command command, const char* configJson, char** summaryJson) {
    return guarded([&]() -> wpc_status {
        if (configJson == nullptr) {
            gLastError = "config_json must not be NULL";
            return WPC_ERR_CONFIG;
        }
        const wpc::RunConfig config = wpc::RunConfig::fromJsonText(configJson, command);
        const auto summary = wpc::runCommand(command, config);
        if (summaryJson) *summaryJson = duplicate(summary.dump(2));
        return WPC_OK;
    });
}

} // namespace

struct wpc_model {
    wpc::Checkpoint checkpoint;
    wpc::Network net;

    explicit wpc_model(wpc::Checkpoint c) : checkpoint(std::move(c)), net(checkpoint.buildNetwork()) {}
};

extern "C" {

const char* wpc_version(void) { return "0.1.0"; }

const char* wpc_last_error(void) { return gLastError.c_str(); }

wpc_status wpc_cmd_ingest(const char* config_json, char** summary_json) {
    return runCommandJson(wpc::Command::Ingest, config_json, summary_json);
}

wpc_status wpc_cmd_train(const char* config_json, char** summary_json) {
    return runCommandJson(wpc::Command::Train, config_json, summary_json);
}

wpc_status wpc_cmd_predict(const char* config_json, char** summary_json) {
    return runCommandJson(wpc::Command::Predict, config_json, summary_json);
}

wpc_status wpc_cmd_evaluate(const char* config_json, char** summary_json) {
    return runCommandJson(wpc::Command::Evaluate, config_json, summary_json);
}

wpc_status wpc_cmd_ablate(const char* config_json, char** summary_json) {
    return runCommandJson(wpc::Command::Ablate, config_json, summary_json);
}

wpc_status wpc_cmd_synth(const char* config_json, char** summary_json) {
    return runCommandJson(wpc::Command::Synth, config_json, summary_json);
}

void wpc_string_free(char* s) { std::free(s); }

wpc_status wpc_model_open(const char* checkpoint_path, wpc_model** out_model) {
    return guarded([&]() -> wpc_status {
        if (checkpoint_path == nullptr || out_model == nullptr) {
            gLastError = "checkpoint_path and out_model must not be NULL";
            return WPC_ERR_CONFIG;
        }
        *out_model = new wpc_model(wpc::loadCheckpoint(checkpoint_path));
        return WPC_OK;
    });
}

void wpc_model_close(wpc_model* model) { delete model; }

int32_t wpc_model_feature_count(const wpc_model* model) {
    if (!model) return -1;
    return static_cast<int32_t>(model->checkpoint.featureSpec.size());
}

const char* wpc_model_feature_name(const wpc_model* model, int32_t index) {
    if (!model || index < 0 ||
        static_cast<std::size_t>(index) >= model->checkpoint.featureSpec.size()) {
        return nullptr;
    }
    return wpc::featureName(model->checkpoint.featureSpec.features()[static_cast<std::size_t>(index)]);
}

wpc_status wpc_model_predict(const wpc_model* model, const double* features, int32_t n_rows,
                             int32_t n_features, int32_t n_passes, const char* mask_mode,
                             uint64_t seed, double* out_mean_kw, double* out_epistemic_var_kw2,
                             double* out_aleatoric_var_kw2) {
    return guarded([&]() -> wpc_status {
        if (!model || !features) {
            gLastError = "model and features must not be NULL";
            return WPC_ERR_CONFIG;
        }
        if (n_rows < 1) {
            gLastError = "n_rows must be >= 1";
            return WPC_ERR_CONFIG;
        }
        const auto expected = static_cast<int32_t>(model->checkpoint.featureSpec.size());
        if (n_features != expected) {
            gLastError = "model expects " + std::to_string(expected) + " features, got " +
                         std::to_string(n_features);
            return WPC_ERR_DATA;
        }

        wpc::McConfig mc;
        mc.passes = n_passes < 1 ? 1 : static_cast<std::size_t>(n_passes);
        mc.seed = seed;
        const std::string mode = mask_mode ? mask_mode : "hard";
        if (mode == "hard") {
            mc.maskMode = wpc::MaskMode::Hard;
        } else if (mode == "relaxed") {
            mc.maskMode = wpc::MaskMode::Relaxed;
        } else if (mode == "off") {
            mc.maskMode = wpc::MaskMode::Off;
        } else {
            gLastError = "mask_mode must be 'hard', 'relaxed' or 'off'";
            return WPC_ERR_CONFIG;
        }

        wpc::Matrix x(static_cast<std::size_t>(n_rows), static_cast<std::size_t>(n_features));
        std::copy(features, features + static_cast<std::size_t>(n_rows * n_features),
                  x.data().begin());

        const auto summaries = wpc::summarize(model->net, model->checkpoint.standardizer.apply(x),
                                              mc, model->checkpoint.standardizer);
        for (std::size_t i = 0; i < summaries.size(); ++i) {
            if (out_mean_kw) out_mean_kw[i] = summaries[i].meanKw;
            if (out_epistemic_var_kw2) out_epistemic_var_kw2[i] = summaries[i].epistemicVarKw2;
            if (out_aleatoric_var_kw2) out_aleatoric_var_kw2[i] = summaries[i].aleatoricVarKw2;
        }
        return WPC_OK;
    });
}

} // extern "C"
