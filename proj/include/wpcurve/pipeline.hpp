#pragma once

#include "wpcurve/config.hpp"

#include <json.hpp>

namespace wpc {

/// Batch command implementations. Each validates its inputs, writes its
/// artifacts under config.outputDir and returns a summary document (also
/// written as <out>/<command>_summary.json). Artifacts are byte-identical
/// across runs for identical config and seed: no timestamps, round-trippable
/// number formatting, deterministic ordering.
nlohmann::ordered_json runIngest(const RunConfig& config);
nlohmann::ordered_json runTrain(const RunConfig& config);
nlohmann::ordered_json runPredict(const RunConfig& config);
nlohmann::ordered_json runEvaluate(const RunConfig& config);
nlohmann::ordered_json runAblate(const RunConfig& config);
nlohmann::ordered_json runSynth(const RunConfig& config);

nlohmann::ordered_json runCommand(Command command, const RunConfig& config);

} // namespace wpc
