#pragma once

#include "wpcurve/error.hpp"
#include "wpcurve/features.hpp"
#include "wpcurve/network.hpp"
#include "wpcurve/standardizer.hpp"
#include "wpcurve/trainer.hpp"

#include <cstdint>
#include <string>

namespace wpc {

/// Everything needed to reproduce predictions: network configuration and
/// parameters (gate logits included), the standardizer, the feature spec and
/// the training provenance. Round-trips bit-exactly.
struct Checkpoint {
    NetworkConfig netConfig;
    std::vector<double> parameters; // flattening contract of Network::parameterBlocks
    Standardizer standardizer;
    FeatureSpec featureSpec;
    std::uint64_t trainSeed = 0;
    std::uint32_t epochsCompleted = 0;
    LossMode lossMode = LossMode::Heteroscedastic;

    Network buildNetwork() const;
    static Checkpoint fromTrained(const Network& net, const Standardizer& standardizer,
                                  const FeatureSpec& spec, std::uint64_t trainSeed,
                                  std::uint32_t epochsCompleted, LossMode lossMode);
};

enum class CheckpointFault {
    BadMagic,
    UnsupportedVersion,
    Truncated,
    ChecksumMismatch,
};

/// Checkpoint files carry a magic tag, a format version, little-endian 64-bit
/// floats and a trailing FNV-1a checksum; loading never returns a partial
/// model.
class CheckpointError : public DataError {
public:
    CheckpointError(CheckpointFault fault, std::string message)
        : DataError(std::move(message)), fault_(fault) {}
    CheckpointFault fault() const noexcept { return fault_; }

private:
    CheckpointFault fault_;
};

void saveCheckpoint(const Checkpoint& checkpoint, const std::string& path);
Checkpoint loadCheckpoint(const std::string& path);

} // namespace wpc
