#include "wpcurve/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace wpc {

namespace {

constexpr char kMagic[8] = {'W', 'P', 'C', 'K', 'P', 'T', '0', '\n'};
constexpr std::uint32_t kFormatVersion = 1;
constexpr std::uint64_t kFnvOffset = 1469598103934665603ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

static_assert(std::endian::native == std::endian::little,
              "checkpoint writer assumes a little-endian host");

class Writer {
public:
    explicit Writer(std::ostream& out) : out_(out) {}

    template <typename T>
    void put(T value) {
        char bytes[sizeof(T)];
        std::memcpy(bytes, &value, sizeof(T));
        out_.write(bytes, sizeof(T));
        for (char b : bytes) {
            checksum_ ^= static_cast<unsigned char>(b);
            checksum_ *= kFnvPrime;
        }
    }

    std::uint64_t checksum() const noexcept { return checksum_; }

private:
    std::ostream& out_;
    std::uint64_t checksum_ = kFnvOffset;
};

class Reader {
public:
    explicit Reader(std::istream& in) : in_(in) {}

    template <typename T>
    T get() {
        char bytes[sizeof(T)];
        in_.read(bytes, sizeof(T));
        if (!in_) {
            throw CheckpointError(CheckpointFault::Truncated, "checkpoint file is truncated");
        }
        for (char b : bytes) {
            checksum_ ^= static_cast<unsigned char>(b);
            checksum_ *= kFnvPrime;
        }
        T value;
        std::memcpy(&value, bytes, sizeof(T));
        return value;
    }

    std::uint64_t rawU64() {
        char bytes[8];
        in_.read(bytes, 8);
        if (!in_) {
            throw CheckpointError(CheckpointFault::Truncated, "checkpoint file is truncated");
        }
        std::uint64_t value;
        std::memcpy(&value, bytes, 8);
        return value;
    }

    std::uint64_t checksum() const noexcept { return checksum_; }

private:
    std::istream& in_;
    std::uint64_t checksum_ = kFnvOffset;
};

} // namespace

Network Checkpoint::buildNetwork() const {
    Network net = Network::init(netConfig);
    net.loadFlatParameters(parameters);
    return net;
}

Checkpoint Checkpoint::fromTrained(const Network& net, const Standardizer& standardizer,
                                   const FeatureSpec& spec, std::uint64_t trainSeed,
                                   std::uint32_t epochsCompleted, LossMode lossMode) {
    Checkpoint c;
    c.netConfig = net.config();
    c.parameters = net.flattenParameters();
    c.standardizer = standardizer;
    c.featureSpec = spec;
    c.trainSeed = trainSeed;
    c.epochsCompleted = epochsCompleted;
    c.lossMode = lossMode;
    return c;
}

void saveCheckpoint(const Checkpoint& c, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open checkpoint for writing: " + path);

    out.write(kMagic, sizeof(kMagic));
    Writer w(out);
    w.put(kFormatVersion);

    w.put(static_cast<std::uint32_t>(c.netConfig.inputDim));
    w.put(static_cast<std::uint32_t>(c.netConfig.hiddenWidth));
    w.put(c.netConfig.initDropoutP);
    w.put(c.netConfig.temperature);
    w.put(c.netConfig.lengthScaleSq);
    w.put(c.netConfig.initSeed);
    w.put(static_cast<std::uint8_t>(c.netConfig.regVariant));

    const auto featureNamesList = c.featureSpec.features();
    w.put(static_cast<std::uint32_t>(featureNamesList.size()));
    for (Feature f : featureNamesList) w.put(static_cast<std::uint8_t>(f));

    w.put(static_cast<std::uint32_t>(c.standardizer.featureCount()));
    for (double v : c.standardizer.featureMeans()) w.put(v);
    for (double v : c.standardizer.featureStds()) w.put(v);
    w.put(c.standardizer.targetMean());
    w.put(c.standardizer.targetStd());

    w.put(static_cast<std::uint64_t>(c.parameters.size()));
    for (double v : c.parameters) w.put(v);

    w.put(c.trainSeed);
    w.put(c.epochsCompleted);
    w.put(static_cast<std::uint8_t>(c.lossMode));

    const std::uint64_t checksum = w.checksum();
    out.write(reinterpret_cast<const char*>(&checksum), sizeof(checksum));
    if (!out) throw DataError("short write while saving checkpoint: " + path);
}

Checkpoint loadCheckpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open checkpoint: " + path);

    char magic[sizeof(kMagic)];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
        throw CheckpointError(CheckpointFault::BadMagic,
                              "'" + path + "' is not a wpcurve checkpoint");
    }

    Reader r(in);
    const auto version = r.get<std::uint32_t>();
    if (version != kFormatVersion) {
        throw CheckpointError(CheckpointFault::UnsupportedVersion,
                              "checkpoint format version " + std::to_string(version) +
                                  " is not supported (expected " +
                                  std::to_string(kFormatVersion) + ")");
    }

    Checkpoint c;
    c.netConfig.inputDim = r.get<std::uint32_t>();
    c.netConfig.hiddenWidth = r.get<std::uint32_t>();
    c.netConfig.initDropoutP = r.get<double>();
    c.netConfig.temperature = r.get<double>();
    c.netConfig.lengthScaleSq = r.get<double>();
    c.netConfig.initSeed = r.get<std::uint64_t>();
    c.netConfig.regVariant = static_cast<RegularizerVariant>(r.get<std::uint8_t>());

    const auto featureCount = r.get<std::uint32_t>();
    if (featureCount > 64) {
        throw CheckpointError(CheckpointFault::Truncated, "implausible feature count");
    }
    std::vector<Feature> features;
    features.reserve(featureCount);
    for (std::uint32_t i = 0; i < featureCount; ++i) {
        features.push_back(static_cast<Feature>(r.get<std::uint8_t>()));
    }
    c.featureSpec = FeatureSpec(std::move(features));

    const auto stdCount = r.get<std::uint32_t>();
    if (stdCount != featureCount) {
        throw CheckpointError(CheckpointFault::Truncated,
                              "standardizer width disagrees with feature spec");
    }
    std::vector<double> means(stdCount), stds(stdCount);
    for (auto& v : means) v = r.get<double>();
    for (auto& v : stds) v = r.get<double>();
    const double targetMean = r.get<double>();
    const double targetStd = r.get<double>();
    c.standardizer = Standardizer::fromMoments(std::move(means), std::move(stds), targetMean,
                                               targetStd);

    const auto paramCount = r.get<std::uint64_t>();
    if (paramCount > (1ULL << 32)) {
        throw CheckpointError(CheckpointFault::Truncated, "implausible parameter count");
    }
    c.parameters.resize(paramCount);
    for (auto& v : c.parameters) v = r.get<double>();

    c.trainSeed = r.get<std::uint64_t>();
    c.epochsCompleted = r.get<std::uint32_t>();
    c.lossMode = static_cast<LossMode>(r.get<std::uint8_t>());

    const std::uint64_t expected = r.checksum();
    const std::uint64_t stored = r.rawU64();
    if (stored != expected) {
        throw CheckpointError(CheckpointFault::ChecksumMismatch,
                              "checkpoint checksum mismatch, file is corrupt: " + path);
    }
    return c;
}

} // namespace wpc
