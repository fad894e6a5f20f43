#include <doctest.h>

#include "wpcurve/checkpoint.hpp"
#include "wpcurve/error.hpp"
#include "wpcurve/loss.hpp"
#include "wpcurve/network.hpp"
#include "wpcurve/rng.hpp"
#include "wpcurve/trainer.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <vector>

using namespace wpc;

namespace {

struct LinearTask {
    Matrix trainX, valX;
    std::vector<double> trainY, valY;
};

// y = 3x + noise, then both sides shifted/scaled to standardized units the
// way the real pipeline feeds the network.
LinearTask linearTask(std::size_t nTrain, std::size_t nVal, double noiseStd,
                      std::uint64_t seed) {
    RngStream rng(seed, 0x11);
    LinearTask t;
    t.trainX = Matrix(nTrain, 1);
    t.valX = Matrix(nVal, 1);
    t.trainY.resize(nTrain);
    t.valY.resize(nVal);
    // x ~ U(0,1): mean 0.5, std sqrt(1/12); y = 3x+eps accordingly
    const double xStd = std::sqrt(1.0 / 12.0);
    const double yStd = std::sqrt(9.0 / 12.0 + noiseStd * noiseStd);
    auto fill = [&](Matrix& xs, std::vector<double>& ys, std::size_t n) {
        for (std::size_t i = 0; i < n; ++i) {
            const double x = rng.nextOpenUnit();
            xs.at(i, 0) = (x - 0.5) / xStd;
            ys[i] = (3.0 * x + noiseStd * rng.nextNormal() - 1.5) / yStd;
        }
    };
    fill(t.trainX, t.trainY, nTrain);
    fill(t.valX, t.valY, nVal);
    return t;
}

NetworkConfig smallNet(std::size_t width, std::uint64_t seed) {
    NetworkConfig cfg;
    cfg.inputDim = 1;
    cfg.hiddenWidth = width;
    cfg.initSeed = seed;
    return cfg;
}

std::string tempPath(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

} // namespace

TEST_CASE("heteroscedastic NLL hand cases") {
    const std::vector<double> y = {1.0};
    {
        const std::vector<double> mu = {1.0}, s = {0.0};
        CHECK(heteroscedasticNll(y, mu, s).mean == doctest::Approx(0.0));
    }
    {
        const std::vector<double> mu = {0.0}, s = {0.0};
        CHECK(heteroscedasticNll(y, mu, s).mean == doctest::Approx(0.5));
    }
    {
        const std::vector<double> y2 = {2.0}, mu = {0.0}, s = {std::log(4.0)};
        // 0.5 * (4/4 + ln 4)
        CHECK(heteroscedasticNll(y2, mu, s).mean ==
              doctest::Approx(0.5 * (1.0 + std::log(4.0))).epsilon(1e-12));
    }
    const std::vector<double> bad = {std::nan("")};
    const std::vector<double> mu = {0.0}, s = {0.0};
    CHECK_THROWS_AS(heteroscedasticNll(bad, mu, s), NumericError);
}

TEST_CASE("per-sample NLL in s is minimized at s = ln r^2") {
    for (double r : {0.5, 1.0, 2.0, 7.0}) {
        const double sStar = std::log(r * r);
        const double at = 0.5 * (std::exp(-sStar) * r * r + sStar);
        for (double ds = -2.0; ds <= 2.0; ds += 0.05) {
            if (std::abs(ds) < 1e-12) continue;
            const double s = sStar + ds;
            CHECK(0.5 * (std::exp(-s) * r * r + s) > at);
        }
    }
}

TEST_CASE("total loss decomposes into data term plus regularizer") {
    Network net = Network::init(smallNet(4, 5));
    std::vector<double> zeros(net.parameterCount(), 0.0);
    net.loadFlatParameters(zeros); // mu = 0, s = 0 regardless of masks
    const Matrix x = Matrix::fromRows({{0.3}, {0.7}});
    const std::vector<double> y = {0.0, 0.0};

    RngStream noise(1, 1);
    const LossBreakdown loss = totalLoss(net, x, y, 50, noise, LossMode::Heteroscedastic);
    CHECK(loss.dataTerm == doctest::Approx(0.0));
    CHECK(loss.total == doctest::Approx(net.dropoutRegularizerTotal(50)).epsilon(1e-12));

    // doubling n_train halves the KL contribution exactly
    CHECK(net.dropoutRegularizerTotal(100) ==
          doctest::Approx(0.5 * net.dropoutRegularizerTotal(50)).epsilon(1e-12));
}

TEST_CASE("total loss equals independently assembled NLL + KL sum on a width-4 net") {
    const Network net = Network::init(smallNet(4, 9));
    const Matrix x = Matrix::fromRows({{0.1}, {0.5}, {0.9}});
    const std::vector<double> y = {0.2, -0.1, 0.4};
    const RngStream noiseProto(77, 3);

    RngStream noise = noiseProto;
    const LossBreakdown loss = totalLoss(net, x, y, 30, noise, LossMode::Heteroscedastic);

    RngStream replay = noiseProto;
    std::vector<double> mu, s;
    net.infer(x, MaskMode::Relaxed, replay, mu, s);
    double expected = heteroscedasticNll(y, mu, s).mean;
    for (std::size_t layer = 0; layer < 4; ++layer) {
        expected += net.dropoutRegularizer(layer, 30);
    }
    CHECK(loss.total == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("learning rate schedule endpoints and geometric midpoint") {
    TrainConfig cfg;
    cfg.epochs = 201;
    CHECK(lrAt(0, cfg) == doctest::Approx(1e-3).epsilon(1e-12));
    CHECK(lrAt(200, cfg) == doctest::Approx(1e-5).epsilon(1e-12));
    CHECK(lrAt(100, cfg) == doctest::Approx(1e-4).epsilon(1e-9));

    cfg.epochs = 1;
    CHECK(lrAt(0, cfg) == doctest::Approx(1e-3));
    CHECK_THROWS_AS(lrAt(1, cfg), DataError);
}

TEST_CASE("adam: zero gradients leave parameters unchanged") {
    std::vector<double> p = {1.0, -2.0, 3.0};
    std::vector<double> g = {0.0, 0.0, 0.0};
    std::vector<std::span<double>> pb = {std::span(p)};
    std::vector<std::span<double>> gb = {std::span(g)};
    AdamState state;
    adamStep(pb, gb, state, 1e-3, 0.9, 0.999, 1e-8);
    CHECK(p[0] == 1.0);
    CHECK(p[1] == -2.0);
    CHECK(p[2] == 3.0);
}

TEST_CASE("adam: first step magnitude is the learning rate") {
    std::vector<double> p = {0.0};
    std::vector<double> g = {1.0};
    std::vector<std::span<double>> pb = {std::span(p)};
    std::vector<std::span<double>> gb = {std::span(g)};
    AdamState state;
    adamStep(pb, gb, state, 1e-3, 0.9, 0.999, 1e-8);
    CHECK(p[0] == doctest::Approx(-1e-3).epsilon(1e-6));
}

TEST_CASE("one epoch with full batch is exactly one optimizer step") {
    const LinearTask task = linearTask(10, 4, 0.0, 2);
    TrainConfig cfg;
    cfg.epochs = 1;
    cfg.batchSize = 10;
    cfg.seed = 3;

    // With one step of Adam at lr_start every parameter moves by at most lr.
    Network before = Network::init(smallNet(8, 3));
    const std::vector<double> p0 = before.flattenParameters();
    const TrainResult result = trainNetwork(std::move(before), task.trainX, task.trainY,
                                            task.valX, task.valY, cfg);
    const std::vector<double> p1 = result.net.flattenParameters();
    REQUIRE(p0.size() == p1.size());
    double maxMove = 0.0;
    for (std::size_t i = 0; i < p0.size(); ++i) {
        maxMove = std::max(maxMove, std::abs(p1[i] - p0[i]));
    }
    CHECK(maxMove > 0.0);
    CHECK(maxMove <= cfg.lrStart * 1.01);
    CHECK(result.history.epochs.size() == 1);
}

TEST_CASE("training fits a linear function") {
    const LinearTask task = linearTask(2048, 256, 0.05, 7);
    // Paced so that all 50 epochs stay on the descent: at the default rate
    // the 1-D task converges by epoch 15 and the tail is plateau jitter.
    TrainConfig cfg;
    cfg.epochs = 50;
    cfg.batchSize = 64;
    cfg.lrStart = 5e-5;
    cfg.lrEnd = 5e-6;
    cfg.seed = 7;
    NetworkConfig netCfg = smallNet(16, 7);
    netCfg.initDropoutP = 0.01;

    const TrainResult result =
        train(netCfg, task.trainX, task.trainY, task.valX, task.valY, cfg);
    CHECK(result.history.epochs.back().valMaeKw < 0.2);

    // loss decreases in at least 95% of epoch transitions
    std::size_t drops = 0;
    const auto& epochs = result.history.epochs;
    for (std::size_t e = 1; e < epochs.size(); ++e) {
        if (epochs[e].trainLoss < epochs[e - 1].trainLoss) ++drops;
    }
    CHECK(static_cast<double>(drops) / static_cast<double>(epochs.size() - 1) >= 0.95);

    // learned dropout probabilities never leave the clamp
    for (const auto& stats : epochs) {
        for (double p : stats.dropoutP) {
            CHECK(p >= 1e-4 - 1e-12);
            CHECK(p <= 0.9 + 1e-12);
        }
    }
}

TEST_CASE("identical seeds give bit-identical trajectories") {
    const LinearTask task = linearTask(64, 16, 0.1, 11);
    TrainConfig cfg;
    cfg.epochs = 5;
    cfg.batchSize = 16;
    cfg.seed = 13;

    const TrainResult a =
        train(smallNet(8, 13), task.trainX, task.trainY, task.valX, task.valY, cfg);
    const TrainResult b =
        train(smallNet(8, 13), task.trainX, task.trainY, task.valX, task.valY, cfg);
    CHECK(a.net.flattenParameters() == b.net.flattenParameters());
}

TEST_CASE("training aborts with a diagnostic when the loss diverges") {
    LinearTask task = linearTask(32, 8, 0.0, 17);
    for (double& v : task.trainY) v = 1e160; // residual^2 overflows immediately
    TrainConfig cfg;
    cfg.epochs = 2;
    cfg.batchSize = 32;
    try {
        train(smallNet(4, 1), task.trainX, task.trainY, task.valX, task.valY, cfg);
        FAIL("expected NumericError");
    } catch (const NumericError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("epoch") != std::string::npos);
        CHECK(msg.find("batch") != std::string::npos);
    }
}

TEST_CASE("frozen variance head reduces the NLL objective to the MSE one") {
    // With the log-variance head zeroed and frozen, the heteroscedastic loss
    // is 0.5 (y-mu)^2 exactly, so apart from near-floor dropout noise the fit
    // must agree with mse mode on the same seed.
    const LinearTask task = linearTask(256, 64, 0.0, 19);

    NetworkConfig netCfg = smallNet(16, 19);
    netCfg.initDropoutP = 1e-4; // start the gates at the clamp floor

    TrainConfig hetero;
    hetero.epochs = 80;
    hetero.batchSize = 256;
    hetero.seed = 19;
    hetero.freezeVarianceHead = true;

    Network heteroNet = Network::init(netCfg);
    {
        auto& head = heteroNet.logVarHeadMutable();
        for (double& w : head.weights.data()) w = 0.0;
        for (double& b : head.biases) b = 0.0;
    }
    const TrainResult a = trainNetwork(std::move(heteroNet), task.trainX, task.trainY, task.valX,
                                       task.valY, hetero);

    TrainConfig mse = hetero;
    mse.lossMode = LossMode::Mse;
    mse.freezeVarianceHead = false; // implied by mse mode anyway
    const TrainResult b =
        train(netCfg, task.trainX, task.trainY, task.valX, task.valY, mse);

    RngStream unused(0, 0);
    std::vector<double> muA, muB, lv;
    a.net.infer(task.valX, MaskMode::Off, unused, muA, lv);
    b.net.infer(task.valX, MaskMode::Off, unused, muB, lv);
    for (std::size_t i = 0; i < muA.size(); ++i) {
        CHECK(std::abs(muA[i] - muB[i]) < 1e-3);
    }
}

TEST_CASE("checkpoint round-trips bit-exactly") {
    const LinearTask task = linearTask(64, 16, 0.05, 23);
    TrainConfig cfg;
    cfg.epochs = 3;
    cfg.batchSize = 32;
    cfg.seed = 5;
    const TrainResult trained =
        train(smallNet(8, 5), task.trainX, task.trainY, task.valX, task.valY, cfg);

    const Standardizer st = Standardizer::fromMoments({0.5}, {0.3}, 100.0, 400.0);
    const Checkpoint saved = Checkpoint::fromTrained(trained.net, st, FeatureSpec({Feature::WS}),
                                                     cfg.seed, 3, LossMode::Heteroscedastic);
    const std::string path = tempPath("wpc_roundtrip.ckpt");
    saveCheckpoint(saved, path);
    const Checkpoint loaded = loadCheckpoint(path);

    CHECK(loaded.parameters == saved.parameters);
    CHECK(loaded.standardizer == saved.standardizer);
    CHECK(loaded.featureSpec == saved.featureSpec);
    CHECK(loaded.trainSeed == cfg.seed);

    const Network netA = saved.buildNetwork();
    const Network netB = loaded.buildNetwork();
    Matrix x(100, 1);
    RngStream rng(71, 0);
    for (double& v : x.data()) v = rng.nextNormal();
    RngStream unused(0, 0);
    std::vector<double> muA, lvA, muB, lvB;
    netA.infer(x, MaskMode::Off, unused, muA, lvA);
    netB.infer(x, MaskMode::Off, unused, muB, lvB);
    CHECK(muA == muB);
    CHECK(lvA == lvB);
    std::remove(path.c_str());
}

TEST_CASE("checkpoint integrity failures are distinct") {
    const Network net = Network::init(smallNet(2, 3));
    const Standardizer st = Standardizer::fromMoments({0.0}, {1.0}, 0.0, 1.0);
    const Checkpoint ckpt = Checkpoint::fromTrained(net, st, FeatureSpec({Feature::WS}), 0, 1,
                                                    LossMode::Heteroscedastic);
    const std::string path = tempPath("wpc_corrupt.ckpt");
    saveCheckpoint(ckpt, path);

    auto readAll = [&]() {
        std::ifstream in(path, std::ios::binary);
        return std::string((std::istreambuf_iterator<char>(in)),
                           std::istreambuf_iterator<char>());
    };
    auto writeAll = [&](const std::string& bytes) {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    };
    const std::string original = readAll();

    // flip one payload byte -> checksum mismatch, no partial model
    {
        std::string corrupted = original;
        corrupted[original.size() / 2] = static_cast<char>(corrupted[original.size() / 2] ^ 0x40);
        writeAll(corrupted);
        try {
            loadCheckpoint(path);
            FAIL("expected CheckpointError");
        } catch (const CheckpointError& e) {
            CHECK(e.fault() == CheckpointFault::ChecksumMismatch);
        }
    }
    // bump the format version -> unsupported version
    {
        std::string versioned = original;
        versioned[8] = static_cast<char>(9); // version field follows the 8-byte magic
        writeAll(versioned);
        try {
            loadCheckpoint(path);
            FAIL("expected CheckpointError");
        } catch (const CheckpointError& e) {
            CHECK(e.fault() == CheckpointFault::UnsupportedVersion);
        }
    }
    // truncation
    {
        writeAll(original.substr(0, original.size() - 5));
        try {
            loadCheckpoint(path);
            FAIL("expected CheckpointError");
        } catch (const CheckpointError& e) {
            CHECK(e.fault() == CheckpointFault::Truncated);
        }
    }
    // wrong magic
    {
        std::string magicless = original;
        magicless[0] = 'X';
        writeAll(magicless);
        try {
            loadCheckpoint(path);
            FAIL("expected CheckpointError");
        } catch (const CheckpointError& e) {
            CHECK(e.fault() == CheckpointFault::BadMagic);
        }
    }
    std::remove(path.c_str());
}
