#include <doctest.h>

#include "wpcurve/error.hpp"
#include "wpcurve/gradcheck.hpp"
#include "wpcurve/loss.hpp"
#include "wpcurve/network.hpp"
#include "wpcurve/trainer.hpp"

#include <cmath>
#include <vector>

using namespace wpc;

namespace {

NetworkConfig smallConfig(std::size_t inputDim, std::size_t width, std::uint64_t seed) {
    NetworkConfig cfg;
    cfg.inputDim = inputDim;
    cfg.hiddenWidth = width;
    cfg.initSeed = seed;
    return cfg;
}

Matrix randomInputs(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    RngStream rng(seed, 0xBEEF);
    Matrix x(rows, cols);
    for (double& v : x.data()) v = rng.nextNormal();
    return x;
}

std::vector<double> flattenGradients(NetworkGradients& g) {
    std::vector<double> flat;
    for (const auto& block : g.blocks()) flat.insert(flat.end(), block.begin(), block.end());
    return flat;
}

double logitOf(double p) { return std::log(p / (1.0 - p)); }

} // namespace

TEST_CASE("init is deterministic and shaped by the skip connection") {
    const NetworkConfig cfg = smallConfig(12, 64, 5);
    const Network a = Network::init(cfg);
    const Network b = Network::init(cfg);
    CHECK(a.flattenParameters() == b.flattenParameters());

    CHECK(a.hidden(3).weights.rows() == 64);
    CHECK(a.hidden(3).weights.cols() == 64 + 12);
    CHECK(a.meanHead().weights.rows() == 1);
    CHECK(a.logVarHead().weights.rows() == 1);
}

TEST_CASE("initial outputs stay small on standardized inputs") {
    const Network net = Network::init(smallConfig(4, 64, 11));
    const Matrix x = randomInputs(1000, 4, 3);
    RngStream unused(0, 0);
    std::vector<double> mu, logVar;
    net.infer(x, MaskMode::Off, unused, mu, logVar);
    for (std::size_t i = 0; i < mu.size(); ++i) {
        CHECK(std::abs(mu[i]) < 5.0);
        CHECK(std::abs(logVar[i]) < 5.0);
    }
}

TEST_CASE("zero network maps everything to zero") {
    Network net = Network::init(smallConfig(3, 8, 1));
    std::vector<double> zeros(net.parameterCount(), 0.0);
    net.loadFlatParameters(zeros);
    RngStream unused(0, 0);
    std::vector<double> mu, logVar;
    net.infer(randomInputs(5, 3, 9), MaskMode::Off, unused, mu, logVar);
    for (double v : mu) CHECK(v == 0.0);
    for (double v : logVar) CHECK(v == 0.0);
}

TEST_CASE("off-mode forward is deterministic") {
    const Network net = Network::init(smallConfig(2, 16, 7));
    const Matrix x = randomInputs(4, 2, 21);
    RngStream s1(1, 1), s2(2, 2);
    std::vector<double> mu1, lv1, mu2, lv2;
    net.infer(x, MaskMode::Off, s1, mu1, lv1);
    net.infer(x, MaskMode::Off, s2, mu2, lv2);
    CHECK(mu1 == mu2);
    CHECK(lv1 == lv2);
}

TEST_CASE("width-8 forward matches a scalar-arithmetic oracle") {
    const std::size_t d = 3, w = 8;
    const Network net = Network::init(smallConfig(d, w, 13));
    const Matrix x = randomInputs(1, d, 17);

    RngStream unused(0, 0);
    std::vector<double> mu, logVar;
    net.infer(x, MaskMode::Off, unused, mu, logVar);

    // Independent recomputation with plain scalar loops.
    std::vector<double> h(x.row(0).begin(), x.row(0).end());
    std::vector<double> input(h);
    for (std::size_t layer = 0; layer < 4; ++layer) {
        std::vector<double> in = h;
        if (layer == 3) {
            in.insert(in.end(), input.begin(), input.end());
        }
        const DenseLayer& L = net.hidden(layer);
        std::vector<double> out(L.outDim());
        for (std::size_t o = 0; o < L.outDim(); ++o) {
            double acc = L.biases[o];
            for (std::size_t k = 0; k < L.inDim(); ++k) acc += L.weights.at(o, k) * in[k];
            out[o] = std::tanh(acc);
        }
        h = out;
    }
    double muOracle = net.meanHead().biases[0];
    double lvOracle = net.logVarHead().biases[0];
    for (std::size_t k = 0; k < w; ++k) {
        muOracle += net.meanHead().weights.at(0, k) * h[k];
        lvOracle += net.logVarHead().weights.at(0, k) * h[k];
    }
    CHECK(std::abs(mu[0] - muOracle) < 1e-12);
    CHECK(std::abs(logVar[0] - lvOracle) < 1e-12);
}

TEST_CASE("mask modes: off is ones, ranges hold, hard frequency matches p") {
    DropoutGate gate{logitOf(0.4), 0.1};
    RngStream rng(99, 0);

    const auto off = sampleConcreteMask(gate, 50, rng, MaskMode::Off);
    for (double m : off) CHECK(m == 1.0);

    const double cap = 1.0 / (1.0 - 0.4);
    const auto relaxed = sampleConcreteMask(gate, 20000, rng, MaskMode::Relaxed);
    for (double m : relaxed) {
        CHECK(m > 0.0);
        CHECK(m < cap);
    }

    const auto hard = sampleConcreteMask(gate, 100000, rng, MaskMode::Hard);
    std::size_t zeros = 0;
    for (double m : hard) {
        const bool isZero = m == 0.0;
        const bool isScaled = std::abs(m - cap) < 1e-12;
        CHECK((isZero || isScaled));
        zeros += isZero ? 1 : 0;
    }
    const double zeroFraction = static_cast<double>(zeros) / 100000.0;
    CHECK(std::abs(zeroFraction - 0.4) < 0.01);
}

TEST_CASE("relaxed mask at the p floor stays near one on the central u range") {
    const double lp = gateLogitMin(); // p = 1e-4
    const double keep = 1.0 / (1.0 - 1e-4);
    for (double u = 0.01; u < 0.99; u += 0.005) {
        CHECK(std::abs(concreteKeepMask(lp, 0.1, u) - keep) < 1e-2);
    }
}

TEST_CASE("scaled keep mask preserves expected activation") {
    DropoutGate gate{logitOf(0.3), 0.1};
    RngStream rng(123, 0);
    for (MaskMode mode : {MaskMode::Hard, MaskMode::Relaxed}) {
        const auto mask = sampleConcreteMask(gate, 200000, rng, mode);
        double mean = 0.0;
        for (double m : mask) mean += m;
        mean /= static_cast<double>(mask.size());
        CHECK(std::abs(mean - 1.0) < 0.01);
    }
}

TEST_CASE("masks of consecutive layers are uncorrelated") {
    DropoutGate gate{logitOf(0.4), 0.1};
    RngStream rng(7, 7);
    const auto a = sampleConcreteMask(gate, 100000, rng, MaskMode::Hard);
    const auto b = sampleConcreteMask(gate, 100000, rng, MaskMode::Hard);
    double meanA = 0.0, meanB = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        meanA += a[i];
        meanB += b[i];
    }
    meanA /= static_cast<double>(a.size());
    meanB /= static_cast<double>(b.size());
    double cov = 0.0, varA = 0.0, varB = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        cov += (a[i] - meanA) * (b[i] - meanB);
        varA += (a[i] - meanA) * (a[i] - meanA);
        varB += (b[i] - meanB) * (b[i] - meanB);
    }
    CHECK(std::abs(cov / std::sqrt(varA * varB)) < 0.02);
}

TEST_CASE("backward rejects hard-mode traces") {
    const Network net = Network::init(smallConfig(2, 8, 3));
    RngStream rng(1, 1);
    const ForwardResult fwd = net.forward(randomInputs(3, 2, 5), MaskMode::Hard, rng);
    const std::vector<double> d(3, 1.0);
    CHECK_THROWS_AS(net.backward(fwd.trace, d, d), DataError);
}

TEST_CASE("zero upstream gradients give zero parameter gradients") {
    const Network net = Network::init(smallConfig(2, 8, 3));
    RngStream rng(1, 1);
    const ForwardResult fwd = net.forward(randomInputs(3, 2, 5), MaskMode::Relaxed, rng);
    const std::vector<double> zeros(3, 0.0);
    NetworkGradients g = net.backward(fwd.trace, zeros, zeros);
    for (const auto& block : g.blocks()) {
        for (double v : block) CHECK(v == 0.0);
    }
}

TEST_CASE("full loss gradient matches central differences, width 16") {
    const std::size_t n = 8, d = 3;
    Network net = Network::init(smallConfig(d, 16, 23));
    const Matrix x = randomInputs(n, d, 29);
    RngStream yRng(31, 0);
    std::vector<double> y(n);
    for (double& v : y) v = yRng.nextNormal();

    const RngStream noiseProto(555, 42);
    const std::size_t nTrain = 100;

    NetworkGradients grads;
    {
        RngStream noise = noiseProto;
        lossAndGradients(net, x, y, nTrain, noise, LossMode::Heteroscedastic, false, grads);
    }
    std::vector<double> analytic = flattenGradients(grads);

    const std::vector<double> theta = net.flattenParameters();
    const auto f = [&](std::span<const double> params) {
        Network probe = net;
        probe.loadFlatParameters(params);
        RngStream noise = noiseProto; // frozen noise: same counter state each call
        return totalLoss(probe, x, y, nTrain, noise, LossMode::Heteroscedastic).total;
    };
    CHECK(gradCheck(f, theta, analytic, 1e-6) < 1e-4);
}

TEST_CASE("gate-logit gradient alone matches finite differences with common noise") {
    const std::size_t n = 6, d = 2;
    Network net = Network::init(smallConfig(d, 12, 41));
    const Matrix x = randomInputs(n, d, 43);
    std::vector<double> y(n, 0.3);
    const RngStream noiseProto(99, 7);

    NetworkGradients grads;
    {
        RngStream noise = noiseProto;
        lossAndGradients(net, x, y, 50, noise, LossMode::Heteroscedastic, false, grads);
    }

    const std::vector<double> theta = net.flattenParameters();
    const std::size_t gateOffset = theta.size() - 4;
    std::vector<double> gateLogits(theta.begin() + gateOffset, theta.end());

    const auto f = [&](std::span<const double> logits) {
        Network probe = net;
        std::vector<double> params = theta;
        for (std::size_t i = 0; i < 4; ++i) params[gateOffset + i] = logits[i];
        probe.loadFlatParameters(params);
        RngStream noise = noiseProto;
        return totalLoss(probe, x, y, 50, noise, LossMode::Heteroscedastic).total;
    };
    CHECK(gradCheck(f, gateLogits, grads.gateLogit, 1e-6) < 1e-4);
}

TEST_CASE("dropout regularizer: entropy of a fair coin, zero weights, k=1") {
    Network net = Network::init(smallConfig(1, 1, 2));
    std::vector<double> zeros(net.parameterCount(), 0.0); // gate logits 0 -> p = 0.5
    net.loadFlatParameters(zeros);
    const std::size_t nTrain = 10;
    // paper form: (l^2 p/2 ||W||^2 - k H(1-p)) / n; here the weight term is 0
    // and the entropy reaches its ln 2 maximum
    CHECK(net.dropoutRegularizer(0, nTrain) ==
          doctest::Approx(-std::log(2.0) / 10.0).epsilon(1e-12));
}

TEST_CASE("dropout regularizer: entropy term vanishes toward the p floor") {
    Network net = Network::init(smallConfig(1, 1, 2));
    std::vector<double> params(net.parameterCount(), 0.0);
    params[params.size() - 4] = gateLogitMin(); // p -> 1e-4
    params[params.size() - 3] = gateLogitMin();
    params[params.size() - 2] = gateLogitMin();
    params[params.size() - 1] = gateLogitMin();
    net.loadFlatParameters(params);
    CHECK(std::abs(net.dropoutRegularizer(0, 1)) < 0.01);
}

TEST_CASE("dropout regularizer matches the hand formula") {
    const std::size_t d = 4, w = 64;
    Network net = Network::init(smallConfig(d, w, 3));
    std::vector<double> params(net.parameterCount(), 0.0);
    // W_1 is w x d = 256 entries; 0.625^2 * 256 = 100
    for (std::size_t i = 0; i < w * d; ++i) params[i] = 0.625;
    const std::size_t gateOffset = params.size() - 4;
    for (std::size_t i = 0; i < 4; ++i) params[gateOffset + i] = logitOf(0.2);
    net.loadFlatParameters(params);

    const double p = 0.2;
    const double h = -(1.0 - p) * std::log(1.0 - p) - p * std::log(p); // H(1-p) = H(p)
    const double expected = (0.5 * 1e-4 * p * 100.0 - 64.0 * h) / 1000.0;
    CHECK(net.dropoutRegularizer(0, 1000) == doctest::Approx(expected).epsilon(1e-10));

    // reference variant swaps p for (1-p) in the weight term only
    NetworkConfig refCfg = smallConfig(d, w, 3);
    refCfg.regVariant = RegularizerVariant::Reference;
    Network refNet = Network::init(refCfg);
    refNet.loadFlatParameters(params);
    const double expectedRef = (0.5 * 1e-4 * (1.0 - p) * 100.0 - 64.0 * h) / 1000.0;
    CHECK(refNet.dropoutRegularizer(0, 1000) == doctest::Approx(expectedRef).epsilon(1e-10));
}

TEST_CASE("regularizer gradients pass finite differences in both variants") {
    for (RegularizerVariant variant : {RegularizerVariant::Paper, RegularizerVariant::Reference}) {
        NetworkConfig cfg = smallConfig(2, 6, 77);
        cfg.regVariant = variant;
        // a large length scale keeps the weight-term gradients well above the
        // finite-difference noise floor
        cfg.lengthScaleSq = 1.0;
        Network net = Network::init(cfg);

        NetworkGradients grads = net.zeroGradients();
        net.addRegularizerGradients(7, grads);
        std::vector<double> analytic = flattenGradients(grads);

        const std::vector<double> theta = net.flattenParameters();
        const auto f = [&](std::span<const double> params) {
            Network probe = net;
            probe.loadFlatParameters(params);
            return probe.dropoutRegularizerTotal(7);
        };
        CHECK(gradCheck(f, theta, analytic, 1e-6) < 1e-5);
    }
}

TEST_CASE("gate logits stay clamped") {
    Network net = Network::init(smallConfig(1, 2, 0));
    std::vector<double> params = net.flattenParameters();
    params[params.size() - 1] = 50.0;  // p -> 1
    params[params.size() - 2] = -50.0; // p -> 0
    net.loadFlatParameters(params);
    net.clampGateLogits();
    const auto probs = net.dropoutProbabilities();
    for (double p : probs) {
        CHECK(p >= 1e-4 - 1e-12);
        CHECK(p <= 0.9 + 1e-12);
    }
}
