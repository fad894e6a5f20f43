#include "wpcurve/network.hpp"

#include "wpcurve/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace wpc {

namespace {

constexpr double kPMin = 1e-4;
constexpr double kPMax = 0.9;

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }
double logit(double p) { return std::log(p / (1.0 - p)); }

// out = a * W^T + b, with a (n x in), W (out x in). Row-dot formulation keeps
// both operands contiguous.
void linearForward(const Matrix& a, const DenseLayer& layer, Matrix& out) {
    const std::size_t n = a.rows();
    const std::size_t inDim = layer.inDim();
    const std::size_t outDim = layer.outDim();
    if (a.cols() != inDim) {
        throw DataError("layer expects " + std::to_string(inDim) + " inputs, got " +
                        std::to_string(a.cols()));
    }
    out = Matrix(n, outDim);
    for (std::size_t i = 0; i < n; ++i) {
        const double* arow = a.rowPtr(i);
        double* orow = out.rowPtr(i);
        for (std::size_t o = 0; o < outDim; ++o) {
            const double* wrow = layer.weights.rowPtr(o);
            double acc = layer.biases[o];
            for (std::size_t k = 0; k < inDim; ++k) acc += arow[k] * wrow[k];
            orow[o] = acc;
        }
    }
}

void tanhInPlace(Matrix& m) {
    for (double& v : m.data()) v = std::tanh(v);
}

// gW[o][k] += sum_i dZ[i][o] * in[i][k];  gB[o] += sum_i dZ[i][o]
void accumulateLayerGrads(const Matrix& dZ, const Matrix& in, Matrix& gW,
                          std::vector<double>& gB) {
    for (std::size_t i = 0; i < dZ.rows(); ++i) {
        const double* drow = dZ.rowPtr(i);
        const double* irow = in.rowPtr(i);
        for (std::size_t o = 0; o < dZ.cols(); ++o) {
            const double v = drow[o];
            if (v == 0.0) continue;
            gB[o] += v;
            double* grow = gW.rowPtr(o);
            for (std::size_t k = 0; k < in.cols(); ++k) grow[k] += v * irow[k];
        }
    }
}

// dIn[i][k] = sum_o dZ[i][o] * W[o][k]
Matrix propagateBack(const Matrix& dZ, const Matrix& w) {
    Matrix dIn(dZ.rows(), w.cols());
    for (std::size_t i = 0; i < dZ.rows(); ++i) {
        const double* drow = dZ.rowPtr(i);
        double* irow = dIn.rowPtr(i);
        for (std::size_t o = 0; o < dZ.cols(); ++o) {
            const double v = drow[o];
            if (v == 0.0) continue;
            const double* wrow = w.rowPtr(o);
            for (std::size_t k = 0; k < w.cols(); ++k) irow[k] += v * wrow[k];
        }
    }
    return dIn;
}

double bernoulliEntropy(double q) {
    if (q <= 0.0 || q >= 1.0) return 0.0;
    return -q * std::log(q) - (1.0 - q) * std::log(1.0 - q);
}

DenseLayer makeLayer(std::size_t outDim, std::size_t inDim, Activation act, RngStream rng) {
    DenseLayer layer;
    layer.weights = Matrix(outDim, inDim);
    layer.biases.assign(outDim, 0.0);
    layer.activation = act;
    const double bound = std::sqrt(6.0 / static_cast<double>(inDim + outDim));
    for (double& w : layer.weights.data()) w = (2.0 * rng.nextOpenUnit() - 1.0) * bound;
    return layer;
}

} // namespace

void NetworkConfig::validate() const {
    if (inputDim < 1) throw ConfigError("network.input_dim must be >= 1");
    if (hiddenWidth < 1) throw ConfigError("network.hidden_width must be >= 1");
    if (!(initDropoutP > 0.0 && initDropoutP < 1.0)) {
        throw ConfigError("network.init_dropout_p must lie strictly inside (0,1)");
    }
    if (!(temperature > 0.0)) throw ConfigError("network.temperature must be positive");
    if (!(lengthScaleSq > 0.0)) throw ConfigError("network.length_scale_sq must be positive");
}

double DropoutGate::p() const noexcept { return sigmoid(logitP); }

double gateLogitMin() { return logit(kPMin); }
double gateLogitMax() { return logit(kPMax); }

double concreteKeepMask(double logitP, double temperature, double u, double* dMaskDLogit) {
    const double p = sigmoid(logitP);
    const double keepScale = 1.0 / (1.0 - p);
    const double invT = 1.0 / temperature;
    double drop = sigmoid((logitP + std::log(u) - std::log1p(-u)) * invT);
    // keep the relaxation strictly inside its open interval even where the
    // sigmoid saturates in double precision
    drop = std::clamp(drop, 1e-12, 1.0 - 1e-12);
    if (dMaskDLogit) {
        *dMaskDLogit = -drop * (1.0 - drop) * invT * keepScale + (1.0 - drop) * p * keepScale;
    }
    return (1.0 - drop) * keepScale;
}

std::vector<double> sampleConcreteMask(const DropoutGate& gate, std::size_t n,
                                       RngStream& stream, MaskMode mode,
                                       std::vector<double>* dMaskDLogit) {
    std::vector<double> mask(n, 1.0);
    if (dMaskDLogit) dMaskDLogit->assign(n, 0.0);
    if (mode == MaskMode::Off) return mask;

    const double p = gate.p();
    const double keepScale = 1.0 / (1.0 - p);

    if (mode == MaskMode::Hard) {
        // Drop exactly when u > 1-p, the temperature->0 limit of the
        // relaxation under the same u.
        for (std::size_t i = 0; i < n; ++i) {
            const double u = stream.nextOpenUnit();
            mask[i] = u > 1.0 - p ? 0.0 : keepScale;
        }
        return mask;
    }

    for (std::size_t i = 0; i < n; ++i) {
        const double u = stream.nextOpenUnit();
        double* gradOut = dMaskDLogit ? &(*dMaskDLogit)[i] : nullptr;
        mask[i] = concreteKeepMask(gate.logitP, gate.temperature, u, gradOut);
    }
    return mask;
}

Network Network::init(const NetworkConfig& config) {
    config.validate();
    Network net;
    net.config_ = config;

    const std::size_t d = config.inputDim;
    const std::size_t w = config.hiddenWidth;
    RngStream rng(config.initSeed, 0x494E4954ULL); // "INIT"

    net.hidden_[0] = makeLayer(w, d, Activation::Tanh, rng.derive(1));
    net.hidden_[1] = makeLayer(w, w, Activation::Tanh, rng.derive(2));
    net.hidden_[2] = makeLayer(w, w, Activation::Tanh, rng.derive(3));
    // Raw input rides along into the fourth layer (skip connection).
    net.hidden_[3] = makeLayer(w, w + d, Activation::Tanh, rng.derive(4));
    net.meanHead_ = makeLayer(1, w, Activation::Linear, rng.derive(5));
    net.logVarHead_ = makeLayer(1, w, Activation::Linear, rng.derive(6));

    for (std::size_t i = 0; i < NetworkConfig::kHiddenLayers; ++i) {
        net.gates_[i].logitP = logit(config.initDropoutP);
        net.gates_[i].temperature = config.temperature;
    }
    net.clampGateLogits();
    return net;
}

std::array<double, NetworkConfig::kHiddenLayers> Network::dropoutProbabilities() const {
    std::array<double, NetworkConfig::kHiddenLayers> out{};
    for (std::size_t i = 0; i < gates_.size(); ++i) out[i] = gates_[i].p();
    return out;
}

void Network::forwardImpl(const Matrix& x, MaskMode mode, RngStream& stream,
                          std::vector<double>& mu, std::vector<double>& logVar,
                          ForwardTrace* trace) const {
    if (x.cols() != config_.inputDim) {
        throw DataError("network expects " + std::to_string(config_.inputDim) +
                        " input columns, got " + std::to_string(x.cols()));
    }
    const std::size_t n = x.rows();
    const std::size_t w = config_.hiddenWidth;
    const bool wantGrad = trace != nullptr && mode == MaskMode::Relaxed;

    if (trace) {
        trace->mode = mode;
        trace->input = x;
    }

    Matrix current;
    Matrix act;
    for (std::size_t layer = 0; layer < NetworkConfig::kHiddenLayers; ++layer) {
        const Matrix* layerIn = nullptr;
        Matrix skip;
        if (layer == 0) {
            layerIn = &x;
        } else if (layer == 3) {
            // concat(masked h3, x)
            skip = Matrix(n, w + config_.inputDim);
            for (std::size_t i = 0; i < n; ++i) {
                double* row = skip.rowPtr(i);
                const double* prev = current.rowPtr(i);
                const double* xrow = x.rowPtr(i);
                for (std::size_t k = 0; k < w; ++k) row[k] = prev[k];
                for (std::size_t k = 0; k < config_.inputDim; ++k) row[w + k] = xrow[k];
            }
            if (trace) trace->skipInput = skip;
            layerIn = trace ? &trace->skipInput : &skip;
        } else {
            layerIn = &current;
        }

        linearForward(*layerIn, hidden_[layer], act);
        tanhInPlace(act);

        std::vector<double> maskGrad;
        std::vector<double> mask = sampleConcreteMask(gates_[layer], n * w, stream, mode,
                                                      wantGrad ? &maskGrad : nullptr);

        Matrix masked(n, w);
        for (std::size_t i = 0; i < n * w; ++i) masked.data()[i] = act.data()[i] * mask[i];

        if (trace) {
            trace->act[layer] = act;
            Matrix maskM(n, w);
            maskM.data() = std::move(mask);
            trace->mask[layer] = std::move(maskM);
            if (wantGrad) {
                Matrix mg(n, w);
                mg.data() = std::move(maskGrad);
                trace->maskGrad[layer] = std::move(mg);
            }
            trace->masked[layer] = masked;
        }
        current = std::move(masked);
    }

    Matrix muM, logVarM;
    linearForward(current, meanHead_, muM);
    linearForward(current, logVarHead_, logVarM);
    mu.assign(n, 0.0);
    logVar.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        mu[i] = muM.at(i, 0);
        logVar[i] = logVarM.at(i, 0);
    }
}

ForwardResult Network::forward(const Matrix& x, MaskMode mode, RngStream& stream) const {
    ForwardResult result;
    forwardImpl(x, mode, stream, result.mu, result.logVar, &result.trace);
    return result;
}

void Network::infer(const Matrix& x, MaskMode mode, RngStream& stream, std::vector<double>& mu,
                    std::vector<double>& logVar) const {
    forwardImpl(x, mode, stream, mu, logVar, nullptr);
}

NetworkGradients Network::zeroGradients() const {
    NetworkGradients g;
    for (std::size_t i = 0; i < NetworkConfig::kHiddenLayers; ++i) {
        g.hiddenW[i] = Matrix(hidden_[i].outDim(), hidden_[i].inDim());
        g.hiddenB[i].assign(hidden_[i].outDim(), 0.0);
    }
    g.meanW = Matrix(1, meanHead_.inDim());
    g.meanB.assign(1, 0.0);
    g.logVarW = Matrix(1, logVarHead_.inDim());
    g.logVarB.assign(1, 0.0);
    g.gateLogit.fill(0.0);
    return g;
}

NetworkGradients Network::backward(const ForwardTrace& trace, std::span<const double> dMu,
                                   std::span<const double> dLogVar) const {
    if (trace.mode == MaskMode::Hard) {
        throw DataError("backward through a hard-mask trace is not differentiable; "
                        "use relaxed or off mode");
    }
    const std::size_t n = trace.batchSize();
    if (dMu.size() != n || dLogVar.size() != n) {
        throw DataError("backward: upstream gradient length mismatch");
    }
    const std::size_t w = config_.hiddenWidth;

    NetworkGradients g = zeroGradients();

    // Heads: dH4m accumulates both linear heads' pullback.
    const Matrix& h4m = trace.masked[3];
    Matrix dMasked(n, w);
    for (std::size_t i = 0; i < n; ++i) {
        const double* mrow = h4m.rowPtr(i);
        double* drow = dMasked.rowPtr(i);
        const double dmu = dMu[i];
        const double dlv = dLogVar[i];
        g.meanB[0] += dmu;
        g.logVarB[0] += dlv;
        double* gm = g.meanW.rowPtr(0);
        double* gv = g.logVarW.rowPtr(0);
        const double* wm = meanHead_.weights.rowPtr(0);
        const double* wv = logVarHead_.weights.rowPtr(0);
        for (std::size_t k = 0; k < w; ++k) {
            gm[k] += dmu * mrow[k];
            gv[k] += dlv * mrow[k];
            drow[k] = dmu * wm[k] + dlv * wv[k];
        }
    }

    // Hidden layers, top down. dMasked holds dL/d(masked activation).
    for (std::size_t layer = NetworkConfig::kHiddenLayers; layer-- > 0;) {
        const Matrix& act = trace.act[layer];
        const Matrix& mask = trace.mask[layer];

        if (trace.mode == MaskMode::Relaxed) {
            const Matrix& maskGrad = trace.maskGrad[layer];
            double acc = 0.0;
            for (std::size_t i = 0; i < n * w; ++i) {
                acc += dMasked.data()[i] * act.data()[i] * maskGrad.data()[i];
            }
            g.gateLogit[layer] = acc;
        }

        // through the mask, then through tanh
        Matrix dZ(n, w);
        for (std::size_t i = 0; i < n * w; ++i) {
            const double a = act.data()[i];
            dZ.data()[i] = dMasked.data()[i] * mask.data()[i] * (1.0 - a * a);
        }

        const Matrix& layerIn = layer == 0   ? trace.input
                                : layer == 3 ? trace.skipInput
                                             : trace.masked[layer - 1];
        accumulateLayerGrads(dZ, layerIn, g.hiddenW[layer], g.hiddenB[layer]);

        if (layer == 0) break;
        Matrix dIn = propagateBack(dZ, hidden_[layer].weights);
        if (layer == 3) {
            // only the first w columns feed back into h3; the skip columns
            // return to the raw input and stop there
            dMasked = Matrix(n, w);
            for (std::size_t i = 0; i < n; ++i) {
                const double* src = dIn.rowPtr(i);
                double* dst = dMasked.rowPtr(i);
                for (std::size_t k = 0; k < w; ++k) dst[k] = src[k];
            }
        } else {
            dMasked = std::move(dIn);
        }
    }
    return g;
}

double Network::dropoutRegularizer(std::size_t layerIndex, std::size_t nTrain) const {
    if (layerIndex >= NetworkConfig::kHiddenLayers) {
        throw DataError("dropout regularizer: layer index " + std::to_string(layerIndex) +
                        " out of range");
    }
    if (nTrain < 1) throw DataError("dropout regularizer: n_train must be >= 1");
    const double p = gates_[layerIndex].p();
    const double weightFactor = config_.regVariant == RegularizerVariant::Paper ? p : 1.0 - p;
    const double normSq = hidden_[layerIndex].weights.frobeniusNormSq();
    const double k = static_cast<double>(hidden_[layerIndex].outDim());
    return (0.5 * config_.lengthScaleSq * weightFactor * normSq - k * bernoulliEntropy(1.0 - p)) /
           static_cast<double>(nTrain);
}

double Network::dropoutRegularizerTotal(std::size_t nTrain) const {
    double total = 0.0;
    for (std::size_t i = 0; i < NetworkConfig::kHiddenLayers; ++i) {
        total += dropoutRegularizer(i, nTrain);
    }
    return total;
}

void Network::addRegularizerGradients(std::size_t nTrain, NetworkGradients& grads) const {
    const double invN = 1.0 / static_cast<double>(nTrain);
    for (std::size_t i = 0; i < NetworkConfig::kHiddenLayers; ++i) {
        const double p = gates_[i].p();
        const bool paper = config_.regVariant == RegularizerVariant::Paper;
        const double weightFactor = paper ? p : 1.0 - p;
        const double weightFactorDp = paper ? 1.0 : -1.0;

        const double scale = config_.lengthScaleSq * weightFactor * invN;
        const auto& wData = hidden_[i].weights.data();
        auto& gData = grads.hiddenW[i].data();
        for (std::size_t j = 0; j < wData.size(); ++j) gData[j] += scale * wData[j];

        const double normSq = hidden_[i].weights.frobeniusNormSq();
        const double k = static_cast<double>(hidden_[i].outDim());
        // dH(1-p)/dp = ln((1-p)/p)
        const double dRdP =
            (0.5 * config_.lengthScaleSq * normSq * weightFactorDp - k * std::log((1.0 - p) / p)) *
            invN;
        grads.gateLogit[i] += dRdP * p * (1.0 - p);
    }
}

std::vector<std::span<double>> NetworkGradients::blocks() {
    std::vector<std::span<double>> out;
    for (std::size_t i = 0; i < NetworkConfig::kHiddenLayers; ++i) {
        out.emplace_back(hiddenW[i].data());
        out.emplace_back(hiddenB[i]);
    }
    out.emplace_back(meanW.data());
    out.emplace_back(meanB);
    out.emplace_back(logVarW.data());
    out.emplace_back(logVarB);
    for (std::size_t i = 0; i < NetworkConfig::kHiddenLayers; ++i) {
        out.emplace_back(&gateLogit[i], 1);
    }
    return out;
}

void NetworkGradients::zeroGateAndLogVar() {
    gateLogit.fill(0.0);
    for (double& v : logVarW.data()) v = 0.0;
    for (double& v : logVarB) v = 0.0;
}

std::vector<std::span<double>> Network::parameterBlocks() {
    std::vector<std::span<double>> out;
    for (auto& layer : hidden_) {
        out.emplace_back(layer.weights.data());
        out.emplace_back(layer.biases);
    }
    out.emplace_back(meanHead_.weights.data());
    out.emplace_back(meanHead_.biases);
    out.emplace_back(logVarHead_.weights.data());
    out.emplace_back(logVarHead_.biases);
    for (auto& gate : gates_) out.emplace_back(&gate.logitP, 1);
    return out;
}

std::vector<std::span<const double>> Network::parameterBlocks() const {
    auto mutableBlocks = const_cast<Network*>(this)->parameterBlocks();
    return {mutableBlocks.begin(), mutableBlocks.end()};
}

std::size_t Network::parameterCount() const {
    std::size_t total = 0;
    for (const auto& block : parameterBlocks()) total += block.size();
    return total;
}

std::vector<double> Network::flattenParameters() const {
    std::vector<double> flat;
    flat.reserve(parameterCount());
    for (const auto& block : parameterBlocks()) flat.insert(flat.end(), block.begin(), block.end());
    return flat;
}

void Network::loadFlatParameters(std::span<const double> flat) {
    std::size_t offset = 0;
    for (auto& block : parameterBlocks()) {
        if (offset + block.size() > flat.size()) {
            throw DataError("flat parameter vector too short for this network");
        }
        for (std::size_t i = 0; i < block.size(); ++i) block[i] = flat[offset + i];
        offset += block.size();
    }
    if (offset != flat.size()) {
        throw DataError("flat parameter vector has " + std::to_string(flat.size()) +
                        " entries, network needs " + std::to_string(offset));
    }
}

void Network::clampGateLogits() {
    const double lo = gateLogitMin();
    const double hi = gateLogitMax();
    for (auto& gate : gates_) {
        if (gate.logitP < lo) gate.logitP = lo;
        if (gate.logitP > hi) gate.logitP = hi;
    }
}

} // namespace wpc
