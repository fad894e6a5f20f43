#include "wpcurve/trainer.hpp"

#include "wpcurve/error.hpp"
#include "wpcurve/loss.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace wpc {

void TrainConfig::validate() const {
    if (epochs < 1) throw ConfigError("training.epochs must be >= 1");
    if (batchSize < 1) throw ConfigError("training.batch_size must be >= 1");
    if (!(lrEnd > 0.0)) throw ConfigError("training.lr_end must be positive");
    if (!(lrStart >= lrEnd)) throw ConfigError("training.lr_start must be >= training.lr_end");
    if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
        throw ConfigError("training.adam betas must lie in [0,1)");
    }
    if (!(epsilon > 0.0)) throw ConfigError("training.adam_epsilon must be positive");
}

double lrAt(std::size_t epoch, const TrainConfig& config) {
    if (epoch >= config.epochs) {
        throw DataError("lrAt: epoch " + std::to_string(epoch) + " beyond schedule of " +
                        std::to_string(config.epochs));
    }
    if (config.epochs == 1) return config.lrStart;
    const double t = static_cast<double>(epoch) / static_cast<double>(config.epochs - 1);
    return config.lrStart * std::pow(config.lrEnd / config.lrStart, t);
}

void adamStep(std::vector<std::span<double>>& params, std::vector<std::span<double>>& grads,
              AdamState& state, double lr, double beta1, double beta2, double epsilon) {
    std::size_t total = 0;
    for (const auto& block : params) total += block.size();
    if (state.m.empty()) {
        state.m.assign(total, 0.0);
        state.v.assign(total, 0.0);
    }
    if (state.m.size() != total) throw DataError("adam state does not match parameter count");
    if (params.size() != grads.size()) throw DataError("adam: block count mismatch");

    ++state.step;
    const double mCorr = 1.0 - std::pow(beta1, static_cast<double>(state.step));
    const double vCorr = 1.0 - std::pow(beta2, static_cast<double>(state.step));

    std::size_t offset = 0;
    for (std::size_t b = 0; b < params.size(); ++b) {
        auto& p = params[b];
        const auto& g = grads[b];
        if (p.size() != g.size()) throw DataError("adam: block size mismatch");
        for (std::size_t i = 0; i < p.size(); ++i) {
            double& m = state.m[offset + i];
            double& v = state.v[offset + i];
            m = beta1 * m + (1.0 - beta1) * g[i];
            v = beta2 * v + (1.0 - beta2) * g[i] * g[i];
            const double mHat = m / mCorr;
            const double vHat = v / vCorr;
            p[i] -= lr * mHat / (std::sqrt(vHat) + epsilon);
        }
        offset += p.size();
    }
}

namespace {

struct BatchGradient {
    LossBreakdown loss;
    NetworkGradients grads;
};

BatchGradient batchLossAndGradients(const Network& net, const Matrix& x,
                                    std::span<const double> y, std::size_t nTrain,
                                    RngStream& noise, LossMode mode, bool freezeVarianceHead) {
    const MaskMode maskMode = mode == LossMode::Heteroscedastic ? MaskMode::Relaxed : MaskMode::Off;
    ForwardResult fwd = net.forward(x, maskMode, noise);

    const std::size_t n = x.rows();
    const double invN = 1.0 / static_cast<double>(n);
    std::vector<double> dMu(n, 0.0);
    std::vector<double> dLogVar(n, 0.0);

    BatchGradient out;
    if (mode == LossMode::Heteroscedastic) {
        const NllResult nll = heteroscedasticNll(y, fwd.mu, fwd.logVar);
        out.loss.dataTerm = nll.mean;
        out.loss.klTerm = net.dropoutRegularizerTotal(nTrain);
        for (std::size_t i = 0; i < n; ++i) {
            const double r = y[i] - fwd.mu[i];
            const double precision = std::exp(-fwd.logVar[i]);
            dMu[i] = -precision * r * invN;
            if (!freezeVarianceHead) {
                dLogVar[i] = 0.5 * (1.0 - precision * r * r) * invN;
            }
        }
    } else {
        const NllResult mse = halfSquaredError(y, fwd.mu);
        out.loss.dataTerm = mse.mean;
        out.loss.klTerm = 0.0;
        for (std::size_t i = 0; i < n; ++i) dMu[i] = -(y[i] - fwd.mu[i]) * invN;
    }
    out.loss.total = out.loss.dataTerm + out.loss.klTerm;

    out.grads = net.backward(fwd.trace, dMu, dLogVar);
    if (mode == LossMode::Heteroscedastic) {
        net.addRegularizerGradients(nTrain, out.grads);
        if (freezeVarianceHead) {
            for (double& v : out.grads.logVarW.data()) v = 0.0;
            for (double& v : out.grads.logVarB) v = 0.0;
        }
    } else {
        out.grads.zeroGateAndLogVar();
    }
    return out;
}

} // namespace

LossBreakdown totalLoss(const Network& net, const Matrix& x, std::span<const double> y,
                        std::size_t nTrain, RngStream& noise, LossMode mode) {
    const MaskMode maskMode = mode == LossMode::Heteroscedastic ? MaskMode::Relaxed : MaskMode::Off;
    std::vector<double> mu, logVar;
    net.infer(x, maskMode, noise, mu, logVar);

    LossBreakdown out;
    if (mode == LossMode::Heteroscedastic) {
        out.dataTerm = heteroscedasticNll(y, mu, logVar).mean;
        out.klTerm = net.dropoutRegularizerTotal(nTrain);
    } else {
        out.dataTerm = halfSquaredError(y, mu).mean;
    }
    out.total = out.dataTerm + out.klTerm;
    return out;
}

LossBreakdown lossAndGradients(const Network& net, const Matrix& x, std::span<const double> y,
                               std::size_t nTrain, RngStream& noise, LossMode mode,
                               bool freezeVarianceHead, NetworkGradients& grads) {
    BatchGradient bg = batchLossAndGradients(net, x, y, nTrain, noise, mode, freezeVarianceHead);
    grads = std::move(bg.grads);
    return bg.loss;
}

TrainResult trainNetwork(Network net, const Matrix& trainX, const std::vector<double>& trainY,
                         const Matrix& valX, const std::vector<double>& valY,
                         const TrainConfig& config, double targetStdKw,
                         const EpochCallback& onEpoch) {
    config.validate();
    if (trainX.rows() == 0 || valX.rows() == 0) {
        throw DataError("training requires non-empty train and validation splits");
    }
    if (trainX.rows() != trainY.size() || valX.rows() != valY.size()) {
        throw DataError("training: feature/target row mismatch");
    }

    const std::size_t n = trainX.rows();
    const bool freezeVarHead = config.freezeVarianceHead || config.lossMode == LossMode::Mse;

    AdamState adam;
    TrainResult result;
    result.history.epochs.reserve(config.epochs);

    RngStream master(config.seed, 0x545241494EULL); // "TRAIN"
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);

    Matrix batchX;
    std::vector<double> batchY;

    double bestValNll = std::numeric_limits<double>::infinity();
    std::size_t sinceBest = 0;

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        RngStream epochStream = master.derive(epoch);
        RngStream shuffle = epochStream.derive(0);
        for (std::size_t i = n; i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(shuffle.nextU64() % i);
            std::swap(order[i - 1], order[j]);
        }

        const double lr = lrAt(epoch, config);
        double epochLoss = 0.0;
        std::size_t batchIndex = 0;

        for (std::size_t start = 0; start < n; start += config.batchSize, ++batchIndex) {
            const std::size_t end = std::min(start + config.batchSize, n);
            const std::size_t rows = end - start;
            batchX = Matrix(rows, trainX.cols());
            batchY.assign(rows, 0.0);
            for (std::size_t i = 0; i < rows; ++i) {
                const std::size_t src = order[start + i];
                const double* srow = trainX.rowPtr(src);
                double* drow = batchX.rowPtr(i);
                for (std::size_t c = 0; c < trainX.cols(); ++c) drow[c] = srow[c];
                batchY[i] = trainY[src];
            }

            RngStream noise = epochStream.derive(1 + batchIndex);
            BatchGradient bg = batchLossAndGradients(net, batchX, batchY, n, noise,
                                                     config.lossMode, freezeVarHead);
            if (!std::isfinite(bg.loss.total)) {
                throw NumericError("training diverged: non-finite loss at epoch " +
                                   std::to_string(epoch) + ", batch " +
                                   std::to_string(batchIndex));
            }
            epochLoss += bg.loss.total * static_cast<double>(rows);

            auto params = net.parameterBlocks();
            auto grads = bg.grads.blocks();
            adamStep(params, grads, adam, lr, config.beta1, config.beta2, config.epsilon);
            net.clampGateLogits();
        }

        EpochStats stats;
        stats.trainLoss = epochLoss / static_cast<double>(n);
        stats.lr = lr;
        stats.dropoutP = net.dropoutProbabilities();

        RngStream unused(0, 0);
        std::vector<double> valMu, valLogVar;
        net.infer(valX, MaskMode::Off, unused, valMu, valLogVar);
        stats.valNll = heteroscedasticNll(valY, valMu, valLogVar).mean;
        stats.valMaeKw = meanAbsoluteErrorOf(valY, valMu) * targetStdKw;

        result.history.epochs.push_back(stats);
        if (onEpoch) onEpoch(epoch, stats, net);

        if (config.earlyStopping) {
            if (stats.valNll < bestValNll - 1e-12) {
                bestValNll = stats.valNll;
                sinceBest = 0;
            } else if (++sinceBest >= config.patience) {
                break;
            }
        }
    }

    result.net = std::move(net);
    return result;
}

TrainResult train(const NetworkConfig& netConfig, const Matrix& trainX,
                  const std::vector<double>& trainY, const Matrix& valX,
                  const std::vector<double>& valY, const TrainConfig& config,
                  double targetStdKw, const EpochCallback& onEpoch) {
    return trainNetwork(Network::init(netConfig), trainX, trainY, valX, valY, config, targetStdKw,
                        onEpoch);
}

} // namespace wpc
