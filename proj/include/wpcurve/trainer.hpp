#pragma once

#include "wpcurve/matrix.hpp"
#include "wpcurve/network.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

namespace wpc {

enum class LossMode {
    Heteroscedastic, // Gaussian NLL + dropout KL, relaxed masks
    Mse,             // vanilla-NN baseline: squared error, dropout off
};

struct TrainConfig {
    std::size_t epochs = 200;
    std::size_t batchSize = 256;
    double lrStart = 1e-3;
    double lrEnd = 1e-5;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::uint64_t seed = 0;
    LossMode lossMode = LossMode::Heteroscedastic;
    /// Keeps the log-variance head at its current parameters (no gradient);
    /// always on in Mse mode.
    bool freezeVarianceHead = false;
    /// Opt-in: stop when validation NLL fails to improve for `patience`
    /// epochs. Off by default; the history makes it cheap to add later.
    bool earlyStopping = false;
    std::size_t patience = 20;

    void validate() const;
};

/// Geometric interpolation between the schedule endpoints:
/// lr(0) = lr_start, lr(epochs-1) = lr_end.
double lrAt(std::size_t epoch, const TrainConfig& config);

struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
    std::uint64_t step = 0;
};

/// One bias-corrected Adam update over matching parameter/gradient blocks.
void adamStep(std::vector<std::span<double>>& params, std::vector<std::span<double>>& grads,
              AdamState& state, double lr, double beta1, double beta2, double epsilon);

struct EpochStats {
    double trainLoss = 0.0;
    double valNll = 0.0;
    double valMaeKw = 0.0;
    double lr = 0.0;
    std::array<double, NetworkConfig::kHiddenLayers> dropoutP{};
};

struct TrainHistory {
    std::vector<EpochStats> epochs;
};

struct LossBreakdown {
    double total = 0.0;
    double dataTerm = 0.0;
    double klTerm = 0.0;
};

/// Loss of one batch: mean NLL over a single relaxed-dropout forward pass
/// (the one-sample Monte Carlo estimate of the variational objective) plus
/// the per-sample dropout KL summed over layers. Mse mode evaluates the
/// squared-error objective with dropout off and no KL term.
LossBreakdown totalLoss(const Network& net, const Matrix& x, std::span<const double> y,
                        std::size_t nTrain, RngStream& noise, LossMode mode);

/// Same forward pass, but also returns the gradients of the total loss.
LossBreakdown lossAndGradients(const Network& net, const Matrix& x, std::span<const double> y,
                               std::size_t nTrain, RngStream& noise, LossMode mode,
                               bool freezeVarianceHead, NetworkGradients& grads);

struct TrainResult {
    Network net;
    TrainHistory history;
};

using EpochCallback =
    std::function<void(std::size_t epoch, const EpochStats&, const Network& net)>;

/// Minibatch training loop: seed-deterministic shuffling, fresh dropout noise
/// per batch, Adam with the geometric learning-rate schedule, gate logits
/// clamped after every step. Returns the final-epoch network. Aborts with
/// NumericError naming epoch and batch if the loss turns non-finite.
/// targetStdKw only scales the recorded validation MAE into kW.
TrainResult trainNetwork(Network net, const Matrix& trainX, const std::vector<double>& trainY,
                         const Matrix& valX, const std::vector<double>& valY,
                         const TrainConfig& config, double targetStdKw = 1.0,
                         const EpochCallback& onEpoch = {});

TrainResult train(const NetworkConfig& netConfig, const Matrix& trainX,
                  const std::vector<double>& trainY, const Matrix& valX,
                  const std::vector<double>& valY, const TrainConfig& config,
                  double targetStdKw = 1.0, const EpochCallback& onEpoch = {});

} // namespace wpc
