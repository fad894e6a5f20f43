#pragma once

#include "wpcurve/matrix.hpp"
#include "wpcurve/rng.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace wpc {

enum class Activation { Tanh, Linear };

enum class MaskMode {
    Relaxed, // concrete relaxation, differentiable w.r.t. the gate logit
    Hard,    // Bernoulli draws, inference-time Monte Carlo
    Off,     // all-ones, deterministic forward
};

/// Which factor multiplies the squared weight norm in the dropout KL term.
/// Paper prints p_i; the concrete-dropout literature it cites uses (1 - p_i).
/// The entropy terms coincide, so only this factor differs.
enum class RegularizerVariant { Paper, Reference };

struct NetworkConfig {
    std::size_t inputDim = 1;
    std::size_t hiddenWidth = 1024;          // desk-scale test profile uses 64
    static constexpr std::size_t kHiddenLayers = 4;
    double initDropoutP = 0.1;
    double temperature = 0.1;                // concrete relaxation temperature
    double lengthScaleSq = 1e-4;             // l^2 in the KL weight term
    std::uint64_t initSeed = 0;
    RegularizerVariant regVariant = RegularizerVariant::Paper;

    void validate() const; // throws ConfigError
};

struct DenseLayer {
    Matrix weights; // out x in
    std::vector<double> biases;
    Activation activation = Activation::Tanh;

    std::size_t outDim() const noexcept { return weights.rows(); }
    std::size_t inDim() const noexcept { return weights.cols(); }
};

/// Learnable dropout probability, kept as a logit so gradient steps stay
/// unconstrained; p = sigmoid(logit), clamped to [1e-4, 0.9] to keep the
/// entropy term away from its singularities.
struct DropoutGate {
    double logitP = 0.0;
    double temperature = 0.1;

    double p() const noexcept;
};

double gateLogitMin();
double gateLogitMax();

/// One element of the relaxed keep-mask for a given uniform draw u:
///   drop = sigmoid((logit p + log u - log(1-u)) / t),  mask = (1-drop)/(1-p).
/// Optionally writes d(mask)/d(logit p).
double concreteKeepMask(double logitP, double temperature, double u,
                        double* dMaskDLogit = nullptr);

/// Keep-mask for n units. Relaxed mode returns values strictly inside
/// (0, 1/(1-p)); hard mode returns {0, 1/(1-p)} with drop probability p;
/// off mode returns ones. Kept activations are scaled by 1/(1-p) so the
/// expected activation is preserved (inverted dropout).
/// When dMaskDLogit is non-null and mode is Relaxed it receives
/// d(mask)/d(logit p) per element (the pathwise derivative).
std::vector<double> sampleConcreteMask(const DropoutGate& gate, std::size_t n,
                                       RngStream& stream, MaskMode mode,
                                       std::vector<double>* dMaskDLogit = nullptr);

/// Everything backward needs from one forward pass.
struct ForwardTrace {
    MaskMode mode = MaskMode::Off;
    Matrix input;                                      // n x d
    std::array<Matrix, NetworkConfig::kHiddenLayers> act;      // tanh outputs
    std::array<Matrix, NetworkConfig::kHiddenLayers> masked;   // act * mask
    std::array<Matrix, NetworkConfig::kHiddenLayers> mask;     // scaled keep-masks
    std::array<Matrix, NetworkConfig::kHiddenLayers> maskGrad; // d(mask)/d(logit), relaxed only
    Matrix skipInput;                                  // [masked h3 | x], feeds layer 4

    std::size_t batchSize() const noexcept { return input.rows(); }
};

struct NetworkGradients {
    std::array<Matrix, NetworkConfig::kHiddenLayers> hiddenW;
    std::array<std::vector<double>, NetworkConfig::kHiddenLayers> hiddenB;
    Matrix meanW;
    std::vector<double> meanB;
    Matrix logVarW;
    std::vector<double> logVarB;
    std::array<double, NetworkConfig::kHiddenLayers> gateLogit{};

    std::vector<std::span<double>> blocks();
    void zeroGateAndLogVar();
};

struct ForwardResult {
    std::vector<double> mu;
    std::vector<double> logVar;
    ForwardTrace trace;
};

/// Four tanh hidden layers with an input skip concatenated into the fourth
/// layer's input, per-layer learnable dropout gates after each hidden
/// activation, and two parallel single-unit linear heads for the predicted
/// mean and the log of the aleatoric variance.
class Network {
public:
    static Network init(const NetworkConfig& config);

    const NetworkConfig& config() const noexcept { return config_; }
    const DenseLayer& hidden(std::size_t i) const { return hidden_[i]; }
    const DenseLayer& meanHead() const noexcept { return meanHead_; }
    const DenseLayer& logVarHead() const noexcept { return logVarHead_; }
    DenseLayer& logVarHeadMutable() noexcept { return logVarHead_; }
    const DropoutGate& gate(std::size_t i) const { return gates_[i]; }
    std::array<double, NetworkConfig::kHiddenLayers> dropoutProbabilities() const;

    /// Forward pass with trace retained for backprop. Off mode is a pure
    /// deterministic function of x.
    ForwardResult forward(const Matrix& x, MaskMode mode, RngStream& stream) const;

    /// Forward pass without trace, for inference loops.
    void infer(const Matrix& x, MaskMode mode, RngStream& stream, std::vector<double>& mu,
               std::vector<double>& logVar) const;

    /// Gradients of a scalar loss w.r.t. every learnable parameter, given
    /// per-sample upstream derivatives dL/dmu and dL/dlogvar. Gate logits get
    /// their pathwise derivative through the relaxed masks. Throws DataError
    /// for traces recorded in hard mode (non-differentiable path).
    NetworkGradients backward(const ForwardTrace& trace, std::span<const double> dMu,
                              std::span<const double> dLogVar) const;

    /// Per-sample KL contribution of one gate/layer pair:
    ///   (l^2 * w(p)/2 * ||W||_F^2 - k * H(1-p)) / n_train
    /// with w(p) = p (paper variant) or 1-p (reference variant), k the layer
    /// unit count and H the Bernoulli entropy.
    double dropoutRegularizer(std::size_t layerIndex, std::size_t nTrain) const;
    double dropoutRegularizerTotal(std::size_t nTrain) const;
    void addRegularizerGradients(std::size_t nTrain, NetworkGradients& grads) const;

    /// Parameter blocks in a fixed order (hidden W/b pairs, mean head,
    /// log-variance head, gate logits). The order is the flattening contract
    /// shared by Adam, gradient checking and checkpoints.
    std::vector<std::span<double>> parameterBlocks();
    std::vector<std::span<const double>> parameterBlocks() const;
    std::size_t parameterCount() const;

    std::vector<double> flattenParameters() const;
    void loadFlatParameters(std::span<const double> flat);

    void clampGateLogits();

    NetworkGradients zeroGradients() const;

private:
    NetworkConfig config_;
    std::array<DenseLayer, NetworkConfig::kHiddenLayers> hidden_;
    DenseLayer meanHead_;
    DenseLayer logVarHead_;
    std::array<DropoutGate, NetworkConfig::kHiddenLayers> gates_;

    void forwardImpl(const Matrix& x, MaskMode mode, RngStream& stream,
                     std::vector<double>& mu, std::vector<double>& logVar,
                     ForwardTrace* trace) const;
};

} // namespace wpc
