#pragma once

// Fully connected Q-value network with ReLU hidden layers, a masked MSE
// objective, hand-written backpropagation and an Adam optimizer with
// decoupled weight decay. All arithmetic is double precision.

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "pursuit/geometry.hpp"
#include "pursuit/rng.hpp"

namespace pursuit::nn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Layer widths of the Q-network: 3 inputs, four hidden layers of 64, 10 outputs.
inline constexpr std::array<int, 6> kArchitecture{3, 64, 64, 64, 64, 10};

struct DenseLayer {
    Matrix weights;  // out x in
    Vector bias;     // out
};

class QNetwork {
public:
    /// Zero-initialised network with the given width chain.
    explicit QNetwork(std::span<const int> widths = kArchitecture);

    /// Weights and biases uniform in +-sqrt(1/fan_in).
    static QNetwork random(Rng& rng, std::span<const int> widths = kArchitecture);

    [[nodiscard]] std::vector<int> widths() const;
    [[nodiscard]] int input_size() const noexcept { return static_cast<int>(layers_.front().weights.cols()); }
    [[nodiscard]] int output_size() const noexcept { return static_cast<int>(layers_.back().weights.rows()); }
    [[nodiscard]] std::size_t parameter_count() const noexcept;

    [[nodiscard]] std::vector<DenseLayer>& layers() noexcept { return layers_; }
    [[nodiscard]] const std::vector<DenseLayer>& layers() const noexcept { return layers_; }

    /// Throws std::invalid_argument on a size mismatch.
    [[nodiscard]] Vector forward(std::span<const double> input) const;
    [[nodiscard]] Vector forward(const Observation& obs) const;
    /// Column-per-sample batch: input is in x B, result is out x B.
    [[nodiscard]] Matrix forward_batch(const Matrix& inputs) const;

    [[nodiscard]] bool all_finite() const;

    friend bool operator==(const QNetwork& a, const QNetwork& b);

private:
    std::vector<DenseLayer> layers_;
};

/// Independent deep copy used as a target network.
[[nodiscard]] inline QNetwork sync_clone(const QNetwork& net) {
    return net;
}

[[nodiscard]] inline std::array<double, 3> to_input(const Observation& obs) noexcept {
    return {obs.x, obs.y, obs.heading};
}

/// Training batch, one sample per column. Only entries where mask is
/// non-zero contribute to the loss.
struct Batch {
    Matrix inputs;   // in x B
    Matrix targets;  // out x B
    Matrix mask;     // out x B, usually one-hot on the selected action
};

struct Sample {
    std::vector<double> input;
    std::vector<double> target;
    std::vector<double> mask;
};

[[nodiscard]] Batch make_batch(std::span<const Sample> samples);

struct Gradients {
    std::vector<DenseLayer> layers;
};

/// Loss = (1/B) * sum over samples and outputs of mask * (output - target)^2.
[[nodiscard]] double loss(const QNetwork& net, const Batch& batch);

/// Gradients of `loss` with respect to every parameter. Throws on an empty
/// batch or mismatched shapes.
[[nodiscard]] Gradients backward(const QNetwork& net, const Batch& batch, double* loss_out = nullptr);

struct AdamConfig {
    double learning_rate{1e-4};
    double weight_decay{1e-5};
    double beta1{0.9};
    double beta2{0.999};
    double epsilon{1e-8};
};

class Adam {
public:
    Adam(const QNetwork& net, AdamConfig cfg = {});

    /// Bias-corrected Adam step, then weights (not biases) shrink by
    /// (1 - lr * weight_decay). The decay term never enters the moments.
    void step(QNetwork& net, const Gradients& grads);

    [[nodiscard]] const AdamConfig& config() const noexcept { return cfg_; }
    [[nodiscard]] std::int64_t step_count() const noexcept { return t_; }
    [[nodiscard]] const std::vector<DenseLayer>& first_moments() const noexcept { return m_; }
    [[nodiscard]] const std::vector<DenseLayer>& second_moments() const noexcept { return v_; }

private:
    AdamConfig cfg_;
    std::vector<DenseLayer> m_;
    std::vector<DenseLayer> v_;
    std::int64_t t_{0};
};

/// {architecture, seed, frame_count, layers: [{weights, bias}]} with
/// row-major nested weight arrays.
[[nodiscard]] nlohmann::json to_checkpoint(const QNetwork& net, std::uint64_t seed, std::int64_t frame_count);

struct Checkpoint {
    QNetwork net;
    std::uint64_t seed{0};
    std::int64_t frame_count{0};
};

/// Validates the architecture chain, every layer shape and finiteness.
/// Throws std::runtime_error on any mismatch.
[[nodiscard]] Checkpoint from_checkpoint(const nlohmann::json& doc);

void save_checkpoint(const std::string& path, const QNetwork& net, std::uint64_t seed, std::int64_t frame_count);
[[nodiscard]] Checkpoint load_checkpoint(const std::string& path);

}  // namespace pursuit::nn
