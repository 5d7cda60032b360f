#include "pursuit/nn.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>

namespace pursuit::nn {

namespace {

void check_widths(std::span<const int> widths) {
    if (widths.size() < 2) {
        throw std::invalid_argument("QNetwork: need at least an input and an output width");
    }
    for (int w : widths) {
        if (w <= 0) {
            throw std::invalid_argument("QNetwork: layer widths must be positive");
        }
    }
}

std::vector<DenseLayer> zeros_like(const std::vector<DenseLayer>& layers) {
    std::vector<DenseLayer> out;
    out.reserve(layers.size());
    for (const auto& l : layers) {
        out.push_back({Matrix::Zero(l.weights.rows(), l.weights.cols()), Vector::Zero(l.bias.size())});
    }
    return out;
}

}  // namespace

QNetwork::QNetwork(std::span<const int> widths) {
    check_widths(widths);
    for (std::size_t i = 1; i < widths.size(); ++i) {
        layers_.push_back({Matrix::Zero(widths[i], widths[i - 1]), Vector::Zero(widths[i])});
    }
}

QNetwork QNetwork::random(Rng& rng, std::span<const int> widths) {
    QNetwork net(widths);
    for (auto& layer : net.layers_) {
        const double bound = std::sqrt(1.0 / static_cast<double>(layer.weights.cols()));
        std::uniform_real_distribution<double> dist(-bound, bound);
        // Row-major fill order so the draw sequence matches the checkpoint layout.
        for (Eigen::Index r = 0; r < layer.weights.rows(); ++r) {
            for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) {
                layer.weights(r, c) = dist(rng);
            }
        }
        for (Eigen::Index r = 0; r < layer.bias.size(); ++r) {
            layer.bias(r) = dist(rng);
        }
    }
    return net;
}

std::vector<int> QNetwork::widths() const {
    std::vector<int> w{input_size()};
    for (const auto& l : layers_) {
        w.push_back(static_cast<int>(l.weights.rows()));
    }
    return w;
}

std::size_t QNetwork::parameter_count() const noexcept {
    std::size_t n = 0;
    for (const auto& l : layers_) {
        n += static_cast<std::size_t>(l.weights.size() + l.bias.size());
    }
    return n;
}

Vector QNetwork::forward(std::span<const double> input) const {
    if (static_cast<int>(input.size()) != input_size()) {
        throw std::invalid_argument("QNetwork::forward: expected " + std::to_string(input_size()) +
                                    " inputs, got " + std::to_string(input.size()));
    }
    Vector a = Eigen::Map<const Vector>(input.data(), static_cast<Eigen::Index>(input.size()));
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        Vector z = layers_[i].weights * a + layers_[i].bias;
        if (i + 1 < layers_.size()) {
            a = z.cwiseMax(0.0);
        } else {
            a = std::move(z);
        }
    }
    return a;
}

Vector QNetwork::forward(const Observation& obs) const {
    const auto in = to_input(obs);
    return forward(std::span<const double>(in));
}

Matrix QNetwork::forward_batch(const Matrix& inputs) const {
    if (inputs.rows() != input_size()) {
        throw std::invalid_argument("QNetwork::forward_batch: input row count mismatch");
    }
    Matrix a = inputs;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        Matrix z = layers_[i].weights * a;
        z.colwise() += layers_[i].bias;
        if (i + 1 < layers_.size()) {
            a = z.cwiseMax(0.0);
        } else {
            a = std::move(z);
        }
    }
    return a;
}

bool QNetwork::all_finite() const {
    for (const auto& l : layers_) {
        if (!l.weights.allFinite() || !l.bias.allFinite()) {
            return false;
        }
    }
    return true;
}

bool operator==(const QNetwork& a, const QNetwork& b) {
    if (a.layers_.size() != b.layers_.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.layers_.size(); ++i) {
        const auto& x = a.layers_[i];
        const auto& y = b.layers_[i];
        if (x.weights.rows() != y.weights.rows() || x.weights.cols() != y.weights.cols() ||
            x.weights != y.weights || x.bias != y.bias) {
            return false;
        }
    }
    return true;
}

Batch make_batch(std::span<const Sample> samples) {
    if (samples.empty()) {
        throw std::invalid_argument("make_batch: empty batch");
    }
    const auto in = static_cast<Eigen::Index>(samples.front().input.size());
    const auto out = static_cast<Eigen::Index>(samples.front().target.size());
    const auto n = static_cast<Eigen::Index>(samples.size());
    Batch b{Matrix(in, n), Matrix(out, n), Matrix(out, n)};
    for (Eigen::Index j = 0; j < n; ++j) {
        const auto& s = samples[static_cast<std::size_t>(j)];
        if (static_cast<Eigen::Index>(s.input.size()) != in || static_cast<Eigen::Index>(s.target.size()) != out ||
            static_cast<Eigen::Index>(s.mask.size()) != out) {
            throw std::invalid_argument("make_batch: inconsistent sample sizes");
        }
        for (Eigen::Index i = 0; i < in; ++i) b.inputs(i, j) = s.input[static_cast<std::size_t>(i)];
        for (Eigen::Index i = 0; i < out; ++i) {
            b.targets(i, j) = s.target[static_cast<std::size_t>(i)];
            b.mask(i, j) = s.mask[static_cast<std::size_t>(i)];
        }
    }
    return b;
}

namespace {

void check_batch(const QNetwork& net, const Batch& batch) {
    const auto n = batch.inputs.cols();
    if (n == 0) {
        throw std::invalid_argument("backward: empty batch");
    }
    if (batch.inputs.rows() != net.input_size() || batch.targets.rows() != net.output_size() ||
        batch.mask.rows() != net.output_size() || batch.targets.cols() != n || batch.mask.cols() != n) {
        throw std::invalid_argument("backward: batch shape does not match the network");
    }
}

}  // namespace

double loss(const QNetwork& net, const Batch& batch) {
    check_batch(net, batch);
    const Matrix err = net.forward_batch(batch.inputs) - batch.targets;
    return (batch.mask.array() * err.array().square()).sum() / static_cast<double>(batch.inputs.cols());
}

Gradients backward(const QNetwork& net, const Batch& batch, double* loss_out) {
    check_batch(net, batch);
    const auto& layers = net.layers();
    const std::size_t depth = layers.size();
    const double inv_n = 1.0 / static_cast<double>(batch.inputs.cols());

    // activations[i] feeds layer i; pre[i] is layer i's pre-activation.
    std::vector<Matrix> activations(depth);
    std::vector<Matrix> pre(depth);
    activations[0] = batch.inputs;
    for (std::size_t i = 0; i < depth; ++i) {
        pre[i] = layers[i].weights * activations[i];
        pre[i].colwise() += layers[i].bias;
        if (i + 1 < depth) {
            activations[i + 1] = pre[i].cwiseMax(0.0);
        }
    }

    const Matrix err = pre.back() - batch.targets;
    if (loss_out != nullptr) {
        *loss_out = (batch.mask.array() * err.array().square()).sum() * inv_n;
    }

    Gradients g;
    g.layers.resize(depth);
    Matrix delta = (2.0 * inv_n) * (batch.mask.array() * err.array()).matrix();
    for (std::size_t k = depth; k-- > 0;) {
        g.layers[k].weights.noalias() = delta * activations[k].transpose();
        g.layers[k].bias = delta.rowwise().sum();
        if (k > 0) {
            Matrix back = layers[k].weights.transpose() * delta;
            delta = (pre[k - 1].array() > 0.0).select(back, 0.0);
        }
    }
    return g;
}

Adam::Adam(const QNetwork& net, AdamConfig cfg)
    : cfg_(cfg), m_(zeros_like(net.layers())), v_(zeros_like(net.layers())) {}

void Adam::step(QNetwork& net, const Gradients& grads) {
    auto& layers = net.layers();
    if (grads.layers.size() != layers.size() || m_.size() != layers.size()) {
        throw std::invalid_argument("Adam::step: gradient depth does not match the network");
    }
    ++t_;
    const double b1 = cfg_.beta1;
    const double b2 = cfg_.beta2;
    const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
    const double lr = cfg_.learning_rate;
    const double shrink = 1.0 - lr * cfg_.weight_decay;

    auto update = [&](auto& param, auto& m, auto& v, const auto& g) {
        if (param.size() != g.size()) {
            throw std::invalid_argument("Adam::step: gradient shape does not match the network");
        }
        m = b1 * m + (1.0 - b1) * g;
        v = b2 * v + (1.0 - b2) * g.cwiseProduct(g);
        param.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + cfg_.epsilon);
    };

    for (std::size_t i = 0; i < layers.size(); ++i) {
        if (cfg_.weight_decay != 0.0) {
            layers[i].weights *= shrink;
        }
        update(layers[i].weights, m_[i].weights, v_[i].weights, grads.layers[i].weights);
        update(layers[i].bias, m_[i].bias, v_[i].bias, grads.layers[i].bias);
    }
}

nlohmann::json to_checkpoint(const QNetwork& net, std::uint64_t seed, std::int64_t frame_count) {
    nlohmann::json doc;
    doc["architecture"] = net.widths();
    doc["seed"] = seed;
    doc["frame_count"] = frame_count;
    auto layers = nlohmann::json::array();
    for (const auto& l : net.layers()) {
        auto rows = nlohmann::json::array();
        for (Eigen::Index r = 0; r < l.weights.rows(); ++r) {
            std::vector<double> row(static_cast<std::size_t>(l.weights.cols()));
            for (Eigen::Index c = 0; c < l.weights.cols(); ++c) row[static_cast<std::size_t>(c)] = l.weights(r, c);
            rows.push_back(std::move(row));
        }
        std::vector<double> bias(l.bias.data(), l.bias.data() + l.bias.size());
        layers.push_back({{"weights", std::move(rows)}, {"bias", std::move(bias)}});
    }
    doc["layers"] = std::move(layers);
    return doc;
}

Checkpoint from_checkpoint(const nlohmann::json& doc) {
    try {
        const auto arch = doc.at("architecture").get<std::vector<int>>();
        if (!std::equal(arch.begin(), arch.end(), kArchitecture.begin(), kArchitecture.end())) {
            throw std::runtime_error("checkpoint: architecture must be [3,64,64,64,64,10]");
        }
        Checkpoint ck{QNetwork(kArchitecture), doc.at("seed").get<std::uint64_t>(),
                      doc.at("frame_count").get<std::int64_t>()};
        const auto& layers = doc.at("layers");
        auto& net_layers = ck.net.layers();
        if (!layers.is_array() || layers.size() != net_layers.size()) {
            throw std::runtime_error("checkpoint: layer count does not match the architecture");
        }
        for (std::size_t i = 0; i < net_layers.size(); ++i) {
            auto& dst = net_layers[i];
            const auto rows = layers[i].at("weights").get<std::vector<std::vector<double>>>();
            const auto bias = layers[i].at("bias").get<std::vector<double>>();
            if (static_cast<Eigen::Index>(rows.size()) != dst.weights.rows() ||
                static_cast<Eigen::Index>(bias.size()) != dst.bias.size()) {
                throw std::runtime_error("checkpoint: layer " + std::to_string(i) + " has the wrong shape");
            }
            for (std::size_t r = 0; r < rows.size(); ++r) {
                if (static_cast<Eigen::Index>(rows[r].size()) != dst.weights.cols()) {
                    throw std::runtime_error("checkpoint: layer " + std::to_string(i) + " has the wrong shape");
                }
                for (std::size_t c = 0; c < rows[r].size(); ++c) {
                    dst.weights(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
                }
            }
            for (std::size_t r = 0; r < bias.size(); ++r) dst.bias(static_cast<Eigen::Index>(r)) = bias[r];
        }
        if (!ck.net.all_finite()) {
            throw std::runtime_error("checkpoint: non-finite parameter");
        }
        return ck;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(std::string("checkpoint: malformed document: ") + e.what());
    }
}

void save_checkpoint(const std::string& path, const QNetwork& net, std::uint64_t seed, std::int64_t frame_count) {
    std::ofstream os(path);
    if (!os) {
        throw std::runtime_error("cannot write checkpoint " + path);
    }
    os << to_checkpoint(net, seed, frame_count).dump() << '\n';
    if (!os) {
        throw std::runtime_error("failed writing checkpoint " + path);
    }
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream is(path);
    if (!is) {
        throw std::runtime_error("cannot read checkpoint " + path);
    }
    nlohmann::json doc;
    try {
        is >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("checkpoint " + path + " is not valid JSON: " + e.what());
    }
    return from_checkpoint(doc);
}

}  // namespace pursuit::nn
