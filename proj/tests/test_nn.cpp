#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "pursuit/nn.hpp"

using namespace pursuit;
using namespace pursuit::nn;

namespace {

Batch random_batch(Rng& rng, int n, int in = 3, int out = 10) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_int_distribution<int> pick(0, out - 1);
    Batch b{Matrix(in, n), Matrix(out, n), Matrix::Zero(out, n)};
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < in; ++i) b.inputs(i, j) = u(rng);
        for (int i = 0; i < out; ++i) b.targets(i, j) = u(rng);
        b.mask(pick(rng), j) = 1.0;
    }
    return b;
}

constexpr std::array<int, 6> kNarrow{3, 8, 8, 8, 8, 10};

}  // namespace

TEST_CASE("architecture is 3-64x4-10") {
    const QNetwork net;
    CHECK(net.widths() == std::vector<int>{3, 64, 64, 64, 64, 10});
    CHECK(net.layers().size() == 5);
    CHECK(net.parameter_count() == 3 * 64 + 64 + 3 * (64 * 64 + 64) + 64 * 10 + 10);
}

TEST_CASE("forward on trivial networks") {
    QNetwork net;
    const std::array<double, 3> x{0.3, -1.2, 2.0};
    CHECK(net.forward(std::span<const double>(x)).isZero());

    for (int i = 0; i < 10; ++i) net.layers().back().bias(i) = 0.5 * i - 1.0;
    const Vector y = net.forward(std::span<const double>(x));
    for (int i = 0; i < 10; ++i) CHECK(y(i) == 0.5 * i - 1.0);

    const std::array<double, 2> bad{1.0, 2.0};
    CHECK_THROWS_AS((void)net.forward(std::span<const double>(bad)), std::invalid_argument);
    CHECK_THROWS_AS((void)net.forward_batch(Matrix::Zero(2, 4)), std::invalid_argument);
}

TEST_CASE("forward matches the loop oracle") {
    Rng rng = make_stream(1, Stream::WeightInit);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int trial = 0; trial < 50; ++trial) {
        const QNetwork net = QNetwork::random(rng);
        std::vector<double> x{u(rng), u(rng), u(rng)};
        const Vector y = net.forward(std::span<const double>(x));
        const auto expected = oracle::forward(net, x);
        Matrix batch(3, 1);
        batch << x[0], x[1], x[2];
        const Matrix yb = net.forward_batch(batch);
        for (int i = 0; i < 10; ++i) {
            REQUIRE(std::abs(y(i) - expected[static_cast<std::size_t>(i)]) < 1e-12);
            REQUIRE(std::abs(yb(i, 0) - expected[static_cast<std::size_t>(i)]) < 1e-12);
        }
    }
}

TEST_CASE("initialisation is bounded by sqrt(1/fan_in) and seeded") {
    Rng a = make_stream(9, Stream::WeightInit);
    Rng b = make_stream(9, Stream::WeightInit);
    const QNetwork n1 = QNetwork::random(a);
    const QNetwork n2 = QNetwork::random(b);
    CHECK(n1 == n2);
    for (const auto& l : n1.layers()) {
        const double bound = std::sqrt(1.0 / static_cast<double>(l.weights.cols()));
        CHECK(l.weights.cwiseAbs().maxCoeff() <= bound);
        CHECK(l.bias.cwiseAbs().maxCoeff() <= bound);
    }
}

TEST_CASE("rectifier is positively homogeneous per unit") {
    Rng rng = make_stream(4, Stream::WeightInit);
    const std::array<int, 3> widths{3, 64, 1};
    QNetwork net = QNetwork::random(rng, widths);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int k = 0; k < 64; k += 7) {
        auto& out = net.layers()[1];
        out.weights.setZero();
        out.bias.setZero();
        out.weights(0, k) = 1.0;
        const std::array<double, 3> x{u(rng), u(rng), u(rng)};
        const double base = net.forward(std::span<const double>(x))(0);
        QNetwork scaled = net;
        const double c = 2.5;
        scaled.layers()[0].weights.row(k) *= c;
        scaled.layers()[0].bias(k) *= c;
        CHECK(scaled.forward(std::span<const double>(x))(0) == doctest::Approx(c * base).epsilon(1e-14));
    }
}

TEST_CASE("backward: zero loss gives zero gradients") {
    Rng rng = make_stream(2, Stream::WeightInit);
    const QNetwork net = QNetwork::random(rng);
    Batch b = random_batch(rng, 5);
    b.targets = net.forward_batch(b.inputs);
    double l = -1.0;
    const Gradients g = backward(net, b, &l);
    CHECK(l == 0.0);
    for (const auto& layer : g.layers) {
        CHECK(layer.weights.isZero());
        CHECK(layer.bias.isZero());
    }
}

TEST_CASE("backward: duplicated samples average to the single-sample gradient") {
    Rng rng = make_stream(3, Stream::WeightInit);
    const QNetwork net = QNetwork::random(rng);
    const Batch one = random_batch(rng, 1);
    Batch two{Matrix(3, 2), Matrix(10, 2), Matrix(10, 2)};
    two.inputs << one.inputs, one.inputs;
    two.targets << one.targets, one.targets;
    two.mask << one.mask, one.mask;
    const Gradients g1 = backward(net, one);
    const Gradients g2 = backward(net, two);
    for (std::size_t i = 0; i < g1.layers.size(); ++i) {
        CHECK((g1.layers[i].weights - g2.layers[i].weights).cwiseAbs().maxCoeff() < 1e-15);
        CHECK((g1.layers[i].bias - g2.layers[i].bias).cwiseAbs().maxCoeff() < 1e-15);
    }
    CHECK_THROWS_AS((void)backward(net, Batch{Matrix(3, 0), Matrix(10, 0), Matrix(10, 0)}), std::invalid_argument);
}

TEST_CASE("loss matches the loop oracle and make_batch builds columns") {
    Rng rng = make_stream(5, Stream::WeightInit);
    const QNetwork net = QNetwork::random(rng);
    const std::vector<Sample> samples{
        {{0.1, 0.2, 0.3}, std::vector<double>(10, 0.5), {0, 0, 1, 0, 0, 0, 0, 0, 0, 0}},
        {{-0.4, 0.0, 1.3}, std::vector<double>(10, -0.2), {0, 0, 0, 0, 0, 0, 0, 0, 0, 1}},
    };
    const Batch b = make_batch(samples);
    CHECK(b.inputs(2, 1) == 1.3);
    CHECK(b.mask(9, 1) == 1.0);
    CHECK(loss(net, b) == doctest::Approx(oracle::masked_mse(net, b)).epsilon(1e-13));
}

TEST_CASE("analytic gradients match central differences on every parameter") {
    Rng rng = make_stream(6, Stream::WeightInit);
    int checked = 0;
    int kinks = 0;
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const QNetwork net = QNetwork::random(rng, kNarrow);
        const Batch b = random_batch(rng, 4);
        const Gradients g = backward(net, b);
        for (std::size_t l = 0; l < net.layers().size(); ++l) {
            const auto& W = net.layers()[l].weights;
            for (Eigen::Index r = 0; r < W.rows(); ++r) {
                for (Eigen::Index c = 0; c <= W.cols(); ++c) {
                    const bool bias = c == W.cols();
                    const auto fd = oracle::central_difference(net, b, l, bias, r, bias ? 0 : c);
                    if (fd.crossed_kink) {
                        ++kinks;
                        continue;
                    }
                    const double analytic = bias ? g.layers[l].bias(r) : g.layers[l].weights(r, c);
                    worst = std::max(worst, oracle::relative_error(analytic, fd.numeric));
                    ++checked;
                }
            }
        }
    }
    MESSAGE("checked " << checked << " parameters, skipped " << kinks << " at ReLU kinks, worst rel err " << worst);
    CHECK(worst < 1e-4);
    CHECK(kinks * 100 < checked);
}

TEST_CASE("Adam with zero gradients and no decay leaves parameters unchanged") {
    Rng rng = make_stream(7, Stream::WeightInit);
    QNetwork net = QNetwork::random(rng);
    const QNetwork before = net;
    Adam opt(net, AdamConfig{1e-4, 0.0});
    Gradients zero;
    for (const auto& l : net.layers()) {
        zero.layers.push_back({Matrix::Zero(l.weights.rows(), l.weights.cols()), Vector::Zero(l.bias.size())});
    }
    for (int i = 0; i < 5; ++i) opt.step(net, zero);
    CHECK(net == before);
    CHECK(opt.step_count() == 5);

    SUBCASE("decay-only update scales every weight by (1 - lr * decay) and leaves biases alone") {
        const double lr = 1e-4, d = 1e-5;
        Adam decay(net, AdamConfig{lr, d});
        decay.step(net, zero);
        for (std::size_t i = 0; i < net.layers().size(); ++i) {
            const Matrix expected = before.layers()[i].weights * (1.0 - lr * d);
            CHECK(net.layers()[i].weights == expected);
            CHECK(net.layers()[i].bias == before.layers()[i].bias);
            CHECK((net.layers()[i].weights.array() * before.layers()[i].weights.array() >= 0.0).all());
        }
    }
}

TEST_CASE("Adam's first step with a unit gradient moves the parameter by lr") {
    const std::array<int, 2> widths{1, 1};
    QNetwork net(widths);
    net.layers()[0].weights(0, 0) = 3.0;
    const double lr = 1e-4;
    Adam opt(net, AdamConfig{lr, 0.0});
    Gradients g{{{Matrix::Constant(1, 1, 1.0), Vector::Constant(1, 1.0)}}};
    opt.step(net, g);
    // m_hat = g, v_hat = g^2, so the step is lr * 1 / (1 + eps).
    const double expected = 3.0 - lr / (1.0 + 1e-8);
    CHECK(net.layers()[0].weights(0, 0) == doctest::Approx(expected).epsilon(1e-15));
    CHECK(std::abs((3.0 - net.layers()[0].weights(0, 0)) - lr) < 1e-11);
    CHECK(net.layers()[0].bias(0) == doctest::Approx(-lr).epsilon(1e-6));

    const auto& m = opt.first_moments();
    const auto& v = opt.second_moments();
    CHECK(m[0].weights.rows() == 1);
    CHECK(v[0].weights(0, 0) == doctest::Approx(0.001));
}

TEST_CASE("training on a fixed batch cuts the loss tenfold within 1000 steps") {
    Rng rng = make_stream(8, Stream::WeightInit);
    QNetwork net = QNetwork::random(rng);
    const Batch b = random_batch(rng, 32);
    Adam opt(net, AdamConfig{1e-3, 1e-5});
    const double initial = loss(net, b);
    double l = initial;
    for (int i = 0; i < 1000; ++i) {
        opt.step(net, backward(net, b, &l));
    }
    const double final_loss = loss(net, b);
    MESSAGE("loss " << initial << " -> " << final_loss);
    CHECK(final_loss * 10.0 <= initial);
    CHECK(net.all_finite());
}

TEST_CASE("sync_clone is an independent deep copy") {
    Rng rng = make_stream(10, Stream::WeightInit);
    QNetwork net = QNetwork::random(rng);
    const QNetwork clone = sync_clone(net);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int i = 0; i < 20; ++i) {
        const Observation o{u(rng), u(rng), u(rng)};
        CHECK(clone.forward(o) == net.forward(o));
        CHECK(sync_clone(sync_clone(clone)).forward(o) == clone.forward(o));
    }
    const Observation probe{0.2, 0.1, -0.3};
    const Vector before = clone.forward(probe);
    net.layers()[0].weights.array() += 1.0;
    net.layers().back().bias.array() -= 3.0;
    CHECK(clone.forward(probe) == before);
    CHECK(net.forward(probe) != before);
}

TEST_CASE("checkpoints round-trip and reject malformed documents") {
    Rng rng = make_stream(11, Stream::WeightInit);
    const QNetwork net = QNetwork::random(rng);
    const auto doc = to_checkpoint(net, 17, 12345);
    CHECK(doc["architecture"] == nlohmann::json::array({3, 64, 64, 64, 64, 10}));
    CHECK(doc["layers"][0]["weights"].size() == 64);
    CHECK(doc["layers"][0]["weights"][0].size() == 3);
    const Checkpoint back = from_checkpoint(nlohmann::json::parse(doc.dump()));
    CHECK(back.net == net);
    CHECK(back.seed == 17);
    CHECK(back.frame_count == 12345);

    auto wrong_arch = doc;
    wrong_arch["architecture"] = {3, 32, 10};
    CHECK_THROWS_AS((void)from_checkpoint(wrong_arch), std::runtime_error);

    auto wrong_shape = doc;
    wrong_shape["layers"][2]["bias"].erase(0);
    CHECK_THROWS_AS((void)from_checkpoint(wrong_shape), std::runtime_error);

    auto missing = doc;
    missing.erase("layers");
    CHECK_THROWS_AS((void)from_checkpoint(missing), std::runtime_error);

    CHECK_THROWS_AS((void)load_checkpoint("/nonexistent/checkpoint.json"), std::runtime_error);
}
