#pragma once

// Deep Q-learning: replay buffer, epsilon-greedy exploration, Bellman targets
// from a periodically synchronised target network, and the frame-driven
// training loop with periodic greedy evaluation on the fixed test suite.

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "pursuit/env.hpp"
#include "pursuit/eval.hpp"
#include "pursuit/nn.hpp"
#include "pursuit/rng.hpp"

namespace pursuit::dqn {

struct Transition {
    Observation obs;
    int action_index{0};
    int reward{0};
    Observation next_obs;
    bool terminal{false};

    friend bool operator==(const Transition&, const Transition&) = default;
};

/// Fixed-capacity ring of transitions; once full the oldest entry is overwritten.
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity);

    void push(const Transition& t);

    [[nodiscard]] std::size_t size() const noexcept { return size_; }
    [[nodiscard]] std::size_t capacity() const noexcept { return storage_.size(); }
    [[nodiscard]] bool empty() const noexcept { return size_ == 0; }

    /// Logical index: 0 is the oldest retained transition.
    [[nodiscard]] const Transition& at(std::size_t i) const;

    /// `n` logical indices drawn uniformly with replacement.
    [[nodiscard]] std::vector<std::size_t> sample_indices(std::size_t n, Rng& rng) const;
    [[nodiscard]] std::vector<Transition> sample(std::size_t n, Rng& rng) const;

private:
    std::vector<Transition> storage_;
    std::size_t head_{0};  // next write slot
    std::size_t size_{0};
};

struct TrainConfig {
    double gamma{0.99};
    int batch_size{32};
    double learning_rate{1e-4};
    double weight_decay{1e-5};
    double final_epsilon{0.02};
    std::int64_t epsilon_decay_frames{100'000};
    std::int64_t warmup_frames{10'000};
    std::int64_t target_sync_frames{1'000};
    std::int64_t test_every_frames{25'000};
    std::int64_t max_frames{2'000'000};
    std::size_t buffer_capacity{100'000};
    std::uint64_t seed{0};
    bool stop_on_perfect{true};

    void validate() const;
};

/// Linear from 1.0 at frame 0 down to final_epsilon at epsilon_decay_frames.
[[nodiscard]] double epsilon_at(std::int64_t frame, const TrainConfig& cfg);

/// Index of the largest value; the lowest index wins exact ties.
[[nodiscard]] int argmax(const nn::Vector& q);

/// Random stream that must never be drawn from. Used wherever a greedy
/// policy is evaluated so an accidental draw is caught immediately.
struct PoisonedStream {
    using result_type = std::uint64_t;
    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
    result_type operator()() const { throw std::logic_error("greedy policy consulted a random stream"); }
};

/// Epsilon-greedy selection. The stream is only touched when epsilon > 0.
template <class URBG>
[[nodiscard]] int select_action(const nn::QNetwork& net, const Observation& obs, double epsilon, URBG& rng) {
    if (epsilon < 0.0 || epsilon > 1.0) {
        throw std::invalid_argument("select_action: epsilon must lie in [0, 1]");
    }
    if (epsilon > 0.0) {
        const bool explore =
            epsilon >= 1.0 || std::uniform_real_distribution<double>(0.0, 1.0)(rng) < epsilon;
        if (explore) {
            return std::uniform_int_distribution<int>(0, net.output_size() - 1)(rng);
        }
    }
    return argmax(net.forward(obs));
}

/// reward if terminal, else reward + gamma * max_a Q_target(next_obs, a).
[[nodiscard]] std::vector<double> bellman_targets(std::span<const Transition> batch, const nn::QNetwork& target_net,
                                                  double gamma);

struct EpisodeRecord {
    std::int64_t frame{0};  // frame count at the episode's final step
    std::int64_t episode{0};
    int reward{0};
    double smoothed_reward{0.0};

    friend bool operator==(const EpisodeRecord&, const EpisodeRecord&) = default;
};

struct TestRecord {
    std::int64_t frame{0};
    int wins{0};
    int suite_size{0};

    friend bool operator==(const TestRecord&, const TestRecord&) = default;
};

struct TrainLog {
    std::vector<EpisodeRecord> episodes;
    std::vector<TestRecord> tests;

    friend bool operator==(const TrainLog&, const TrainLog&) = default;
};

struct FrameInfo {
    std::int64_t frame{0};
    int action_index{0};
    StepOutcome outcome;
    bool optimized{false};
    bool synced{false};
    std::optional<eval::EvalReport> test;
};

/// Sequential training loop. Every random component draws from its own child
/// stream of cfg.seed (see make_stream).
class Trainer {
public:
    using TestCallback = std::function<void(const TestRecord&, const eval::EvalReport&, const nn::QNetwork&)>;

    Trainer(EnvConfig env_cfg, TrainConfig cfg);

    /// Runs one environment frame plus whatever learning, syncing and
    /// testing falls due on it.
    FrameInfo step_frame();

    /// Runs until max_frames, or until a perfect test when stop_on_perfect.
    void run();
    /// Runs exactly `frames` more frames regardless of test results.
    void run_frames(std::int64_t frames);

    void set_test_callback(TestCallback cb) { on_test_ = std::move(cb); }

    [[nodiscard]] const TrainLog& log() const noexcept { return log_; }
    [[nodiscard]] const nn::QNetwork& online_net() const noexcept { return online_; }
    [[nodiscard]] const nn::QNetwork& target_net() const noexcept { return target_; }
    [[nodiscard]] const ReplayBuffer& buffer() const noexcept { return buffer_; }
    [[nodiscard]] const TrainConfig& config() const noexcept { return cfg_; }
    [[nodiscard]] const EnvConfig& env_config() const noexcept { return env_cfg_; }
    [[nodiscard]] std::int64_t frame() const noexcept { return frame_; }
    [[nodiscard]] bool reached_perfect() const noexcept { return reached_perfect_; }
    [[nodiscard]] double last_loss() const noexcept { return last_loss_; }

private:
    void optimize();
    void record_episode(int reward);

    EnvConfig env_cfg_;
    TrainConfig cfg_;
    Rng env_rng_;
    Rng explore_rng_;
    Rng sample_rng_;
    PursuitEnv env_;
    Observation obs_;
    nn::QNetwork online_;
    nn::QNetwork target_;
    nn::Adam optimizer_;
    ReplayBuffer buffer_;
    std::vector<eval::TestCase> suite_;
    TrainLog log_;
    std::vector<int> window_;  // rewards of the most recent episodes
    int window_sum_{0};
    std::int64_t frame_{0};
    std::int64_t episode_{0};
    bool reached_perfect_{false};
    double last_loss_{0.0};
    TestCallback on_test_;
};

struct TrainResult {
    nn::QNetwork net;
    TrainLog log;
    std::int64_t frames{0};
    bool perfect{false};
};

[[nodiscard]] TrainResult train(const TrainConfig& cfg, const EnvConfig& env_cfg = {});

void write_train_log_csv(std::ostream& os, const TrainLog& log);
void write_test_log_csv(std::ostream& os, const TrainLog& log);

}  // namespace pursuit::dqn
