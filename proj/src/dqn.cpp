#include "pursuit/dqn.hpp"

#include <algorithm>
#include <iomanip>
#include <ostream>
#include <string>

namespace pursuit::dqn {

namespace {
constexpr int kSmoothingWindow = 100;
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) {
    if (capacity == 0) {
        throw std::invalid_argument("ReplayBuffer: capacity must be positive");
    }
    storage_.resize(capacity);
}

void ReplayBuffer::push(const Transition& t) {
    storage_[head_] = t;
    head_ = (head_ + 1) % storage_.size();
    size_ = std::min(size_ + 1, storage_.size());
}

const Transition& ReplayBuffer::at(std::size_t i) const {
    if (i >= size_) {
        throw std::out_of_range("ReplayBuffer::at: index " + std::to_string(i) + " beyond size");
    }
    const std::size_t oldest = size_ < storage_.size() ? 0 : head_;
    return storage_[(oldest + i) % storage_.size()];
}

std::vector<std::size_t> ReplayBuffer::sample_indices(std::size_t n, Rng& rng) const {
    if (size_ == 0) {
        throw std::logic_error("ReplayBuffer::sample: buffer is empty");
    }
    std::uniform_int_distribution<std::size_t> pick(0, size_ - 1);
    std::vector<std::size_t> idx(n);
    for (auto& i : idx) {
        i = pick(rng);
    }
    return idx;
}

std::vector<Transition> ReplayBuffer::sample(std::size_t n, Rng& rng) const {
    std::vector<Transition> out;
    out.reserve(n);
    for (std::size_t i : sample_indices(n, rng)) {
        out.push_back(at(i));
    }
    return out;
}

void TrainConfig::validate() const {
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("TrainConfig: gamma must lie in [0, 1]");
    if (batch_size < 1) throw std::invalid_argument("TrainConfig: batch_size must be positive");
    if (!(learning_rate >= 0.0)) throw std::invalid_argument("TrainConfig: learning_rate must be non-negative");
    if (!(weight_decay >= 0.0)) throw std::invalid_argument("TrainConfig: weight_decay must be non-negative");
    if (!(final_epsilon >= 0.0 && final_epsilon <= 1.0)) {
        throw std::invalid_argument("TrainConfig: final_epsilon must lie in [0, 1]");
    }
    if (epsilon_decay_frames < 0 || warmup_frames < 0 || max_frames < 0) {
        throw std::invalid_argument("TrainConfig: frame counts must be non-negative");
    }
    if (target_sync_frames < 1 || test_every_frames < 1) {
        throw std::invalid_argument("TrainConfig: target_sync_frames and test_every_frames must be positive");
    }
    if (buffer_capacity == 0) throw std::invalid_argument("TrainConfig: buffer_capacity must be positive");
}

double epsilon_at(std::int64_t frame, const TrainConfig& cfg) {
    if (frame < 0) {
        throw std::invalid_argument("epsilon_at: negative frame");
    }
    if (frame >= cfg.epsilon_decay_frames) {
        return cfg.final_epsilon;
    }
    const double t = static_cast<double>(frame) / static_cast<double>(cfg.epsilon_decay_frames);
    return 1.0 + t * (cfg.final_epsilon - 1.0);
}

int argmax(const nn::Vector& q) {
    if (q.size() == 0) {
        throw std::invalid_argument("argmax: empty vector");
    }
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < q.size(); ++i) {
        if (q(i) > q(best)) {
            best = i;
        }
    }
    return static_cast<int>(best);
}

std::vector<double> bellman_targets(std::span<const Transition> batch, const nn::QNetwork& target_net, double gamma) {
    if (batch.empty()) {
        throw std::invalid_argument("bellman_targets: empty batch");
    }
    std::vector<double> targets(batch.size());
    nn::Matrix next(3, static_cast<Eigen::Index>(batch.size()));
    for (std::size_t j = 0; j < batch.size(); ++j) {
        const auto& o = batch[j].next_obs;
        next.col(static_cast<Eigen::Index>(j)) << o.x, o.y, o.heading;
    }
    const nn::Matrix q = target_net.forward_batch(next);
    for (std::size_t j = 0; j < batch.size(); ++j) {
        const auto& t = batch[j];
        targets[j] = t.terminal ? static_cast<double>(t.reward)
                                : t.reward + gamma * q.col(static_cast<Eigen::Index>(j)).maxCoeff();
    }
    return targets;
}

Trainer::Trainer(EnvConfig env_cfg, TrainConfig cfg)
    : env_cfg_(std::move(env_cfg)),
      cfg_(cfg),
      env_rng_(make_stream(cfg.seed, Stream::EnvInit)),
      explore_rng_(make_stream(cfg.seed, Stream::Exploration)),
      sample_rng_(make_stream(cfg.seed, Stream::BufferSampling)),
      env_(env_cfg_),
      online_([&] {
          auto rng = make_stream(cfg.seed, Stream::WeightInit);
          return nn::QNetwork::random(rng);
      }()),
      target_(nn::sync_clone(online_)),
      optimizer_(online_, nn::AdamConfig{cfg.learning_rate, cfg.weight_decay}),
      buffer_(cfg.buffer_capacity),
      suite_(eval::build_suite()),
      window_(kSmoothingWindow, 0) {
    cfg_.validate();
    if (env_cfg_.num_actions() != nn::kArchitecture.back()) {
        throw std::invalid_argument("Trainer: RL action set size must match the network output width");
    }
    obs_ = env_.reset_random(env_rng_);
}

FrameInfo Trainer::step_frame() {
    FrameInfo info;
    const double eps = epsilon_at(frame_, cfg_);
    info.action_index = select_action(online_, obs_, eps, explore_rng_);
    info.outcome = env_.step(info.action_index);
    buffer_.push(Transition{obs_, info.action_index, info.outcome.reward, info.outcome.observation,
                            info.outcome.terminal});
    ++frame_;
    info.frame = frame_;

    if (info.outcome.terminal) {
        record_episode(info.outcome.reward);
        obs_ = env_.reset_random(env_rng_);
    } else {
        obs_ = info.outcome.observation;
    }

    if (frame_ > cfg_.warmup_frames && buffer_.size() >= static_cast<std::size_t>(cfg_.batch_size)) {
        optimize();
        info.optimized = true;
    }
    if (frame_ % cfg_.target_sync_frames == 0) {
        target_ = nn::sync_clone(online_);
        info.synced = true;
    }
    if (frame_ % cfg_.test_every_frames == 0) {
        eval::EvalReport report = eval::evaluate(online_, suite_, env_cfg_);
        TestRecord rec{frame_, report.wins, static_cast<int>(suite_.size())};
        log_.tests.push_back(rec);
        if (report.wins == rec.suite_size) {
            reached_perfect_ = true;
        }
        if (on_test_) {
            on_test_(rec, report, online_);
        }
        info.test = std::move(report);
    }
    return info;
}

void Trainer::optimize() {
    const auto batch = buffer_.sample(static_cast<std::size_t>(cfg_.batch_size), sample_rng_);
    const std::vector<double> y = bellman_targets(batch, target_, cfg_.gamma);

    const auto n = static_cast<Eigen::Index>(batch.size());
    const auto outputs = static_cast<Eigen::Index>(online_.output_size());
    nn::Batch b{nn::Matrix(3, n), nn::Matrix::Zero(outputs, n), nn::Matrix::Zero(outputs, n)};
    for (Eigen::Index j = 0; j < n; ++j) {
        const auto& t = batch[static_cast<std::size_t>(j)];
        b.inputs.col(j) << t.obs.x, t.obs.y, t.obs.heading;
        b.targets(t.action_index, j) = y[static_cast<std::size_t>(j)];
        b.mask(t.action_index, j) = 1.0;
    }
    const nn::Gradients g = nn::backward(online_, b, &last_loss_);
    optimizer_.step(online_, g);
}

void Trainer::record_episode(int reward) {
    const auto slot = static_cast<std::size_t>(episode_ % kSmoothingWindow);
    window_sum_ += reward - window_[slot];
    window_[slot] = reward;
    const auto count = std::min<std::int64_t>(episode_ + 1, kSmoothingWindow);
    log_.episodes.push_back(
        EpisodeRecord{frame_, episode_, reward, static_cast<double>(window_sum_) / static_cast<double>(count)});
    ++episode_;
}

void Trainer::run() {
    while (frame_ < cfg_.max_frames) {
        step_frame();
        if (cfg_.stop_on_perfect && reached_perfect_) {
            break;
        }
    }
}

void Trainer::run_frames(std::int64_t frames) {
    for (std::int64_t i = 0; i < frames; ++i) {
        step_frame();
    }
}

TrainResult train(const TrainConfig& cfg, const EnvConfig& env_cfg) {
    Trainer trainer(env_cfg, cfg);
    trainer.run();
    return TrainResult{trainer.online_net(), trainer.log(), trainer.frame(), trainer.reached_perfect()};
}

void write_train_log_csv(std::ostream& os, const TrainLog& log) {
    os << "frame,episode,reward,smoothed_reward\n" << std::setprecision(17);
    for (const auto& e : log.episodes) {
        os << e.frame << ',' << e.episode << ',' << e.reward << ',' << e.smoothed_reward << '\n';
    }
}

void write_test_log_csv(std::ostream& os, const TrainLog& log) {
    os << "frame,test_wins_of_80\n";
    for (const auto& t : log.tests) {
        os << t.frame << ',' << t.wins << '\n';
    }
}

}  // namespace pursuit::dqn
