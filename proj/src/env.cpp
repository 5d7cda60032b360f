#include "pursuit/env.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace pursuit {

std::string_view to_string(Verdict v) noexcept {
    switch (v) {
        case Verdict::Ongoing: return "Ongoing";
        case Verdict::RlWin: return "RlWin";
        case Verdict::RlLoss: return "RlLoss";
        case Verdict::MutualCapture: return "MutualCapture";
        case Verdict::Timeout: return "Timeout";
    }
    return "Ongoing";
}

Verdict verdict_from_string(std::string_view s) {
    for (Verdict v : {Verdict::Ongoing, Verdict::RlWin, Verdict::RlLoss, Verdict::MutualCapture,
                      Verdict::Timeout}) {
        if (to_string(v) == s) {
            return v;
        }
    }
    throw std::invalid_argument("unknown verdict: " + std::string(s));
}

Action EnvConfig::rl_action(int index) const {
    if (index < 0 || index >= num_actions()) {
        throw std::out_of_range("action index " + std::to_string(index) + " outside the action set");
    }
    const auto n_turns = static_cast<int>(rl_turns.size());
    return Action{rl_turns[static_cast<std::size_t>(index % n_turns)],
                  rl_speeds[static_cast<std::size_t>(index / n_turns)]};
}

int EnvConfig::rl_action_index(const Action& a) const noexcept {
    for (int i = 0; i < num_actions(); ++i) {
        if (rl_action(i) == a) {
            return i;
        }
    }
    return -1;
}

void EnvConfig::validate() const {
    if (rl_speeds.empty() || rl_turns.empty()) {
        throw std::invalid_argument("EnvConfig: empty RL action set");
    }
    if (!(gs_speed >= 0.0) || !(gs_turn_limit >= 0.0) || !(dt > 0.0) || max_steps < 1 ||
        !(init_pos_stddev >= 0.0)) {
        throw std::invalid_argument("EnvConfig: invalid dynamics parameters");
    }
    pursuit::validate(targeting);
}

Observation observe(const WorldState& state) {
    return to_relative_frame(state.gs, state.rl);
}

Action gs_policy(const WorldState& state, const EnvConfig& cfg) {
    const auto& gs = state.gs;
    const auto& rl = state.rl;
    double turn = 0.0;
    if (rl.x != gs.x || rl.y != gs.y) {
        turn = std::clamp(relative_bearing(gs, rl.x, rl.y), -cfg.gs_turn_limit, cfg.gs_turn_limit);
    }
    return Action{turn, cfg.gs_speed};
}

namespace {

Pose advance(const Pose& pose, const Action& action, double dt) {
    const double heading = normalize_angle(pose.heading + action.turn);
    const double dist = action.speed * dt;
    return Pose{pose.x + dist * std::cos(heading), pose.y + dist * std::sin(heading), heading};
}

}  // namespace

Verdict judge(const WorldState& state, const EnvConfig& cfg) {
    const bool rl_captures = in_sector(state.rl, state.gs.x, state.gs.y, cfg.targeting);
    const bool gs_captures = in_sector(state.gs, state.rl.x, state.rl.y, cfg.targeting);
    if (rl_captures && gs_captures) {
        return Verdict::MutualCapture;
    }
    if (rl_captures) {
        return Verdict::RlWin;
    }
    if (gs_captures) {
        return Verdict::RlLoss;
    }
    if (state.step_count >= cfg.max_steps) {
        return Verdict::Timeout;
    }
    return Verdict::Ongoing;
}

std::pair<WorldState, StepOutcome> step(const WorldState& state, const Action& rl_action,
                                        const EnvConfig& cfg) {
    if (state.step_count >= cfg.max_steps ||
        (state.step_count > 0 && judge(state, cfg) != Verdict::Ongoing)) {
        throw std::logic_error("step: episode already finished");
    }
    if (cfg.rl_action_index(rl_action) < 0) {
        throw std::invalid_argument("step: RL action is not in the discrete action set");
    }
    const Action gs_action = gs_policy(state, cfg);

    WorldState next{advance(state.rl, rl_action, cfg.dt), advance(state.gs, gs_action, cfg.dt),
                    state.step_count + 1};

    StepOutcome out;
    out.verdict = judge(next, cfg);
    out.terminal = out.verdict != Verdict::Ongoing;
    out.reward = out.verdict == Verdict::RlWin ? 1 : 0;
    out.observation = observe(next);
    return {next, out};
}

PursuitEnv::PursuitEnv(EnvConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
}

Observation PursuitEnv::reset_random(Rng& rng) {
    std::normal_distribution<double> pos(0.0, cfg_.init_pos_stddev);
    std::uniform_real_distribution<double> heading(-kPi, kPi);
    const double x = pos(rng);
    const double y = pos(rng);
    state_ = WorldState{make_pose(x, y, heading(rng)), Pose{0.0, 0.0, 0.0}, 0};
    done_ = false;
    return observe(state_);
}

Observation PursuitEnv::reset_fixed(const WorldState& init) {
    if (init.step_count != 0) {
        throw std::invalid_argument("reset_fixed: initial state must have step_count 0");
    }
    if (!is_valid(init.rl) || !is_valid(init.gs)) {
        throw std::invalid_argument("reset_fixed: invalid pose");
    }
    state_ = init;
    done_ = false;
    return observe(state_);
}

StepOutcome PursuitEnv::step(int action_index) {
    return step(cfg_.rl_action(action_index));
}

StepOutcome PursuitEnv::step(const Action& rl_action) {
    if (done_) {
        throw std::logic_error("PursuitEnv::step: episode finished, call a reset first");
    }
    auto [next, out] = pursuit::step(state_, rl_action, cfg_);
    state_ = next;
    done_ = out.terminal;
    return out;
}

void write_trajectory_csv(std::ostream& os, const std::vector<TrajectoryRow>& rows) {
    os << kTrajectoryCsvHeader << '\n';
    os << std::setprecision(17);
    for (const auto& r : rows) {
        os << r.episode_id << ',' << r.step << ',' << r.rl.x << ',' << r.rl.y << ',' << r.rl.heading << ','
           << r.gs.x << ',' << r.gs.y << ',' << r.gs.heading << ',' << r.rl_action_index << ',' << r.reward
           << ',' << to_string(r.verdict) << '\n';
    }
}

std::vector<TrajectoryRow> read_trajectory_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != kTrajectoryCsvHeader) {
        throw std::runtime_error("trajectory csv: missing or unexpected header");
    }
    std::vector<TrajectoryRow> rows;
    while (std::getline(is, line)) {
        if (line.empty()) {
            continue;
        }
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            f.push_back(cell);
        }
        if (f.size() != 11) {
            throw std::runtime_error("trajectory csv: expected 11 columns, got " + std::to_string(f.size()));
        }
        TrajectoryRow r;
        r.episode_id = std::stoll(f[0]);
        r.step = std::stoi(f[1]);
        r.rl = Pose{std::stod(f[2]), std::stod(f[3]), std::stod(f[4])};
        r.gs = Pose{std::stod(f[5]), std::stod(f[6]), std::stod(f[7])};
        r.rl_action_index = std::stoi(f[8]);
        r.reward = std::stoi(f[9]);
        r.verdict = verdict_from_string(f[10]);
        rows.push_back(r);
    }
    return rows;
}

}  // namespace pursuit
