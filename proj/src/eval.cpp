#include "pursuit/eval.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pursuit/dqn.hpp"

namespace pursuit::eval {

std::vector<TestCase> build_suite() {
    std::vector<TestCase> suite;
    suite.reserve(kSuiteSize);
    int id = 0;
    for (double d : kSuiteSeparations) {
        for (double bearing : kSuiteAngles) {
            for (double heading : kSuiteAngles) {
                const Pose rl = make_pose(d * std::cos(bearing), d * std::sin(bearing), heading);
                suite.push_back(TestCase{id++, WorldState{rl, Pose{0.0, 0.0, 0.0}, 0}});
            }
        }
    }
    return suite;
}

Episode run_greedy_episode(const nn::QNetwork& net, const WorldState& init, const EnvConfig& cfg,
                           std::int64_t episode_id) {
    PursuitEnv env(cfg);
    Observation obs = env.reset_fixed(init);
    dqn::PoisonedStream no_rng;
    Episode ep;
    ep.rows.push_back(TrajectoryRow{episode_id, 0, init.rl, init.gs, -1, 0, Verdict::Ongoing});
    while (!env.done()) {
        const int a = dqn::select_action(net, obs, 0.0, no_rng);
        const StepOutcome out = env.step(a);
        obs = out.observation;
        const auto& s = env.state();
        ep.rows.push_back(TrajectoryRow{episode_id, s.step_count, s.rl, s.gs, a, out.reward, out.verdict});
        ep.verdict = out.verdict;
    }
    ep.length = env.state().step_count;
    return ep;
}

EvalReport evaluate(const nn::QNetwork& net, std::span<const TestCase> suite, const EnvConfig& cfg) {
    EvalReport report;
    report.cases.reserve(suite.size());
    long win_steps = 0;
    for (const auto& tc : suite) {
        const Episode ep = run_greedy_episode(net, tc.init, cfg, tc.id);
        report.cases.push_back(CaseResult{tc.id, ep.verdict, ep.length});
        switch (ep.verdict) {
            case Verdict::RlWin:
                ++report.wins;
                win_steps += ep.length;
                break;
            case Verdict::RlLoss: ++report.losses; break;
            case Verdict::MutualCapture: ++report.mutual; break;
            case Verdict::Timeout: ++report.timeouts; break;
            case Verdict::Ongoing: throw std::logic_error("evaluate: episode ended without a verdict");
        }
    }
    std::sort(report.cases.begin(), report.cases.end(),
              [](const CaseResult& a, const CaseResult& b) { return a.id < b.id; });
    if (report.wins > 0) {
        report.mean_win_length = static_cast<double>(win_steps) / report.wins;
    }
    return report;
}

std::vector<double> smooth_rewards(std::span<const int> rewards, int window) {
    if (window < 1) {
        throw std::invalid_argument("smooth_rewards: window must be at least 1");
    }
    std::vector<double> out;
    out.reserve(rewards.size());
    long sum = 0;
    for (std::size_t i = 0; i < rewards.size(); ++i) {
        sum += rewards[i];
        if (i >= static_cast<std::size_t>(window)) {
            sum -= rewards[i - static_cast<std::size_t>(window)];
        }
        const auto n = std::min<std::size_t>(i + 1, static_cast<std::size_t>(window));
        out.push_back(static_cast<double>(sum) / static_cast<double>(n));
    }
    return out;
}

nlohmann::json to_json(const EvalReport& report) {
    auto cases = nlohmann::json::array();
    for (const auto& c : report.cases) {
        cases.push_back({{"id", c.id}, {"verdict", to_string(c.verdict)}, {"length", c.length}});
    }
    return {{"wins", report.wins},
            {"losses", report.losses},
            {"mutual", report.mutual},
            {"timeouts", report.timeouts},
            {"total", report.total()},
            {"mean_win_length", report.mean_win_length},
            {"cases", std::move(cases)}};
}

bool shows_cut_in_slowdown(std::span<const TrajectoryRow> rows, const EnvConfig& cfg, int max_gap,
                           double ahead_half_angle) {
    const double slow = *std::min_element(cfg.rl_speeds.begin(), cfg.rl_speeds.end());
    std::vector<int> ahead_steps;
    std::vector<int> slow_steps;
    for (const auto& r : rows) {
        if (std::abs(relative_bearing(r.gs, r.rl.x, r.rl.y)) <= ahead_half_angle) {
            ahead_steps.push_back(r.step);
        }
        if (r.rl_action_index >= 0 && cfg.rl_action(r.rl_action_index).speed == slow) {
            slow_steps.push_back(r.step);
        }
    }
    for (int a : ahead_steps) {
        for (int s : slow_steps) {
            if (std::abs(a - s) <= max_gap) {
                return true;
            }
        }
    }
    return false;
}

}  // namespace pursuit::eval
