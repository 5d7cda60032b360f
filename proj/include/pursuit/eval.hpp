#pragma once

// Fixed 80-case test suite, greedy evaluation and win-rate metrics.

#include <cstdint>
#include <span>
#include <vector>

#include <json.hpp>

#include "pursuit/env.hpp"
#include "pursuit/nn.hpp"

namespace pursuit::eval {

struct TestCase {
    int id{0};
    WorldState init;
};

inline constexpr std::array<double, 5> kSuiteSeparations{0.5, 0.6, 0.7, 0.8, 0.9};
inline constexpr std::array<double, 4> kSuiteAngles{0.0, kPi / 2.0, kPi, 3.0 * kPi / 2.0};
inline constexpr int kSuiteSize = 80;

/// Separation d x RL bearing from GS x RL heading, d-major; GS at the origin
/// facing +x, RL at (d cos b, d sin b) with heading h.
[[nodiscard]] std::vector<TestCase> build_suite();

struct CaseResult {
    int id{0};
    Verdict verdict{Verdict::Ongoing};
    int length{0};
};

struct EvalReport {
    int wins{0};
    int losses{0};
    int mutual{0};
    int timeouts{0};
    std::vector<CaseResult> cases;  // ordered by case id
    double mean_win_length{0.0};    // 0 when there are no wins

    [[nodiscard]] int total() const noexcept { return wins + losses + mutual + timeouts; }
};

struct Episode {
    Verdict verdict{Verdict::Ongoing};
    int length{0};
    std::vector<TrajectoryRow> rows;
};

/// Plays one greedy (epsilon = 0) episode from `init` until terminal.
[[nodiscard]] Episode run_greedy_episode(const nn::QNetwork& net, const WorldState& init, const EnvConfig& cfg = {},
                                         std::int64_t episode_id = 0);

[[nodiscard]] EvalReport evaluate(const nn::QNetwork& net, std::span<const TestCase> suite,
                                  const EnvConfig& cfg = {});

/// Element i is the mean of rewards[max(0, i - window + 1) ..= i].
[[nodiscard]] std::vector<double> smooth_rewards(std::span<const int> rewards, int window = 100);

[[nodiscard]] nlohmann::json to_json(const EvalReport& report);

/// True when some step with the slow RL speed lies within `max_gap` steps of
/// a moment where the RL agent is ahead of the GS, i.e. inside the GS's
/// forward cone of half-angle `ahead_half_angle`.
[[nodiscard]] bool shows_cut_in_slowdown(std::span<const TrajectoryRow> rows, const EnvConfig& cfg = {},
                                         int max_gap = 10, double ahead_half_angle = kPi / 4.0);

}  // namespace pursuit::eval
