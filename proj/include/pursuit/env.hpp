#pragma once

// Two-agent pursuit-evasion environment: an RL-controlled evader/attacker
// against a pure-pursuit greedy shooter (GS). Both agents move simultaneously
// once per one-second step; capture is checked on end-of-step poses.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string_view>
#include <utility>
#include <vector>

#include "pursuit/geometry.hpp"
#include "pursuit/rng.hpp"

namespace pursuit {

inline constexpr int kNumActions = 10;

struct Action {
    double turn{0.0};   // radians
    double speed{0.0};  // meters per second

    friend bool operator==(const Action&, const Action&) = default;
};

enum class Verdict { Ongoing, RlWin, RlLoss, MutualCapture, Timeout };

[[nodiscard]] std::string_view to_string(Verdict v) noexcept;
[[nodiscard]] Verdict verdict_from_string(std::string_view s);

struct WorldState {
    Pose rl;
    Pose gs;
    int step_count{0};

    friend bool operator==(const WorldState&, const WorldState&) = default;
};

struct StepOutcome {
    Observation observation;
    int reward{0};
    bool terminal{false};
    Verdict verdict{Verdict::Ongoing};
};

struct EnvConfig {
    // Speed-major, turn-minor: index = speed_idx * rl_turns.size() + turn_idx.
    std::vector<double> rl_speeds{0.05, 0.1};
    std::vector<double> rl_turns{-kPi / 6.0, -kPi / 12.0, 0.0, kPi / 12.0, kPi / 6.0};
    double gs_speed{0.1};
    double gs_turn_limit{kPi / 6.0};
    SectorSpec targeting{0.25, kPi / 6.0};
    double dt{1.0};
    int max_steps{100};
    double init_pos_stddev{0.5};

    [[nodiscard]] int num_actions() const noexcept {
        return static_cast<int>(rl_speeds.size() * rl_turns.size());
    }
    /// Throws std::out_of_range for an index outside the action set.
    [[nodiscard]] Action rl_action(int index) const;
    /// Index of an action in the discrete set, or -1 if it is not a member.
    [[nodiscard]] int rl_action_index(const Action& a) const noexcept;

    void validate() const;
};

/// Symmetry-reduced view: the RL pose in the GS body frame.
[[nodiscard]] Observation observe(const WorldState& state);

/// Pure pursuit toward the RL agent's current position, turn clamped to
/// +-gs_turn_limit. A coincident RL agent yields a zero turn.
[[nodiscard]] Action gs_policy(const WorldState& state, const EnvConfig& cfg);

/// Advances one step: both agents turn, then translate speed*dt along the new
/// heading. Throws std::logic_error when called on a finished episode and
/// std::invalid_argument for an RL action outside the discrete set.
[[nodiscard]] std::pair<WorldState, StepOutcome> step(const WorldState& state, const Action& rl_action,
                                                      const EnvConfig& cfg);

/// Verdict for end-of-step poses.
[[nodiscard]] Verdict judge(const WorldState& state, const EnvConfig& cfg);

/// Stateful wrapper around the pure step function.
class PursuitEnv {
public:
    explicit PursuitEnv(EnvConfig cfg = {});

    /// GS at the origin facing +x; RL position ~ N(0, stddev^2) per axis,
    /// heading uniform on (-pi, pi].
    Observation reset_random(Rng& rng);
    Observation reset_fixed(const WorldState& init);

    StepOutcome step(int action_index);
    StepOutcome step(const Action& rl_action);

    [[nodiscard]] const WorldState& state() const noexcept { return state_; }
    [[nodiscard]] const EnvConfig& config() const noexcept { return cfg_; }
    [[nodiscard]] bool done() const noexcept { return done_; }

private:
    EnvConfig cfg_;
    WorldState state_{};
    bool done_{true};
};

/// One row of the trajectory export. Row 0 holds the initial poses with
/// action index -1; row k holds the poses after step k and the action taken.
struct TrajectoryRow {
    std::int64_t episode_id{0};
    int step{0};
    Pose rl;
    Pose gs;
    int rl_action_index{-1};
    int reward{0};
    Verdict verdict{Verdict::Ongoing};
};

inline constexpr std::string_view kTrajectoryCsvHeader =
    "episode_id,step,rl_x,rl_y,rl_heading,gs_x,gs_y,gs_heading,rl_action_index,reward,verdict";

void write_trajectory_csv(std::ostream& os, const std::vector<TrajectoryRow>& rows);
[[nodiscard]] std::vector<TrajectoryRow> read_trajectory_csv(std::istream& is);

}  // namespace pursuit
