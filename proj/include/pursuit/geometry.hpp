#pragma once

// Planar kinematics: poses, angle wrapping, frame transforms and
// targeting-sector containment.

#include <numbers>

namespace pursuit {

inline constexpr double kPi = std::numbers::pi;

/// Position in meters plus heading in radians, heading kept in (-pi, pi].
struct Pose {
    double x{0.0};
    double y{0.0};
    double heading{0.0};

    friend bool operator==(const Pose&, const Pose&) = default;
};

/// Pose of one agent expressed in another agent's body frame.
struct Observation {
    double x{0.0};
    double y{0.0};
    double heading{0.0};

    friend bool operator==(const Observation&, const Observation&) = default;
};

/// Circular sector centred on an agent's heading. `angle` is the full
/// central angle, so the sector spans +-angle/2 about the heading.
struct SectorSpec {
    double range{0.25};
    double angle{kPi / 6.0};
};

/// Wraps theta into (-pi, pi]. Throws std::invalid_argument on non-finite input.
[[nodiscard]] double normalize_angle(double theta);

/// Returns a pose with the heading wrapped; throws if any field is non-finite.
[[nodiscard]] Pose make_pose(double x, double y, double heading);

[[nodiscard]] bool is_valid(const Pose& pose) noexcept;
void validate(const SectorSpec& spec);

/// Expresses `target` in the frame where `reference` sits at the origin
/// facing +x.
[[nodiscard]] Observation to_relative_frame(const Pose& reference, const Pose& target);

/// Inverse of to_relative_frame: maps a relative pose back to world coordinates.
[[nodiscard]] Pose from_relative_frame(const Pose& reference, const Observation& relative);

/// Bearing of (px, py) seen from `owner`, relative to its heading, in (-pi, pi].
/// A point coincident with the owner has bearing 0.
[[nodiscard]] double relative_bearing(const Pose& owner, double px, double py);

/// True when the point lies in the owner's targeting sector. Both the range
/// and the half-angle comparisons are inclusive.
[[nodiscard]] bool in_sector(const Pose& owner, double px, double py, const SectorSpec& spec);

[[nodiscard]] double distance(const Pose& a, const Pose& b) noexcept;

}  // namespace pursuit
