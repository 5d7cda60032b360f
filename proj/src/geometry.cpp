#include "pursuit/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace pursuit {

double normalize_angle(double theta) {
    if (!std::isfinite(theta)) {
        throw std::invalid_argument("normalize_angle: non-finite angle");
    }
    double r = std::remainder(theta, 2.0 * kPi);  // [-pi, pi]
    if (r <= -kPi) {
        r += 2.0 * kPi;
    }
    return r;
}

Pose make_pose(double x, double y, double heading) {
    if (!std::isfinite(x) || !std::isfinite(y)) {
        throw std::invalid_argument("make_pose: non-finite position");
    }
    return Pose{x, y, normalize_angle(heading)};
}

bool is_valid(const Pose& pose) noexcept {
    return std::isfinite(pose.x) && std::isfinite(pose.y) && std::isfinite(pose.heading) &&
           pose.heading > -kPi && pose.heading <= kPi;
}

void validate(const SectorSpec& spec) {
    if (!(spec.range > 0.0) || !std::isfinite(spec.range)) {
        throw std::invalid_argument("SectorSpec: range must be positive");
    }
    if (!(spec.angle > 0.0 && spec.angle < 2.0 * kPi)) {
        throw std::invalid_argument("SectorSpec: angle must lie in (0, 2*pi)");
    }
}

Observation to_relative_frame(const Pose& reference, const Pose& target) {
    if (!is_valid(reference) || !is_valid(target)) {
        throw std::invalid_argument("to_relative_frame: invalid pose");
    }
    const double dx = target.x - reference.x;
    const double dy = target.y - reference.y;
    const double c = std::cos(reference.heading);
    const double s = std::sin(reference.heading);
    return Observation{c * dx + s * dy, -s * dx + c * dy,
                       normalize_angle(target.heading - reference.heading)};
}

Pose from_relative_frame(const Pose& reference, const Observation& relative) {
    const double c = std::cos(reference.heading);
    const double s = std::sin(reference.heading);
    return make_pose(reference.x + c * relative.x - s * relative.y,
                     reference.y + s * relative.x + c * relative.y,
                     reference.heading + relative.heading);
}

double relative_bearing(const Pose& owner, double px, double py) {
    const double dx = px - owner.x;
    const double dy = py - owner.y;
    if (dx == 0.0 && dy == 0.0) {
        return 0.0;
    }
    return normalize_angle(std::atan2(dy, dx) - owner.heading);
}

bool in_sector(const Pose& owner, double px, double py, const SectorSpec& spec) {
    const double dist = std::hypot(px - owner.x, py - owner.y);
    if (dist > spec.range) {
        return false;
    }
    return std::abs(relative_bearing(owner, px, py)) <= 0.5 * spec.angle;
}

double distance(const Pose& a, const Pose& b) noexcept {
    return std::hypot(b.x - a.x, b.y - a.y);
}

}  // namespace pursuit
