#include "smw/plant.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "smw/error.hpp"

namespace smw {

double norm(Point2 p) { return std::hypot(p.x, p.y); }
double distance(Point2 a, Point2 b) { return norm(a - b); }

void ArmGeometry::validate() const {
    for (std::size_t i = 0; i < 2; ++i) {
        require(std::isfinite(link_lengths[i]) && link_lengths[i] > 0.0,
                ErrorCode::kInvalidArgument, "link length must be positive");
        require(joint_limits[i].lower < joint_limits[i].upper, ErrorCode::kInvalidArgument,
                "joint limit interval must have lower < upper");
    }
    require(std::isfinite(base.x) && std::isfinite(base.y), ErrorCode::kInvalidArgument,
            "arm base must be finite");
}

JointAngles ArmGeometry::clamp(JointAngles angles) const {
    for (std::size_t i = 0; i < 2; ++i) {
        angles.theta[i] = std::clamp(angles.theta[i], joint_limits[i].lower, joint_limits[i].upper);
    }
    return angles;
}

void SceneObject::validate() const {
    require(radius > 0.0, ErrorCode::kInvalidArgument, "scene object radius must be positive");
    require(intensity > 0.0 && intensity <= 1.0, ErrorCode::kInvalidArgument,
            "scene object intensity must lie in (0, 1]");
    require(std::isfinite(position.x) && std::isfinite(position.y), ErrorCode::kInvalidArgument,
            "scene object position must be finite");
}

void Perturbation::validate() const {
    require(std::isfinite(frame_rotation), ErrorCode::kInvalidArgument, "tilt must be finite");
    require(gain_scale > 0.0, ErrorCode::kInvalidArgument, "gain_scale must be positive");
    require(motor_noise_std >= 0.0, ErrorCode::kInvalidArgument,
            "motor_noise_std must be non-negative");
}

Point2 forward_kinematics(const JointAngles& angles, const ArmGeometry& geometry) {
    const double t1 = angles.theta[0];
    const double t12 = angles.theta[0] + angles.theta[1];
    const auto& l = geometry.link_lengths;
    return {geometry.base.x + l[0] * std::cos(t1) + l[1] * std::cos(t12),
            geometry.base.y + l[0] * std::sin(t1) + l[1] * std::sin(t12)};
}

Jacobian jacobian(const JointAngles& angles, const ArmGeometry& geometry) {
    const double t1 = angles.theta[0];
    const double t12 = angles.theta[0] + angles.theta[1];
    const auto& l = geometry.link_lengths;
    return {{{-l[0] * std::sin(t1) - l[1] * std::sin(t12), -l[1] * std::sin(t12)},
             {l[0] * std::cos(t1) + l[1] * std::cos(t12), l[1] * std::cos(t12)}}};
}

WorldState step_external(const WorldState& state, const JointVelocity& velocity, double dt,
                         RngStream& rng, const ArmGeometry& geometry) {
    if (!(dt > 0.0)) fail(ErrorCode::kNonPositiveDt, "dt must be positive, got " + std::to_string(dt));
    const Perturbation& p = state.perturbation;
    const double c = std::cos(p.frame_rotation);
    const double s = std::sin(p.frame_rotation);
    const std::array<double, 2> rotated{c * velocity.rate[0] - s * velocity.rate[1],
                                        s * velocity.rate[0] + c * velocity.rate[1]};
    const std::array<double, 2> noise{rng.normal(), rng.normal()};

    WorldState next = state;
    for (std::size_t i = 0; i < 2; ++i) {
        next.posture.theta[i] = state.posture.theta[i] + (p.gain_scale * rotated[i]) * dt +
                                p.motor_noise_std * noise[i];
    }
    next.posture = geometry.clamp(next.posture);
    next.time = state.time + dt;
    return next;
}

}  // namespace smw
