#pragma once

#include <array>
#include <vector>

#include "smw/rng.hpp"

namespace smw {

// Task-space point or vector, meters.
struct Point2 {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point2&, const Point2&) = default;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
double norm(Point2 p);
double distance(Point2 a, Point2 b);

// Joint-space posture, radians.
struct JointAngles {
    std::array<double, 2> theta{0.0, 0.0};

    friend bool operator==(const JointAngles&, const JointAngles&) = default;
};

// Joint-space rate, radians per second.
struct JointVelocity {
    std::array<double, 2> rate{0.0, 0.0};

    friend bool operator==(const JointVelocity&, const JointVelocity&) = default;
};

struct Interval {
    double lower = 0.0;
    double upper = 0.0;
};

struct ArmGeometry {
    std::array<double, 2> link_lengths{0.5, 0.5};
    Point2 base{0.0, 0.0};
    std::array<Interval, 2> joint_limits{{{-3.14159265358979323846, 3.14159265358979323846},
                                          {-3.14159265358979323846, 3.14159265358979323846}}};

    void validate() const;
    JointAngles clamp(JointAngles angles) const;
    double reach() const { return link_lengths[0] + link_lengths[1]; }
};

struct SceneObject {
    Point2 position;
    double radius = 0.05;     // meters, also the blob width on the retina
    double intensity = 1.0;   // (0, 1]

    void validate() const;
};

// Body tilt rotates the commanded joint velocities, muscle fatigue scales
// them, motor noise is added per joint.
struct Perturbation {
    double frame_rotation = 0.0;
    double gain_scale = 1.0;
    double motor_noise_std = 0.0;

    void validate() const;
    bool is_nominal() const {
        return frame_rotation == 0.0 && gain_scale == 1.0 && motor_noise_std == 0.0;
    }
};

struct WorldState {
    JointAngles posture;
    std::vector<SceneObject> objects;
    Perturbation perturbation;
    double time = 0.0;
};

// Row-major 2x2 matrix, d(hand)/d(theta).
using Jacobian = std::array<std::array<double, 2>, 2>;

Point2 forward_kinematics(const JointAngles& angles, const ArmGeometry& geometry);
Jacobian jacobian(const JointAngles& angles, const ArmGeometry& geometry);

/// External update: one Euler step of the first-order kinematic plant.
///
/// posture <- clamp(posture + gain * R(tilt) * velocity * dt + noise), with
/// noise ~ N(0, motor_noise_std^2) per joint drawn from `rng`. Two normals are
/// always drawn so the stream position does not depend on the noise level.
WorldState step_external(const WorldState& state, const JointVelocity& velocity, double dt,
                         RngStream& rng, const ArmGeometry& geometry = {});

}  // namespace smw
