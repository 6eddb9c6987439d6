#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "smw/plant.hpp"
#include "smw/triangulation.hpp"

namespace smw {

// A convergent joint-space field theta_dot = k * (end_posture - theta).
struct MotorPrimitive {
    JointAngles end_posture;
    Point2 task_endpoint;  // forward_kinematics(end_posture)
    double stiffness = 1.0;
};

MotorPrimitive make_primitive(const JointAngles& end_posture, const ArmGeometry& geometry,
                              double stiffness);

struct PrimitiveBasis {
    std::vector<MotorPrimitive> primitives;
    std::vector<TriangleIndices> triangles;

    std::vector<Point2> endpoints() const;
};

// Checks the basis invariants: >= 3 primitives, indices in range, every
// triangle non-degenerate in task space.
void validate_basis(const PrimitiveBasis& basis);

// Convex weights over at most three primitives of one triangle.
struct ArmCommand {
    std::map<std::size_t, double> weights;

    friend bool operator==(const ArmCommand&, const ArmCommand&) = default;
};

ArmCommand single_primitive_command(std::size_t index);

// Throws InvalidCommand when `cmd` violates the ArmCommand invariants
// against `basis`.
void validate_command(const PrimitiveBasis& basis, const ArmCommand& cmd);

// Sum_i w_i k_i (end_posture_i - posture).
JointVelocity blend_field(const PrimitiveBasis& basis, const ArmCommand& cmd,
                          const JointAngles& posture);

// Sum_i w_i k_i: the rate of the blended field around its equilibrium.
double blended_stiffness(const PrimitiveBasis& basis, const ArmCommand& cmd);

// Sum_i w_i k_i end_posture_i / Sum_i w_i k_i.
JointAngles equilibrium_posture(const PrimitiveBasis& basis, const ArmCommand& cmd);

// Number of Euler steps used to cover `horizon` with step `dt`.
std::size_t settle_steps(double dt, double horizon);

/// Euler-integrates the blended field from `initial` over `horizon`.
/// Throws UnstableStep if any active stiffness has k * dt >= 2.
JointAngles ballistic_settle(const PrimitiveBasis& basis, const ArmCommand& cmd,
                             const JointAngles& initial, double dt, double horizon);

/// Affine coordinates of `target` with respect to triangle (v0, v1, v2).
/// Weights may be negative outside the triangle.
std::array<double, 3> barycentric_weights(Point2 target, Point2 v0, Point2 v1, Point2 v2);

/// Primitives at every posture of `grid`, triangulated over their task-space
/// end-points (see delaunay_triangulate).
PrimitiveBasis build_basis(std::span<const JointAngles> grid, const ArmGeometry& geometry,
                           double stiffness);

// Regular joint-space grid, theta_1 major, inclusive of both range ends.
std::vector<JointAngles> joint_grid(Interval theta1, Interval theta2, std::size_t n1,
                                    std::size_t n2);

/// Barycentric command of the first triangle (closed) containing `target`.
/// Throws OutOfWorkspace when no triangle contains it.
ArmCommand solve_command(Point2 target, const PrimitiveBasis& basis);

// True when some triangle of the basis contains `target` (closed).
bool in_workspace(Point2 target, const PrimitiveBasis& basis);

}  // namespace smw
