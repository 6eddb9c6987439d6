#include "smw/motor_fields.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "smw/error.hpp"

namespace smw {

namespace {

constexpr double kMinTriangleArea = 1e-9;
constexpr double kInsideTolerance = 1e-12;
constexpr double kWeightSumTolerance = 1e-9;

std::optional<ArmCommand> command_in_triangle(Point2 target, const PrimitiveBasis& basis,
                                              const TriangleIndices& tri) {
    const auto w = barycentric_weights(target, basis.primitives[tri[0]].task_endpoint,
                                       basis.primitives[tri[1]].task_endpoint,
                                       basis.primitives[tri[2]].task_endpoint);
    if (std::any_of(w.begin(), w.end(), [](double x) { return x < -kInsideTolerance; })) {
        return std::nullopt;
    }
    ArmCommand cmd;
    double total = 0.0;
    for (std::size_t k = 0; k < 3; ++k) {
        if (w[k] > kInsideTolerance) {
            cmd.weights[tri[k]] += w[k];
            total += w[k];
        }
    }
    for (auto& [index, weight] : cmd.weights) weight /= total;
    return cmd;
}

JointVelocity blend_unchecked(const PrimitiveBasis& basis, const ArmCommand& cmd,
                              const JointAngles& posture) {
    JointVelocity v;
    for (const auto& [index, weight] : cmd.weights) {
        const MotorPrimitive& p = basis.primitives[index];
        for (std::size_t j = 0; j < 2; ++j) {
            v.rate[j] += weight * p.stiffness * (p.end_posture.theta[j] - posture.theta[j]);
        }
    }
    return v;
}

}  // namespace

MotorPrimitive make_primitive(const JointAngles& end_posture, const ArmGeometry& geometry,
                              double stiffness) {
    require(stiffness > 0.0, ErrorCode::kInvalidArgument, "stiffness must be positive");
    return {end_posture, forward_kinematics(end_posture, geometry), stiffness};
}

std::vector<Point2> PrimitiveBasis::endpoints() const {
    std::vector<Point2> out;
    out.reserve(primitives.size());
    for (const auto& p : primitives) out.push_back(p.task_endpoint);
    return out;
}

void validate_basis(const PrimitiveBasis& basis) {
    require(basis.primitives.size() >= 3, ErrorCode::kInvalidArgument,
            "a basis needs at least 3 primitives");
    require(!basis.triangles.empty(), ErrorCode::kInvalidArgument, "basis has no triangles");
    for (const auto& p : basis.primitives) {
        require(p.stiffness > 0.0, ErrorCode::kInvalidArgument, "stiffness must be positive");
    }
    for (const auto& t : basis.triangles) {
        for (std::size_t v : t) {
            require(v < basis.primitives.size(), ErrorCode::kIndexOutOfRange,
                    "triangle index out of range");
        }
        const double area = 0.5 * std::abs(orient(basis.primitives[t[0]].task_endpoint,
                                                  basis.primitives[t[1]].task_endpoint,
                                                  basis.primitives[t[2]].task_endpoint));
        require(area > kMinTriangleArea, ErrorCode::kDegenerateTriangle,
                "triangle with area " + std::to_string(area));
    }
}

ArmCommand single_primitive_command(std::size_t index) {
    ArmCommand cmd;
    cmd.weights[index] = 1.0;
    return cmd;
}

void validate_command(const PrimitiveBasis& basis, const ArmCommand& cmd) {
    require(!cmd.weights.empty(), ErrorCode::kInvalidCommand, "empty command");
    double total = 0.0;
    std::size_t nonzero = 0;
    for (const auto& [index, weight] : cmd.weights) {
        require(index < basis.primitives.size(), ErrorCode::kInvalidCommand,
                "primitive index " + std::to_string(index) + " out of range");
        require(std::isfinite(weight) && weight >= 0.0, ErrorCode::kInvalidCommand,
                "negative or non-finite weight");
        total += weight;
        if (weight != 0.0) ++nonzero;
    }
    require(std::abs(total - 1.0) <= kWeightSumTolerance, ErrorCode::kInvalidCommand,
            "weights sum to " + std::to_string(total));
    require(nonzero <= 3, ErrorCode::kInvalidCommand, "more than three active primitives");
    const bool in_one_triangle =
        std::any_of(basis.triangles.begin(), basis.triangles.end(), [&](const TriangleIndices& t) {
            return std::all_of(cmd.weights.begin(), cmd.weights.end(), [&](const auto& kv) {
                return kv.second == 0.0 || std::find(t.begin(), t.end(), kv.first) != t.end();
            });
        });
    require(in_one_triangle, ErrorCode::kInvalidCommand,
            "active primitives do not share a triangle");
}

JointVelocity blend_field(const PrimitiveBasis& basis, const ArmCommand& cmd,
                          const JointAngles& posture) {
    validate_command(basis, cmd);
    return blend_unchecked(basis, cmd, posture);
}

double blended_stiffness(const PrimitiveBasis& basis, const ArmCommand& cmd) {
    double k = 0.0;
    for (const auto& [index, weight] : cmd.weights) k += weight * basis.primitives.at(index).stiffness;
    return k;
}

JointAngles equilibrium_posture(const PrimitiveBasis& basis, const ArmCommand& cmd) {
    validate_command(basis, cmd);
    JointAngles eq{{0.0, 0.0}};
    const double k = blended_stiffness(basis, cmd);
    for (const auto& [index, weight] : cmd.weights) {
        const MotorPrimitive& p = basis.primitives[index];
        for (std::size_t j = 0; j < 2; ++j) eq.theta[j] += weight * p.stiffness * p.end_posture.theta[j];
    }
    for (double& t : eq.theta) t /= k;
    return eq;
}

std::size_t settle_steps(double dt, double horizon) {
    require(dt > 0.0, ErrorCode::kNonPositiveDt, "dt must be positive");
    require(horizon >= dt, ErrorCode::kInvalidArgument, "horizon must be at least dt");
    return static_cast<std::size_t>(std::ceil(horizon / dt - 1e-9));
}

JointAngles ballistic_settle(const PrimitiveBasis& basis, const ArmCommand& cmd,
                             const JointAngles& initial, double dt, double horizon) {
    validate_command(basis, cmd);
    const std::size_t steps = settle_steps(dt, horizon);
    for (const auto& [index, weight] : cmd.weights) {
        const double k = basis.primitives[index].stiffness;
        if (weight != 0.0 && k * dt >= 2.0) {
            fail(ErrorCode::kUnstableStep, "k*dt = " + std::to_string(k * dt) + " >= 2");
        }
    }
    JointAngles posture = initial;
    for (std::size_t n = 0; n < steps; ++n) {
        const JointVelocity v = blend_unchecked(basis, cmd, posture);
        for (std::size_t j = 0; j < 2; ++j) posture.theta[j] += v.rate[j] * dt;
    }
    return posture;
}

std::array<double, 3> barycentric_weights(Point2 target, Point2 v0, Point2 v1, Point2 v2) {
    const double d = orient(v0, v1, v2);
    if (!(0.5 * std::abs(d) > kMinTriangleArea)) {
        fail(ErrorCode::kDegenerateTriangle, "triangle area " + std::to_string(0.5 * std::abs(d)));
    }
    const double w1 = orient(v0, target, v2) / d;
    const double w2 = orient(v0, v1, target) / d;
    return {1.0 - w1 - w2, w1, w2};
}

PrimitiveBasis build_basis(std::span<const JointAngles> grid, const ArmGeometry& geometry,
                           double stiffness) {
    require(grid.size() >= 3, ErrorCode::kCollinearBasis, "fewer than 3 postures");
    PrimitiveBasis basis;
    for (const auto& posture : grid) basis.primitives.push_back(make_primitive(posture, geometry, stiffness));
    const auto points = basis.endpoints();
    basis.triangles = delaunay_triangulate(points);
    validate_basis(basis);
    return basis;
}

std::vector<JointAngles> joint_grid(Interval theta1, Interval theta2, std::size_t n1,
                                    std::size_t n2) {
    require(n1 >= 2 && n2 >= 2, ErrorCode::kInvalidArgument, "grid needs >= 2 points per joint");
    std::vector<JointAngles> out;
    out.reserve(n1 * n2);
    for (std::size_t i = 0; i < n1; ++i) {
        const double a = theta1.lower + (theta1.upper - theta1.lower) * static_cast<double>(i) /
                                            static_cast<double>(n1 - 1);
        for (std::size_t j = 0; j < n2; ++j) {
            const double b = theta2.lower + (theta2.upper - theta2.lower) * static_cast<double>(j) /
                                                static_cast<double>(n2 - 1);
            out.push_back(JointAngles{{a, b}});
        }
    }
    return out;
}

ArmCommand solve_command(Point2 target, const PrimitiveBasis& basis) {
    for (const auto& tri : basis.triangles) {
        if (auto cmd = command_in_triangle(target, basis, tri)) return *cmd;
    }
    fail(ErrorCode::kOutOfWorkspace, "target (" + std::to_string(target.x) + ", " +
                                         std::to_string(target.y) + ") lies in no triangle");
}

bool in_workspace(Point2 target, const PrimitiveBasis& basis) {
    return std::any_of(basis.triangles.begin(), basis.triangles.end(), [&](const auto& tri) {
        return command_in_triangle(target, basis, tri).has_value();
    });
}

}  // namespace smw
