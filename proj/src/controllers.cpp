#include "smw/controllers.hpp"

#include <algorithm>
#include <cmath>

#include "smw/error.hpp"
#include "smw/rng.hpp"

namespace smw {

namespace {

double clip(double value, double bound) { return std::clamp(value, -bound, bound); }

std::array<double, 2> transpose_times(const Jacobian& j, Point2 e) {
    return {j[0][0] * e.x + j[1][0] * e.y, j[0][1] * e.x + j[1][1] * e.y};
}

Proprioception sense(const WorldState& world, const ArmGeometry& geometry) {
    return {world.posture, forward_kinematics(world.posture, geometry)};
}

ReachResult finish(const std::vector<JointAngles>& path, const TargetPose& target,
                   const ArmGeometry& geometry) {
    ReachResult result;
    result.final_posture = path.back();
    result.final_error = distance(forward_kinematics(result.final_posture, geometry), target.point);
    result.steps_used = path.size() - 1;
    result.trajectory = path;
    return result;
}

ReachResult ballistic_trial(const TargetPose& target, const WorldState& init, const ReachSetup& setup,
                            std::size_t steps, double dt, const RngStream& seed,
                            const JointAngles& correction) {
    const ArmCommand cmd = ballistic_controller(target, setup.basis);
    for (const auto& [index, weight] : cmd.weights) {
        if (weight > 0.0 && setup.basis.primitives[index].stiffness * dt >= 2.0) {
            fail(ErrorCode::kUnstableStep, "stiffness * dt must stay below 2");
        }
    }
    const double k_eff = blended_stiffness(setup.basis, cmd);

    KernelSet<BallisticInternal, Proprioception, JointVelocity> kernels;
    kernels.generative_process = [&](const WorldState& w, const JointVelocity& v, RngStream& rng) {
        return step_external(w, v, dt, rng, setup.geometry);
    };
    kernels.measure = [&](const WorldState& w, RngStream&) { return sense(w, setup.geometry); };
    kernels.internal_program = [&](const BallisticInternal& s, const Proprioception&, RngStream&) {
        BallisticInternal next = s;
        for (std::size_t j = 0; j < 2; ++j) next.planned.theta[j] += s.velocity.rate[j] * dt;
        next.velocity = blend_field(setup.basis, cmd, next.planned);
        for (std::size_t j = 0; j < 2; ++j) next.velocity.rate[j] += k_eff * correction.theta[j];
        return next;
    };
    kernels.command_chain = [](const BallisticInternal& s, RngStream&) { return s.velocity; };

    const auto traj = rollout(kernels, init, BallisticInternal{init.posture, {}}, steps, dt, seed);
    std::vector<JointAngles> path;
    path.reserve(traj.size());
    for (const auto& rec : traj) path.push_back(rec.world.posture);
    return finish(path, target, setup.geometry);
}

ReachResult displacement_trial(const TargetPose& target, const WorldState& init,
                               const ReachSetup& setup, std::size_t steps, double dt,
                               const RngStream& seed) {
    KernelSet<DisplacementInternal, Proprioception, JointVelocity> kernels;
    kernels.generative_process = [&](const WorldState& w, const JointVelocity& v, RngStream& rng) {
        return step_external(w, v, dt, rng, setup.geometry);
    };
    kernels.measure = [&](const WorldState& w, RngStream&) { return sense(w, setup.geometry); };
    kernels.internal_program = [](const DisplacementInternal&, const Proprioception& obs, RngStream&) {
        return DisplacementInternal{obs};
    };
    kernels.command_chain = [&](const DisplacementInternal& s, RngStream&) {
        return displacement_controller(target, s.estimate.hand, s.estimate.posture, setup.geometry,
                                       setup.gain, setup.max_step);
    };

    const DisplacementInternal start{sense(init, setup.geometry)};
    const auto traj = rollout(kernels, init, start, steps, dt, seed);
    std::vector<JointAngles> path;
    path.reserve(traj.size());
    for (const auto& rec : traj) path.push_back(rec.world.posture);
    return finish(path, target, setup.geometry);
}

}  // namespace

JointVelocity displacement_controller(const TargetPose& target, Point2 estimate,
                                      const JointAngles& posture, const ArmGeometry& geometry,
                                      double gain, double max_step) {
    require(gain > 0.0, ErrorCode::kInvalidArgument, "controller gain must be positive");
    require(max_step >= 0.0, ErrorCode::kInvalidArgument, "max_step must be non-negative");
    const auto jt_e = transpose_times(jacobian(posture, geometry), target.point - estimate);
    JointVelocity v;
    for (std::size_t j = 0; j < 2; ++j) v.rate[j] = clip(gain * jt_e[j], max_step);
    return v;
}

ArmCommand ballistic_controller(const TargetPose& target, const PrimitiveBasis& basis) {
    return solve_command(target.point, basis);
}

const char* to_string(ControllerKind kind) {
    return kind == ControllerKind::kBallistic ? "ballistic" : "displacement";
}

ReachResult run_reach_trial(ControllerKind kind, const TargetPose& target,
                            const Perturbation& perturbation, const ReachSetup& setup,
                            std::size_t steps, double dt, std::uint64_t seed,
                            const JointAngles& correction) {
    perturbation.validate();
    setup.geometry.validate();
    require(std::isfinite(target.point.x) && std::isfinite(target.point.y), ErrorCode::kInvalidArgument,
            "target must be finite");
    WorldState init;
    init.posture = setup.geometry.clamp(setup.rest);
    init.perturbation = perturbation;
    const RngStream root(seed);
    if (kind == ControllerKind::kBallistic) {
        return ballistic_trial(target, init, setup, steps, dt, root, correction);
    }
    return displacement_trial(target, init, setup, steps, dt, root);
}

void CerebellarState::validate() const {
    require(learning_rate > 0.0, ErrorCode::kInvalidArgument, "learning rate must be positive");
    require(damping >= 0.0, ErrorCode::kInvalidArgument, "damping must be non-negative");
    for (double e : trial_errors) require(e >= 0.0, ErrorCode::kInvalidArgument, "negative trial error");
}

CerebellarState cerebellar_update(const CerebellarState& state, Point2 error,
                                  const JointAngles& posture, const ArmGeometry& geometry) {
    state.validate();
    const Jacobian j = jacobian(posture, geometry);
    Point2 e = error;
    if (state.map == CorrectionMap::kDampedInverse) {
        // Solve (J J^T + d^2 I) y = e, then the step is J^T y.
        const double d2 = state.damping * state.damping;
        const double a = j[0][0] * j[0][0] + j[0][1] * j[0][1] + d2;
        const double b = j[0][0] * j[1][0] + j[0][1] * j[1][1];
        const double c = j[1][0] * j[1][0] + j[1][1] * j[1][1] + d2;
        const double det = a * c - b * b;
        require(det > 0.0, ErrorCode::kPrecondition, "singular correction map");
        e = {(c * error.x - b * error.y) / det, (a * error.y - b * error.x) / det};
    }
    const auto step = transpose_times(j, e);
    CerebellarState next = state;
    for (std::size_t k = 0; k < 2; ++k) next.correction.theta[k] += state.learning_rate * step[k];
    next.trial_errors.push_back(norm(error));
    return next;
}

std::vector<double> run_ballistic_sequence(const TargetPose& target, const Perturbation& perturbation,
                                           const ReachSetup& setup, std::size_t trials,
                                           std::size_t steps, double dt, std::uint64_t seed,
                                           bool learn, CerebellarState state) {
    std::vector<double> errors;
    errors.reserve(trials);
    const RngStream root(seed);
    for (std::size_t t = 0; t < trials; ++t) {
        RngStream trial_rng = root.substream(t);
        const ReachResult r = run_reach_trial(ControllerKind::kBallistic, target, perturbation, setup,
                                              steps, dt, trial_rng.next_u64(),
                                              learn ? state.correction : JointAngles{});
        errors.push_back(r.final_error);
        if (learn) {
            const Point2 hand = forward_kinematics(r.final_posture, setup.geometry);
            state = cerebellar_update(state, target.point - hand, r.final_posture, setup.geometry);
        }
    }
    return errors;
}

}  // namespace smw
