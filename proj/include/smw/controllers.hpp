#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "smw/loop_engine.hpp"
#include "smw/motor_fields.hpp"
#include "smw/plant.hpp"

namespace smw {

struct TargetPose {
    Point2 point;
};

// Oracle feedback: the true posture and hand position.
struct Proprioception {
    JointAngles posture;
    Point2 hand;
};

/// Joint velocity gain * J^T(posture) * (target - estimate), each joint
/// clipped to [-max_step, max_step].
JointVelocity displacement_controller(const TargetPose& target, Point2 estimate,
                                      const JointAngles& posture, const ArmGeometry& geometry,
                                      double gain, double max_step);

// Open-loop end-point command; ignores the arm state entirely.
ArmCommand ballistic_controller(const TargetPose& target, const PrimitiveBasis& basis);

enum class ControllerKind { kBallistic, kDisplacement };

const char* to_string(ControllerKind kind);

struct ReachSetup {
    ArmGeometry geometry;
    PrimitiveBasis basis;
    JointAngles rest;
    double gain = 20.0;      // displacement controller, 1/s
    double max_step = 5.0;   // displacement controller, rad/s
};

// Internal state of a ballistic movement: the efference copy of the posture
// and the velocity it currently prescribes.
struct BallisticInternal {
    JointAngles planned;
    JointVelocity velocity;
};

// Internal state of the displacement loop: the latest feedback.
struct DisplacementInternal {
    Proprioception estimate;
};

using ReachTrajectory = std::vector<JointAngles>;

struct ReachResult {
    double final_error = 0.0;
    std::size_t steps_used = 0;
    JointAngles final_posture;
    ReachTrajectory trajectory;  // posture at each record, steps_used + 1 entries
};

/// One reach from `setup.rest` under `perturbation`.
///
/// Ballistic: the solved command's field is integrated on the efference copy
/// of the posture, shifted by `correction`, and the resulting velocity
/// program is sent to the plant open-loop. Displacement: closed loop on the
/// true hand position. Both run `steps` loop iterations of length `dt`.
ReachResult run_reach_trial(ControllerKind kind, const TargetPose& target,
                            const Perturbation& perturbation, const ReachSetup& setup,
                            std::size_t steps, double dt, std::uint64_t seed,
                            const JointAngles& correction = {});

enum class CorrectionMap { kTranspose, kDampedInverse };

struct CerebellarState {
    JointAngles correction;
    double learning_rate = 1.0;
    std::vector<double> trial_errors;
    CorrectionMap map = CorrectionMap::kDampedInverse;
    double damping = 1e-2;  // kDampedInverse only

    void validate() const;
};

/// correction += learning_rate * M(posture) * error, where M is J^T or the
/// damped pseudo-inverse J^T (J J^T + damping^2 I)^-1. Appends |error|.
/// Converges when learning_rate times the plant's effective gain stays in (0, 2).
CerebellarState cerebellar_update(const CerebellarState& state, Point2 error,
                                  const JointAngles& posture, const ArmGeometry& geometry);

/// Repeated ballistic reaches to one target. With `learn` set, the
/// cerebellar state is updated from each trial's end-point error and applied
/// to the next trial. Returns the final error of every trial.
std::vector<double> run_ballistic_sequence(const TargetPose& target, const Perturbation& perturbation,
                                           const ReachSetup& setup, std::size_t trials,
                                           std::size_t steps, double dt, std::uint64_t seed,
                                           bool learn, CerebellarState state = {});

}  // namespace smw
