#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "smw/error.hpp"
#include "smw/motor_fields.hpp"
#include "smw/retina.hpp"
#include "smw/rng.hpp"

namespace smw {

// The motor realization u_t: an arm field mixture plus a gaze fixation.
struct Command {
    ArmCommand arm;
    EyeCommand eye;

    friend bool operator==(const Command&, const Command&) = default;
};

// Substream labels used by rollout: (step, kernel).
enum class Kernel : std::uint64_t {
    kGenerativeProcess = 0,  // P_out, external update
    kMeasure = 1,            // Q_in, sensors actualization
    kInternalProgram = 2,    // P_in, internal update
    kCommandChain = 3,       // Q_out, motor realization
};

/// The four stochastic kernels of a closed sensorimotor loop.
///
/// Observation and Action default to a rendered VisualField and a Command;
/// controllers that feed back proprioception or emit raw joint velocities
/// plug in other types.
template <class Internal, class Observation = VisualField, class Action = Command>
struct KernelSet {
    std::function<WorldState(const WorldState&, const Action&, RngStream&)> generative_process;
    std::function<Observation(const WorldState&, RngStream&)> measure;
    std::function<Internal(const Internal&, const Observation&, RngStream&)> internal_program;
    std::function<Action(const Internal&, RngStream&)> command_chain;
};

template <class Internal, class Observation = VisualField, class Action = Command>
struct TrajectoryRecord {
    std::size_t step = 0;
    double time = 0.0;
    WorldState world;
    Observation observation;
    Internal internal;
    Action command;
};

template <class Internal, class Observation = VisualField, class Action = Command>
using Trajectory = std::vector<TrajectoryRecord<Internal, Observation, Action>>;

namespace detail {

template <class F>
auto annotate_step(std::size_t step, const char* kernel, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const Error& e) {
        throw Error(e.code(), "step " + std::to_string(step) + " (" + kernel + "): " + e.what());
    } catch (const std::exception& e) {
        throw Error(ErrorCode::kKernelFailure,
                    "step " + std::to_string(step) + " (" + kernel + "): " + e.what());
    }
}

}  // namespace detail

/// Runs `steps` iterations of the loop and returns steps + 1 records.
///
/// Record k holds the world at t_k, the observation I_k sensed from it, the
/// internal state after absorbing I_k, and the command u_k issued from that
/// state. Between records the world moves under u_k. Within a step the order
/// is measure -> internal -> command -> external, and every kernel call draws
/// from the substream (step, kernel) of `seed`.
template <class Internal, class Observation, class Action>
Trajectory<Internal, Observation, Action> rollout(
    const KernelSet<Internal, Observation, Action>& kernels, const WorldState& init_world,
    const Internal& init_internal, std::size_t steps, double dt, const RngStream& seed) {
    if (!(dt > 0.0)) fail(ErrorCode::kNonPositiveDt, "rollout dt must be positive");
    Trajectory<Internal, Observation, Action> out;
    out.reserve(steps + 1);

    WorldState world = init_world;
    Internal internal = init_internal;
    for (std::size_t k = 0;; ++k) {
        auto sub = [&](Kernel kernel) {
            return seed.substream({static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(kernel)});
        };
        RngStream measure_rng = sub(Kernel::kMeasure);
        Observation obs = detail::annotate_step(k, "measure", [&] { return kernels.measure(world, measure_rng); });
        RngStream internal_rng = sub(Kernel::kInternalProgram);
        internal = detail::annotate_step(k, "internal_program", [&] {
            return kernels.internal_program(internal, obs, internal_rng);
        });
        RngStream command_rng = sub(Kernel::kCommandChain);
        Action action = detail::annotate_step(k, "command_chain", [&] {
            return kernels.command_chain(internal, command_rng);
        });
        out.push_back({k, init_world.time + static_cast<double>(k) * dt, world, std::move(obs),
                       internal, action});
        if (k == steps) break;

        RngStream world_rng = sub(Kernel::kGenerativeProcess);
        world = detail::annotate_step(k, "generative_process", [&] {
            return kernels.generative_process(world, action, world_rng);
        });
    }
    return out;
}

struct TrajectoryJsonOptions {
    bool include_images = true;
};

// One JSON object per line: step, time, posture, command, image.
std::string trajectory_record_json(std::size_t step, double time, const JointAngles& posture,
                                   const Command& command, const VisualField* image);

template <class Internal>
std::string trajectory_to_jsonl(const Trajectory<Internal, VisualField, Command>& trajectory,
                                const TrajectoryJsonOptions& options = {}) {
    std::string out;
    for (const auto& rec : trajectory) {
        out += trajectory_record_json(rec.step, rec.time, rec.world.posture, rec.command,
                                      options.include_images ? &rec.observation : nullptr);
        out += '\n';
    }
    return out;
}

}  // namespace smw
