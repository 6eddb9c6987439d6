#include "smw/experiments.hpp"

#include <algorithm>

#include "smw/active_sensing.hpp"
#include "smw/controllers.hpp"
#include "smw/error.hpp"
#include "smw/forward_models.hpp"
#include "smw/inference.hpp"
#include "smw/io.hpp"
#include "smw/loop_engine.hpp"

namespace smw {

namespace {

ReachSetup reach_setup(const RunConfig& cfg) {
    ReachSetup setup;
    setup.geometry = cfg.geometry;
    setup.basis = basis_from_config(cfg);
    setup.rest = cfg.rest_posture;
    setup.gain = cfg.reach.controller_gain;
    setup.max_step = cfg.reach.max_step;
    return setup;
}

Perturbation reach_perturbation(const RunConfig& cfg) {
    Perturbation p;
    p.frame_rotation = cfg.reach.tilt;
    p.gain_scale = cfg.reach.gain_scale;
    p.motor_noise_std = cfg.reach.motor_noise_std;
    return p;
}

// Transition leaves the state with probability `leave`, spread evenly.
ModelParams chain_model(std::size_t states, double leave, double obs_diag) {
    ModelParams p(DiscreteSpec{states, 1, states});
    const double off_t = leave / static_cast<double>(states - 1);
    const double off_o = (1.0 - obs_diag) / static_cast<double>(states - 1);
    for (std::size_t x = 0; x < states; ++x) {
        for (std::size_t n = 0; n < states; ++n) {
            p.transition(x, 0, n) = n == x ? 1.0 - leave : off_t;
            p.observation(x, n) = n == x ? obs_diag : off_o;
        }
    }
    return p;
}

}  // namespace

PrimitiveBasis basis_from_config(const RunConfig& cfg) {
    const auto grid = joint_grid(cfg.basis.theta1, cfg.basis.theta2, cfg.basis.n1, cfg.basis.n2);
    return build_basis(grid, cfg.geometry, cfg.basis.stiffness);
}

std::string babble_artifact(const RunConfig& cfg, std::size_t* record_count) {
    BabbleSetup setup;
    setup.geometry = cfg.geometry;
    setup.basis = basis_from_config(cfg);
    setup.retina = cfg.retina;
    setup.rest_posture = cfg.rest_posture;
    setup.objects = cfg.objects;
    setup.settle_dt = cfg.settle_dt;
    setup.settle_horizon = cfg.settle_horizon;

    auto arm = cfg.babble.arm_commands == "vertices" ? vertex_commands(setup.basis)
                                                     : centroid_commands(setup.basis);
    if (cfg.babble.arm_count > 0 && cfg.babble.arm_count < arm.size()) arm.resize(cfg.babble.arm_count);
    const auto eye = fixation_grid(cfg.babble.fixation_center, cfg.babble.fixation_spacing,
                                   cfg.babble.fixation_nx, cfg.babble.fixation_ny);
    const BabbleDataset dataset = babble(setup, arm, eye, cfg.seed);
    if (record_count) *record_count = dataset.records.size();
    return babble_to_jsonl(dataset);
}

std::string scaling_artifact(const RunConfig& cfg) {
    ScalingOptions options;
    options.full_displacement_set = cfg.scaling.full_displacement_set;
    options.toroidal = cfg.scaling.toroidal;
    options.coverage = cfg.scaling.coverage;
    return scaling_experiment(cfg.scaling.resolutions, cfg.seed, options).to_csv();
}

std::string reach_artifact(const RunConfig& cfg) {
    const ReachSetup setup = reach_setup(cfg);
    const Perturbation perturbation = reach_perturbation(cfg);
    const TargetPose target{cfg.reach.target};
    const bool ballistic = cfg.reach.controller == "ballistic";
    const std::size_t steps = ballistic ? cfg.reach.ballistic_steps : cfg.reach.displacement_steps;

    std::vector<double> errors;
    if (ballistic) {
        CerebellarState state;
        state.learning_rate = cfg.reach.learning_rate;
        state.damping = cfg.reach.damping;
        errors = run_ballistic_sequence(target, perturbation, setup, cfg.reach.trials, steps, cfg.reach.dt,
                                        cfg.seed, cfg.reach.cerebellar, state);
    } else {
        const RngStream root(cfg.seed);
        for (std::size_t t = 0; t < cfg.reach.trials; ++t) {
            RngStream trial_rng = root.substream(t);
            errors.push_back(run_reach_trial(ControllerKind::kDisplacement, target, perturbation, setup,
                                             steps, cfg.reach.dt, trial_rng.next_u64())
                                 .final_error);
        }
    }

    std::string out = "trial,controller,gain,tilt,final_error,steps\n";
    for (std::size_t t = 0; t < errors.size(); ++t) {
        out += std::to_string(t) + "," + cfg.reach.controller + "," + format_double(cfg.reach.gain_scale) +
               "," + format_double(cfg.reach.tilt) + "," + format_double(errors[t]) + "," +
               std::to_string(steps) + "\n";
    }
    return out;
}

EmArtifacts em_artifacts(const RunConfig& cfg) {
    const auto& e = cfg.em;
    const ModelParams truth = chain_model(e.states, e.switch_prob, e.observation_accuracy);
    const ModelParams init = chain_model(e.states, 1.0 - 1.0 / static_cast<double>(e.states),
                                         e.init_observation_diag);
    const BeliefState prior = BeliefState::uniform(e.states);

    const RngStream root(cfg.seed);
    std::vector<EpisodeData> episodes;
    episodes.reserve(e.episodes);
    for (std::size_t i = 0; i < e.episodes; ++i) {
        episodes.push_back(sample_episode(truth, prior, e.episode_length, root.substream(i)));
    }
    const EmResult result = run_em(episodes, init, e.iters, e.alpha, prior);

    EmArtifacts out;
    out.trace_csv = "iter,loglik,objective\n";
    for (std::size_t i = 0; i < result.log_likelihood.size(); ++i) {
        out.trace_csv += std::to_string(i) + "," + format_double(result.log_likelihood[i]) + "," +
                         format_double(result.objective[i]) + "\n";
    }
    out.params_json = to_json(result.params).dump(2) + "\n";
    return out;
}

std::string active_artifact(const RunConfig& cfg) {
    const DisambiguationWorld world{cfg.active.accuracy};
    const auto policy = cfg.active.policy == "infogain" ? ActivePolicy::kInfoGain : ActivePolicy::kRandom;
    const auto episode = run_active_episode(world.params(), world.initial_belief(cfg.active.certain_initial),
                                            policy, cfg.active.steps, cfg.seed);
    std::string out = "step,action,observation,entropy\n";
    for (const auto& s : episode) {
        out += std::to_string(s.step) + "," + std::to_string(s.action) + "," + std::to_string(s.observation) +
               "," + format_double(s.entropy) + "\n";
    }
    return out;
}

std::string trajectory_artifact(const RunConfig& cfg, bool include_images) {
    const PrimitiveBasis basis = basis_from_config(cfg);
    const Command command{ballistic_controller(TargetPose{cfg.reach.target}, basis),
                          EyeCommand{cfg.reach.target}};
    const double dt = cfg.reach.dt;

    KernelSet<Command> kernels;
    kernels.generative_process = [&](const WorldState& w, const Command& u, RngStream& rng) {
        return step_external(w, blend_field(basis, u.arm, w.posture), dt, rng, cfg.geometry);
    };
    kernels.measure = [&](const WorldState& w, RngStream& rng) {
        return render_visual_field(w, cfg.geometry, command.eye, cfg.retina, rng);
    };
    kernels.internal_program = [](const Command& c, const VisualField&, RngStream&) { return c; };
    kernels.command_chain = [](const Command& c, RngStream&) { return c; };

    WorldState init;
    init.posture = cfg.rest_posture;
    init.objects = cfg.objects;
    init.perturbation = reach_perturbation(cfg);
    const auto traj = rollout(kernels, init, command, cfg.reach.ballistic_steps, dt, RngStream(cfg.seed));
    return trajectory_to_jsonl(traj, TrajectoryJsonOptions{include_images});
}

}  // namespace smw
