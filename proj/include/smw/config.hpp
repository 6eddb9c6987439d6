#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "smw/motor_fields.hpp"
#include "smw/plant.hpp"
#include "smw/retina.hpp"

namespace smw {

struct BasisConfig {
    Interval theta1{0.0, 1.5707963267948966};
    Interval theta2{1.0471975511965976, 2.0943951023931953};
    std::size_t n1 = 5;
    std::size_t n2 = 5;
    double stiffness = 5.0;
};

struct BabbleConfig {
    std::string arm_commands = "vertices";  // vertices | centroids
    std::size_t arm_count = 0;              // 0 keeps every command
    Point2 fixation_center{0.0, 0.7};
    double fixation_spacing = 0.1;
    std::size_t fixation_nx = 3;
    std::size_t fixation_ny = 3;
};

struct ScalingConfig {
    std::vector<std::size_t> resolutions{4, 8, 16, 32};
    bool full_displacement_set = true;
    bool toroidal = true;
    double coverage = 1.0;
};

struct ReachConfig {
    std::string controller = "ballistic";  // ballistic | displacement
    double gain_scale = 1.0;
    double tilt = 0.0;
    double motor_noise_std = 0.0;
    std::size_t trials = 10;
    Point2 target{0.1, 0.75};
    bool cerebellar = false;
    double learning_rate = 1.0;
    double damping = 1e-2;
    double dt = 0.01;
    std::size_t ballistic_steps = 1000;
    std::size_t displacement_steps = 4000;
    double controller_gain = 20.0;
    double max_step = 5.0;
};

struct EmConfig {
    std::size_t states = 2;
    std::size_t episodes = 20;
    std::size_t episode_length = 200;
    std::size_t iters = 50;
    double alpha = 1e-3;
    double switch_prob = 0.9;           // true transition: leave the state
    double observation_accuracy = 1.0;  // true Q diagonal
    double init_observation_diag = 0.6;
};

struct ActiveConfig {
    std::string policy = "infogain";  // infogain | random
    std::size_t steps = 20;
    double accuracy = 0.8;
    bool certain_initial = false;
};

struct RunConfig {
    std::uint64_t seed = 0;
    ArmGeometry geometry;
    RetinaConfig retina;
    BasisConfig basis;
    JointAngles rest_posture{{0.7853981633974483, 1.5707963267948966}};
    std::vector<SceneObject> objects;
    double settle_dt = 0.01;
    double settle_horizon = 10.0;
    BabbleConfig babble;
    ScalingConfig scaling;
    ReachConfig reach;
    EmConfig em;
    ActiveConfig active;

    // Throws Error(kConfig) naming the offending field.
    void validate() const;
};

// Missing keys keep their defaults; unknown keys are rejected with kConfig.
RunConfig run_config_from_json(const nlohmann::json& j);
// kConfig if the file is missing or not valid JSON.
RunConfig load_run_config(const std::filesystem::path& path);

std::vector<std::size_t> parse_size_list(const std::string& text);

}  // namespace smw
