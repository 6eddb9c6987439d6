#pragma once

#include <string>

#include "smw/config.hpp"
#include "smw/motor_fields.hpp"

namespace smw {

// Artifacts are built in memory so every byte depends only on the config.

PrimitiveBasis basis_from_config(const RunConfig& cfg);

// One JSON line per (arm, eye) record.
std::string babble_artifact(const RunConfig& cfg, std::size_t* record_count = nullptr);

// Scaling report CSV.
std::string scaling_artifact(const RunConfig& cfg);

// "trial,controller,gain,tilt,final_error,steps".
std::string reach_artifact(const RunConfig& cfg);

struct EmArtifacts {
    std::string trace_csv;    // "iter,loglik,objective"
    std::string params_json;  // learned ModelParams
};

EmArtifacts em_artifacts(const RunConfig& cfg);

// "step,action,observation,entropy", one row per action taken.
std::string active_artifact(const RunConfig& cfg);

// Ballistic reach to cfg.reach.target rendered every step, one JSON line per record.
std::string trajectory_artifact(const RunConfig& cfg, bool include_images);

}  // namespace smw
