#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "smw/inference.hpp"
#include "smw/rng.hpp"

namespace smw {

/// Two-location gaze world with a hidden binary cause.
///
/// State x = hidden + 2 * gaze. Action u moves the gaze to location u and
/// leaves the hidden bit alone. Looking at location 1 reports the hidden bit
/// with probability `accuracy`; location 0 always reports the
/// uninformative symbol 2.
struct DisambiguationWorld {
    double accuracy = 0.8;

    static constexpr std::size_t kStates = 4;
    static constexpr std::size_t kActions = 2;
    static constexpr std::size_t kObservations = 3;

    ModelParams params() const;
    // Uniform over the hidden bit with the gaze at location 0, or certain
    // about hidden = 0.
    BeliefState initial_belief(bool certain) const;
};

enum class ActivePolicy { kInfoGain, kRandom };

struct ActiveStep {
    std::size_t step = 0;  // 1-based: belief after this many actions
    std::size_t action = 0;
    std::size_t observation = 0;
    double entropy = 0.0;
};

/// Acts for `steps` steps against a world simulated from `params`, filtering
/// the belief after each observation. The true start state is drawn from
/// `initial`; step k draws the transition, observation and random action from
/// substreams (k, 0), (k, 1), (k, 2) of `seed`, so both policies face the same
/// hidden cause for a given seed.
std::vector<ActiveStep> run_active_episode(const ModelParams& params, const BeliefState& initial,
                                           ActivePolicy policy, std::size_t steps,
                                           std::uint64_t seed);

// First step whose entropy is below `threshold`, or steps + 1 when none is.
std::size_t steps_to_entropy(const std::vector<ActiveStep>& episode, double threshold);

/// Simulates `length` steps of `truth` under uniformly random actions.
/// Step k draws its action, transition and observation from substreams
/// (k, 2), (k, 0), (k, 1) of `rng`; the start state from `prior`.
EpisodeData sample_episode(const ModelParams& truth, const BeliefState& prior, std::size_t length,
                           const RngStream& rng);

// Index drawn from a categorical distribution with one uniform variate.
std::size_t sample_categorical(const std::vector<double>& probs, double uniform01);

}  // namespace smw
