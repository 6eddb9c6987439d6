#include "smw/active_sensing.hpp"

#include <numeric>

#include "smw/error.hpp"
#include "smw/rng.hpp"

namespace smw {

ModelParams DisambiguationWorld::params() const {
    require(accuracy >= 0.0 && accuracy <= 1.0, ErrorCode::kInvalidArgument,
            "accuracy must lie in [0, 1]");
    ModelParams p(DiscreteSpec{kStates, kActions, kObservations});
    for (std::size_t x = 0; x < kStates; ++x) {
        const std::size_t hidden = x % 2;
        for (std::size_t u = 0; u < kActions; ++u) {
            for (std::size_t next = 0; next < kStates; ++next) p.transition(x, u, next) = 0.0;
            p.transition(x, u, hidden + 2 * u) = 1.0;
        }
        const std::size_t gaze = x / 2;
        for (std::size_t o = 0; o < kObservations; ++o) p.observation(x, o) = 0.0;
        if (gaze == 1) {
            p.observation(x, hidden) = accuracy;
            p.observation(x, 1 - hidden) = 1.0 - accuracy;
        } else {
            p.observation(x, 2) = 1.0;
        }
    }
    return p;
}

BeliefState DisambiguationWorld::initial_belief(bool certain) const {
    if (certain) return BeliefState::delta(kStates, 0);
    return BeliefState{{0.5, 0.5, 0.0, 0.0}};
}

std::size_t sample_categorical(const std::vector<double>& probs, double uniform01) {
    const double total = std::accumulate(probs.begin(), probs.end(), 0.0);
    double cumulative = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        if (probs[i] <= 0.0) continue;
        cumulative += probs[i];
        last_positive = i;
        if (uniform01 * total < cumulative) return i;
    }
    return last_positive;
}

std::vector<ActiveStep> run_active_episode(const ModelParams& params, const BeliefState& initial,
                                           ActivePolicy policy, std::size_t steps,
                                           std::uint64_t seed) {
    params.validate();
    const auto& spec = params.spec();
    initial.validate(spec.n_states);
    const RngStream root(seed);
    RngStream truth_rng = root.substream(0xfffffffffULL);
    std::size_t state = sample_categorical(initial.probs, truth_rng.uniform());

    std::vector<std::size_t> candidates(spec.n_actions);
    std::iota(candidates.begin(), candidates.end(), std::size_t{0});

    BeliefState belief = initial;
    std::vector<ActiveStep> out;
    out.reserve(steps);
    for (std::size_t k = 0; k < steps; ++k) {
        std::size_t action = 0;
        if (policy == ActivePolicy::kInfoGain) {
            action = select_action(params, belief, candidates);
        } else {
            RngStream action_rng = root.substream({k, 2});
            action = action_rng.index(spec.n_actions);
        }
        std::vector<double> next_probs(spec.n_states);
        for (std::size_t n = 0; n < spec.n_states; ++n) next_probs[n] = params.transition(state, action, n);
        RngStream transition_rng = root.substream({k, 0});
        state = sample_categorical(next_probs, transition_rng.uniform());

        std::vector<double> obs_probs(spec.n_observations);
        for (std::size_t o = 0; o < spec.n_observations; ++o) obs_probs[o] = params.observation(state, o);
        RngStream observation_rng = root.substream({k, 1});
        const std::size_t observation = sample_categorical(obs_probs, observation_rng.uniform());

        belief = e_step_filter(params, belief, action, observation);
        out.push_back({k + 1, action, observation, entropy(belief)});
    }
    return out;
}

EpisodeData sample_episode(const ModelParams& truth, const BeliefState& prior, std::size_t length,
                           const RngStream& rng) {
    truth.validate();
    const auto& spec = truth.spec();
    prior.validate(spec.n_states);
    RngStream start_rng = rng.substream(0xfffffffffULL);
    std::size_t state = sample_categorical(prior.probs, start_rng.uniform());
    EpisodeData out;
    out.reserve(length);
    std::vector<double> row;
    for (std::size_t k = 0; k < length; ++k) {
        RngStream action_rng = rng.substream({k, 2});
        const std::size_t action = action_rng.index(spec.n_actions);
        row.assign(spec.n_states, 0.0);
        for (std::size_t n = 0; n < spec.n_states; ++n) row[n] = truth.transition(state, action, n);
        RngStream transition_rng = rng.substream({k, 0});
        state = sample_categorical(row, transition_rng.uniform());
        row.assign(spec.n_observations, 0.0);
        for (std::size_t o = 0; o < spec.n_observations; ++o) row[o] = truth.observation(state, o);
        RngStream observation_rng = rng.substream({k, 1});
        out.push_back({action, sample_categorical(row, observation_rng.uniform())});
    }
    return out;
}

std::size_t steps_to_entropy(const std::vector<ActiveStep>& episode, double threshold) {
    for (const auto& s : episode) {
        if (s.entropy < threshold) return s.step;
    }
    return episode.size() + 1;
}

}  // namespace smw
