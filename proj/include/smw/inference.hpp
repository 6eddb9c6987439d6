#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <json.hpp>

namespace smw {

struct DiscreteSpec {
    std::size_t n_states = 1;
    std::size_t n_actions = 1;
    std::size_t n_observations = 1;

    void validate() const;
    friend bool operator==(const DiscreteSpec&, const DiscreteSpec&) = default;
};

/// Categorical model: transition P[x' | x, u] and observation Q[o | x].
class ModelParams {
public:
    ModelParams() = default;
    explicit ModelParams(DiscreteSpec spec);  // uniform rows

    static ModelParams uniform(DiscreteSpec spec) { return ModelParams(spec); }

    const DiscreteSpec& spec() const noexcept { return spec_; }

    double& transition(std::size_t x, std::size_t u, std::size_t next) {
        return transition_[(x * spec_.n_actions + u) * spec_.n_states + next];
    }
    double transition(std::size_t x, std::size_t u, std::size_t next) const {
        return transition_[(x * spec_.n_actions + u) * spec_.n_states + next];
    }
    double& observation(std::size_t x, std::size_t o) { return observation_[x * spec_.n_observations + o]; }
    double observation(std::size_t x, std::size_t o) const {
        return observation_[x * spec_.n_observations + o];
    }

    const std::vector<double>& transition_table() const noexcept { return transition_; }
    const std::vector<double>& observation_table() const noexcept { return observation_; }

    // Non-negative entries, rows summing to 1 within 1e-9.
    void validate() const;

    // alpha * sum(log theta) over every transition and observation entry.
    double log_dirichlet_prior(double alpha) const;

private:
    DiscreteSpec spec_;
    std::vector<double> transition_;   // X * U * X
    std::vector<double> observation_;  // X * O
};

nlohmann::json to_json(const ModelParams& params);
ModelParams model_params_from_json(const nlohmann::json& j);

struct BeliefState {
    std::vector<double> probs;

    static BeliefState uniform(std::size_t n_states);
    static BeliefState delta(std::size_t n_states, std::size_t state);
    void validate(std::size_t n_states) const;
};

struct EpisodeStep {
    std::size_t action = 0;
    std::size_t observation = 0;
};
using EpisodeData = std::vector<EpisodeStep>;

// Predictive distribution sum_x P[x' | x, u] belief[x].
std::vector<double> predict_states(const ModelParams& params, const BeliefState& belief, std::size_t u);

/// P(o | belief, u) = sum_x' Q[o | x'] sum_x P[x' | x, u] belief[x].
double likelihood(const ModelParams& params, const BeliefState& belief, std::size_t u, std::size_t o);

/// Bayes filter step; throws ZeroLikelihood for an impossible observation.
BeliefState e_step_filter(const ModelParams& params, const BeliefState& belief, std::size_t u,
                          std::size_t o);

/// Forward-backward posteriors for one episode.
///
/// The prior is the belief over the state before the first action, so
/// xi[0] pairs that hidden start state with x_0. gamma[t][x] = P(x_t = x | o),
/// xi[t][x * X + x'] = P(x_{t-1} = x, x_t = x' | o).
struct SmoothedEpisode {
    std::vector<std::vector<double>> gamma;
    std::vector<std::vector<double>> xi;
    double log_likelihood = 0.0;
};

SmoothedEpisode e_step_smooth(const ModelParams& params, const EpisodeData& episode,
                              const BeliefState& prior);

// Expected transition and observation counts accumulated over episodes.
struct SufficientStats {
    explicit SufficientStats(DiscreteSpec spec);

    void accumulate(const EpisodeData& episode, const SmoothedEpisode& smoothed);

    DiscreteSpec spec;
    std::vector<double> transition_counts;   // X * U * X
    std::vector<double> observation_counts;  // X * O
    std::size_t episodes = 0;
};

/// MAP re-estimate (counts + alpha) / normalizer. Rows with no mass and
/// alpha = 0 fall back to uniform.
ModelParams m_step(const SufficientStats& stats, double alpha);

struct EmResult {
    ModelParams params;
    std::vector<double> log_likelihood;  // total over episodes, one per iteration
    std::vector<double> objective;       // log_likelihood + Dirichlet prior term
};

/// Alternates e_step_smooth over all episodes with m_step. Entry i of each
/// trace is evaluated at the parameters entering iteration i.
EmResult run_em(std::span<const EpisodeData> episodes, const ModelParams& init, std::size_t iters,
                double alpha, const BeliefState& prior);

double entropy(const BeliefState& belief);  // nats

/// sum_o P(o | belief, u) H(e_step_filter(belief, u, o)).
double expected_posterior_entropy(const ModelParams& params, const BeliefState& belief, std::size_t u);

// Candidate with the smallest score; lowest action index on ties.
std::size_t lowest_score_action(std::span<const std::size_t> candidates,
                                std::span<const double> scores);

/// Candidate with the lowest expected posterior entropy, lowest index on ties.
std::size_t select_action(const ModelParams& params, const BeliefState& belief,
                          std::span<const std::size_t> candidates);

}  // namespace smw
