#include "smw/inference.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "smw/error.hpp"

namespace smw {

namespace {

constexpr double kRowTolerance = 1e-9;

void check_index(std::size_t value, std::size_t bound, const char* what) {
    if (value >= bound) {
        fail(ErrorCode::kIndexOutOfRange, std::string(what) + " index " + std::to_string(value) +
                                              " >= " + std::to_string(bound));
    }
}

void normalize_row(std::span<double> row, double total) {
    if (total > 0.0) {
        for (double& v : row) v /= total;
    } else {
        for (double& v : row) v = 1.0 / static_cast<double>(row.size());
    }
}

void check_row(std::span<const double> row, const char* what) {
    double total = 0.0;
    for (double v : row) {
        require(std::isfinite(v) && v >= 0.0, ErrorCode::kInvalidArgument,
                std::string(what) + " has a negative or non-finite entry");
        total += v;
    }
    require(std::abs(total - 1.0) <= kRowTolerance, ErrorCode::kInvalidArgument,
            std::string(what) + " row sums to " + std::to_string(total));
}

}  // namespace

void DiscreteSpec::validate() const {
    require(n_states >= 1 && n_actions >= 1 && n_observations >= 1, ErrorCode::kInvalidArgument,
            "state, action and observation counts must be positive");
}

ModelParams::ModelParams(DiscreteSpec spec)
    : spec_(spec),
      transition_(spec.n_states * spec.n_actions * spec.n_states, 1.0 / static_cast<double>(spec.n_states)),
      observation_(spec.n_states * spec.n_observations, 1.0 / static_cast<double>(spec.n_observations)) {
    spec_.validate();
}

void ModelParams::validate() const {
    spec_.validate();
    require(transition_.size() == spec_.n_states * spec_.n_actions * spec_.n_states &&
                observation_.size() == spec_.n_states * spec_.n_observations,
            ErrorCode::kInvalidArgument, "parameter tables do not match the model dimensions");
    for (std::size_t r = 0; r < spec_.n_states * spec_.n_actions; ++r) {
        check_row(std::span(transition_).subspan(r * spec_.n_states, spec_.n_states), "transition");
    }
    for (std::size_t x = 0; x < spec_.n_states; ++x) {
        check_row(std::span(observation_).subspan(x * spec_.n_observations, spec_.n_observations),
                  "observation");
    }
}

double ModelParams::log_dirichlet_prior(double alpha) const {
    if (alpha == 0.0) return 0.0;
    double sum = 0.0;
    for (double v : transition_) sum += std::log(v);
    for (double v : observation_) sum += std::log(v);
    return alpha * sum;
}

nlohmann::json to_json(const ModelParams& params) {
    const auto& s = params.spec();
    nlohmann::json transition = nlohmann::json::array();
    for (std::size_t x = 0; x < s.n_states; ++x) {
        nlohmann::json by_action = nlohmann::json::array();
        for (std::size_t u = 0; u < s.n_actions; ++u) {
            nlohmann::json row = nlohmann::json::array();
            for (std::size_t n = 0; n < s.n_states; ++n) row.push_back(params.transition(x, u, n));
            by_action.push_back(std::move(row));
        }
        transition.push_back(std::move(by_action));
    }
    nlohmann::json observation = nlohmann::json::array();
    for (std::size_t x = 0; x < s.n_states; ++x) {
        nlohmann::json row = nlohmann::json::array();
        for (std::size_t o = 0; o < s.n_observations; ++o) row.push_back(params.observation(x, o));
        observation.push_back(std::move(row));
    }
    return {{"n_states", s.n_states},
            {"n_actions", s.n_actions},
            {"n_observations", s.n_observations},
            {"transition", std::move(transition)},
            {"observation", std::move(observation)}};
}

ModelParams model_params_from_json(const nlohmann::json& j) {
    try {
        const DiscreteSpec spec{j.at("n_states").get<std::size_t>(), j.at("n_actions").get<std::size_t>(),
                                j.at("n_observations").get<std::size_t>()};
        ModelParams params(spec);
        const auto& t = j.at("transition");
        const auto& q = j.at("observation");
        require(t.size() == spec.n_states && q.size() == spec.n_states, ErrorCode::kInvalidArgument,
                "parameter arrays do not match the model dimensions");
        for (std::size_t x = 0; x < spec.n_states; ++x) {
            require(t[x].size() == spec.n_actions && q[x].size() == spec.n_observations,
                    ErrorCode::kInvalidArgument, "parameter arrays do not match the model dimensions");
            for (std::size_t u = 0; u < spec.n_actions; ++u) {
                require(t[x][u].size() == spec.n_states, ErrorCode::kInvalidArgument,
                        "transition row length does not match the model dimensions");
                for (std::size_t n = 0; n < spec.n_states; ++n) params.transition(x, u, n) = t[x][u][n].get<double>();
            }
            for (std::size_t o = 0; o < spec.n_observations; ++o) params.observation(x, o) = q[x][o].get<double>();
        }
        params.validate();
        return params;
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::kInvalidArgument, std::string("malformed model parameters: ") + e.what());
    }
}

BeliefState BeliefState::uniform(std::size_t n_states) {
    return {std::vector<double>(n_states, 1.0 / static_cast<double>(n_states))};
}

BeliefState BeliefState::delta(std::size_t n_states, std::size_t state) {
    check_index(state, n_states, "state");
    BeliefState b{std::vector<double>(n_states, 0.0)};
    b.probs[state] = 1.0;
    return b;
}

void BeliefState::validate(std::size_t n_states) const {
    require(probs.size() == n_states, ErrorCode::kInvalidArgument, "belief has the wrong length");
    check_row(probs, "belief");
}

std::vector<double> predict_states(const ModelParams& params, const BeliefState& belief, std::size_t u) {
    const std::size_t n = params.spec().n_states;
    check_index(u, params.spec().n_actions, "action");
    require(belief.probs.size() == n, ErrorCode::kInvalidArgument, "belief has the wrong length");
    std::vector<double> predicted(n, 0.0);
    for (std::size_t x = 0; x < n; ++x) {
        if (belief.probs[x] == 0.0) continue;
        for (std::size_t next = 0; next < n; ++next) predicted[next] += params.transition(x, u, next) * belief.probs[x];
    }
    return predicted;
}

double likelihood(const ModelParams& params, const BeliefState& belief, std::size_t u, std::size_t o) {
    check_index(o, params.spec().n_observations, "observation");
    const auto predicted = predict_states(params, belief, u);
    double total = 0.0;
    for (std::size_t next = 0; next < predicted.size(); ++next) total += params.observation(next, o) * predicted[next];
    return total;
}

BeliefState e_step_filter(const ModelParams& params, const BeliefState& belief, std::size_t u,
                          std::size_t o) {
    check_index(o, params.spec().n_observations, "observation");
    auto posterior = predict_states(params, belief, u);
    double total = 0.0;
    for (std::size_t next = 0; next < posterior.size(); ++next) {
        posterior[next] *= params.observation(next, o);
        total += posterior[next];
    }
    if (!(total > 0.0)) {
        fail(ErrorCode::kZeroLikelihood, "observation " + std::to_string(o) + " after action " +
                                             std::to_string(u) + " has probability 0");
    }
    for (double& p : posterior) p /= total;
    return {std::move(posterior)};
}

SmoothedEpisode e_step_smooth(const ModelParams& params, const EpisodeData& episode,
                              const BeliefState& prior) {
    require(!episode.empty(), ErrorCode::kPrecondition, "episode must be non-empty");
    const std::size_t n = params.spec().n_states;
    const std::size_t steps = episode.size();
    prior.validate(n);

    // Scaled forward pass: alpha[t] is the filtered belief, scale[t] = P(o_t | o_<t).
    std::vector<std::vector<double>> alpha(steps);
    std::vector<double> scale(steps);
    const std::vector<double>* previous = &prior.probs;
    for (std::size_t t = 0; t < steps; ++t) {
        const auto& [u, o] = episode[t];
        check_index(o, params.spec().n_observations, "observation");
        alpha[t] = predict_states(params, BeliefState{*previous}, u);
        double c = 0.0;
        for (std::size_t x = 0; x < n; ++x) {
            alpha[t][x] *= params.observation(x, o);
            c += alpha[t][x];
        }
        if (!(c > 0.0)) {
            fail(ErrorCode::kZeroLikelihood, "episode has probability 0 at step " + std::to_string(t));
        }
        for (double& a : alpha[t]) a /= c;
        scale[t] = c;
        previous = &alpha[t];
    }

    // Scaled backward pass.
    std::vector<std::vector<double>> beta(steps, std::vector<double>(n, 1.0));
    for (std::size_t t = steps - 1; t-- > 0;) {
        const auto& [u, o] = episode[t + 1];
        for (std::size_t x = 0; x < n; ++x) {
            double sum = 0.0;
            for (std::size_t next = 0; next < n; ++next) {
                sum += params.transition(x, u, next) * params.observation(next, o) * beta[t + 1][next];
            }
            beta[t][x] = sum / scale[t + 1];
        }
    }

    SmoothedEpisode out;
    out.gamma.resize(steps, std::vector<double>(n));
    out.xi.resize(steps, std::vector<double>(n * n));
    for (std::size_t t = 0; t < steps; ++t) {
        for (std::size_t x = 0; x < n; ++x) out.gamma[t][x] = alpha[t][x] * beta[t][x];
        const auto& from = t == 0 ? prior.probs : alpha[t - 1];
        const auto& [u, o] = episode[t];
        for (std::size_t x = 0; x < n; ++x) {
            for (std::size_t next = 0; next < n; ++next) {
                out.xi[t][x * n + next] = from[x] * params.transition(x, u, next) *
                                          params.observation(next, o) * beta[t][next] / scale[t];
            }
        }
        out.log_likelihood += std::log(scale[t]);
    }
    return out;
}

SufficientStats::SufficientStats(DiscreteSpec s)
    : spec(s),
      transition_counts(s.n_states * s.n_actions * s.n_states, 0.0),
      observation_counts(s.n_states * s.n_observations, 0.0) {
    spec.validate();
}

void SufficientStats::accumulate(const EpisodeData& episode, const SmoothedEpisode& smoothed) {
    const std::size_t n = spec.n_states;
    require(smoothed.gamma.size() == episode.size(), ErrorCode::kInvalidArgument,
            "posteriors do not match the episode");
    for (std::size_t t = 0; t < episode.size(); ++t) {
        const auto& [u, o] = episode[t];
        check_index(u, spec.n_actions, "action");
        check_index(o, spec.n_observations, "observation");
        for (std::size_t x = 0; x < n; ++x) {
            observation_counts[x * spec.n_observations + o] += smoothed.gamma[t][x];
            for (std::size_t next = 0; next < n; ++next) {
                transition_counts[(x * spec.n_actions + u) * n + next] += smoothed.xi[t][x * n + next];
            }
        }
    }
    ++episodes;
}

ModelParams m_step(const SufficientStats& stats, double alpha) {
    require(alpha >= 0.0, ErrorCode::kInvalidArgument, "alpha must be non-negative");
    const auto& s = stats.spec;
    ModelParams params(s);
    for (std::size_t x = 0; x < s.n_states; ++x) {
        for (std::size_t u = 0; u < s.n_actions; ++u) {
            double total = 0.0;
            for (std::size_t n = 0; n < s.n_states; ++n) {
                params.transition(x, u, n) = stats.transition_counts[(x * s.n_actions + u) * s.n_states + n] + alpha;
                total += params.transition(x, u, n);
            }
            normalize_row(std::span(&params.transition(x, u, 0), s.n_states), total);
        }
        double total = 0.0;
        for (std::size_t o = 0; o < s.n_observations; ++o) {
            params.observation(x, o) = stats.observation_counts[x * s.n_observations + o] + alpha;
            total += params.observation(x, o);
        }
        normalize_row(std::span(&params.observation(x, 0), s.n_observations), total);
    }
    return params;
}

EmResult run_em(std::span<const EpisodeData> episodes, const ModelParams& init, std::size_t iters,
                double alpha, const BeliefState& prior) {
    require(iters >= 1, ErrorCode::kPrecondition, "EM needs at least one iteration");
    require(!episodes.empty(), ErrorCode::kPrecondition, "EM needs at least one episode");
    init.validate();
    EmResult result{init, {}, {}};
    for (std::size_t it = 0; it < iters; ++it) {
        SufficientStats stats(init.spec());
        double total = 0.0;
        for (const auto& episode : episodes) {
            const auto smoothed = e_step_smooth(result.params, episode, prior);
            stats.accumulate(episode, smoothed);
            total += smoothed.log_likelihood;
        }
        result.log_likelihood.push_back(total);
        result.objective.push_back(total + result.params.log_dirichlet_prior(alpha));
        result.params = m_step(stats, alpha);
    }
    return result;
}

double entropy(const BeliefState& belief) {
    double h = 0.0;
    for (double p : belief.probs) {
        if (p > 0.0) h -= p * std::log(p);
    }
    return h;
}

double expected_posterior_entropy(const ModelParams& params, const BeliefState& belief, std::size_t u) {
    double expected = 0.0;
    for (std::size_t o = 0; o < params.spec().n_observations; ++o) {
        const double p = likelihood(params, belief, u, o);
        if (p > 0.0) expected += p * entropy(e_step_filter(params, belief, u, o));
    }
    return expected;
}

std::size_t lowest_score_action(std::span<const std::size_t> candidates,
                                std::span<const double> scores) {
    require(!candidates.empty() && candidates.size() == scores.size(), ErrorCode::kPrecondition,
            "need one score per candidate action");
    // Ties go to the lowest action index, not the lowest list position.
    std::size_t best = 0;
    for (std::size_t i = 1; i < candidates.size(); ++i) {
        if (scores[i] < scores[best] || (scores[i] == scores[best] && candidates[i] < candidates[best])) {
            best = i;
        }
    }
    return candidates[best];
}

std::size_t select_action(const ModelParams& params, const BeliefState& belief,
                          std::span<const std::size_t> candidates) {
    require(!candidates.empty(), ErrorCode::kPrecondition, "no candidate actions");
    std::vector<double> scores;
    scores.reserve(candidates.size());
    for (std::size_t u : candidates) scores.push_back(expected_posterior_entropy(params, belief, u));
    return lowest_score_action(candidates, scores);
}

}  // namespace smw
