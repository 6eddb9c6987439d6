#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "smw/active_sensing.hpp"
#include "smw/error.hpp"
#include "smw/inference.hpp"
#include "smw/rng.hpp"
#include "oracles.hpp"

using namespace smw;
using smw::test::enumerate_paths;

namespace {

std::vector<double> random_row(RngStream& rng, std::size_t n) {
    std::vector<double> row(n);
    double total = 0.0;
    for (double& v : row) {
        v = 0.05 + rng.uniform();
        total += v;
    }
    for (double& v : row) v /= total;
    return row;
}

ModelParams random_params(RngStream& rng, DiscreteSpec spec) {
    ModelParams p(spec);
    for (std::size_t x = 0; x < spec.n_states; ++x) {
        for (std::size_t u = 0; u < spec.n_actions; ++u) {
            const auto row = random_row(rng, spec.n_states);
            for (std::size_t n = 0; n < spec.n_states; ++n) p.transition(x, u, n) = row[n];
        }
        const auto row = random_row(rng, spec.n_observations);
        for (std::size_t o = 0; o < spec.n_observations; ++o) p.observation(x, o) = row[o];
    }
    return p;
}

EpisodeData random_episode(RngStream& rng, DiscreteSpec spec, std::size_t length) {
    EpisodeData e;
    for (std::size_t t = 0; t < length; ++t) e.push_back({rng.index(spec.n_actions), rng.index(spec.n_observations)});
    return e;
}

ModelParams identity_model(std::size_t n) {
    ModelParams p(DiscreteSpec{n, 1, n});
    for (std::size_t x = 0; x < n; ++x) {
        for (std::size_t y = 0; y < n; ++y) {
            p.transition(x, 0, y) = x == y ? 1.0 : 0.0;
            p.observation(x, y) = x == y ? 1.0 : 0.0;
        }
    }
    return p;
}

ErrorCode code_of(auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::kKernelFailure;
}

void check_normalized(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) {
        CHECK(x >= 0.0);
        s += x;
    }
    CHECK(std::abs(s - 1.0) <= 1e-9);
}

}  // namespace

TEST_CASE("likelihood examples") {
    RngStream rng(1);
    SUBCASE("single state") {
        ModelParams p(DiscreteSpec{1, 2, 3});
        p.observation(0, 0) = 0.2;
        p.observation(0, 1) = 0.3;
        p.observation(0, 2) = 0.5;
        CHECK(likelihood(p, BeliefState::uniform(1), 1, 2) == doctest::Approx(0.5));
    }
    SUBCASE("identity model with a delta belief") {
        const ModelParams p = identity_model(3);
        for (std::size_t x = 0; x < 3; ++x) {
            for (std::size_t o = 0; o < 3; ++o) {
                CHECK(likelihood(p, BeliefState::delta(3, x), 0, o) == (o == x ? 1.0 : 0.0));
            }
        }
    }
    SUBCASE("uniform everything") {
        const ModelParams p(DiscreteSpec{2, 2, 2});
        CHECK(likelihood(p, BeliefState::uniform(2), 1, 0) == doctest::Approx(0.5));
    }
    SUBCASE("bad indices") {
        const ModelParams p(DiscreteSpec{2, 2, 2});
        CHECK(code_of([&] { likelihood(p, BeliefState::uniform(2), 2, 0); }) == ErrorCode::kIndexOutOfRange);
        CHECK(code_of([&] { likelihood(p, BeliefState::uniform(2), 0, 5); }) == ErrorCode::kIndexOutOfRange);
    }
}

TEST_CASE("filter examples") {
    SUBCASE("identity model returns a delta on the observation") {
        const BeliefState b = e_step_filter(identity_model(3), BeliefState::uniform(3), 0, 2);
        CHECK(b.probs == std::vector<double>{0.0, 0.0, 1.0});
    }
    SUBCASE("uninformative observation keeps the predictive prior") {
        RngStream rng(2);
        ModelParams p = random_params(rng, {3, 2, 2});
        for (std::size_t x = 0; x < 3; ++x) {
            p.observation(x, 0) = 0.5;
            p.observation(x, 1) = 0.5;
        }
        const BeliefState prior{{0.2, 0.5, 0.3}};
        const auto predicted = predict_states(p, prior, 1);
        const BeliefState post = e_step_filter(p, prior, 1, 0);
        for (std::size_t x = 0; x < 3; ++x) CHECK(std::abs(post.probs[x] - predicted[x]) < 1e-15);
    }
    SUBCASE("impossible observation") {
        CHECK(code_of([] { e_step_filter(identity_model(2), BeliefState::delta(2, 0), 0, 1); }) ==
              ErrorCode::kZeroLikelihood);
    }
}

TEST_CASE("smoothing examples") {
    RngStream rng(3);
    SUBCASE("length one equals the filter") {
        const ModelParams p = random_params(rng, {3, 2, 3});
        const BeliefState prior{{0.1, 0.6, 0.3}};
        const auto s = e_step_smooth(p, {{1, 2}}, prior);
        const auto f = e_step_filter(p, prior, 1, 2);
        for (std::size_t x = 0; x < 3; ++x) CHECK(std::abs(s.gamma[0][x] - f.probs[x]) < 1e-15);
    }
    SUBCASE("deterministic model consistent with data") {
        ModelParams p(DiscreteSpec{2, 1, 2});
        p.transition(0, 0, 0) = 0.0;
        p.transition(0, 0, 1) = 1.0;
        p.transition(1, 0, 0) = 1.0;
        p.transition(1, 0, 1) = 0.0;
        p.observation(0, 0) = 1.0;
        p.observation(0, 1) = 0.0;
        p.observation(1, 0) = 0.0;
        p.observation(1, 1) = 1.0;
        const EpisodeData e{{0, 1}, {0, 0}, {0, 1}, {0, 0}};
        const auto s = e_step_smooth(p, e, BeliefState::delta(2, 0));
        CHECK(s.log_likelihood == 0.0);
        for (std::size_t t = 0; t < e.size(); ++t) {
            CHECK(s.gamma[t][e[t].observation] == 1.0);
            CHECK(s.gamma[t][1 - e[t].observation] == 0.0);
        }
    }
    SUBCASE("empty episode") {
        CHECK(code_of([] { e_step_smooth(identity_model(2), {}, BeliefState::uniform(2)); }) ==
              ErrorCode::kPrecondition);
    }
}

TEST_CASE("smoothing matches exhaustive path enumeration") {
    RngStream rng(4);
    for (int trial = 0; trial < 200; ++trial) {
        const DiscreteSpec spec{2 + rng.index(2), 1 + rng.index(2), 2 + rng.index(2)};
        const ModelParams p = random_params(rng, spec);
        const std::size_t len = 1 + rng.index(5);
        const EpisodeData e = random_episode(rng, spec, len);
        const BeliefState prior{random_row(rng, spec.n_states)};
        const auto s = e_step_smooth(p, e, prior);
        const auto oracle = enumerate_paths(p, e, prior);
        CHECK(std::abs(s.log_likelihood - oracle.log_likelihood) < 1e-10);
        for (std::size_t t = 0; t < len; ++t) {
            for (std::size_t x = 0; x < spec.n_states; ++x) CHECK(std::abs(s.gamma[t][x] - oracle.gamma[t][x]) < 1e-10);
            for (std::size_t k = 0; k < spec.n_states * spec.n_states; ++k) {
                CHECK(std::abs(s.xi[t][k] - oracle.xi[t][k]) < 1e-10);
            }
        }
    }
}

TEST_CASE("the last smoothed posterior is the filtered belief") {
    RngStream rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        const DiscreteSpec spec{3, 2, 3};
        const ModelParams p = random_params(rng, spec);
        const EpisodeData e = random_episode(rng, spec, 1 + rng.index(30));
        BeliefState b = BeliefState::uniform(3);
        for (const auto& step : e) {
            b = e_step_filter(p, b, step.action, step.observation);
            check_normalized(b.probs);
        }
        const auto s = e_step_smooth(p, e, BeliefState::uniform(3));
        for (std::size_t x = 0; x < 3; ++x) CHECK(std::abs(s.gamma.back()[x] - b.probs[x]) <= 1e-12);
        for (const auto& g : s.gamma) check_normalized(g);
        for (const auto& xi : s.xi) check_normalized(xi);
    }
}

TEST_CASE("m_step examples") {
    const DiscreteSpec spec{2, 1, 2};
    SUBCASE("no data with alpha 1 gives uniform rows") {
        const ModelParams p = m_step(SufficientStats(spec), 1.0);
        for (double v : p.transition_table()) CHECK(v == 0.5);
        for (double v : p.observation_table()) CHECK(v == 0.5);
    }
    SUBCASE("count ratio") {
        SufficientStats s(spec);
        s.transition_counts[0 * 2 + 1] = 3.0;  // x=0, u=0 -> x'=1
        s.transition_counts[0 * 2 + 0] = 1.0;
        const ModelParams p = m_step(s, 0.0);
        CHECK(p.transition(0, 0, 1) == 0.75);
        CHECK(p.transition(1, 0, 0) == 0.5);  // empty row falls back to uniform
    }
    SUBCASE("frequent deterministic transition approaches a delta") {
        SufficientStats s(spec);
        s.transition_counts[1 * 2 + 0] = 1e6;
        const ModelParams p = m_step(s, 1e-3);
        CHECK(p.transition(1, 0, 0) > 1.0 - 1e-8);
    }
}

TEST_CASE("EM on a single state has nothing to learn") {
    const ModelParams p(DiscreteSpec{1, 1, 2});
    RngStream rng(6);
    std::vector<EpisodeData> episodes{random_episode(rng, p.spec(), 20), random_episode(rng, p.spec(), 20)};
    const auto r = run_em(episodes, p, 5, 1e-3, BeliefState::uniform(1));
    REQUIRE(r.log_likelihood.size() == 5);
    for (std::size_t i = 2; i < 5; ++i) CHECK(std::abs(r.log_likelihood[i] - r.log_likelihood[1]) < 1e-12);
}

TEST_CASE("EM objective never decreases") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        RngStream rng(seed);
        const DiscreteSpec spec{2 + rng.index(2), 1 + rng.index(2), 2 + rng.index(2)};
        const ModelParams truth = random_params(rng, spec);
        std::vector<EpisodeData> episodes;
        for (std::uint64_t e = 0; e < 4; ++e) {
            episodes.push_back(sample_episode(truth, BeliefState::uniform(spec.n_states), 40, rng.substream(e)));
        }
        const ModelParams init = random_params(rng, spec);
        const auto r = run_em(episodes, init, 30, 1e-3, BeliefState::uniform(spec.n_states));
        for (std::size_t i = 1; i < r.objective.size(); ++i) CHECK(r.objective[i] >= r.objective[i - 1] - 1e-9);
        CHECK_NOTHROW(r.params.validate());
    }
}

TEST_CASE("EM recovers a near-deterministic observation model") {
    ModelParams truth(DiscreteSpec{2, 1, 2});
    truth.transition(0, 0, 0) = 0.1;
    truth.transition(0, 0, 1) = 0.9;
    truth.transition(1, 0, 0) = 0.9;
    truth.transition(1, 0, 1) = 0.1;
    truth.observation(0, 0) = 1.0;
    truth.observation(0, 1) = 0.0;
    truth.observation(1, 0) = 0.0;
    truth.observation(1, 1) = 1.0;
    ModelParams init(DiscreteSpec{2, 1, 2});
    init.observation(0, 0) = 0.6;
    init.observation(0, 1) = 0.4;
    init.observation(1, 0) = 0.4;
    init.observation(1, 1) = 0.6;
    const BeliefState prior = BeliefState::uniform(2);
    const std::vector<EpisodeData> episodes{sample_episode(truth, prior, 200, RngStream(12))};
    const auto r = run_em(episodes, init, 100, 1e-3, prior);
    CHECK(r.params.observation(0, 0) >= 0.95);
    CHECK(r.params.observation(1, 1) >= 0.95);
}

TEST_CASE("params JSON round trip") {
    RngStream rng(9);
    const ModelParams p = random_params(rng, {3, 2, 4});
    const ModelParams q = model_params_from_json(to_json(p));
    CHECK(q.spec() == p.spec());
    CHECK(q.transition_table() == p.transition_table());
    CHECK(q.observation_table() == p.observation_table());
}

TEST_CASE("action selection examples") {
    SUBCASE("delta belief ties to action 0") {
        ModelParams stay(DiscreteSpec{3, 3, 2});
        for (std::size_t x = 0; x < 3; ++x)
            for (std::size_t u = 0; u < 3; ++u)
                for (std::size_t y = 0; y < 3; ++y) stay.transition(x, u, y) = x == y ? 1.0 : 0.0;
        CHECK(select_action(stay, BeliefState::delta(3, 2), std::vector<std::size_t>{2, 1, 0}) == 0);
    }
    SUBCASE("informative action wins") {
        // Observations depend on the state only, so "action 1 reads the bit"
        // is carried by the gaze half of the state.
        const DisambiguationWorld world{1.0};
        const ModelParams p = world.params();
        const BeliefState b = world.initial_belief(false);
        const double h0 = expected_posterior_entropy(p, b, 0);
        const double h1 = expected_posterior_entropy(p, b, 1);
        CHECK(std::abs(h0 - std::log(2.0)) < 1e-12);
        CHECK(std::abs(h1) < 1e-12);
        CHECK(select_action(p, b, std::vector<std::size_t>{0, 1}) == 1);
    }
    SUBCASE("single candidate") {
        const DisambiguationWorld world;
        CHECK(select_action(world.params(), world.initial_belief(false), std::vector<std::size_t>{0}) == 0);
    }
    SUBCASE("no candidates") {
        const DisambiguationWorld world;
        CHECK(code_of([&] { select_action(world.params(), world.initial_belief(false), std::vector<std::size_t>{}); }) ==
              ErrorCode::kPrecondition);
    }
}

TEST_CASE("positive rescaling of scores keeps the chosen action") {
    RngStream rng(11);
    for (int i = 0; i < 500; ++i) {
        const std::size_t n = 1 + rng.index(6);
        std::vector<std::size_t> actions(n);
        std::iota(actions.begin(), actions.end(), std::size_t{0});
        for (std::size_t k = n; k > 1; --k) std::swap(actions[k - 1], actions[rng.index(k)]);
        std::vector<double> scores(n);
        for (double& s : scores) s = static_cast<double>(rng.index(4)) * 0.25;  // frequent ties
        const std::size_t chosen = lowest_score_action(actions, scores);
        for (double c : {1e-3, 0.5, 3.0, 1e6}) {
            std::vector<double> scaled = scores;
            for (double& s : scaled) s *= c;
            CHECK(lowest_score_action(actions, scaled) == chosen);
        }
        const double best = *std::min_element(scores.begin(), scores.end());
        std::size_t expected = n;
        for (std::size_t k = 0; k < n; ++k) {
            if (scores[k] == best) expected = std::min(expected, actions[k]);
        }
        CHECK(chosen == expected);
    }
}

TEST_CASE("entropy of standard beliefs") {
    CHECK(entropy(BeliefState::delta(4, 2)) == 0.0);
    CHECK(std::abs(entropy(BeliefState::uniform(4)) - std::log(4.0)) < 1e-15);
}

TEST_CASE("validation rejects malformed tables and beliefs") {
    ModelParams p(DiscreteSpec{2, 1, 2});
    p.observation(0, 0) = 0.7;
    CHECK_THROWS_AS(p.validate(), Error);
    ModelParams q(DiscreteSpec{2, 1, 2});
    q.transition(1, 0, 0) = -0.5;
    q.transition(1, 0, 1) = 1.5;
    CHECK_THROWS_AS(q.validate(), Error);
    CHECK_THROWS_AS(BeliefState({{0.5, 0.6}}).validate(2), Error);
    CHECK_THROWS_AS(BeliefState({{1.0}}).validate(2), Error);
    CHECK_THROWS_AS((DiscreteSpec{0, 1, 1}.validate()), Error);
}

TEST_CASE("categorical sampling follows the cumulative distribution") {
    const std::vector<double> probs{0.2, 0.0, 0.5, 0.3};
    CHECK(sample_categorical(probs, 0.0) == 0);
    CHECK(sample_categorical(probs, 0.1999) == 0);
    CHECK(sample_categorical(probs, 0.2) == 2);
    CHECK(sample_categorical(probs, 0.69) == 2);
    CHECK(sample_categorical(probs, 0.7) == 3);
    CHECK(sample_categorical(probs, 0.999999) == 3);
}

TEST_CASE("active sensing episodes") {
    const DisambiguationWorld world;
    const ModelParams p = world.params();
    SUBCASE("a certain belief stays certain") {
        const auto e = run_active_episode(p, world.initial_belief(true), ActivePolicy::kInfoGain, 30, 1);
        REQUIRE(e.size() == 30);
        for (const auto& s : e) CHECK(s.entropy < 1e-12);
    }
    SUBCASE("zero steps") {
        CHECK(run_active_episode(p, world.initial_belief(false), ActivePolicy::kRandom, 0, 1).empty());
    }
    SUBCASE("info gain always looks at the informative location") {
        const auto e = run_active_episode(p, world.initial_belief(false), ActivePolicy::kInfoGain, 20, 2);
        for (const auto& s : e) CHECK(s.action == 1);
    }
    SUBCASE("episodes replay from the seed") {
        const auto a = run_active_episode(p, world.initial_belief(false), ActivePolicy::kRandom, 25, 3);
        const auto b = run_active_episode(p, world.initial_belief(false), ActivePolicy::kRandom, 25, 3);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].action == b[i].action);
            CHECK(a[i].observation == b[i].observation);
            CHECK(a[i].entropy == b[i].entropy);
        }
    }
    SUBCASE("steps to threshold") {
        std::vector<ActiveStep> e{{1, 0, 2, 0.7}, {2, 1, 0, 0.3}, {3, 1, 0, 0.05}};
        CHECK(steps_to_entropy(e, 0.1) == 3);
        CHECK(steps_to_entropy(e, 0.01) == 4);
    }
}
