#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <set>
#include <sstream>

#include "smw/error.hpp"
#include "smw/forward_models.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace smw;
using smw::test::enumerate_entries;
using smw::test::kPi;

namespace {

BabbleSetup default_setup() {
    BabbleSetup s;
    const auto grid = joint_grid({0.0, kPi / 2}, {kPi / 3, 2 * kPi / 3}, 5, 5);
    s.basis = build_basis(grid, s.geometry, 5.0);
    s.rest_posture = {{kPi / 4, kPi / 2}};
    s.objects.push_back({{0.3, 0.5}, 0.05, 0.6});
    return s;
}

ErrorCode code_of(auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::kKernelFailure;
}

double max_abs(const VisualField& a, const VisualField& b) {
    return test::max_abs_diff(a.pixels(), b.pixels());
}

}  // namespace

TEST_CASE("babble covers the command grid") {
    const BabbleSetup s = default_setup();
    const auto arm = vertex_commands(s.basis);
    const std::vector<ArmCommand> two_arm(arm.begin(), arm.begin() + 2);
    const auto eye = fixation_grid({0.0, 0.7}, 0.1, 2, 1);
    const BabbleDataset d = babble(s, two_arm, eye, 9);
    REQUIRE(d.records.size() == 4);
    std::set<std::pair<std::size_t, std::size_t>> keys;
    for (const auto& r : d.records) keys.insert({r.arm_index, r.eye_index});
    CHECK(keys.size() == 4);
    CHECK(d.records[1].arm_index == 0);
    CHECK(d.records[1].eye_index == 1);
    CHECK(d.arm_grid_size == 2);
    CHECK(d.eye_grid_size == 2);
}

TEST_CASE("a single record is a direct render of the settled arm") {
    const BabbleSetup s = default_setup();
    const std::vector<ArmCommand> arm{centroid_commands(s.basis)[4]};
    const std::vector<EyeCommand> eye{{{0.05, 0.6}}};
    const BabbleDataset d = babble(s, arm, eye, 3);
    REQUIRE(d.records.size() == 1);
    WorldState w;
    w.posture = ballistic_settle(s.basis, arm[0], s.rest_posture, s.settle_dt, s.settle_horizon);
    w.objects = s.objects;
    RngStream rng(0);
    CHECK(d.records[0].field == render_visual_field(w, s.geometry, eye[0], s.retina, rng));
}

TEST_CASE("babbling is reproducible from the seed") {
    BabbleSetup s = default_setup();
    s.retina.sensor_noise_std = 0.05;
    const auto arm = centroid_commands(s.basis);
    const auto eye = fixation_grid({0.0, 0.6}, 0.2, 2, 2);
    const std::string a = babble_to_jsonl(babble(s, arm, eye, 5));
    const std::string b = babble_to_jsonl(babble(s, arm, eye, 5));
    const std::string c = babble_to_jsonl(babble(s, arm, eye, 6));
    CHECK(a == b);
    CHECK(a != c);
}

TEST_CASE("babble errors name the grid indices") {
    const BabbleSetup s = default_setup();
    const auto arm = vertex_commands(s.basis);
    const std::vector<EyeCommand> eye{{{0.0, 0.5}}, {{3.0, 0.0}}};
    try {
        babble(s, std::span(arm).first(1), eye, 1);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("(0, 1)") != std::string::npos);
    }
    CHECK(code_of([&] { babble(s, std::span<const ArmCommand>{}, eye, 1); }) == ErrorCode::kPrecondition);
}

TEST_CASE("babble JSONL layout") {
    const BabbleSetup s = default_setup();
    const auto arm = vertex_commands(s.basis);
    const auto eye = fixation_grid({0.0, 0.7}, 0.1, 1, 1);
    const BabbleDataset d = babble(s, std::span(arm).first(3), eye, 2);
    std::istringstream in(babble_to_jsonl(d));
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        const auto j = nlohmann::json::parse(line);
        CHECK(j.at("a") == n);
        CHECK(j.at("e") == 0);
        CHECK(j.at("w").size() == s.basis.primitives.size());
        CHECK(j.at("fx")[1].get<double>() == 0.7);
        CHECK(j.at("img").size() == 33 * 33);
        ++n;
    }
    CHECK(n == 3);
}

TEST_CASE("end-effector model stores every record") {
    const BabbleSetup s = default_setup();
    const auto arm = vertex_commands(s.basis);
    const auto eye = fixation_grid({0.0, 0.7}, 0.1, 2, 1);
    const BabbleDataset d = babble(s, std::span(arm).first(2), eye, 1);
    const EndEffectorModel m = train_endeffector(d);
    CHECK(m.size() == 4);
    for (const auto& r : d.records) CHECK(predict_endeffector(m, {r.arm, r.eye}) == r.field);

    BabbleDataset empty;
    CHECK(code_of([&] { train_endeffector(empty); }) == ErrorCode::kIncompleteDataset);
    BabbleDataset partial = d;
    partial.records.pop_back();
    CHECK(code_of([&] { train_endeffector(partial); }) == ErrorCode::kIncompleteDataset);
    CHECK(code_of([&] { predict_endeffector(EndEffectorModel{}, {}); }) == ErrorCode::kEmptyModel);
}

TEST_CASE("midpoint fixation falls back to a neighbour within their mutual difference") {
    const BabbleSetup s = default_setup();
    const double p = s.retina.pixel_width();
    const std::vector<ArmCommand> arm{centroid_commands(s.basis)[7]};
    const std::vector<EyeCommand> eye{{{0.0, 0.7}}, {{p, 0.7}}};
    const BabbleDataset d = babble(s, arm, eye, 1);
    const EndEffectorModel m = train_endeffector(d);

    const EyeCommand mid{{0.5 * p, 0.7}};
    const VisualField predicted = predict_endeffector(m, {arm[0], mid});
    CHECK(predicted == d.records[0].field);  // equidistant, lowest key wins

    WorldState w;
    w.posture = ballistic_settle(s.basis, arm[0], s.rest_posture, s.settle_dt, s.settle_horizon);
    w.objects = s.objects;
    RngStream rng(0);
    const VisualField truth = render_visual_field(w, s.geometry, mid, s.retina, rng);
    CHECK(max_abs(predicted, truth) <= max_abs(d.records[0].field, d.records[1].field));

    const EyeCommand near_second{{0.9 * p, 0.7}};
    CHECK(predict_endeffector(m, {arm[0], near_second}) == d.records[1].field);

    const EndEffectorModel strict = train_endeffector(d, Interpolation::kNone);
    CHECK(code_of([&] { predict_endeffector(strict, {arm[0], mid}); }) == ErrorCode::kMissingEntry);
}

TEST_CASE("a one-entry model answers every query") {
    const BabbleSetup s = default_setup();
    const std::vector<ArmCommand> arm{vertex_commands(s.basis)[0]};
    const std::vector<EyeCommand> eye{{{0.0, 0.6}}};
    const EndEffectorModel m = train_endeffector(babble(s, arm, eye, 1));
    RngStream rng(8);
    const auto centroids = centroid_commands(s.basis);
    for (int i = 0; i < 20; ++i) {
        const Command q{centroids[rng.index(centroids.size())], {{test::draw(rng, -1, 1), test::draw(rng, -1, 1)}}};
        CHECK(predict_endeffector(m, q) == m.table().begin()->second.field);
    }
}

TEST_CASE("the direct map does not depend on where babbling starts") {
    BabbleSetup a = default_setup();
    BabbleSetup b = a;
    b.rest_posture = {{1.2, 0.4}};
    const auto arm = centroid_commands(a.basis);
    const auto eye = fixation_grid({0.0, 0.6}, 0.15, 2, 2);
    const EndEffectorModel ma = train_endeffector(babble(a, arm, eye, 4));
    const EndEffectorModel mb = train_endeffector(babble(b, arm, eye, 4));
    REQUIRE(ma.size() == mb.size());
    for (const auto& [key, entry] : ma.table()) {
        const auto& other = mb.table().at(key);
        CHECK(entry.arm == other.arm);
        CHECK(max_abs(entry.field, other.field) < 1e-4);
    }
}

TEST_CASE("displacement learner examples") {
    const GridCodec codec{4};
    SUBCASE("single triple") {
        const std::vector<DisplacementExperience> e{{5, 2, 9}};
        const auto m = train_displacement(e, codec, 4);
        CHECK(m.size() == 1);
        CHECK(predict_displacement(m, 5, 2) == 9);
        CHECK(code_of([&] { predict_displacement(m, 5, 1); }) == ErrorCode::kMissingEntry);
    }
    SUBCASE("toroidal 4x4 grid with unit moves") {
        const auto moves = unit_displacements();
        const auto m = train_displacement(grid_world_experience(4, moves, true), codec, moves.size());
        CHECK(m.size() == 64);
        CHECK(predict_displacement(m, codec.encode(1, 1), 0) == codec.encode(2, 1));
        CHECK(predict_displacement(m, codec.encode(3, 0), 0) == codec.encode(0, 0));
        CHECK(predict_displacement(m, codec.encode(0, 0), 3) == codec.encode(0, 3));
    }
    SUBCASE("out of range codes") {
        const std::vector<DisplacementExperience> bad_state{{16, 0, 0}};
        CHECK(code_of([&] { train_displacement(bad_state, codec, 4); }) == ErrorCode::kCodeOutOfRange);
        const std::vector<DisplacementExperience> bad_move{{0, 4, 0}};
        CHECK(code_of([&] { train_displacement(bad_move, codec, 4); }) == ErrorCode::kCodeOutOfRange);
    }
}

TEST_CASE("exhaustive experience fills states times displacements") {
    for (std::size_t n : {4, 5, 7}) {
        for (bool full : {false, true}) {
            const auto moves = full ? full_displacements(n) : unit_displacements();
            const auto m = train_displacement(grid_world_experience(n, moves, true), GridCodec{n}, moves.size());
            CHECK(m.size() == n * n * moves.size());
        }
    }
}

TEST_CASE("scaling counts match enumeration") {
    const std::vector<std::size_t> ns{4, 8, 16};
    for (bool full : {false, true}) {
        for (bool toroidal : {false, true}) {
            ScalingOptions o;
            o.full_displacement_set = full;
            o.toroidal = toroidal;
            const auto report = scaling_experiment(ns, 1, o);
            for (const auto& row : report.rows) {
                const auto [disp, ee] = enumerate_entries(row.resolution, full, toroidal);
                CHECK(row.displacement_entries == disp);
                CHECK(row.endeffector_entries == ee);
                CHECK(row.displacement_heldout_error == 0.0);
                CHECK(row.endeffector_heldout_error == 0.0);
            }
        }
    }
}

TEST_CASE("scaling slopes") {
    const std::vector<std::size_t> ns{4, 8, 16};
    ScalingOptions unit;
    unit.full_displacement_set = false;
    const auto u = scaling_experiment(ns, 0, unit);
    CHECK(u.rows[0].displacement_entries == 64);
    CHECK(u.rows[0].endeffector_entries == 16);
    CHECK(std::abs(u.displacement_slope - 2.0) < 1e-12);
    CHECK(std::abs(u.endeffector_slope - 2.0) < 1e-12);
    for (const auto& r : u.rows) CHECK(r.displacement_entries == 4 * r.endeffector_entries);

    const auto f = scaling_experiment(ns, 0);
    CHECK(std::abs(f.displacement_slope - 4.0) < 1e-12);
    CHECK(std::abs(f.endeffector_slope - 2.0) < 1e-12);
    CHECK(std::abs(f.slope_ratio - 2.0) < 1e-12);

    CHECK(code_of([&] { scaling_experiment(std::vector<std::size_t>{}, 0); }) == ErrorCode::kPrecondition);
    CHECK(code_of([&] { scaling_experiment(std::vector<std::size_t>{4, 8}, 0); }) == ErrorCode::kPrecondition);
    CHECK(code_of([&] { scaling_experiment(std::vector<std::size_t>{3, 8, 16}, 0); }) == ErrorCode::kPrecondition);
}

TEST_CASE("partial coverage leaves held-out keys unanswered") {
    ScalingOptions o;
    o.coverage = 0.5;
    const auto r = scaling_experiment(std::vector<std::size_t>{4, 6, 8}, 3, o);
    for (const auto& row : r.rows) {
        CHECK(row.displacement_entries == (row.resolution * row.resolution * row.resolution * row.resolution + 1) / 2);
        CHECK(row.displacement_heldout_error == 1.0);
        CHECK(row.endeffector_heldout_error > 0.0);
    }
    CHECK(scaling_experiment(std::vector<std::size_t>{4, 6, 8}, 3, o).to_csv() == r.to_csv());
}

TEST_CASE("log-log slope recovers power laws") {
    const std::vector<double> x{2, 3, 5, 11};
    for (double k : {0.5, 1.0, 2.0, 3.7}) {
        std::vector<double> y;
        for (double v : x) y.push_back(1.7 * std::pow(v, k));
        CHECK(std::abs(loglog_slope(x, y) - k) < 1e-12);
    }
}

TEST_CASE("scaling CSV layout") {
    const auto csv = scaling_experiment(std::vector<std::size_t>{4, 8, 16}, 0).to_csv();
    std::istringstream in(csv);
    std::string line;
    std::vector<std::string> data;
    bool header = false;
    while (std::getline(in, line)) {
        if (line.rfind('#', 0) == 0) continue;
        if (!header) {
            CHECK(line == "N,disp_entries,ee_entries,disp_err,ee_err");
            header = true;
            continue;
        }
        data.push_back(line);
    }
    CHECK(header);
    REQUIRE(data.size() == 3);
    CHECK(data[0] == "4,256,16,0,0");
}
