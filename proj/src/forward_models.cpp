#include "smw/forward_models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "smw/error.hpp"
#include "smw/io.hpp"

namespace smw {

BabbleDataset babble(const BabbleSetup& setup, std::span<const ArmCommand> arm_grid,
                     std::span<const EyeCommand> eye_grid, std::uint64_t seed) {
    require(!arm_grid.empty() && !eye_grid.empty(), ErrorCode::kPrecondition,
            "babbling grids must be non-empty");
    BabbleDataset out;
    out.arm_grid_size = arm_grid.size();
    out.eye_grid_size = eye_grid.size();
    out.n_primitives = setup.basis.primitives.size();
    out.retina = setup.retina;
    out.seed = seed;
    out.records.reserve(arm_grid.size() * eye_grid.size());

    const RngStream root(seed);
    for (std::size_t a = 0; a < arm_grid.size(); ++a) {
        JointAngles settled;
        try {
            settled = ballistic_settle(setup.basis, arm_grid[a], setup.rest_posture,
                                       setup.settle_dt, setup.settle_horizon);
        } catch (const Error& e) {
            throw Error(e.code(), "arm grid index " + std::to_string(a) + ": " + e.what());
        }
        WorldState world;
        world.posture = settled;
        world.objects = setup.objects;
        for (std::size_t e = 0; e < eye_grid.size(); ++e) {
            RngStream rng = root.substream({a, e});
            try {
                out.records.push_back({a, e, arm_grid[a], eye_grid[e],
                                       render_visual_field(world, setup.geometry, eye_grid[e],
                                                           setup.retina, rng)});
            } catch (const Error& err) {
                throw Error(err.code(), "grid indices (" + std::to_string(a) + ", " +
                                            std::to_string(e) + "): " + err.what());
            }
        }
    }
    return out;
}

std::vector<ArmCommand> vertex_commands(const PrimitiveBasis& basis) {
    std::set<std::size_t> used;
    for (const auto& t : basis.triangles) used.insert(t.begin(), t.end());
    std::vector<ArmCommand> out;
    for (std::size_t i : used) out.push_back(single_primitive_command(i));
    return out;
}

std::vector<ArmCommand> centroid_commands(const PrimitiveBasis& basis) {
    std::vector<ArmCommand> out;
    for (const auto& t : basis.triangles) {
        ArmCommand cmd;
        for (std::size_t v : t) cmd.weights[v] = 1.0 / 3.0;
        out.push_back(std::move(cmd));
    }
    return out;
}

std::vector<EyeCommand> fixation_grid(Point2 center, double spacing, std::size_t nx, std::size_t ny) {
    require(nx > 0 && ny > 0, ErrorCode::kInvalidArgument, "fixation grid must be non-empty");
    std::vector<EyeCommand> out;
    const double x0 = center.x - 0.5 * spacing * static_cast<double>(nx - 1);
    const double y0 = center.y - 0.5 * spacing * static_cast<double>(ny - 1);
    for (std::size_t i = 0; i < nx; ++i) {
        for (std::size_t j = 0; j < ny; ++j) {
            EyeCommand eye{{x0 + spacing * static_cast<double>(i), y0 + spacing * static_cast<double>(j)}};
            eye.validate();
            out.push_back(eye);
        }
    }
    return out;
}

std::string babble_to_jsonl(const BabbleDataset& dataset) {
    std::string out;
    for (const auto& rec : dataset.records) {
        const nlohmann::json line = {{"a", rec.arm_index},
                                     {"e", rec.eye_index},
                                     {"w", dense_weights(rec.arm, dataset.n_primitives)},
                                     {"fx", {rec.eye.fixation.x, rec.eye.fixation.y}},
                                     {"img", rec.field.pixels()}};
        out += line.dump();
        out += '\n';
    }
    return out;
}

// ---------------------------------------------------------------------------

void EndEffectorModel::store(Key key, Entry entry) {
    if (!table_.empty()) {
        require(table_.begin()->second.field.resolution() == entry.field.resolution(),
                ErrorCode::kInvalidArgument, "stored fields must share dimensions");
    }
    table_.insert_or_assign(key, std::move(entry));
}

EndEffectorModel train_endeffector(const BabbleDataset& dataset, Interpolation mode) {
    const std::size_t expected = dataset.arm_grid_size * dataset.eye_grid_size;
    require(expected > 0 && dataset.records.size() == expected, ErrorCode::kIncompleteDataset,
            "dataset has " + std::to_string(dataset.records.size()) + " of " +
                std::to_string(expected) + " records");
    EndEffectorModel model(mode);
    for (const auto& rec : dataset.records) {
        require(rec.arm_index < dataset.arm_grid_size && rec.eye_index < dataset.eye_grid_size,
                ErrorCode::kIncompleteDataset, "record index outside the grid");
        model.store({rec.arm_index, rec.eye_index}, {rec.arm, rec.eye.fixation, rec.field});
    }
    require(model.size() == expected, ErrorCode::kIncompleteDataset, "duplicate record indices");
    return model;
}

namespace {

double squared_weight_distance(const ArmCommand& a, const ArmCommand& b) {
    double d2 = 0.0;
    auto ia = a.weights.begin();
    auto ib = b.weights.begin();
    while (ia != a.weights.end() || ib != b.weights.end()) {
        if (ib == b.weights.end() || (ia != a.weights.end() && ia->first < ib->first)) {
            d2 += ia->second * ia->second;
            ++ia;
        } else if (ia == a.weights.end() || ib->first < ia->first) {
            d2 += ib->second * ib->second;
            ++ib;
        } else {
            const double diff = ia->second - ib->second;
            d2 += diff * diff;
            ++ia;
            ++ib;
        }
    }
    return d2;
}

bool max_abs_within(const ArmCommand& a, const ArmCommand& b, double tol) {
    for (const auto& [i, w] : a.weights) {
        const auto it = b.weights.find(i);
        if (std::abs(w - (it == b.weights.end() ? 0.0 : it->second)) > tol) return false;
    }
    for (const auto& [i, w] : b.weights) {
        if (!a.weights.contains(i) && std::abs(w) > tol) return false;
    }
    return true;
}

}  // namespace

VisualField predict_endeffector(const EndEffectorModel& model, const Command& cmd) {
    constexpr double kMatchTolerance = 1e-12;
    if (model.empty()) fail(ErrorCode::kEmptyModel, "end-effector model has no entries");
    const EndEffectorModel::Entry* nearest = nullptr;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [key, entry] : model.table()) {
        if (max_abs_within(entry.arm, cmd.arm, kMatchTolerance) &&
            std::abs(entry.fixation.x - cmd.eye.fixation.x) <= kMatchTolerance &&
            std::abs(entry.fixation.y - cmd.eye.fixation.y) <= kMatchTolerance) {
            return entry.field;
        }
        const Point2 df = entry.fixation - cmd.eye.fixation;
        const double d2 = squared_weight_distance(entry.arm, cmd.arm) + df.x * df.x + df.y * df.y;
        if (d2 < best) {
            best = d2;
            nearest = &entry;
        }
    }
    if (model.mode() == Interpolation::kNone) {
        fail(ErrorCode::kMissingEntry, "command is not a trained grid point");
    }
    return nearest->field;
}

// ---------------------------------------------------------------------------

std::size_t GridCodec::encode(std::size_t x, std::size_t y) const {
    require(x < cells_per_side && y < cells_per_side, ErrorCode::kCodeOutOfRange,
            "cell outside the codec grid");
    return x + cells_per_side * y;
}

std::pair<std::size_t, std::size_t> GridCodec::decode(std::size_t code) const {
    require(code < n_codes(), ErrorCode::kCodeOutOfRange, "code outside the codec range");
    return {code % cells_per_side, code / cells_per_side};
}

namespace {

std::uint64_t displacement_key(std::size_t observation, std::size_t displacement, std::size_t n_displacements) {
    return static_cast<std::uint64_t>(observation) * n_displacements + displacement;
}

}  // namespace

void DisplacementModel::store(const DisplacementExperience& e) {
    const std::size_t n = codec_.n_codes();
    if (e.observation >= n || e.next_observation >= n || e.displacement >= n_displacements_) {
        fail(ErrorCode::kCodeOutOfRange,
             "experience (" + std::to_string(e.observation) + ", " + std::to_string(e.displacement) +
                 ", " + std::to_string(e.next_observation) + ") outside the codec range");
    }
    table_.insert_or_assign(displacement_key(e.observation, e.displacement, n_displacements_),
                            e.next_observation);
}

const std::size_t* DisplacementModel::find(std::size_t observation, std::size_t displacement) const {
    if (observation >= codec_.n_codes() || displacement >= n_displacements_) return nullptr;
    const auto it = table_.find(displacement_key(observation, displacement, n_displacements_));
    return it == table_.end() ? nullptr : &it->second;
}

DisplacementModel train_displacement(std::span<const DisplacementExperience> experience,
                                     GridCodec codec, std::size_t n_displacements) {
    require(codec.cells_per_side > 0 && n_displacements > 0, ErrorCode::kInvalidArgument,
            "codec and displacement set must be non-empty");
    DisplacementModel model(codec, n_displacements);
    for (const auto& e : experience) model.store(e);
    return model;
}

std::size_t predict_displacement(const DisplacementModel& model, std::size_t observation,
                                 std::size_t displacement) {
    if (const std::size_t* next = model.find(observation, displacement)) return *next;
    fail(ErrorCode::kMissingEntry, "no entry for (" + std::to_string(observation) + ", " +
                                       std::to_string(displacement) + ")");
}

std::vector<GridMove> unit_displacements() { return {{1, 0}, {0, 1}, {-1, 0}, {0, -1}}; }

std::vector<GridMove> full_displacements(std::size_t n) {
    std::vector<GridMove> out;
    out.reserve(n * n);
    for (std::size_t dy = 0; dy < n; ++dy) {
        for (std::size_t dx = 0; dx < n; ++dx) out.push_back({static_cast<long>(dx), static_cast<long>(dy)});
    }
    return out;
}

std::vector<DisplacementExperience> grid_world_experience(std::size_t n,
                                                          std::span<const GridMove> moves,
                                                          bool toroidal) {
    const GridCodec codec{n};
    const long side = static_cast<long>(n);
    std::vector<DisplacementExperience> out;
    out.reserve(n * n * moves.size());
    for (std::size_t y = 0; y < n; ++y) {
        for (std::size_t x = 0; x < n; ++x) {
            for (std::size_t d = 0; d < moves.size(); ++d) {
                long nx = static_cast<long>(x) + moves[d].dx;
                long ny = static_cast<long>(y) + moves[d].dy;
                if (toroidal) {
                    nx = ((nx % side) + side) % side;
                    ny = ((ny % side) + side) % side;
                } else if (nx < 0 || ny < 0 || nx >= side || ny >= side) {
                    continue;
                }
                out.push_back({codec.encode(x, y), d,
                               codec.encode(static_cast<std::size_t>(nx), static_cast<std::size_t>(ny))});
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

double loglog_slope(std::span<const double> x, std::span<const double> y) {
    require(x.size() == y.size() && x.size() >= 2, ErrorCode::kPrecondition,
            "slope fit needs >= 2 paired samples");
    const double n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        require(x[i] > 0.0 && y[i] > 0.0, ErrorCode::kPrecondition, "log of non-positive value");
        sx += std::log(x[i]);
        sy += std::log(y[i]);
    }
    const double mx = sx / n, my = sy / n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = std::log(x[i]) - mx;
        sxy += dx * (std::log(y[i]) - my);
        sxx += dx * dx;
    }
    require(sxx > 0.0, ErrorCode::kPrecondition, "slope fit needs distinct x values");
    return sxy / sxx;
}

namespace {

template <class T>
void seeded_shuffle(std::vector<T>& items, RngStream& rng) {
    for (std::size_t i = items.size(); i > 1; --i) std::swap(items[i - 1], items[rng.index(i)]);
}

std::size_t kept_count(std::size_t total, double coverage) {
    return static_cast<std::size_t>(std::ceil(coverage * static_cast<double>(total) - 1e-9));
}

ScalingRow measure_resolution(std::size_t n, const ScalingOptions& options, RngStream rng) {
    ScalingRow row;
    row.resolution = n;
    const GridCodec codec{n};

    // Displacement learner over (state, move) keys.
    const auto moves = options.full_displacement_set ? full_displacements(n) : unit_displacements();
    auto experience = grid_world_experience(n, moves, options.toroidal);
    RngStream disp_rng = rng.substream(0);
    seeded_shuffle(experience, disp_rng);
    const std::size_t disp_keep = kept_count(experience.size(), options.coverage);
    const DisplacementModel disp = train_displacement(
        std::span(experience).first(disp_keep), codec, moves.size());
    row.displacement_entries = disp.size();
    std::size_t disp_wrong = 0;
    for (std::size_t i = disp_keep; i < experience.size(); ++i) {
        const std::size_t* next = disp.find(experience[i].observation, experience[i].displacement);
        if (next == nullptr || *next != experience[i].next_observation) ++disp_wrong;
    }
    const std::size_t disp_heldout = experience.size() - disp_keep;
    row.displacement_heldout_error =
        disp_heldout == 0 ? 0.0 : static_cast<double>(disp_wrong) / static_cast<double>(disp_heldout);

    // Direct map over absolute commands: command c puts the blob in cell c.
    std::vector<std::size_t> commands(codec.n_codes());
    for (std::size_t c = 0; c < commands.size(); ++c) commands[c] = c;
    RngStream ee_rng = rng.substream(1);
    seeded_shuffle(commands, ee_rng);
    const std::size_t ee_keep = kept_count(commands.size(), options.coverage);
    const EyeCommand fixation{{0.0, 0.0}};
    EndEffectorModel ee;
    for (std::size_t i = 0; i < ee_keep; ++i) {
        VisualField field(n);
        const auto [x, y] = codec.decode(commands[i]);
        field.at(y, x) = 1.0;
        ee.store({commands[i], 0}, {single_primitive_command(commands[i]), fixation.fixation, std::move(field)});
    }
    row.endeffector_entries = ee.size();
    std::size_t ee_wrong = 0;
    for (std::size_t i = ee_keep; i < commands.size(); ++i) {
        const VisualField predicted = predict_endeffector(ee, {single_primitive_command(commands[i]), fixation});
        const auto& px = predicted.pixels();
        const auto peak = static_cast<std::size_t>(std::max_element(px.begin(), px.end()) - px.begin());
        const auto [x, y] = codec.decode(commands[i]);
        if (peak != y * n + x) ++ee_wrong;
    }
    const std::size_t ee_heldout = commands.size() - ee_keep;
    row.endeffector_heldout_error =
        ee_heldout == 0 ? 0.0 : static_cast<double>(ee_wrong) / static_cast<double>(ee_heldout);
    return row;
}

}  // namespace

ScalingReport scaling_experiment(std::span<const std::size_t> resolutions, std::uint64_t seed,
                                 const ScalingOptions& options) {
    require(resolutions.size() >= 3, ErrorCode::kPrecondition, "need at least 3 resolutions");
    require(std::all_of(resolutions.begin(), resolutions.end(), [](std::size_t n) { return n >= 4; }),
            ErrorCode::kPrecondition, "every resolution must be >= 4");
    require(options.coverage > 0.0 && options.coverage <= 1.0, ErrorCode::kPrecondition,
            "coverage must lie in (0, 1]");

    ScalingReport report;
    report.options = options;
    const RngStream root(seed);
    std::vector<double> ns, disp, ee;
    for (std::size_t n : resolutions) {
        report.rows.push_back(measure_resolution(n, options, root.substream(n)));
        ns.push_back(static_cast<double>(n));
        disp.push_back(static_cast<double>(report.rows.back().displacement_entries));
        ee.push_back(static_cast<double>(report.rows.back().endeffector_entries));
    }
    report.displacement_slope = loglog_slope(ns, disp);
    report.endeffector_slope = loglog_slope(ns, ee);
    report.slope_ratio = report.displacement_slope / report.endeffector_slope;
    return report;
}

std::string ScalingReport::to_csv() const {
    std::string out;
    out += "# entries: table size of each learner after training on the kept experience\n";
    out += std::string("# displacement set: ") + (options.full_displacement_set ? "full" : "unit") +
           ", toroidal: " + (options.toroidal ? "yes" : "no") +
           ", coverage: " + format_double(options.coverage) + "\n";
    out += "# disp_slope=" + format_double(displacement_slope) +
           " ee_slope=" + format_double(endeffector_slope) +
           " ratio=" + format_double(slope_ratio) + "\n";
    out += "N,disp_entries,ee_entries,disp_err,ee_err\n";
    for (const auto& r : rows) {
        out += std::to_string(r.resolution) + "," + std::to_string(r.displacement_entries) + "," +
               std::to_string(r.endeffector_entries) + "," +
               format_double(r.displacement_heldout_error) + "," +
               format_double(r.endeffector_heldout_error) + "\n";
    }
    return out;
}

}  // namespace smw
