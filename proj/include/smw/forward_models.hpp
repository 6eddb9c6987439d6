#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "smw/loop_engine.hpp"
#include "smw/motor_fields.hpp"
#include "smw/retina.hpp"

namespace smw {

// ---------------------------------------------------------------------------
// Babbling: exhaustive scan of arm x eye commands.

struct BabbleRecord {
    std::size_t arm_index = 0;
    std::size_t eye_index = 0;
    ArmCommand arm;
    EyeCommand eye;
    VisualField field;
};

struct BabbleDataset {
    std::size_t arm_grid_size = 0;
    std::size_t eye_grid_size = 0;
    std::size_t n_primitives = 0;
    RetinaConfig retina;
    std::uint64_t seed = 0;
    std::vector<BabbleRecord> records;  // arm-major, then eye
};

// Everything babbling needs to know about the body, scene and sensor.
struct BabbleSetup {
    ArmGeometry geometry;
    PrimitiveBasis basis;
    RetinaConfig retina;
    JointAngles rest_posture;
    std::vector<SceneObject> objects;
    double settle_dt = 0.01;
    double settle_horizon = 10.0;
};

/// For each (arm, eye) pair: settle the arm command from the rest posture,
/// render what the eye sees, store it. Record (a, e) renders with substream
/// (a, e) of `seed`.
BabbleDataset babble(const BabbleSetup& setup, std::span<const ArmCommand> arm_grid,
                     std::span<const EyeCommand> eye_grid, std::uint64_t seed);

// Unit-weight commands on every primitive that belongs to a triangle.
std::vector<ArmCommand> vertex_commands(const PrimitiveBasis& basis);
// Equal-thirds commands at each triangle centroid.
std::vector<ArmCommand> centroid_commands(const PrimitiveBasis& basis);
// nx * ny fixations on a square lattice, x major.
std::vector<EyeCommand> fixation_grid(Point2 center, double spacing, std::size_t nx, std::size_t ny);

// {"a": int, "e": int, "w": [dense weights], "fx": [x, y], "img": [pixels]} per line.
std::string babble_to_jsonl(const BabbleDataset& dataset);

// ---------------------------------------------------------------------------
// Direct map: command -> expected visual field, learned by storage.

enum class Interpolation { kNearest, kNone };

class EndEffectorModel {
public:
    struct Entry {
        ArmCommand arm;
        Point2 fixation;
        VisualField field;
    };
    using Key = std::pair<std::size_t, std::size_t>;  // (arm index, eye index)

    explicit EndEffectorModel(Interpolation mode = Interpolation::kNearest) : mode_(mode) {}

    void store(Key key, Entry entry);
    std::size_t size() const noexcept { return table_.size(); }
    bool empty() const noexcept { return table_.empty(); }
    Interpolation mode() const noexcept { return mode_; }
    const std::map<Key, Entry>& table() const noexcept { return table_; }

private:
    Interpolation mode_;
    std::map<Key, Entry> table_;
};

EndEffectorModel train_endeffector(const BabbleDataset& dataset,
                                   Interpolation mode = Interpolation::kNearest);

/// Stored field of the matching grid command (weights and fixation within
/// 1e-12); otherwise the nearest entry in concatenated weight + fixation
/// coordinates, ties to the lowest key. kNone models throw MissingEntry
/// instead of falling back.
VisualField predict_endeffector(const EndEffectorModel& model, const Command& cmd);

// ---------------------------------------------------------------------------
// Displacement learner: (observation, displacement) -> next observation.

// Cell (x, y) of an N x N grid <-> code x + N * y.
struct GridCodec {
    std::size_t cells_per_side = 0;

    std::size_t n_codes() const { return cells_per_side * cells_per_side; }
    std::size_t encode(std::size_t x, std::size_t y) const;
    std::pair<std::size_t, std::size_t> decode(std::size_t code) const;
};

struct DisplacementExperience {
    std::size_t observation = 0;
    std::size_t displacement = 0;
    std::size_t next_observation = 0;
};

class DisplacementModel {
public:
    DisplacementModel(GridCodec codec, std::size_t n_displacements)
        : codec_(codec), n_displacements_(n_displacements) {}

    void store(const DisplacementExperience& e);
    const std::size_t* find(std::size_t observation, std::size_t displacement) const;
    std::size_t size() const noexcept { return table_.size(); }
    const GridCodec& codec() const noexcept { return codec_; }
    std::size_t n_displacements() const noexcept { return n_displacements_; }

private:
    GridCodec codec_;
    std::size_t n_displacements_;
    std::unordered_map<std::uint64_t, std::size_t> table_;
};

// Throws CodeOutOfRange if any code or displacement index exceeds the codec.
DisplacementModel train_displacement(std::span<const DisplacementExperience> experience,
                                     GridCodec codec, std::size_t n_displacements);

// Exact lookup; MissingEntry when the key was never experienced.
std::size_t predict_displacement(const DisplacementModel& model, std::size_t observation,
                                 std::size_t displacement);

struct GridMove {
    long dx = 0;
    long dy = 0;
};

// Right, up, left, down.
std::vector<GridMove> unit_displacements();
// Every (dx, dy) in [0, N)^2, index dx + N * dy.
std::vector<GridMove> full_displacements(std::size_t n);

// Every (state, move) of the N x N grid world. Non-toroidal worlds drop
// moves that would leave the grid.
std::vector<DisplacementExperience> grid_world_experience(std::size_t n,
                                                          std::span<const GridMove> moves,
                                                          bool toroidal);

// ---------------------------------------------------------------------------
// Scaling benchmark.

struct ScalingOptions {
    bool full_displacement_set = true;
    bool toroidal = true;
    double coverage = 1.0;  // fraction of experience kept for training
};

struct ScalingRow {
    std::size_t resolution = 0;
    std::size_t displacement_entries = 0;
    std::size_t endeffector_entries = 0;
    double displacement_heldout_error = 0.0;
    double endeffector_heldout_error = 0.0;
};

struct ScalingReport {
    std::vector<ScalingRow> rows;
    ScalingOptions options;
    double displacement_slope = 0.0;
    double endeffector_slope = 0.0;
    double slope_ratio = 0.0;

    // Comment lines with the fitted slopes, then "N,disp_entries,ee_entries,disp_err,ee_err".
    std::string to_csv() const;
};

// Least-squares slope of log(y) against log(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);

/// Entry counts needed by the displacement learner (N^2 states x moves) and
/// by the direct map (N^2 absolute commands, one fixation), with held-out
/// error on experience left out of training. Needs >= 3 resolutions, each >= 4.
ScalingReport scaling_experiment(std::span<const std::size_t> resolutions, std::uint64_t seed,
                                 const ScalingOptions& options = {});

}  // namespace smw
