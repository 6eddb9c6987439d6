#pragma once

#include <cstddef>
#include <vector>

#include "smw/plant.hpp"
#include "smw/rng.hpp"

namespace smw {

inline constexpr double kWorkspaceBound = 1.5;

// Workspace point the fovea is directed at.
struct EyeCommand {
    Point2 fixation;

    void validate() const;
    friend bool operator==(const EyeCommand&, const EyeCommand&) = default;
};

struct RetinaConfig {
    std::size_t resolution = 33;   // pixels per side, odd
    double window = 1.0;           // meters viewed across the field
    double blob_sigma = 0.04;      // hand blob width, meters
    double sensor_noise_std = 0.0;

    void validate() const;
    double pixel_width() const { return window / static_cast<double>(resolution); }
};

// Blobs are truncated to zero beyond this many sigmas from their center.
inline constexpr double kBlobSupportSigmas = 6.0;

/// Square intensity grid, row-major, row 0 at the top.
class VisualField {
public:
    VisualField() = default;
    explicit VisualField(std::size_t resolution, double fill = 0.0)
        : resolution_(resolution), pixels_(resolution * resolution, fill) {}
    VisualField(std::size_t resolution, std::vector<double> pixels);

    std::size_t resolution() const noexcept { return resolution_; }
    bool empty() const noexcept { return pixels_.empty(); }

    double& at(std::size_t row, std::size_t col) { return pixels_[row * resolution_ + col]; }
    double at(std::size_t row, std::size_t col) const { return pixels_[row * resolution_ + col]; }

    const std::vector<double>& pixels() const noexcept { return pixels_; }

    friend bool operator==(const VisualField&, const VisualField&) = default;

private:
    std::size_t resolution_ = 0;
    std::vector<double> pixels_;
};

/// Fixation on the pixel lattice of `cfg`: (ix, iy) * pixel_width.
/// Displacing such a fixation by whole pixels reproduces the image exactly.
EyeCommand lattice_fixation(const RetinaConfig& cfg, long ix, long iy);

/// Renders the scene objects and the hand as additive Gaussian blobs seen
/// through a window centered on the fixation, then adds sensor noise and
/// clamps at zero.
///
/// The fixation is split into a whole-pixel lattice index and a sub-pixel
/// remainder; pixel centers are (index + offset) * pixel_width + remainder.
/// Whole-pixel fixation moves therefore translate the image exactly.
VisualField render_visual_field(const WorldState& world, const ArmGeometry& geometry,
                                const EyeCommand& eye, const RetinaConfig& cfg, RngStream& rng);

/// The image seen after moving the fixation by (dx, dy) whole pixels, with
/// x to the right and y up: content moves the opposite way, exposed borders
/// are zero. Throws ShiftTooLarge if |dx| or |dy| >= resolution.
VisualField shift_reference(const VisualField& field, long dx_pixels, long dy_pixels);

}  // namespace smw
