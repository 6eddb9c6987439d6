#include "smw/retina.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

#include "smw/error.hpp"

namespace smw {

void EyeCommand::validate() const {
    require(std::isfinite(fixation.x) && std::isfinite(fixation.y) &&
                std::abs(fixation.x) <= kWorkspaceBound && std::abs(fixation.y) <= kWorkspaceBound,
            ErrorCode::kInvalidArgument, "fixation outside the workspace bounds");
}

void RetinaConfig::validate() const {
    require(resolution >= 3 && resolution % 2 == 1, ErrorCode::kInvalidArgument,
            "retina resolution must be odd and >= 3");
    require(window > 0.0, ErrorCode::kInvalidArgument, "retina window must be positive");
    require(blob_sigma > 0.0, ErrorCode::kInvalidArgument, "blob_sigma must be positive");
    require(sensor_noise_std >= 0.0, ErrorCode::kInvalidArgument,
            "sensor_noise_std must be non-negative");
}

VisualField::VisualField(std::size_t resolution, std::vector<double> pixels)
    : resolution_(resolution), pixels_(std::move(pixels)) {
    require(pixels_.size() == resolution_ * resolution_, ErrorCode::kInvalidArgument,
            "pixel count does not match resolution");
}

EyeCommand lattice_fixation(const RetinaConfig& cfg, long ix, long iy) {
    const double p = cfg.pixel_width();
    return EyeCommand{{static_cast<double>(ix) * p, static_cast<double>(iy) * p}};
}

namespace {

struct Blob {
    Point2 center;
    double sigma;
    double intensity;
};

}  // namespace

VisualField render_visual_field(const WorldState& world, const ArmGeometry& geometry,
                                const EyeCommand& eye, const RetinaConfig& cfg, RngStream& rng) {
    cfg.validate();
    eye.validate();
    const long r_count = static_cast<long>(cfg.resolution);
    const long half = (r_count - 1) / 2;
    const double p = cfg.pixel_width();
    const long lattice_x = std::lround(eye.fixation.x / p);
    const long lattice_y = std::lround(eye.fixation.y / p);
    const double rem_x = eye.fixation.x - static_cast<double>(lattice_x) * p;
    const double rem_y = eye.fixation.y - static_cast<double>(lattice_y) * p;

    std::vector<Blob> blobs;
    blobs.reserve(world.objects.size() + 1);
    blobs.push_back({forward_kinematics(world.posture, geometry), cfg.blob_sigma, 1.0});
    for (const auto& obj : world.objects) blobs.push_back({obj.position, obj.radius, obj.intensity});

    VisualField field(cfg.resolution);
    for (long r = 0; r < r_count; ++r) {
        const double y = static_cast<double>(lattice_y + half - r) * p + rem_y;
        for (long c = 0; c < r_count; ++c) {
            const double x = static_cast<double>(lattice_x + c - half) * p + rem_x;
            double value = 0.0;
            for (const Blob& b : blobs) {
                const double dx = x - b.center.x;
                const double dy = y - b.center.y;
                const double d2 = dx * dx + dy * dy;
                const double support = kBlobSupportSigmas * b.sigma;
                if (d2 <= support * support) {
                    value += b.intensity * std::exp(-d2 / (2.0 * b.sigma * b.sigma));
                }
            }
            field.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = value;
        }
    }

    if (cfg.sensor_noise_std > 0.0) {
        for (std::size_t r = 0; r < cfg.resolution; ++r) {
            for (std::size_t c = 0; c < cfg.resolution; ++c) {
                double& px = field.at(r, c);
                px = std::max(0.0, px + cfg.sensor_noise_std * rng.normal());
            }
        }
    }
    return field;
}

VisualField shift_reference(const VisualField& field, long dx_pixels, long dy_pixels) {
    const long n = static_cast<long>(field.resolution());
    if (std::labs(dx_pixels) >= n || std::labs(dy_pixels) >= n) {
        fail(ErrorCode::kShiftTooLarge, "shift (" + std::to_string(dx_pixels) + ", " +
                                            std::to_string(dy_pixels) + ") on a " +
                                            std::to_string(n) + "-pixel field");
    }
    VisualField out(field.resolution());
    for (long r = 0; r < n; ++r) {
        const long src_r = r - dy_pixels;
        if (src_r < 0 || src_r >= n) continue;
        for (long c = 0; c < n; ++c) {
            const long src_c = c + dx_pixels;
            if (src_c < 0 || src_c >= n) continue;
            out.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) =
                field.at(static_cast<std::size_t>(src_r), static_cast<std::size_t>(src_c));
        }
    }
    return out;
}

}  // namespace smw
