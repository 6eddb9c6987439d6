#include "smw/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>
#include <unistd.h>

#include "smw/error.hpp"

namespace smw {

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    auto tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) fail(ErrorCode::kIo, "cannot open " + tmp.string() + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) fail(ErrorCode::kIo, "write to " + tmp.string() + " failed");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        fail(ErrorCode::kIo, "cannot move output into place at " + path.string());
    }
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::kIo, "cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

nlohmann::json to_json(const ArmCommand& cmd) {
    auto weights = nlohmann::json::array();
    for (const auto& [index, weight] : cmd.weights) weights.push_back({index, weight});
    return weights;
}

nlohmann::json to_json(const Command& cmd) {
    return {{"weights", to_json(cmd.arm)}, {"fixation", {cmd.eye.fixation.x, cmd.eye.fixation.y}}};
}

nlohmann::json to_json(const VisualField& field) { return field.pixels(); }

std::vector<double> dense_weights(const ArmCommand& cmd, std::size_t n_primitives) {
    std::vector<double> dense(n_primitives, 0.0);
    for (const auto& [index, weight] : cmd.weights) {
        require(index < n_primitives, ErrorCode::kIndexOutOfRange, "weight index out of range");
        dense[index] = weight;
    }
    return dense;
}

std::string format_double(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

std::string trajectory_record_json(std::size_t step, double time, const JointAngles& posture,
                                   const Command& command, const VisualField* image) {
    nlohmann::json rec = {{"step", step},
                          {"time", time},
                          {"posture", {posture.theta[0], posture.theta[1]}},
                          {"command", to_json(command)}};
    if (image != nullptr) rec["image"] = to_json(*image);
    return rec.dump();
}

}  // namespace smw
