#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace smw {

/// Seeded random stream addressed by a derivation path.
///
/// The engine key is a hash of (seed, path...), so any substream can be
/// recreated from its path alone without replaying its parent. Draws mutate
/// the stream; a single stream must not be shared between concurrent callers.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed, std::vector<std::uint64_t> path = {});

    RngStream substream(std::uint64_t label) const;
    RngStream substream(std::initializer_list<std::uint64_t> labels) const;

    std::uint64_t seed() const noexcept { return seed_; }
    const std::vector<std::uint64_t>& path() const noexcept { return path_; }

    double uniform();              // [0, 1)
    double normal();               // N(0, 1)
    std::size_t index(std::size_t n);  // uniform in [0, n)
    std::uint64_t next_u64();

private:
    std::uint64_t seed_;
    std::vector<std::uint64_t> path_;
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

}  // namespace smw
