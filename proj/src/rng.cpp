#include "smw/rng.hpp"

#include "smw/error.hpp"

namespace smw {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

namespace {

std::uint64_t derive_key(std::uint64_t seed, const std::vector<std::uint64_t>& path) {
    std::uint64_t key = splitmix64(seed);
    for (std::uint64_t label : path) {
        // Mixing the depth in keeps path {a} and {a, 0} apart.
        key = splitmix64(key ^ splitmix64(label + 0x632be59bd9b4e019ULL));
    }
    return splitmix64(key ^ path.size());
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::vector<std::uint64_t> path)
    : seed_(seed), path_(std::move(path)), engine_(derive_key(seed_, path_)) {}

RngStream RngStream::substream(std::uint64_t label) const {
    auto child = path_;
    child.push_back(label);
    return RngStream(seed_, std::move(child));
}

RngStream RngStream::substream(std::initializer_list<std::uint64_t> labels) const {
    auto child = path_;
    child.insert(child.end(), labels.begin(), labels.end());
    return RngStream(seed_, std::move(child));
}

double RngStream::uniform() {
    // 53 random mantissa bits.
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RngStream::normal() { return normal_(engine_); }

std::size_t RngStream::index(std::size_t n) {
    require(n > 0, ErrorCode::kInvalidArgument, "index() over an empty range");
    std::uniform_int_distribution<std::size_t> dist(0, n - 1);
    return dist(engine_);
}

std::uint64_t RngStream::next_u64() { return engine_(); }

}  // namespace smw
