#include "betamix/rng.hpp"

namespace betamix {

std::uint64_t stream_seed(std::uint64_t master, std::uint64_t index) noexcept {
    return Rng::mix(Rng::mix(master) ^ Rng::mix(index + Rng::kGamma));
}

}  // namespace betamix
