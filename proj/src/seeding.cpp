#include "ctsynth/seeding.hpp"

namespace ctsynth {

std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) noexcept {
    // Two rounds so that (parent, index) and (parent + c, index - c) do not
    // collide for any constant c.
    return mix64(mix64(parent) ^ mix64(index ^ 0x5851f42d4c957f2dULL));
}

}  // namespace ctsynth
