#pragma once

#include <cstdint>
#include <string_view>

namespace powsim {

// FNV-1a, used for config hashes and trace determinism checks.
inline std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace powsim
