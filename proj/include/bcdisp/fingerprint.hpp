#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace bcdisp {

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

std::string fingerprint_hex(std::string_view canonical);

}  // namespace bcdisp
