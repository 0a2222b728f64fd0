#include "bcdisp/fingerprint.hpp"

#include <cstdio>

namespace bcdisp {

std::string fingerprint_hex(std::string_view canonical) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(canonical)));
    return buf;
}

}  // namespace bcdisp
