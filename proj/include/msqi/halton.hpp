#pragma once

#include <cstdint>

#include "msqi/errors.hpp"

namespace msqi {

/// Radical-inverse (van der Corput) value of `index` in the given base.
/// Total on index >= 0; generators start at index 1 since index 0 maps to 0.
inline double halton(std::uint64_t index, std::uint32_t base) {
    if (base < 2) throw ConfigError("halton: base must be >= 2");
    double inv = 1.0 / static_cast<double>(base);
    double factor = inv;
    double value = 0.0;
    while (index > 0) {
        value += factor * static_cast<double>(index % base);
        index /= base;
        factor *= inv;
    }
    return value;
}

}  // namespace msqi
