#pragma once

#include <cmath>

#include "msqi/errors.hpp"
#include "msqi/geometry.hpp"

namespace msqi {

/// Wendland phi_{3,1}(r) = (1-r)^4_+ (4r+1). C^2, supported on [0,1),
/// positive there. The branch comes first so no polynomial noise leaks
/// outside the support.
inline double wendland_31(double r) {
    if (r < 0.0) throw ConfigError("wendland_31: negative radius");
    if (r >= 1.0) return 0.0;
    const double u = 1.0 - r;
    const double u2 = u * u;
    return u2 * u2 * (4.0 * r + 1.0);
}

/// Compactly supported radial weight profile. phi_{3,1} is the only built-in;
/// the struct is the extension point should another profile ever be needed.
struct Kernel {
    double (*profile)(double) = &wendland_31;
    int smoothness = 2;  // C^2

    double operator()(double r) const { return profile(r); }
};

/// w_i(x) = phi(||x - site|| / delta); strictly positive iff the distance is
/// below delta.
inline double weight(const Kernel& kernel, const Vec2& x, const Vec2& site, double delta) {
    if (!(delta > 0.0)) throw ConfigError("weight: delta must be positive");
    return kernel((x - site).norm() / delta);
}

}  // namespace msqi
