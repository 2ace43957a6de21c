#pragma once

#include <Eigen/Core>
#include <cmath>
#include <cstddef>
#include <vector>

#include "msqi/errors.hpp"

namespace msqi {

using Vec2 = Eigen::Vector2d;

/// Axis-aligned rectangle in the parameter plane.
struct Domain {
    double x_min, x_max, y_min, y_max;

    Domain(double x0, double x1, double y0, double y1)
        : x_min(x0), x_max(x1), y_min(y0), y_max(y1) {
        if (!(x_min < x_max) || !(y_min < y_max))
            throw ConfigError("Domain: requires x_min < x_max and y_min < y_max");
    }

    double width() const { return x_max - x_min; }
    double height() const { return y_max - y_min; }
    double diameter() const { return std::hypot(width(), height()); }

    bool contains(const Vec2& p) const {
        return p.x() >= x_min && p.x() <= x_max && p.y() >= y_min && p.y() <= y_max;
    }

    /// Rectangle shrunk by `margin` on all four sides.
    Domain inset(double margin) const {
        return Domain(x_min + margin, x_max - margin, y_min + margin, y_max - margin);
    }
};

/// Regular grid over a rectangle: nodes at origin + i*step, half-open so the
/// last node does not exceed the upper bound.
struct RegularGrid {
    double x0, y0, step;
    std::size_t nx, ny;

    RegularGrid(const Domain& r, double h) : x0(r.x_min), y0(r.y_min), step(h) {
        if (!(h > 0.0)) throw ConfigError("RegularGrid: step must be positive");
        // +eps guards against (width/h) landing just below an integer
        nx = static_cast<std::size_t>(std::floor(r.width() / h + 1e-12)) + 1;
        ny = static_cast<std::size_t>(std::floor(r.height() / h + 1e-12)) + 1;
    }

    std::size_t size() const { return nx * ny; }

    Vec2 node(std::size_t i, std::size_t j) const {
        return {x0 + static_cast<double>(i) * step, y0 + static_cast<double>(j) * step};
    }

    /// Row-major flattening, y-major: index = j*nx + i.
    Vec2 node(std::size_t flat) const { return node(flat % nx, flat / nx); }

    std::vector<Vec2> nodes() const {
        std::vector<Vec2> out;
        out.reserve(size());
        for (std::size_t j = 0; j < ny; ++j)
            for (std::size_t i = 0; i < nx; ++i) out.push_back(node(i, j));
        return out;
    }
};

}  // namespace msqi
