#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <numeric>
#include <vector>

#include "msqi/geometry.hpp"

namespace msqi {

/// Static 2-d k-d tree over a fixed set of sites. Supports fixed-radius and
/// nearest-neighbor queries; all queries are read-only and thread-safe.
class KdTree2 {
public:
    KdTree2() = default;

    explicit KdTree2(std::vector<Vec2> points) : pts_(std::move(points)) {
        order_.resize(pts_.size());
        std::iota(order_.begin(), order_.end(), std::size_t{0});
        if (!pts_.empty()) build(0, pts_.size(), 0);
    }

    std::size_t size() const { return pts_.size(); }
    const std::vector<Vec2>& points() const { return pts_; }

    /// Indices of all sites with ||center - site|| < radius (strict).
    /// Returned sorted ascending so downstream sums are order-deterministic.
    std::vector<std::size_t> radius_query(const Vec2& center, double radius) const {
        if (!(radius > 0.0)) throw ConfigError("radius_query: radius must be positive");
        std::vector<std::size_t> out;
        if (!pts_.empty()) radius_rec(0, pts_.size(), 0, center, radius * radius, out);
        std::sort(out.begin(), out.end());
        return out;
    }

    /// Index of the closest site; ties broken by lowest index.
    std::size_t nearest(const Vec2& query) const {
        if (pts_.empty()) throw ConfigError("nearest: empty tree");
        Best best;
        nearest_rec(0, pts_.size(), 0, query, SIZE_MAX, best);
        return best.index;
    }

    /// Distance from site i to its closest *other* site.
    double nearest_other_distance(std::size_t i) const {
        if (pts_.size() < 2) throw ConfigError("nearest_other_distance: need >= 2 sites");
        Best best;
        nearest_rec(0, pts_.size(), 0, pts_[i], i, best);
        return std::sqrt(best.dist2);
    }

private:
    struct Best {
        double dist2 = std::numeric_limits<double>::infinity();
        std::size_t index = SIZE_MAX;
    };

    // order_[lo..hi) holds the subtree's site indices; the median (by the
    // depth's axis, site index as tie-break) sits at mid.
    void build(std::size_t lo, std::size_t hi, int depth) {
        if (hi - lo <= 1) return;
        std::size_t mid = (lo + hi) / 2;
        const int axis = depth % 2;
        std::nth_element(order_.begin() + lo, order_.begin() + mid, order_.begin() + hi,
                         [&](std::size_t a, std::size_t b) {
                             double ca = pts_[a][axis], cb = pts_[b][axis];
                             return ca < cb || (ca == cb && a < b);
                         });
        build(lo, mid, depth + 1);
        build(mid + 1, hi, depth + 1);
    }

    void radius_rec(std::size_t lo, std::size_t hi, int depth, const Vec2& c, double r2,
                    std::vector<std::size_t>& out) const {
        if (lo >= hi) return;
        std::size_t mid = (lo + hi) / 2;
        const std::size_t idx = order_[mid];
        if ((pts_[idx] - c).squaredNorm() < r2) out.push_back(idx);
        const int axis = depth % 2;
        const double d = c[axis] - pts_[idx][axis];
        if (d < 0.0 || d * d < r2) radius_rec(lo, mid, depth + 1, c, r2, out);
        if (d > 0.0 || d * d < r2) radius_rec(mid + 1, hi, depth + 1, c, r2, out);
    }

    void nearest_rec(std::size_t lo, std::size_t hi, int depth, const Vec2& q,
                     std::size_t skip, Best& best) const {
        if (lo >= hi) return;
        std::size_t mid = (lo + hi) / 2;
        const std::size_t idx = order_[mid];
        if (idx != skip) {
            double d2 = (pts_[idx] - q).squaredNorm();
            if (d2 < best.dist2 || (d2 == best.dist2 && idx < best.index)) {
                best.dist2 = d2;
                best.index = idx;
            }
        }
        const int axis = depth % 2;
        const double d = q[axis] - pts_[idx][axis];
        const std::size_t first_lo = d <= 0.0 ? lo : mid + 1;
        const std::size_t first_hi = d <= 0.0 ? mid : hi;
        const std::size_t second_lo = d <= 0.0 ? mid + 1 : lo;
        const std::size_t second_hi = d <= 0.0 ? hi : mid;
        nearest_rec(first_lo, first_hi, depth + 1, q, skip, best);
        if (d * d <= best.dist2)  // <= so equal-distance ties reach the low index
            nearest_rec(second_lo, second_hi, depth + 1, q, skip, best);
    }

    std::vector<Vec2> pts_;
    std::vector<std::size_t> order_;
};

}  // namespace msqi
