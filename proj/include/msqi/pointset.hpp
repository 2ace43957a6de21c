#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <utility>
#include <vector>

#include "msqi/errors.hpp"
#include "msqi/geometry.hpp"
#include "msqi/halton.hpp"
#include "msqi/kdtree.hpp"

namespace msqi {

/// Immutable scattered site set with cached geometric statistics and a
/// spatial index. All queries are safe to call from many threads at once.
class PointSet {
public:
    PointSet(std::vector<Vec2> sites, Domain domain, double probe_h)
        : domain_(domain), index_(std::move(sites)) {
        if (index_.size() == 0) throw ConfigError("PointSet: empty site list");
        fill_distance_ = estimate_fill_distance(probe_h);
        probe_h_ = probe_h;
        separation_radius_ = compute_separation_radius();
    }

    const std::vector<Vec2>& sites() const { return index_.points(); }
    std::size_t size() const { return index_.size(); }
    const Domain& domain() const { return domain_; }
    const KdTree2& index() const { return index_; }

    /// Probe-grid estimate of sup_{x in domain} min_i ||x - x_i||.
    double fill_distance() const { return fill_distance_; }
    double probe_step() const { return probe_h_; }

    /// Half the minimum pairwise site distance. Infinite for a single site.
    double separation_radius() const {
        if (index_.size() < 2)
            throw ConfigError("separation_radius: need >= 2 sites");
        return separation_radius_;
    }

    /// Indices of sites with ||center - site|| < radius (strict, matching the
    /// open support of the kernel). Sorted ascending.
    std::vector<std::size_t> radius_query(const Vec2& center, double radius) const {
        return index_.radius_query(center, radius);
    }

    /// Index of the closest site, lowest index on ties.
    std::size_t nearest(const Vec2& query) const { return index_.nearest(query); }

private:
    double estimate_fill_distance(double probe_h) const {
        if (!(probe_h > 0.0)) throw ConfigError("fill_distance: probe_h must be positive");
        const RegularGrid probes(domain_, probe_h);
        double worst = 0.0;
        for (std::size_t k = 0; k < probes.size(); ++k) {
            const Vec2 p = probes.node(k);
            const double d = (index_.points()[index_.nearest(p)] - p).norm();
            worst = std::max(worst, d);
        }
        return worst;
    }

    double compute_separation_radius() const {
        if (index_.size() < 2) return std::numeric_limits<double>::infinity();
        double min_d = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < index_.size(); ++i)
            min_d = std::min(min_d, index_.nearest_other_distance(i));
        if (!(min_d > 0.0))
            throw ConfigError("separation_radius: duplicate sites (q = 0)");
        return 0.5 * min_d;
    }

    Domain domain_;
    KdTree2 index_;
    double fill_distance_ = 0.0;
    double separation_radius_ = 0.0;
    double probe_h_ = 0.0;
};

using PointSetPtr = std::shared_ptr<const PointSet>;

/// First n points of the 2-d Halton sequence with bases (2, 3), indices
/// starting at 1 (the origin point of index 0 is skipped).
inline std::vector<Vec2> halton_points_2d(std::size_t n) {
    std::vector<Vec2> pts;
    pts.reserve(n);
    for (std::size_t i = 1; i <= n; ++i)
        pts.emplace_back(halton(i, 2), halton(i, 3));
    return pts;
}

/// Halton base set on [0,1)^2. The probe step for the fill-distance estimate
/// is fixed at 1/200, roughly 15x finer than the 400-point set's h.
inline PointSetPtr halton_base_set(std::size_t n, double probe_h = 0.005) {
    if (n < 3) throw ConfigError("halton_base_set: need n >= 3");
    return std::make_shared<PointSet>(halton_points_2d(n), Domain(0, 1, 0, 1), probe_h);
}

namespace detail {

inline const PointSet& halton_base_400() {
    static const PointSetPtr base = halton_base_set(400);
    return *base;
}

/// Drops near-coincident points (both coordinates within tol). Tile seams
/// cannot produce exact duplicates, so this is a safety net only.
inline std::vector<Vec2> dedup_sites(std::vector<Vec2> pts, double tol) {
    std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
        return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
    });
    std::vector<Vec2> out;
    out.reserve(pts.size());
    for (const Vec2& p : pts) {
        if (!out.empty() && std::abs(out.back().x() - p.x()) <= tol &&
            std::abs(out.back().y() - p.y()) <= tol)
            continue;
        out.push_back(p);
    }
    return out;
}

}  // namespace detail

/// Scaled-and-translated copies of the 400-point Halton base set covering the
/// domain with fill distance ~ target_h. Tiles are anchored at the lower-left
/// corner; sites of partial tiles that land outside the domain are retained.
inline PointSetPtr halton_tile(const Domain& domain, double target_h) {
    if (!(target_h > 0.0) || target_h >= domain.diameter())
        throw ConfigError("halton_tile: target_h must be in (0, domain diameter)");
    const PointSet& base = detail::halton_base_400();
    const double r = target_h / base.fill_distance();
    const auto nx = static_cast<std::size_t>(std::ceil(domain.width() / r));
    const auto ny = static_cast<std::size_t>(std::ceil(domain.height() / r));
    std::vector<Vec2> sites;
    sites.reserve(nx * ny * base.size());
    for (std::size_t i = 0; i < nx; ++i) {
        for (std::size_t j = 0; j < ny; ++j) {
            const Vec2 offset(domain.x_min + r * static_cast<double>(i),
                              domain.y_min + r * static_cast<double>(j));
            for (const Vec2& p : base.sites()) sites.push_back(r * p + offset);
        }
    }
    sites = detail::dedup_sites(std::move(sites), 1e-12);
    return std::make_shared<PointSet>(std::move(sites), domain, target_h / 10.0);
}

/// n point sets with geometrically decreasing nominal fill distances
/// h_j = h1 * mu^(j-1) and support radii delta_j = nu * h_j. Support radii
/// use the nominal target, not the probe-grid estimate, so runs reproduce
/// exactly regardless of probe resolution.
struct LevelSequence {
    std::vector<PointSetPtr> levels;
    std::vector<double> nominal_h;
    std::vector<double> support_radii;
    double mu = 0.0;
    double nu = 0.0;

    std::size_t size() const { return levels.size(); }
};

inline LevelSequence build_level_sequence(const Domain& domain, double h1, double mu,
                                          double nu, std::size_t n) {
    if (!(mu > 0.0 && mu < 1.0)) throw ConfigError("build_level_sequence: mu must be in (0,1)");
    if (!(nu > 1.0)) throw ConfigError("build_level_sequence: nu must be > 1");
    if (n < 1) throw ConfigError("build_level_sequence: need n >= 1");
    LevelSequence seq;
    seq.mu = mu;
    seq.nu = nu;
    for (std::size_t j = 0; j < n; ++j) {
        const double hj = h1 * std::pow(mu, static_cast<double>(j));
        seq.levels.push_back(halton_tile(domain, hj));
        seq.nominal_h.push_back(hj);
        seq.support_radii.push_back(nu * hj);
    }
    // the tiling is approximate; consecutive measured fill distances must
    // still track the requested ratio
    for (std::size_t j = 0; j + 1 < n; ++j) {
        const double ratio = seq.levels[j + 1]->fill_distance() / seq.levels[j]->fill_distance();
        if (std::abs(ratio / mu - 1.0) > 0.10)
            throw ConfigError("build_level_sequence: measured fill-distance ratio " +
                              std::to_string(ratio) + " deviates from mu by more than 10%");
    }
    return seq;
}

}  // namespace msqi
