#pragma once

#include <cmath>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "msqi/quasi_interp.hpp"

namespace msqi {

/// |approx - reference| sampled on a regular grid, plus its maximum.
struct ErrorField {
    RegularGrid grid;
    std::vector<double> values;
    double linf = 0.0;
};

/// Default evaluation rectangle: the domain inset by delta_1 on all sides,
/// so the support of every evaluation neighborhood stays inside the domain.
/// The inset is capped at a quarter of the smaller extent; with wide
/// first-level supports (delta_1 comparable to the domain itself) the
/// uncapped rule would leave an empty rectangle.
inline Domain default_eval_rectangle(const Domain& domain, double delta_1) {
    const double cap = 0.25 * std::min(domain.width(), domain.height());
    return domain.inset(std::min(delta_1, cap));
}

/// Residual-correction multiscale approximant: an ordered list of per-level
/// operators whose evaluations sum. Level j is fit on X_j with radius
/// delta_j to the residual of the previous levels.
class MultiscaleModel {
public:
    MultiscaleModel(std::vector<QuasiInterpolant> corrections, LevelSequence levels)
        : corrections_(std::move(corrections)), levels_(std::move(levels)) {
        if (corrections_.size() != levels_.size())
            throw ConfigError("MultiscaleModel: one correction per level required");
    }

    const std::vector<QuasiInterpolant>& corrections() const { return corrections_; }
    const LevelSequence& levels() const { return levels_; }
    std::size_t size() const { return corrections_.size(); }

    /// Sum of the first `upto` corrections; NaN if any contributing level has
    /// an empty neighborhood at x (holes poison the point, no extrapolation).
    double evaluate(const Vec2& x, std::size_t upto) const {
        double acc = 0.0;
        for (std::size_t j = 0; j < upto; ++j) {
            const double s = corrections_[j].try_evaluate(x);
            if (std::isnan(s)) return s;
            acc += s;
        }
        return acc;
    }

    double evaluate(const Vec2& x) const { return evaluate(x, corrections_.size()); }

    ScalarField field(std::size_t upto) const {
        return [this, upto](const Vec2& x) { return evaluate(x, upto); };
    }
    ScalarField field() const { return field(corrections_.size()); }

private:
    std::vector<QuasiInterpolant> corrections_;
    LevelSequence levels_;
};

/// Algorithm: s_j fits the level-j residual f - sum_{l<j} s_l sampled at X_j.
/// Residuals are evaluated lazily per level rather than stored as dense
/// fields. Fit is sequential over levels, parallel over sites within one.
inline MultiscaleModel multiscale_fit(const ScalarField& f, const LevelSequence& levels,
                                      int degree = 0, Kernel kernel = {},
                                      unsigned threads = 0) {
    if (levels.size() == 0) throw ConfigError("multiscale_fit: empty level sequence");
    std::vector<QuasiInterpolant> corrections;
    corrections.reserve(levels.size());
    for (std::size_t j = 0; j < levels.size(); ++j) {
        const PointSet& sites = *levels.levels[j];
        std::vector<double> residual(sites.size());
        std::string failure;
        std::mutex failure_mu;
        parallel_for(sites.size(), [&](std::size_t i) {
            const Vec2& x = sites.sites()[i];
            double prior = 0.0;
            for (std::size_t l = 0; l < j; ++l) {
                const double s = corrections[l].try_evaluate(x);
                if (std::isnan(s)) {
                    std::lock_guard<std::mutex> lk(failure_mu);
                    std::ostringstream msg;
                    msg << "level " << (j + 1) << " residual site (" << x.x() << ", "
                        << x.y() << ") not covered by level " << (l + 1)
                        << " (delta_" << (l + 1) << " = " << levels.support_radii[l]
                        << " too small for X_" << (l + 1) << ")";
                    if (failure.empty()) failure = msg.str();
                    return;
                }
                prior += s;
            }
            residual[i] = f(x) - prior;
        }, threads);
        if (!failure.empty()) throw EmptyNeighborhoodError(failure);
        corrections.emplace_back(levels.levels[j], std::move(residual),
                                 levels.support_radii[j], degree, kernel);
    }
    return MultiscaleModel(std::move(corrections), levels);
}

/// Discrete L_inf error |approx - reference| over the grid G(R, h_grid).
/// R must be fully covered by the approximant: a missing value is an error,
/// not a skipped node, so convergence numbers cannot be silently biased.
inline ErrorField linf_error(const ScalarField& approx, const ScalarField& reference,
                             const Domain& R, double h_grid, unsigned threads = 0) {
    ErrorField out{RegularGrid(R, h_grid), {}, 0.0};
    out.values.resize(out.grid.size());
    parallel_for(out.grid.size(), [&](std::size_t k) {
        const Vec2 p = out.grid.node(k);
        out.values[k] = std::abs(approx(p) - reference(p));
    }, threads);
    for (std::size_t k = 0; k < out.values.size(); ++k) {
        if (std::isnan(out.values[k])) {
            const Vec2 p = out.grid.node(k);
            std::ostringstream msg;
            msg << "linf_error: approximant not defined at grid node (" << p.x() << ", "
                << p.y() << "); evaluation rectangle must be fully covered";
            throw EmptyNeighborhoodError(msg.str());
        }
        out.linf = std::max(out.linf, out.values[k]);
    }
    return out;
}

}  // namespace msqi
