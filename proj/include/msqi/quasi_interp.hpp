#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <utility>
#include <vector>

#include "msqi/errors.hpp"
#include "msqi/kernel.hpp"
#include "msqi/parallel.hpp"
#include "msqi/pointset.hpp"

namespace msqi {

using ScalarField = std::function<double(const Vec2&)>;

/// Local weights a_i(x) over the delta-neighborhood of a query point.
/// Reproduction of constants means the weights sum to one.
struct WeightVector {
    std::vector<std::size_t> indices;
    std::vector<double> a;
};

/// Regular-grid evaluation result. Nodes whose neighborhood was empty hold
/// NaN ("missing"); they are flagged, never fabricated.
struct GridField {
    RegularGrid grid;
    std::vector<double> values;
};

namespace detail {

/// Monomial exponents of total degree <= m, degree-ascending, constant first.
inline std::vector<std::pair<int, int>> monomial_exponents(int m) {
    std::vector<std::pair<int, int>> out;
    for (int total = 0; total <= m; ++total)
        for (int a = total; a >= 0; --a) out.emplace_back(a, total - a);
    return out;
}

}  // namespace detail

/// A frozen local operator: sites, per-site sample values, kernel, support
/// radius and reproduction degree (0 = Shepard, m >= 1 = moving least
/// squares). Immutable after construction; evaluation is pure.
class QuasiInterpolant {
public:
    QuasiInterpolant(PointSetPtr sites, std::vector<double> values, double delta,
                     int degree = 0, Kernel kernel = {},
                     double gram_condition_cap = 1e12)
        : sites_(std::move(sites)),
          values_(std::move(values)),
          delta_(delta),
          degree_(degree),
          kernel_(kernel),
          gram_condition_cap_(gram_condition_cap),
          exponents_(detail::monomial_exponents(degree)) {
        if (!sites_) throw ConfigError("QuasiInterpolant: null site set");
        if (values_.size() != sites_->size())
            throw ConfigError("QuasiInterpolant: values length must equal site count");
        if (!(delta_ > 0.0)) throw ConfigError("QuasiInterpolant: delta must be positive");
        if (degree_ < 0) throw ConfigError("QuasiInterpolant: degree must be >= 0");
    }

    const PointSet& sites() const { return *sites_; }
    const std::vector<double>& values() const { return values_; }
    double delta() const { return delta_; }
    int degree() const { return degree_; }

    /// a_i(x) for the delta-neighborhood of x. Shepard for degree 0,
    /// otherwise the MLS weights from the local Gram system.
    WeightVector weights(const Vec2& x) const {
        auto w = try_weights(x);
        if (!w) throw empty_neighborhood(x);
        return std::move(*w);
    }

    std::optional<WeightVector> try_weights(const Vec2& x) const {
        const auto idx = sites_->radius_query(x, delta_);
        if (idx.empty()) return std::nullopt;
        return degree_ == 0 ? shepard_weights(x, idx) : mls_weights(x, idx);
    }

    double evaluate(const Vec2& x) const {
        const WeightVector w = weights(x);
        double acc = 0.0;
        for (std::size_t k = 0; k < w.indices.size(); ++k)
            acc += w.a[k] * values_[w.indices[k]];
        return acc;
    }

    /// NaN instead of an exception when the neighborhood is empty.
    double try_evaluate(const Vec2& x) const {
        const auto w = try_weights(x);
        if (!w) return std::numeric_limits<double>::quiet_NaN();
        double acc = 0.0;
        for (std::size_t k = 0; k < w->indices.size(); ++k)
            acc += w->a[k] * values_[w->indices[k]];
        return acc;
    }

    /// Elementwise evaluate over a regular grid, parallel over nodes with
    /// deterministic per-node output. threads = 1 forces serial evaluation.
    GridField evaluate_grid(const RegularGrid& grid, unsigned threads = 0) const {
        GridField out{grid, std::vector<double>(grid.size())};
        parallel_for(grid.size(),
                     [&](std::size_t k) { out.values[k] = try_evaluate(grid.node(k)); },
                     threads);
        return out;
    }

private:
    EmptyNeighborhoodError empty_neighborhood(const Vec2& x) const {
        std::ostringstream msg;
        msg << "empty neighborhood at x = (" << x.x() << ", " << x.y()
            << ") with delta = " << delta_;
        return EmptyNeighborhoodError(msg.str());
    }

    WeightVector shepard_weights(const Vec2& x, const std::vector<std::size_t>& idx) const {
        WeightVector out;
        out.indices = idx;
        out.a.resize(idx.size());
        double total = 0.0;
        for (std::size_t k = 0; k < idx.size(); ++k) {
            const double w = kernel_((x - sites_->sites()[idx[k]]).norm() / delta_);
            out.a[k] = w;
            total += w;
        }
        for (double& a : out.a) a /= total;
        return out;
    }

    // Gram system of the weighted least-squares problem in the shifted-scaled
    // monomial basis p_beta(y) = ((y - x)/delta)^beta. Centering at the query
    // point keeps the system O(1)-conditioned for generic geometry and makes
    // the right-hand side the first unit vector.
    WeightVector mls_weights(const Vec2& x, const std::vector<std::size_t>& idx) const {
        const auto Q = static_cast<Eigen::Index>(exponents_.size());
        const auto n = static_cast<Eigen::Index>(idx.size());
        Eigen::MatrixXd P(n, Q);
        Eigen::VectorXd w(n);
        for (Eigen::Index k = 0; k < n; ++k) {
            const Vec2 site = sites_->sites()[idx[static_cast<std::size_t>(k)]];
            const Vec2 local = (site - x) / delta_;
            w(k) = kernel_(local.norm());
            for (Eigen::Index l = 0; l < Q; ++l) {
                const auto [ax, ay] = exponents_[static_cast<std::size_t>(l)];
                P(k, l) = std::pow(local.x(), ax) * std::pow(local.y(), ay);
            }
        }
        const Eigen::MatrixXd gram = P.transpose() * w.asDiagonal() * P;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
        const Eigen::VectorXd& ev = eig.eigenvalues();
        if (!(ev(0) > 0.0) || ev(Q - 1) / ev(0) > gram_condition_cap_) {
            std::ostringstream msg;
            msg << "degenerate local geometry for degree " << degree_ << " at x = ("
                << x.x() << ", " << x.y() << "): Gram condition "
                << (ev(0) > 0.0 ? ev(Q - 1) / ev(0) : std::numeric_limits<double>::infinity())
                << " exceeds cap " << gram_condition_cap_;
            throw NonUnisolventError(msg.str());
        }
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(Q);
        rhs(0) = 1.0;  // constant basis function evaluated at the center
        const Eigen::VectorXd lambda =
            eig.eigenvectors() * (eig.eigenvectors().transpose() * rhs).cwiseQuotient(ev);
        WeightVector out;
        out.indices = idx;
        out.a.resize(idx.size());
        for (Eigen::Index k = 0; k < n; ++k)
            out.a[static_cast<std::size_t>(k)] = w(k) * P.row(k).dot(lambda);
        return out;
    }

    PointSetPtr sites_;
    std::vector<double> values_;
    double delta_;
    int degree_;
    Kernel kernel_;
    double gram_condition_cap_;
    std::vector<std::pair<int, int>> exponents_;
};

}  // namespace msqi
