#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <sstream>
#include <type_traits>
#include <vector>

#include "msqi/errors.hpp"

namespace msqi {

using Mat3 = Eigen::Matrix3d;
using Vec3 = Eigen::Vector3d;

struct KarcherConfig {
    double tolerance = 1e-10;
    int max_iterations = 100;
};

namespace detail {

constexpr double kRepairDrift = 1e-12;  // silently project back below this
constexpr double kErrorDrift = 1e-8;    // beyond this the input is bad data

inline Mat3 skew_from_axis(const Vec3& w) {
    Mat3 s;
    s << 0, -w.z(), w.y(), w.z(), 0, -w.x(), -w.y(), w.x(), 0;
    return s;
}

inline Vec3 axis_from_skew(const Mat3& s) { return {s(2, 1), s(0, 2), s(1, 0)}; }

/// Rodrigues closed form for the matrix exponential of a skew matrix.
inline Mat3 so3_expm(const Mat3& omega) {
    const double theta = axis_from_skew(omega).norm();
    double c1, c2;  // sin(t)/t and (1-cos(t))/t^2
    if (theta < 1e-4) {
        const double t2 = theta * theta;
        c1 = 1.0 - t2 / 6.0 + t2 * t2 / 120.0;
        c2 = 0.5 - t2 / 24.0 + t2 * t2 / 720.0;
    } else {
        c1 = std::sin(theta) / theta;
        c2 = (1.0 - std::cos(theta)) / (theta * theta);
    }
    return Mat3::Identity() + c1 * omega + c2 * (omega * omega);
}

/// Inverse of so3_expm via the angle-trace formula. Throws near the cut
/// locus (rotation angle within 1e-6 of pi) where the log is not unique.
inline Mat3 so3_logm(const Mat3& rot) {
    const double tr = std::clamp((rot.trace() - 1.0) / 2.0, -1.0, 1.0);
    const double theta = std::acos(tr);
    if (M_PI - theta < 1e-6) {
        std::ostringstream msg;
        msg << "so3 log at the cut locus: rotation angle " << theta
            << " within 1e-6 of pi";
        throw CutLocusError(msg.str());
    }
    const Mat3 anti = 0.5 * (rot - rot.transpose());
    if (theta < 1e-4) {
        const double t2 = theta * theta;
        return anti * (1.0 + t2 / 6.0 + 7.0 * t2 * t2 / 360.0);
    }
    return anti * (theta / std::sin(theta));
}

inline double rotation_angle(const Mat3& rot) {
    return std::acos(std::clamp((rot.trace() - 1.0) / 2.0, -1.0, 1.0));
}

/// Projects a near-rotation back onto SO(3) (polar factor via SVD).
inline Mat3 project_so3(const Mat3& m) {
    Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Mat3 r = svd.matrixU() * svd.matrixV().transpose();
    if (r.determinant() < 0.0) {
        Mat3 flip = Mat3::Identity();
        flip(2, 2) = -1.0;
        r = svd.matrixU() * flip * svd.matrixV().transpose();
    }
    return r;
}

}  // namespace detail

/// SO(3) with the bi-invariant metric. Points are rotation matrices; a
/// tangent at p is stored in ambient form p * Omega with Omega skew, so the
/// body-frame coordinate is recovered as p^T v. Distances are rotation
/// angles: dist(I, R_z(a)) = a.
struct So3 {
    using Point = Mat3;
    using Tangent = Mat3;
    static constexpr const char* name = "so3";

    static double point_drift(const Point& p) {
        const double ortho = (p.transpose() * p - Mat3::Identity()).cwiseAbs().maxCoeff();
        const double det = std::abs(p.determinant() - 1.0);
        return std::max(ortho, det);
    }

    static void validate(const Point& p) {
        if (point_drift(p) > 1e-10) throw ConfigError("So3: matrix is not a rotation");
    }

    static Point repair(const Point& p) {
        const double drift = point_drift(p);
        if (drift <= detail::kRepairDrift) return p;
        if (drift > detail::kErrorDrift)
            throw ConfigError("So3: invariant drift beyond 1e-8, refusing to repair");
        return detail::project_so3(p);
    }

    static Tangent zero(const Point&) { return Tangent::Zero(); }

    static Point exp(const Point& p, const Tangent& v) {
        Mat3 omega = p.transpose() * v;
        if ((omega + omega.transpose()).cwiseAbs().maxCoeff() > 1e-10)
            throw ConfigError("So3::exp: tangent is not skew at the base point");
        omega = 0.5 * (omega - omega.transpose());
        return repair(p * detail::so3_expm(omega));
    }

    static Tangent log(const Point& p, const Point& q) {
        return p * detail::so3_logm(p.transpose() * q);
    }

    static double dist(const Point& p, const Point& q) {
        return detail::rotation_angle(p.transpose() * q);
    }

    /// Left-translation transport: the body-frame coordinate is reattached
    /// at the target base. Exact isometry, defined for every pair.
    static Tangent transport(const Point& p, const Point& q, const Tangent& v) {
        return q * (p.transpose() * v);
    }

    static double norm(const Point& p, const Tangent& v) {
        return (p.transpose() * v).norm() / std::sqrt(2.0);  // angle units
    }
};

/// Euler angles composed in intrinsic xyz order: R = R_x(a) R_y(b) R_z(c)
/// acting on column vectors.
inline So3::Point euler_xyz(double a, double b, double c) {
    Mat3 rx, ry, rz;
    rx << 1, 0, 0, 0, std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a);
    ry << std::cos(b), 0, std::sin(b), 0, 1, 0, -std::sin(b), 0, std::cos(b);
    rz << std::cos(c), -std::sin(c), 0, std::sin(c), std::cos(c), 0, 0, 0, 1;
    return rx * ry * rz;
}

/// SPD(3) with the affine-invariant metric. Tangents are symmetric matrices
/// in ambient form; the metric norm at X is ||X^{-1/2} v X^{-1/2}||_F.
struct Spd3 {
    using Point = Mat3;
    using Tangent = Mat3;
    static constexpr const char* name = "spd3";

    static double sym_drift(const Mat3& m) {
        return (m - m.transpose()).cwiseAbs().maxCoeff();
    }

    static void validate(const Point& x) {
        if (sym_drift(x) > 1e-10) throw ConfigError("Spd3: matrix is not symmetric");
        Eigen::SelfAdjointEigenSolver<Mat3> eig(x);
        if (!(eig.eigenvalues()(0) > 0.0))
            throw ConfigError("Spd3: matrix is not positive definite");
    }

    static Point repair(const Point& x) {
        const double drift = sym_drift(x);
        if (drift <= detail::kRepairDrift) return x;
        if (drift > detail::kErrorDrift)
            throw ConfigError("Spd3: symmetry drift beyond 1e-8, refusing to repair");
        return 0.5 * (x + x.transpose());
    }

    static Tangent zero(const Point&) { return Tangent::Zero(); }

    static Point exp(const Point& x, const Tangent& v) {
        check_tangent(v);
        const auto [xs, xsi] = sqrt_pair(x);
        const Mat3 inner = apply_sym(xsi * v * xsi, [](double t) { return std::exp(t); });
        return repair(xs * inner * xs);
    }

    static Tangent log(const Point& x, const Point& y) {
        const auto [xs, xsi] = sqrt_pair(x);
        const Mat3 m = symmetrized(xsi * y * xsi);
        check_spd(m, "Spd3::log: argument is not positive definite at the base");
        const Mat3 inner = apply_sym(m, [](double t) { return std::log(t); });
        return symmetrized(xs * inner * xs);
    }

    static double dist(const Point& x, const Point& y) {
        const auto [xs, xsi] = sqrt_pair(x);
        (void)xs;
        const Mat3 m = symmetrized(xsi * y * xsi);
        Eigen::SelfAdjointEigenSolver<Mat3> eig(m);
        if (!(eig.eigenvalues()(0) > 0.0))
            throw ConfigError("Spd3::dist: argument is not positive definite");
        return eig.eigenvalues().array().log().matrix().norm();
    }

    /// Geodesic parallel transport E v E^T with E = (Y X^{-1})^{1/2},
    /// computed through the symmetric form X^{1/2} (X^{-1/2} Y X^{-1/2})^{1/2}
    /// X^{-1/2}. Preserves the metric norm.
    static Tangent transport(const Point& x, const Point& y, const Tangent& v) {
        check_tangent(v);
        const auto [xs, xsi] = sqrt_pair(x);
        const Mat3 m = symmetrized(xsi * y * xsi);
        check_spd(m, "Spd3::transport: bases are not positive definite");
        const Mat3 e = xs * apply_sym(m, [](double t) { return std::sqrt(t); }) * xsi;
        return symmetrized(e * v * e.transpose());
    }

    static double norm(const Point& x, const Tangent& v) {
        const auto [xs, xsi] = sqrt_pair(x);
        (void)xs;
        return (xsi * v * xsi).norm();
    }

    static Mat3 symmetrized(const Mat3& m) { return 0.5 * (m + m.transpose()); }

    template <typename Fn>
    static Mat3 apply_sym(const Mat3& sym, Fn&& fn) {
        Eigen::SelfAdjointEigenSolver<Mat3> eig(sym);
        Vec3 w = eig.eigenvalues();
        for (int i = 0; i < 3; ++i) w(i) = fn(w(i));
        return eig.eigenvectors() * w.asDiagonal() * eig.eigenvectors().transpose();
    }

    static std::pair<Mat3, Mat3> sqrt_pair(const Point& x) {
        if (sym_drift(x) > 1e-10) throw ConfigError("Spd3: base point is not symmetric");
        Eigen::SelfAdjointEigenSolver<Mat3> eig(x);
        const Vec3& w = eig.eigenvalues();
        if (!(w(0) > 0.0)) throw ConfigError("Spd3: base point is not positive definite");
        const Vec3 s = w.cwiseSqrt();
        const Mat3 xs = eig.eigenvectors() * s.asDiagonal() * eig.eigenvectors().transpose();
        const Mat3 xsi =
            eig.eigenvectors() * s.cwiseInverse().asDiagonal() * eig.eigenvectors().transpose();
        return {xs, xsi};
    }

private:
    static void check_tangent(const Tangent& v) {
        if (sym_drift(v) > 1e-10)
            throw ConfigError("Spd3: tangent must be a symmetric matrix");
    }

    static void check_spd(const Mat3& m, const char* what) {
        Eigen::SelfAdjointEigenSolver<Mat3> eig(m);
        if (!(eig.eigenvalues()(0) > 0.0)) throw ConfigError(what);
    }
};

/// Flat R^N, the sanity instance: exp/log are vector addition/subtraction
/// and transport is the identity.
template <int N>
struct Euclidean {
    using Point = Eigen::Matrix<double, N, 1>;
    using Tangent = Eigen::Matrix<double, N, 1>;
    static constexpr const char* name = "euclidean";

    static void validate(const Point&) {}
    static Point repair(const Point& p) { return p; }
    static Tangent zero(const Point&) { return Tangent::Zero(); }
    static Point exp(const Point& p, const Tangent& v) { return p + v; }
    static Tangent log(const Point& p, const Point& q) { return q - p; }
    static double dist(const Point& p, const Point& q) { return (q - p).norm(); }
    static Tangent transport(const Point&, const Point&, const Tangent& v) { return v; }
    static double norm(const Point&, const Tangent& v) { return v.norm(); }
};

/// Fixed-point iteration for the weighted Riemannian center of mass:
/// Y <- exp(Y, sum_i a_i log(Y, p_i) / sum_i a_i), stopping when the step
/// (equivalently dist(Y_next, Y)) falls below the tolerance.
template <class M>
typename M::Point karcher_mean(const std::vector<typename M::Point>& points,
                               const std::vector<double>& weights, const KarcherConfig& cfg,
                               typename M::Point init) {
    if (points.empty() || points.size() != weights.size())
        throw ConfigError("karcher_mean: points and weights must match and be nonempty");
    double total = 0.0;
    for (double w : weights) total += w;
    if (!(std::abs(total) > 0.0)) throw ConfigError("karcher_mean: weights sum to zero");

    typename M::Point y = init;
    double step = 0.0;
    for (int it = 0; it < cfg.max_iterations; ++it) {
        typename M::Tangent v = M::zero(y);
        for (std::size_t i = 0; i < points.size(); ++i)
            v += weights[i] * M::log(y, points[i]);
        v /= total;
        step = M::norm(y, v);
        y = M::exp(y, v);
        if (step < cfg.tolerance) return y;
    }
    std::ostringstream msg;
    msg << "karcher_mean: no convergence after " << cfg.max_iterations
        << " iterations, last step " << step;
    throw NonConvergenceError(msg.str(), step);
}

/// Damped fixed point for SPD(3), Richardson step size from the condition
/// numbers c_i of Y^{-1/2} F_i Y^{-1/2}:
///   theta = 2 / sum_i a_i psi(c_i),   psi(c) = (c+1)/(c-1) * log(c),
/// with psi's limit value 2 substituted when c_i - 1 < 1e-12 (those samples
/// coincide with the iterate and exert no pull). Initial guess is the
/// weighted arithmetic mean, SPD whenever all a_i >= 0.
inline Spd3::Point karcher_mean_spd(const std::vector<Spd3::Point>& points,
                                    const std::vector<double>& weights,
                                    const KarcherConfig& cfg) {
    if (points.empty() || points.size() != weights.size())
        throw ConfigError("karcher_mean_spd: points and weights must match and be nonempty");
    double total = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw ConfigError("karcher_mean_spd: weights must be nonnegative");
        total += w;
    }
    if (!(total > 0.0)) throw ConfigError("karcher_mean_spd: weights sum to zero");

    Mat3 y = Mat3::Zero();
    for (std::size_t i = 0; i < points.size(); ++i) y += (weights[i] / total) * points[i];
    y = Spd3::symmetrized(y);

    double step = 0.0;
    for (int it = 0; it < cfg.max_iterations; ++it) {
        const auto [ys, ysi] = Spd3::sqrt_pair(y);
        Mat3 grad = Mat3::Zero();  // sum a_i Log_Y(F_i), assembled in the Y frame
        double damping = 0.0;
        for (std::size_t i = 0; i < points.size(); ++i) {
            const double a = weights[i] / total;
            const Mat3 m = Spd3::symmetrized(ysi * points[i] * ysi);
            Eigen::SelfAdjointEigenSolver<Mat3> eig(m);
            const Vec3& w = eig.eigenvalues();
            if (!(w(0) > 0.0))
                throw ConfigError("karcher_mean_spd: sample is not positive definite");
            grad += a * (eig.eigenvectors() * w.array().log().matrix().asDiagonal() *
                         eig.eigenvectors().transpose());
            const double c = w(2) / w(0);
            damping += a * (c - 1.0 < 1e-12 ? 2.0 : (c + 1.0) / (c - 1.0) * std::log(c));
        }
        const double theta = 2.0 / damping;
        const Mat3 v = Spd3::symmetrized(ys * (theta * grad) * ys);
        step = (ysi * v * ysi).norm();
        y = Spd3::repair(Spd3::exp(y, v));
        if (step < cfg.tolerance) return y;
    }
    std::ostringstream msg;
    msg << "karcher_mean_spd: no convergence after " << cfg.max_iterations
        << " iterations, last step " << step;
    throw NonConvergenceError(msg.str(), step);
}

}  // namespace msqi
