#pragma once

/*
 * simplex.hpp — the state space.
 *
 * SimplexPoint     : x in the probability simplex, with support bookkeeping.
 * TangentVector    : z with sum(z) = 0.
 * Covector         : payoff-like linear functional (row vector).
 *
 * Membership tests for the tangent cone
 *     T_C(x) = { z : sum z = 0, z_a >= 0 whenever x_a = 0 }
 * and the tangent space
 *     T_S(x) = { z : sum z = 0, z_a  = 0 whenever x_a = 0 },
 * plus the Euclidean projection onto the simplex itself (used by the
 * Caratheodory integrator to restore feasibility after a step).
 */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "errors.hpp"
#include "numerics.hpp"

namespace geoflow {

// Tangent-membership checks tolerate more slack than support snapping:
// tangent vectors accumulate projection roundoff.
inline constexpr double kDefaultSupportTol = 1e-12;
inline constexpr double kTangentTol = 1e-10;

class SimplexPoint {
  public:
    SimplexPoint() = default;

    /// Validates, snaps coordinates below support_tol to exact zero, and
    /// renormalizes the total mass to 1. A support_tol of 0 disables
    /// snapping (used along constant-support trajectories, where structural
    /// zeros are maintained by construction rather than by thresholding).
    explicit SimplexPoint(Vec coords, double support_tol = kDefaultSupportTol)
        : c_(std::move(coords)), support_tol_(support_tol) {
        if (c_.empty()) throw DimensionMismatch("SimplexPoint: empty coordinate vector");
        if (!all_finite(c_)) throw EvaluationFailure("SimplexPoint: non-finite coordinate");
        double s = 0.0;
        for (double& v : c_) {
            if (v < -1e-9) throw OutsideDomain("SimplexPoint: negative coordinate");
            if (v < support_tol_ || v < 0.0) v = 0.0;
            s += v;
        }
        if (std::abs(s - 1.0) > 1e-6)
            throw OutsideDomain("SimplexPoint: mass deviates from 1 beyond tolerance");
        for (double& v : c_) v /= s;
    }

    static SimplexPoint barycenter(std::size_t n) {
        return SimplexPoint(Vec(n, 1.0 / static_cast<double>(n)));
    }

    static SimplexPoint vertex(std::size_t n, std::size_t alpha) {
        Vec v(n, 0.0);
        v.at(alpha) = 1.0;
        return SimplexPoint(std::move(v));
    }

    std::size_t dim() const { return c_.size(); }
    double operator[](std::size_t i) const { return c_[i]; }
    const Vec& coords() const { return c_; }
    double support_tol() const { return support_tol_; }

    std::vector<std::size_t> support() const {
        std::vector<std::size_t> s;
        for (std::size_t i = 0; i < c_.size(); ++i)
            if (c_[i] > support_tol_) s.push_back(i);
        return s;
    }

    std::uint64_t support_mask() const {
        std::uint64_t m = 0;
        for (std::size_t i = 0; i < c_.size(); ++i)
            if (c_[i] > support_tol_) m |= (std::uint64_t{1} << i);
        return m;
    }

    bool in_support(std::size_t i) const { return c_[i] > support_tol_; }

    bool is_interior() const {
        for (double v : c_)
            if (v <= support_tol_) return false;
        return true;
    }

  private:
    Vec c_;
    double support_tol_ = kDefaultSupportTol;
};

struct TangentVector {
    Vec coords;

    TangentVector() = default;
    explicit TangentVector(Vec c) : coords(std::move(c)) {}

    std::size_t dim() const { return coords.size(); }
    double operator[](std::size_t i) const { return coords[i]; }
    bool is_zero_sum(double tol = kTangentTol) const { return std::abs(sum(coords)) <= tol; }
};

struct Covector {
    Vec coords;

    Covector() = default;
    explicit Covector(Vec c) : coords(std::move(c)) {}

    std::size_t dim() const { return coords.size(); }
    double operator[](std::size_t i) const { return coords[i]; }
};

/// Dual pairing <omega, w> = sum_a omega_a w_a.
inline double pair(const Covector& omega, const Vec& w) { return dot(omega.coords, w); }
inline double pair(const Covector& omega, const TangentVector& w) {
    return dot(omega.coords, w.coords);
}

// ── Tangent membership ──────────────────────────────────────────────────────

/// z in T_C(x): zero-sum, and nonnegative on the zero coordinates of x.
inline bool in_tangent_cone(const SimplexPoint& x, const TangentVector& z,
                            double tol = kTangentTol) {
    if (x.dim() != z.dim()) throw DimensionMismatch("in_tangent_cone: dimension mismatch");
    if (!z.is_zero_sum(tol)) return false;
    for (std::size_t i = 0; i < x.dim(); ++i)
        if (!x.in_support(i) && z[i] < -tol) return false;
    return true;
}

/// z in T_S(x): zero-sum and vanishing off the support of x.
inline bool in_tangent_space(const SimplexPoint& x, const TangentVector& z,
                             double tol = kTangentTol) {
    if (x.dim() != z.dim()) throw DimensionMismatch("in_tangent_space: dimension mismatch");
    if (!z.is_zero_sum(tol)) return false;
    for (std::size_t i = 0; i < x.dim(); ++i)
        if (!x.in_support(i) && std::abs(z[i]) > tol) return false;
    return true;
}

/// True when the vector's mass lies inside the support of x (membership in
/// R^{supp(x)} up to tol).
inline bool supported_in(const Vec& w, const SimplexPoint& x, double tol = 1e-9) {
    if (w.size() != x.dim()) throw DimensionMismatch("supported_in: dimension mismatch");
    for (std::size_t i = 0; i < w.size(); ++i)
        if (!x.in_support(i) && std::abs(w[i]) > tol) return false;
    return true;
}

// ── Euclidean projection onto the simplex ───────────────────────────────────

/// Closest simplex point to p in the Euclidean norm, by the classic
/// sort-and-threshold scheme: q_a = max(p_a + t, 0) with t chosen so the
/// result has unit mass. Idempotent on simplex points.
inline SimplexPoint euclid_project_simplex(const Vec& p,
                                           double support_tol = kDefaultSupportTol) {
    if (p.empty()) throw DimensionMismatch("euclid_project_simplex: empty input");
    if (!all_finite(p)) throw EvaluationFailure("euclid_project_simplex: non-finite input");
    Vec u = p;
    std::sort(u.begin(), u.end(), std::greater<double>());
    double cum = 0.0, t = 0.0;
    std::size_t rho = 0;
    for (std::size_t j = 0; j < u.size(); ++j) {
        cum += u[j];
        const double cand = (1.0 - cum) / static_cast<double>(j + 1);
        if (u[j] + cand > 0.0) {
            rho = j + 1;
            t = cand;
        }
    }
    (void)rho;
    Vec q(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) q[i] = std::max(p[i] + t, 0.0);
    return SimplexPoint(std::move(q), support_tol);
}

} // namespace geoflow
