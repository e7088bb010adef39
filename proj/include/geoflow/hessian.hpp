#pragma once

/*
 * hessian.hpp — convex potentials on the orthant and their machinery.
 *
 * A HessianPotential h generates a metric g = Hess h; the separable family
 *
 *     h_p(x) = sum_a theta_p(x_a),   theta_p(z) = z^{2-p} / ((p-1)(p-2)),
 *
 * covers the workhorses (theta'' = z^{-p}, i.e. weighting phi(z) = z^p):
 *
 *     p = 0 : quadratic  h = 1/2 sum x^2      (projection dynamics)
 *     p = 1 : entropy    h = sum x log x      (replicator dynamics)
 *     p = 2 : log-barrier h = -sum log x      (log-barrier dynamics)
 *
 * h is steep iff |dh| blows up toward the boundary, which for theta_p happens
 * exactly when p >= 1. For p >= 2, h itself is +inf on the boundary; the
 * Bregman divergence is therefore always summed over supp(x*), which leaves
 * interior values untouched and keeps boundary base points meaningful.
 *
 *   bregman    : D_h(x*, x) = sum_{a in supp(x*)} [theta(x*_a) - theta(x_a)
 *                                                  - theta'(x_a)(x*_a - x_a)]
 *   bregman_rate : d/dt D_h(x*, x(t)) = <xdot, x - x*>_x under g = Hess h
 *   choice_map : Q(y) = argmax_{x in simplex} { <y, x> - h(x) }, solved for
 *                separable h by x_a = (theta')^{-1}(y_a - lam) with the
 *                multiplier lam located by monotone bisection
 *   conjugate_value, legendre_hessian_check : orthant conjugate h* and the
 *                identity Hess h*(y) = (Hess h)^{-1} at Q(y)
 */

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>

#include "errors.hpp"
#include "numerics.hpp"
#include "simplex.hpp"

namespace geoflow {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// One-dimensional building block of a separable potential.
struct SeparableTheta {
    std::function<double(double)> theta;      // theta(z), may be +inf at z = 0
    std::function<double(double)> dtheta;     // theta'(z) on (0, inf)
    std::function<double(double)> ddtheta;    // theta''(z) > 0 on (0, inf)
    std::function<double(double)> dtheta_inv; // (theta')^{-1}, +inf outside range
};

struct HessianPotential {
    std::string name;
    bool steep = false;
    std::optional<double> p; // set for the monomial family
    std::optional<SeparableTheta> separable;

    std::function<double(const Vec&)> value_fn;
    std::function<Vec(const Vec&)> grad_fn;
    std::function<SymMatrix(const Vec&)> hess_fn;

    double value(const Vec& x) const { return value_fn(x); }
    Vec grad(const Vec& x) const { return grad_fn(x); }
    SymMatrix hess(const Vec& x) const { return hess_fn(x); }
};

// ── The p-replicator potential family ───────────────────────────────────────

/// theta_p and friends, with the closed forms at p = 0, 1, 2 and the generic
/// monomial branch elsewhere. The single analytic-continuation formula in
/// which linear terms are subtracted would produce the same metric; the
/// three-branch form keeps the values themselves simple.
inline HessianPotential potential_p(double p) {
    if (p < 0.0) throw DimensionMismatch("potential_p: p must be >= 0");
    SeparableTheta t;
    if (p == 0.0) {
        t.theta = [](double z) { return 0.5 * z * z; };
        t.dtheta = [](double z) { return z; };
        t.ddtheta = [](double) { return 1.0; };
        t.dtheta_inv = [](double u) { return u; };
    } else if (p == 1.0) {
        t.theta = [](double z) { return z > 0.0 ? z * std::log(z) : 0.0; };
        t.dtheta = [](double z) { return 1.0 + std::log(z); };
        t.ddtheta = [](double z) { return 1.0 / z; };
        t.dtheta_inv = [](double u) { return std::exp(std::min(u - 1.0, 700.0)); };
    } else if (p == 2.0) {
        t.theta = [](double z) { return z > 0.0 ? -std::log(z) : kInf; };
        t.dtheta = [](double z) { return -1.0 / z; };
        t.ddtheta = [](double z) { return 1.0 / (z * z); };
        t.dtheta_inv = [](double u) { return u < 0.0 ? -1.0 / u : kInf; };
    } else {
        const double c = 1.0 / ((p - 1.0) * (p - 2.0));
        t.theta = [c, p](double z) {
            if (z > 0.0) return c * std::pow(z, 2.0 - p);
            return p > 2.0 ? kInf : 0.0;
        };
        t.dtheta = [p](double z) { return std::pow(z, 1.0 - p) / (1.0 - p); };
        t.ddtheta = [p](double z) { return std::pow(z, -p); };
        t.dtheta_inv = [p](double u) {
            const double w = (1.0 - p) * u;
            if (w <= 0.0) return kInf; // outside the range of theta'
            return std::pow(w, 1.0 / (1.0 - p));
        };
    }

    HessianPotential h;
    h.name = p == 0.0 ? "quadratic" : p == 1.0 ? "entropy" : p == 2.0 ? "logarithmic" : "prep";
    h.steep = p >= 1.0;
    h.p = p;
    h.separable = t;
    h.value_fn = [t](const Vec& x) {
        double s = 0.0;
        for (double z : x) s += t.theta(z);
        return s;
    };
    h.grad_fn = [t](const Vec& x) {
        Vec g(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) g[i] = t.dtheta(x[i]);
        return g;
    };
    h.hess_fn = [t](const Vec& x) {
        Vec d(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) d[i] = t.ddtheta(x[i]);
        return SymMatrix::diagonal(d);
    };
    return h;
}

/// Separable potential from a weighting function phi via theta'' = 1/phi.
/// Only the second derivative matters for the metric; theta and theta' are
/// reconstructed by quadrature from the midpoint 1/2 so that Bregman values
/// stay evaluable.
inline HessianPotential potential_from_phi(std::function<double(double)> phi, bool steep,
                                           std::string name = "separable") {
    auto ddtheta = [phi](double z) { return 1.0 / phi(z); };
    // composite Simpson over [a, b]
    auto integrate = [](const std::function<double(double)>& f, double a, double b) {
        const int n = 200;
        const double h = (b - a) / n;
        double s = f(a) + f(b);
        for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
        return s * h / 3.0;
    };
    auto dtheta = [ddtheta, integrate](double z) { return integrate(ddtheta, 0.5, z); };
    auto theta = [dtheta, integrate](double z) { return integrate(dtheta, 0.5, z); };

    SeparableTheta t;
    t.theta = theta;
    t.dtheta = dtheta;
    t.ddtheta = ddtheta;
    t.dtheta_inv = {}; // located by bisection on dtheta when needed

    HessianPotential h;
    h.name = std::move(name);
    h.steep = steep;
    h.separable = t;
    h.value_fn = [t](const Vec& x) {
        double s = 0.0;
        for (double z : x) s += t.theta(z);
        return s;
    };
    h.grad_fn = [t](const Vec& x) {
        Vec g(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) g[i] = t.dtheta(x[i]);
        return g;
    };
    h.hess_fn = [t](const Vec& x) {
        Vec d(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) d[i] = t.ddtheta(x[i]);
        return SymMatrix::diagonal(d);
    };
    return h;
}

// ── Bregman divergence ──────────────────────────────────────────────────────

struct BregmanValue {
    SimplexPoint base;  // x*
    SimplexPoint state; // x
    double value;       // >= 0, possibly +inf
};

/// Bregman divergence with the summation restricted to supp(x*). Finite when
/// supp(x*) ⊆ supp(x); +inf (not an error) when a steep potential meets mass
/// of x* outside the support of x.
inline BregmanValue bregman(const HessianPotential& hp, const SimplexPoint& x_star,
                            const SimplexPoint& x) {
    if (x_star.dim() != x.dim()) throw DimensionMismatch("bregman: dimension mismatch");
    if (!hp.separable) {
        // generic potentials are only defined where everything is finite
        const Vec d = hp.grad(x.coords());
        const double v = hp.value(x_star.coords()) - hp.value(x.coords()) -
                         dot(d, sub(x_star.coords(), x.coords()));
        return {x_star, x, std::max(v, 0.0)};
    }
    const SeparableTheta& t = *hp.separable;
    double v = 0.0;
    for (std::size_t a = 0; a < x.dim(); ++a) {
        if (!x_star.in_support(a)) continue;
        if (x[a] <= 0.0 && hp.steep) return {x_star, x, kInf};
        v += t.theta(x_star[a]) - t.theta(x[a]) - t.dtheta(x[a]) * (x_star[a] - x[a]);
    }
    return {x_star, x, std::max(v, 0.0)};
}

/// d/dt D_h(x*, x(t)) = <xdot, x(t) - x*>_{x(t)} along constant-support
/// curves; sums run over supp(x), so xdot must not carry mass off-support.
inline double bregman_rate(const HessianPotential& hp, const SimplexPoint& x_star,
                           const SimplexPoint& x, const TangentVector& xdot) {
    if (x_star.dim() != x.dim() || xdot.dim() != x.dim())
        throw DimensionMismatch("bregman_rate: dimension mismatch");
    if (!supported_in(xdot.coords, x))
        throw OutsideDomain("bregman_rate: velocity has mass outside supp(x)");
    for (std::size_t a = 0; a < x.dim(); ++a)
        if (x_star.in_support(a) && !x.in_support(a))
            throw OutsideDomain("bregman_rate: supp(x*) not contained in supp(x)");

    if (hp.separable) {
        const SeparableTheta& t = *hp.separable;
        double s = 0.0;
        for (std::size_t a = 0; a < x.dim(); ++a) {
            if (!x.in_support(a)) continue;
            s += t.ddtheta(x[a]) * xdot[a] * (x[a] - x_star[a]);
        }
        return s;
    }
    const SymMatrix g = hp.hess(x.coords());
    return g.quad(xdot.coords, sub(x.coords(), x_star.coords()));
}

// ── Choice map and convex conjugate ─────────────────────────────────────────

namespace detail {

inline double theta_prime_inverse(const HessianPotential& hp, double u) {
    const SeparableTheta& t = *hp.separable;
    if (t.dtheta_inv) return t.dtheta_inv(u);
    // monotone bisection on theta' over z in (0, huge)
    double lo = 1e-16, hi = 1.0;
    while (t.dtheta(hi) < u && hi < 1e12) hi *= 2.0;
    if (t.dtheta(lo) > u) return lo;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (t.dtheta(mid) < u ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace detail

/// Q(y): the unique interior maximizer of <y, x> - h(x) over the simplex for
/// steep, strongly convex h. Separable potentials reduce to a monotone
/// one-dimensional multiplier search; the entropy case is the closed-form
/// logit map.
inline SimplexPoint choice_map(const HessianPotential& hp, const Covector& y) {
    if (!hp.steep)
        throw NonSteep("choice_map: nonsteep potential may have boundary maximizers");
    if (!hp.separable) throw NonSteep("choice_map: requires a separable potential");
    const std::size_t n = y.dim();
    if (n == 0) throw DimensionMismatch("choice_map: empty covector");

    if (hp.p && *hp.p == 1.0) {
        double ymax = -kInf;
        for (double v : y.coords) ymax = std::max(ymax, v);
        Vec x(n);
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = std::exp(y[i] - ymax);
            s += x[i];
        }
        for (double& v : x) v /= s;
        return SimplexPoint(std::move(x), 0.0);
    }

    const SeparableTheta& t = *hp.separable;
    double ymin = kInf, ymax = -kInf;
    for (double v : y.coords) {
        ymin = std::min(ymin, v);
        ymax = std::max(ymax, v);
    }
    // S(lam) = sum (theta')^{-1}(y_a - lam) is decreasing; the bracket pins
    // S(lo) >= n and S(hi) <= 1
    double lo = ymin - t.dtheta(1.0);
    double hi = ymax - t.dtheta(1.0 / static_cast<double>(n));
    auto mass = [&](double lam) {
        double s = 0.0;
        for (double v : y.coords) {
            const double z = detail::theta_prime_inverse(hp, v - lam);
            if (!std::isfinite(z)) return kInf;
            s += z;
        }
        return s;
    };
    double lam = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        lam = 0.5 * (lo + hi);
        const double m = mass(lam);
        if (std::abs(m - 1.0) <= 1e-12) break;
        (m > 1.0 ? lo : hi) = lam;
    }
    Vec x(n);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = detail::theta_prime_inverse(hp, y[i] - lam);
        s += x[i];
    }
    for (double& v : x) v /= s;
    return SimplexPoint(std::move(x), 0.0);
}

/// h*(y) over the simplex: <y, Q(y)> - h(Q(y)).
inline double conjugate_value(const HessianPotential& hp, const Covector& y) {
    const SimplexPoint q = choice_map(hp, y);
    return dot(y.coords, q.coords()) - hp.value(q.coords());
}

/// Frobenius deviation between the finite-difference Hessian of the orthant
/// conjugate (whose gradient is the componentwise map (theta')^{-1}) and
/// (Hess h)^{-1} at the orthant maximizer. Small values witness Legendre's
/// identity Hess h*(y) = Hess h(Q(y))^{-1}.
inline double legendre_hessian_check(const HessianPotential& hp, const Covector& y,
                                     double fd_step = 1e-5) {
    if (!hp.steep) throw NonSteep("legendre_hessian_check: steep potential required");
    if (!hp.separable) throw NonSteep("legendre_hessian_check: separable potential required");
    auto orthant_q = [&](const Vec& yy) {
        Vec x(yy.size());
        for (std::size_t i = 0; i < yy.size(); ++i) {
            x[i] = detail::theta_prime_inverse(hp, yy[i]);
            if (!std::isfinite(x[i]))
                throw EvaluationFailure("legendre_hessian_check: y outside the range of dh");
        }
        return x;
    };
    const Vec q = orthant_q(y.coords);
    const Matrix fd = finite_diff_jacobian(orthant_q, y.coords, fd_step);
    const SymMatrix inv = pseudoinverse(hp.hess(q));
    return (fd - inv.to_matrix()).frobenius();
}

/// Diagnostic: samples |dh| along boundary offsets 1e-1 ... 1e-8 and reports
/// whether the gradient grows without bound (the steepness signature).
inline bool verify_steepness(const HessianPotential& hp, std::size_t n = 3) {
    double first = 0.0, prev = 0.0, last = 0.0;
    for (int k = 1; k <= 8; ++k) {
        const double eps = std::pow(10.0, -k);
        Vec x(n, (1.0 - eps) / static_cast<double>(n - 1));
        x[0] = eps;
        const Vec g = hp.grad(x);
        last = norm_inf(g);
        if (k == 1) first = last;
        if (k > 1 && last < prev * 0.999) return false;
        prev = last;
    }
    return last > 5.0 * first;
}

} // namespace geoflow
