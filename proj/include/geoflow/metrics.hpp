#pragma once

/*
 * metrics.hpp — Riemannian metric fields on the simplex, represented through
 * the sharp tensor g#(x) (the inverse metric, which converts payoff
 * covectors into displacement vectors):
 *
 *   sharp         : omega#_a = sum_b g#_ab(x) omega_b
 *   normal_vector : n(x) = 1#, the metric normal to the simplex
 *   inner         : <w, w'>_x = w^T (g#(x))^+ w', defined at boundary points
 *                   through the pseudoinverse
 *
 * Boundary behavior is the load-bearing classification:
 *   minimal_rank : g#(x) vanishes off supp(x); the induced dynamics are
 *                  continuous and keep the support fixed (e.g. Shahshahani);
 *   full_rank    : g#(x) stays positive-definite everywhere; the induced
 *                  dynamics are discontinuous at faces (e.g. Euclidean).
 *
 * Separable metrics g#_ab = delta_ab phi(x_b) cover the named family:
 * phi(z) = z is Shahshahani/replicator, phi(z) = 1 Euclidean/projection,
 * phi(z) = z^p the p-replicator ladder, with p in (0,1) flagged
 * non-Lipschitz (uniqueness of boundary orbits is forfeited there).
 */

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "hessian.hpp"
#include "numerics.hpp"
#include "simplex.hpp"

namespace geoflow {

enum class Extendability { minimal_rank, full_rank, neither };

enum class MetricKind { euclidean, shahshahani, separable, prep, hessian, custom };

inline const char* to_string(Extendability e) {
    switch (e) {
        case Extendability::minimal_rank: return "minimal_rank";
        case Extendability::full_rank: return "full_rank";
        case Extendability::neither: return "neither";
    }
    return "?";
}

struct WeightFunction {
    std::function<double(double)> phi; // continuous on [0, inf), positive on (0, inf)
    bool vanishing_at_zero;
};

struct MetricField {
    std::size_t n = 0;
    MetricKind kind = MetricKind::custom;
    std::string name = "custom";
    Extendability extendability = Extendability::full_rank;
    bool lipschitz = true;
    std::optional<double> p;                   // p-replicator exponent
    std::optional<WeightFunction> weight;      // separable weighting function
    std::optional<HessianPotential> potential; // set when g = Hess h

    std::function<SymMatrix(const SimplexPoint&)> sharp_tensor;

    SymMatrix sharp_at(const SimplexPoint& x) const {
        if (x.dim() != n) throw DimensionMismatch("MetricField: state dimension mismatch");
        return sharp_tensor(x);
    }
};

// ── Constructors ────────────────────────────────────────────────────────────

inline MetricField separable_metric(WeightFunction w, std::size_t n,
                                    std::string name = "separable") {
    MetricField m;
    m.n = n;
    m.kind = MetricKind::separable;
    m.name = std::move(name);
    m.extendability =
        w.vanishing_at_zero ? Extendability::minimal_rank : Extendability::full_rank;
    m.weight = w;
    auto phi = w.phi;
    m.sharp_tensor = [phi, n](const SimplexPoint& x) {
        Vec d(n);
        for (std::size_t i = 0; i < n; ++i) d[i] = phi(x[i]);
        return SymMatrix::diagonal(d);
    };
    return m;
}

inline MetricField euclidean_metric(std::size_t n) {
    MetricField m = separable_metric({[](double) { return 1.0; }, false}, n, "euclidean");
    m.kind = MetricKind::euclidean;
    m.p = 0.0;
    m.potential = potential_p(0.0);
    return m;
}

inline MetricField shahshahani_metric(std::size_t n) {
    MetricField m = separable_metric({[](double z) { return z; }, true}, n, "shahshahani");
    m.kind = MetricKind::shahshahani;
    m.p = 1.0;
    m.potential = potential_p(1.0);
    return m;
}

/// The p-replicator metric, phi(z) = z^p. For p in (0, 1) the weighting
/// function is continuous but not Lipschitz at 0, and boundary orbits may
/// fail to be unique; the flag records this.
inline MetricField p_replicator_metric(double p, std::size_t n) {
    if (p < 0.0) throw DimensionMismatch("p_replicator_metric: p must be >= 0");
    if (p == 0.0) return euclidean_metric(n);
    if (p == 1.0) return shahshahani_metric(n);
    MetricField m = separable_metric({[p](double z) { return z > 0.0 ? std::pow(z, p) : 0.0; }, true},
                                     n, "prep");
    m.kind = MetricKind::prep;
    m.p = p;
    m.lipschitz = p >= 1.0;
    m.potential = potential_p(p);
    return m;
}

/// Metric g = Hess h for a separable Hessian potential; the sharp tensor is
/// diag(phi) with phi = 1/theta''. Whether phi vanishes at zero (and the
/// metric is minimal-rank) is determined by limit sampling, since steepness
/// of h and minimal-rank extendability of g can come apart.
inline MetricField metric_from_potential(const HessianPotential& hp, std::size_t n,
                                         std::string name = "") {
    if (!hp.separable)
        throw NonSteep("metric_from_potential: separable potential required");
    const SeparableTheta t = *hp.separable;
    auto phi = [t](double z) {
        if (z <= 0.0) return 0.0;
        const double dd = t.ddtheta(z);
        return std::isfinite(dd) ? 1.0 / dd : 0.0;
    };
    const bool vanishing = phi(1e-9) < 1e-2 * std::max(phi(0.5), 1e-30);
    MetricField m =
        separable_metric({phi, vanishing}, n, name.empty() ? hp.name : std::move(name));
    m.kind = MetricKind::hessian;
    m.p = hp.p;
    m.potential = hp;
    return m;
}

/// Arbitrary tensor field; the caller declares the extendability class.
inline MetricField custom_metric(std::size_t n,
                                 std::function<SymMatrix(const SimplexPoint&)> sharp,
                                 Extendability ext, std::string name = "custom") {
    MetricField m;
    m.n = n;
    m.kind = MetricKind::custom;
    m.name = std::move(name);
    m.extendability = ext;
    m.sharp_tensor = std::move(sharp);
    return m;
}

// ── Core operations ─────────────────────────────────────────────────────────

/// omega# = g#(x) omega^T. In the minimal-rank case the result automatically
/// lies in R^{supp(x)}.
inline Vec sharp(const MetricField& g, const SimplexPoint& x, const Covector& omega) {
    if (omega.dim() != g.n) throw DimensionMismatch("sharp: covector dimension mismatch");
    return g.sharp_at(x).apply(omega.coords);
}

/// n(x) = 1# (row sums of the sharp tensor).
inline Vec normal_vector(const MetricField& g, const SimplexPoint& x) {
    return g.sharp_at(x).apply(Vec(g.n, 1.0));
}

/// <w, w'>_x = w^T (g#(x))^+ w'. At minimal-rank boundary states both
/// arguments must lie in R^{supp(x)}; otherwise the scalar product does not
/// extend and OutsideDomain is thrown.
inline double inner(const MetricField& g, const SimplexPoint& x, const Vec& w, const Vec& w2) {
    if (w.size() != g.n || w2.size() != g.n)
        throw DimensionMismatch("inner: vector dimension mismatch");
    if (g.extendability == Extendability::minimal_rank && !x.is_interior()) {
        if (!supported_in(w, x) || !supported_in(w2, x))
            throw OutsideDomain("inner: argument has mass outside supp(x)");
    }
    const SymMatrix gs = g.sharp_at(x);
    // diagonal fast path (all separable metrics)
    bool diagonal = true;
    for (std::size_t i = 0; i < g.n && diagonal; ++i)
        for (std::size_t j = i + 1; j < g.n; ++j)
            if (gs(i, j) != 0.0) {
                diagonal = false;
                break;
            }
    if (diagonal) {
        // pseudoinverse of a diagonal tensor: null directions contribute zero
        double s = 0.0;
        for (std::size_t i = 0; i < g.n; ++i) {
            const double d = gs(i, i);
            if (d > 0.0) s += w[i] * w2[i] / d;
        }
        return s;
    }
    return pseudoinverse(gs).quad(w, w2);
}

inline double metric_norm(const MetricField& g, const SimplexPoint& x, const Vec& w) {
    return std::sqrt(std::max(inner(g, x, w, w), 0.0));
}

/// Correlation-style similarity rho_ab = g#_ab / sqrt(g#_aa g#_bb) in [-1, 1].
inline double similarity(const MetricField& g, const SimplexPoint& x, std::size_t a,
                         std::size_t b) {
    const SymMatrix gs = g.sharp_at(x);
    if (a >= g.n || b >= g.n) throw DimensionMismatch("similarity: index out of range");
    const double da = gs(a, a), db = gs(b, b);
    if (da <= 0.0 || db <= 0.0)
        throw ZeroSalience("similarity: vanishing salience on the diagonal");
    const double r = gs(a, b) / std::sqrt(da * db);
    return std::min(1.0, std::max(-1.0, r));
}

// ── Extendability classification (sampling diagnostic) ─────────────────────

/// Boundary probe states covering every face dimension: vertices, face
/// barycenters, and lopsided face points.
inline std::vector<SimplexPoint> default_probe_states(std::size_t n) {
    std::vector<SimplexPoint> probes;
    for (std::size_t k = 1; k < n; ++k) {
        // support {0..k-1} and a rotated copy
        for (std::size_t shift = 0; shift < std::min<std::size_t>(n, 2); ++shift) {
            Vec x(n, 0.0);
            for (std::size_t i = 0; i < k; ++i) x[(i + shift) % n] = 1.0 / static_cast<double>(k);
            probes.emplace_back(std::move(x));
            if (k >= 2) {
                Vec y(n, 0.0);
                y[shift % n] = 0.7;
                for (std::size_t i = 1; i < k; ++i)
                    y[(i + shift) % n] = 0.3 / static_cast<double>(k - 1);
                probes.emplace_back(std::move(y));
            }
        }
    }
    return probes;
}

/// Verdict by the rank structure of g# at boundary probes together with a
/// limit scan along interior approach sequences. This is a sampling check,
/// not a proof; built-in metrics carry their authoritative tag in the
/// descriptor. The approach offsets mix a geometric ladder with points of
/// the form 1/(j*pi) to catch oscillatory weighting functions.
inline Extendability classify_extendability(const MetricField& g,
                                            const std::vector<SimplexPoint>& probes) {
    const std::size_t n = g.n;
    bool all_minimal = true, all_full = true;

    std::vector<double> offsets;
    for (int k = 1; k <= 7; ++k) offsets.push_back(std::pow(10.0, -k));
    for (double j = 10.0; j <= 1e7; j *= 10.0) offsets.push_back(1.0 / (j * M_PI));

    for (const auto& x : probes) {
        const auto supp = x.support();
        if (supp.size() == n) continue; // interior probe: no boundary information

        const SymMatrix gs = g.sharp_at(x);
        double off_block = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (!x.in_support(i) || !x.in_support(j))
                    off_block = std::max(off_block, std::abs(gs(i, j)));
        EigenDecomp d = eig_sym(gs);
        const double lmax = std::max(std::abs(d.eigenvalues.front()),
                                     std::abs(d.eigenvalues.back()));
        std::size_t rank = 0;
        for (double l : d.eigenvalues)
            if (std::abs(l) > 1e-10 * std::max(lmax, 1e-30)) ++rank;
        const double lmin = d.eigenvalues.front();

        const bool minimal_at = off_block < 1e-8 && rank == supp.size();
        const bool full_at = rank == n && lmin > 1e-12;

        // interior approach x_s: off-support coordinates set to s
        bool decays = true, stays_pd = true;
        double prev_off = kInf;
        const double largest = offsets.front();
        double first_off = 0.0, last_off = 0.0;
        bool first_set = false;
        for (double s : offsets) {
            if (s * static_cast<double>(n - supp.size()) > 0.5) continue;
            Vec xs = x.coords();
            double mass_added = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                if (!x.in_support(i)) {
                    xs[i] = s;
                    mass_added += s;
                }
            for (std::size_t i = 0; i < n; ++i)
                if (x.in_support(i)) xs[i] *= (1.0 - mass_added);
            SymMatrix gi = g.sharp_at(SimplexPoint(std::move(xs), 0.0));
            double ob = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    if (!x.in_support(i) || !x.in_support(j))
                        ob = std::max(ob, std::abs(gi(i, j)));
            if (!first_set) {
                first_off = ob;
                first_set = true;
            }
            last_off = ob;
            if (ob > prev_off * 1.25) decays = false; // oscillation upward
            prev_off = ob;
            EigenDecomp di = eig_sym(gi);
            if (di.eigenvalues.front() < 1e-9) stays_pd = false;
        }
        (void)largest;
        const bool off_decays =
            decays && first_set && (last_off < 0.5 * std::max(first_off, 1e-30) || first_off < 1e-12);

        if (!(minimal_at && off_decays)) all_minimal = false;
        if (!(full_at && stays_pd)) all_full = false;
    }
    if (all_minimal) return Extendability::minimal_rank;
    if (all_full) return Extendability::full_rank;
    return Extendability::neither;
}

inline Extendability classify_extendability(const MetricField& g) {
    return classify_extendability(g, default_probe_states(g.n));
}

} // namespace geoflow
