#pragma once

/*
 * games.hpp — population games.
 *
 * A population game is a payoff covector map x -> v(x) on the simplex,
 * optionally tagged with structure that enables exact analysis:
 *
 *   MatchingMatrix : v(x) = A x (uniform random matching), which makes
 *                    contractivity classification, equilibrium enumeration,
 *                    and dominance checks exact;
 *   PotentialSpec  : a scalar f with df = v, the Lyapunov function of
 *                    gradient-like dynamics.
 *
 * Classification of the bilinear form  <v(x') - v(x), x' - x>:
 *   <= 0 everywhere        -> contractive
 *   <  0 off the diagonal  -> strictly contractive
 *   == 0 everywhere        -> conservative (e.g. symmetric zero-sum matching)
 *
 * Equilibrium enumeration walks all supports S, solving the equal-payoff /
 * unit-mass linear system on each; singular-but-consistent systems are
 * reported as continuum flags rather than invented representatives.
 */

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "errors.hpp"
#include "numerics.hpp"
#include "simplex.hpp"

namespace geoflow {

struct PotentialSpec {
    std::function<double(const Vec&)> f;
    std::function<Vec(const Vec&)> df;
};

class PopulationGame {
  public:
    PopulationGame(std::size_t n, std::function<Covector(const SimplexPoint&)> payoff,
                   std::string name = "custom")
        : n_(n), payoff_(std::move(payoff)), name_(std::move(name)) {}

    /// Uniform random matching in a symmetric normal-form game: v(x) = A x.
    static PopulationGame matching(Matrix a, std::string name = "matching") {
        if (a.rows() != a.cols()) throw DimensionMismatch("matching: matrix must be square");
        const std::size_t n = a.rows();
        PopulationGame g(
            n, [a](const SimplexPoint& x) { return Covector(a.apply(x.coords())); },
            std::move(name));
        g.matching_ = a;
        bool symmetric = true;
        for (std::size_t i = 0; i < n && symmetric; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (std::abs(a(i, j) - a(j, i)) > 1e-12) {
                    symmetric = false;
                    break;
                }
        if (symmetric) g.attach_quadratic_potential();
        return g;
    }

    std::size_t size() const { return n_; }
    const std::string& name() const { return name_; }
    const std::optional<Matrix>& matching_matrix() const { return matching_; }
    const std::optional<PotentialSpec>& potential() const { return potential_; }

    void set_potential(PotentialSpec p) { potential_ = std::move(p); }

    Covector payoff(const SimplexPoint& x) const {
        if (x.dim() != n_) throw DimensionMismatch("payoff: state dimension mismatch");
        Covector v = payoff_(x);
        if (v.dim() != n_ || !all_finite(v.coords))
            throw EvaluationFailure("payoff: map returned an invalid covector");
        return v;
    }

    /// Payoff at a raw (not necessarily feasible) point; used by potential
    /// finite-difference checks which step slightly off the simplex.
    Covector payoff_raw(const Vec& x) const {
        if (matching_) return Covector(matching_->apply(x));
        return payoff_(SimplexPoint(x));
    }

  private:
    void attach_quadratic_potential() {
        const Matrix a = *matching_;
        potential_ = PotentialSpec{
            [a](const Vec& x) { return 0.5 * dot(x, a.apply(x)); },
            [a](const Vec& x) { return a.apply(x); },
        };
    }

    std::size_t n_;
    std::function<Covector(const SimplexPoint&)> payoff_;
    std::string name_;
    std::optional<Matrix> matching_;
    std::optional<PotentialSpec> potential_;
};

// ── Built-in game library ───────────────────────────────────────────────────

namespace games {

/// Standard Rock-Paper-Scissors: wins +1, losses -1. Conservative.
inline PopulationGame rps() {
    return PopulationGame::matching(
        Matrix::from_rows({{0, -1, 1}, {1, 0, -1}, {-1, 1, 0}}), "rps");
}

/// RPS with wins worth 2 and losses worth -1: the permanence-condition
/// example (matrix [[0,-1,2],[2,0,-1],[-1,2,0]]).
inline PopulationGame rps_good() {
    return PopulationGame::matching(
        Matrix::from_rows({{0, -1, 2}, {2, 0, -1}, {-1, 2, 0}}), "rps_good");
}

/// RPS extended with a fourth strategy that clones strategy 1 minus 0.1,
/// strictly dominated with a uniform payoff gap of 0.1.
inline PopulationGame rps_dominated() {
    return PopulationGame::matching(Matrix::from_rows({{0, -1, 1, 0},
                                                       {1, 0, -1, 1},
                                                       {-1, 1, 0, -1},
                                                       {-0.1, -1.1, 0.9, -0.1}}),
                                    "rps_dominated");
}

/// Two-strategy toy game with constant payoffs v = (1, 0); the closed-form
/// integration oracle of the test-suite.
inline PopulationGame toy() {
    PopulationGame g = PopulationGame::matching(Matrix::from_rows({{1, 1}, {0, 0}}), "toy");
    g.set_potential(PotentialSpec{[](const Vec& x) { return x[0]; },
                                  [](const Vec& x) {
                                      (void)x;
                                      return Vec{1.0, 0.0};
                                  }});
    return g;
}

/// Pure coordination, A = I: a potential game with f(x) = |x|^2 / 2.
inline PopulationGame coordination(std::size_t n = 3) {
    return PopulationGame::matching(Matrix::identity(n), "coordination");
}

/// Anticoordination, A = -I: strictly contractive with a GESS at the
/// barycenter.
inline PopulationGame anticoordination(std::size_t n = 3) {
    Matrix a(n, n);
    for (std::size_t i = 0; i < n; ++i) a(i, i) = -1.0;
    return PopulationGame::matching(a, "anticoordination");
}

inline PopulationGame by_name(const std::string& name, std::size_t n = 3) {
    if (name == "rps") return rps();
    if (name == "rps_good") return rps_good();
    if (name == "rps_dominated") return rps_dominated();
    if (name == "toy") return toy();
    if (name == "coordination") return coordination(n);
    if (name == "anticoordination") return anticoordination(n);
    throw EvaluationFailure("unknown builtin game: " + name);
}

} // namespace games

// ── Contractivity classification ────────────────────────────────────────────

enum class Contractivity { strictly_contractive, contractive, conservative, none };

struct ContractivityVerdict {
    Contractivity cls;
    bool exact; // true for matching games (eigenvalue test), false for Monte-Carlo
};

inline const char* to_string(Contractivity c) {
    switch (c) {
        case Contractivity::strictly_contractive: return "strictly_contractive";
        case Contractivity::contractive: return "contractive";
        case Contractivity::conservative: return "conservative";
        case Contractivity::none: return "none";
    }
    return "?";
}

namespace detail {

inline SimplexPoint random_simplex_point(std::size_t n, std::mt19937_64& rng) {
    std::exponential_distribution<double> e(1.0);
    Vec x(n);
    double s = 0.0;
    for (double& v : x) {
        v = e(rng) + 1e-12;
        s += v;
    }
    for (double& v : x) v /= s;
    return SimplexPoint(std::move(x));
}

} // namespace detail

/// For matching games the verdict is exact: the bilinear form restricted to
/// zero-sum displacements is governed by the eigenvalues of Phi S Phi with
/// S = (A + A^T)/2. Black-box games get a Monte-Carlo verdict with a caveat
/// flag (`exact == false`).
inline ContractivityVerdict classify_contractive(const PopulationGame& game, int samples,
                                                 double tol = 1e-10, std::uint64_t seed = 0) {
    if (samples < 1) throw DimensionMismatch("classify_contractive: samples must be >= 1");
    const std::size_t n = game.size();
    if (game.matching_matrix()) {
        const Matrix& a = *game.matching_matrix();
        SymMatrix s(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) s(i, j) = 0.5 * (a(i, j) + a(j, i));
        const Matrix phi = zero_sum_projector(n).to_matrix();
        SymMatrix restricted =
            SymMatrix::from_matrix(phi.mul(s.to_matrix()).mul(phi), 1e-8);
        EigenDecomp d = eig_sym(restricted);
        // One eigenvalue (the ones direction) is structurally zero; the
        // remaining n-1 govern the form on zero-sum vectors.
        Vec evs = d.eigenvalues;
        // drop the eigenvalue whose eigenvector is closest to 1/sqrt(n) * ones
        std::size_t ones_idx = 0;
        double best = -1.0;
        for (std::size_t k = 0; k < n; ++k) {
            double proj = 0.0;
            for (std::size_t i = 0; i < n; ++i) proj += d.eigenvectors(i, k);
            proj = std::abs(proj) / std::sqrt(static_cast<double>(n));
            if (proj > best) {
                best = proj;
                ones_idx = k;
            }
        }
        double lo = 0.0, hi = 0.0;
        bool first = true;
        for (std::size_t k = 0; k < n; ++k) {
            if (k == ones_idx) continue;
            lo = first ? evs[k] : std::min(lo, evs[k]);
            hi = first ? evs[k] : std::max(hi, evs[k]);
            first = false;
        }
        if (first) return {Contractivity::conservative, true}; // n == 1
        const double scale = std::max(1.0, a.max_abs());
        if (std::abs(lo) <= tol * scale && std::abs(hi) <= tol * scale)
            return {Contractivity::conservative, true};
        if (hi > tol * scale) return {Contractivity::none, true};
        if (hi < -tol * scale) return {Contractivity::strictly_contractive, true};
        return {Contractivity::contractive, true};
    }

    // black-box: sample pairs
    std::mt19937_64 rng(seed);
    double lo = 0.0, hi = 0.0;
    for (int t = 0; t < samples; ++t) {
        SimplexPoint x = detail::random_simplex_point(n, rng);
        SimplexPoint y = detail::random_simplex_point(n, rng);
        const Vec dv = sub(game.payoff(y).coords, game.payoff(x).coords);
        const Vec dx = sub(y.coords(), x.coords());
        const double b = dot(dv, dx);
        lo = std::min(lo, b);
        hi = std::max(hi, b);
    }
    if (std::abs(lo) <= tol && std::abs(hi) <= tol) return {Contractivity::conservative, false};
    if (hi > tol) return {Contractivity::none, false};
    if (hi < -tol) return {Contractivity::strictly_contractive, false};
    return {Contractivity::contractive, false};
}

// ── Equilibrium enumeration ─────────────────────────────────────────────────

struct EquilibriumSet {
    std::vector<SimplexPoint> points;
    /// Supports on which the equal-payoff system is singular but consistent:
    /// a continuum of candidates exists and no representative is invented.
    std::vector<std::vector<std::size_t>> degenerate_supports;

    bool contains(const SimplexPoint& x, double tol = 1e-7) const {
        for (const auto& p : points)
            if (norm_inf(sub(p.coords(), x.coords())) < tol) return true;
        return false;
    }
};

namespace detail {

/// Solves, on the support S: equal payoffs across S and unit mass, i.e. the
/// |S| x |S| system {(A x)_a - (A x)_b = 0 for consecutive a,b in S;
/// sum_S x = 1} with x = 0 off S.
inline LinearSolveResult equal_payoff_system(const Matrix& a,
                                             const std::vector<std::size_t>& s) {
    const std::size_t k = s.size();
    Matrix m(k, k);
    Vec rhs(k, 0.0);
    for (std::size_t r = 0; r + 1 < k; ++r)
        for (std::size_t c = 0; c < k; ++c)
            m(r, c) = a(s[r], s[c]) - a(s[r + 1], s[c]);
    for (std::size_t c = 0; c < k; ++c) m(k - 1, c) = 1.0;
    rhs[k - 1] = 1.0;
    return solve_linear(m, rhs);
}

inline void push_unique(std::vector<SimplexPoint>& pts, SimplexPoint p, double tol = 1e-8) {
    for (const auto& q : pts)
        if (norm_inf(sub(q.coords(), p.coords())) < tol) return;
    pts.push_back(std::move(p));
}

} // namespace detail

/// All restricted equilibria of a matching game (states at which every
/// strategy in the support earns the same payoff) with rational-support
/// representatives; no deviation check.
inline EquilibriumSet enumerate_restricted_equilibria(const PopulationGame& game,
                                                      double tol = 1e-9) {
    if (!game.matching_matrix())
        throw EnumerationImpossible("enumerate_restricted_equilibria: matching game required");
    const std::size_t n = game.size();
    if (n > 12) throw DimensionalityLimit("enumerate_restricted_equilibria: n > 12");
    const Matrix& a = *game.matching_matrix();

    EquilibriumSet out;
    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
        std::vector<std::size_t> s;
        for (std::size_t i = 0; i < n; ++i)
            if (mask & (1u << i)) s.push_back(i);
        if (s.size() == 1) {
            detail::push_unique(out.points, SimplexPoint::vertex(n, s[0]));
            continue;
        }
        auto r = detail::equal_payoff_system(a, s);
        if (r.status == SolveStatus::inconsistent) continue;
        if (r.status == SolveStatus::continuum) {
            out.degenerate_supports.push_back(s);
            continue;
        }
        bool feasible = true;
        Vec x(n, 0.0);
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (r.solution[i] < -tol) {
                feasible = false;
                break;
            }
            x[s[i]] = std::max(r.solution[i], 0.0);
        }
        // interior of the face only: zero coordinates inside S would
        // duplicate a smaller support's solution
        for (std::size_t i = 0; i < s.size() && feasible; ++i)
            if (x[s[i]] <= tol) feasible = false;
        if (!feasible) continue;
        detail::push_unique(out.points, SimplexPoint(std::move(x)));
    }
    return out;
}

/// Nash equilibria: restricted equilibria passing the no-profitable-deviation
/// test v_b(x) <= v_supp(x) for strategies outside the support.
inline EquilibriumSet enumerate_nash(const PopulationGame& game, double tol = 1e-9) {
    EquilibriumSet restricted = enumerate_restricted_equilibria(game, tol);
    EquilibriumSet out;
    out.degenerate_supports = restricted.degenerate_supports;
    for (const auto& x : restricted.points) {
        const Covector v = game.payoff(x);
        double in_support_payoff = 0.0;
        bool have = false;
        for (std::size_t i = 0; i < x.dim(); ++i)
            if (x.in_support(i)) {
                in_support_payoff = v[i];
                have = true;
                break;
            }
        if (!have) continue;
        bool nash = true;
        for (std::size_t b = 0; b < x.dim(); ++b)
            if (v[b] > in_support_payoff + std::max(tol, 1e-9)) {
                nash = false;
                break;
            }
        if (nash) out.points.push_back(x);
    }
    return out;
}

// ── Stability and dominance structure ───────────────────────────────────────

/// Checks the global evolutionary stability inequality
/// <v(x), x - x*> <= -margin |x - x*|^2 over sampled states. Exact for
/// matching games whose symmetric part is negative definite on zero-sum
/// displacements (then x* must simply be Nash).
inline bool is_gess(const PopulationGame& game, const SimplexPoint& x_star, int samples,
                    std::uint64_t seed = 0) {
    const std::size_t n = game.size();
    if (x_star.dim() != n) throw DimensionMismatch("is_gess: dimension mismatch");

    // a GESS must satisfy the Nash variational inequality at x* itself
    const Covector v_star = game.payoff(x_star);
    for (std::size_t b = 0; b < n; ++b) {
        const Vec d = sub(SimplexPoint::vertex(n, b).coords(), x_star.coords());
        if (dot(v_star.coords, d) > 1e-9) return false;
    }

    if (game.matching_matrix()) {
        auto verdict = classify_contractive(game, 1);
        if (verdict.cls == Contractivity::strictly_contractive) return true;
    }

    std::mt19937_64 rng(seed);
    for (int t = 0; t < samples; ++t) {
        SimplexPoint x = detail::random_simplex_point(n, rng);
        const Vec d = sub(x.coords(), x_star.coords());
        const double r2 = dot(d, d);
        if (r2 < 1e-12) continue;
        if (dot(game.payoff(x).coords, d) > -1e-9 * r2) return false;
    }
    return true;
}

/// Pairs (dominated, dominator): alpha strictly dominated by beta when
/// v_alpha < v_beta everywhere; by linearity this reduces to a vertex check
/// min_g (A_bg - A_ag) > tol.
inline std::vector<std::pair<std::size_t, std::size_t>> dominated_pairs(
    const PopulationGame& game, double tol = 1e-12) {
    if (!game.matching_matrix())
        throw EnumerationImpossible("dominated_pairs: matching game required");
    const Matrix& a = *game.matching_matrix();
    const std::size_t n = game.size();
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t alpha = 0; alpha < n; ++alpha)
        for (std::size_t beta = 0; beta < n; ++beta) {
            if (alpha == beta) continue;
            double gap = std::numeric_limits<double>::infinity();
            for (std::size_t g = 0; g < n; ++g) gap = std::min(gap, a(beta, g) - a(alpha, g));
            if (gap > tol) out.emplace_back(alpha, beta);
        }
    return out;
}

} // namespace geoflow
