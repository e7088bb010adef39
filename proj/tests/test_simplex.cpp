#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "geoflow/simplex.hpp"

using namespace geoflow;

namespace {

// Independent oracle: exhaustive active-set enumeration of the Euclidean
// projection onto the simplex. For each candidate support S, the minimizer
// over the affine slice is p_S + (1 - sum p_S)/|S|; keep nonnegative
// candidates and take the closest.
Vec brute_force_simplex_projection(const Vec& p) {
    const std::size_t n = p.size();
    Vec best;
    double best_d = std::numeric_limits<double>::infinity();
    for (unsigned mask = 1; mask < (1u << n); ++mask) {
        double s = 0.0;
        int k = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (mask & (1u << i)) {
                s += p[i];
                ++k;
            }
        const double shift = (1.0 - s) / k;
        Vec q(n, 0.0);
        bool ok = true;
        for (std::size_t i = 0; i < n; ++i)
            if (mask & (1u << i)) {
                q[i] = p[i] + shift;
                if (q[i] < -1e-12) ok = false;
            }
        if (!ok) continue;
        double d = 0.0;
        for (std::size_t i = 0; i < n; ++i) d += (q[i] - p[i]) * (q[i] - p[i]);
        if (d < best_d) {
            best_d = d;
            best = q;
        }
    }
    return best;
}

Vec random_zero_sum(std::size_t n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Vec z(n);
    for (double& v : z) v = u(rng);
    const double mean = sum(z) / static_cast<double>(n);
    for (double& v : z) v -= mean;
    return z;
}

} // namespace

TEST_CASE("SimplexPoint validates, snaps, and tracks support") {
    SimplexPoint x({0.5, 0.25, 0.25});
    CHECK(x.is_interior());
    CHECK(x.support().size() == 3);

    SimplexPoint y({0.5, 0.5, 1e-15});
    CHECK(y[2] == 0.0);
    CHECK(y.support() == std::vector<std::size_t>{0, 1});
    CHECK(y.support_mask() == 0b011u);

    CHECK_THROWS_AS(SimplexPoint({0.5, 0.6, -0.1}), OutsideDomain);
    CHECK_THROWS_AS(SimplexPoint({0.2, 0.2, 0.2}), OutsideDomain);
}

TEST_CASE("snap-and-renormalize moves no coordinate by more than n * support_tol") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double tol = 1e-9;
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + static_cast<std::size_t>(trial % 5);
        Vec raw(n);
        for (double& v : raw) v = u(rng) < 0.3 ? 0.3 * tol * u(rng) : u(rng);
        const double s = sum(raw);
        for (double& v : raw) v /= s;
        SimplexPoint x(raw, tol);
        for (std::size_t i = 0; i < n; ++i)
            CHECK(std::abs(x[i] - raw[i]) <= static_cast<double>(n) * tol);
    }
}

TEST_CASE("tangent cone membership") {
    SimplexPoint interior = SimplexPoint::barycenter(3);
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        TangentVector z(random_zero_sum(3, rng));
        CHECK(in_tangent_cone(interior, z));
    }

    SimplexPoint edge({0.0, 0.5, 0.5});
    CHECK(in_tangent_cone(edge, TangentVector({1.0, -1.0, 0.0})));
    CHECK_FALSE(in_tangent_cone(edge, TangentVector({-1.0, 1.0, 0.0})));
    CHECK_FALSE(in_tangent_cone(edge, TangentVector({0.5, 0.5, 0.0}))); // not zero-sum
    CHECK_THROWS_AS(in_tangent_cone(edge, TangentVector({1.0, -1.0})), DimensionMismatch);
}

TEST_CASE("tangent space membership") {
    SimplexPoint interior = SimplexPoint::barycenter(3);
    CHECK(in_tangent_space(interior, TangentVector({0.2, -0.1, -0.1})));

    SimplexPoint edge({0.0, 0.5, 0.5});
    CHECK(in_tangent_space(edge, TangentVector({0.0, 1.0, -1.0})));
    CHECK_FALSE(in_tangent_space(edge, TangentVector({1.0, -1.0, 0.0})));
}

TEST_CASE("tangent space is contained in the tangent cone") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 2 + static_cast<std::size_t>(trial % 5);
        Vec raw(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) raw[i] = u(rng) < 0.4 ? 0.0 : u(rng) + 0.05;
        if (sum(raw) <= 0.0) raw[trial % n] = 1.0;
        const double s = sum(raw);
        for (double& v : raw) v /= s;
        SimplexPoint x(raw);
        TangentVector z(random_zero_sum(n, rng));
        if (in_tangent_space(x, z)) CHECK(in_tangent_cone(x, z));
        // z restricted to the support is always in the tangent space
        Vec zr = z.coords;
        for (std::size_t i = 0; i < n; ++i)
            if (!x.in_support(i)) zr[i] = 0.0;
        const double mean = sum(zr) / static_cast<double>(x.support().size());
        for (std::size_t i = 0; i < n; ++i)
            if (x.in_support(i)) zr[i] -= mean;
        CHECK(in_tangent_space(x, TangentVector(zr)));
    }
}

TEST_CASE("euclid_project_simplex worked examples") {
    Vec already = {1.0 / 3, 1.0 / 3, 1.0 / 3};
    auto p0 = euclid_project_simplex(already);
    CHECK(norm_inf(sub(p0.coords(), already)) < 1e-14);

    auto p1 = euclid_project_simplex({1.2, 0.0, -0.2});
    CHECK(p1[0] == Catch::Approx(1.0).margin(1e-12));
    CHECK(p1[1] == Catch::Approx(0.0).margin(1e-12));
    CHECK(p1[2] == Catch::Approx(0.0).margin(1e-12));

    auto p2 = euclid_project_simplex({0.6, 0.6, 0.0});
    CHECK(p2[0] == Catch::Approx(0.5));
    CHECK(p2[1] == Catch::Approx(0.5));
    CHECK(p2[2] == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("euclid_project_simplex agrees with active-set enumeration") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 2 + static_cast<std::size_t>(trial % 5);
        Vec p(n);
        for (double& v : p) v = u(rng);
        Vec expected = brute_force_simplex_projection(p);
        auto got = euclid_project_simplex(p);
        CHECK(norm_inf(sub(got.coords(), expected)) < 1e-10);
    }
}

TEST_CASE("euclid_project_simplex is idempotent") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int trial = 0; trial < 100; ++trial) {
        Vec p(4);
        for (double& v : p) v = u(rng);
        auto q = euclid_project_simplex(p);
        auto q2 = euclid_project_simplex(q.coords());
        CHECK(norm_inf(sub(q.coords(), q2.coords())) < 1e-12);
    }
}
