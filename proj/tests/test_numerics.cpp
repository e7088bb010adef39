#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "geoflow/numerics.hpp"

using namespace geoflow;

namespace {

SymMatrix random_symmetric(std::size_t n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    SymMatrix m(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) m.set(i, j, u(rng));
    return m;
}

SymMatrix random_spd(std::size_t n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Matrix b(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) b(i, j) = u(rng);
    Matrix m = b.mul(b.transposed());
    SymMatrix s(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) s(i, j) = m(i, j);
        s(i, i) += 0.1 + 0.01 * static_cast<double>(n);
    }
    return s;
}

double reconstruction_error(const SymMatrix& m, const EigenDecomp& d) {
    const std::size_t n = m.dim();
    Matrix rec(n, n);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                rec(i, j) += d.eigenvalues[k] * d.eigenvectors(i, k) * d.eigenvectors(j, k);
    return (rec - m.to_matrix()).frobenius() / std::max(m.frobenius(), 1e-30);
}

} // namespace

TEST_CASE("eig_sym handles identity and diagonal matrices") {
    auto d = eig_sym(SymMatrix::identity(3));
    for (double l : d.eigenvalues) CHECK(l == Catch::Approx(1.0).margin(1e-12));

    auto d2 = eig_sym(SymMatrix::diagonal({2.0, 0.0, 5.0}));
    CHECK(d2.eigenvalues[0] == Catch::Approx(0.0).margin(1e-12));
    CHECK(d2.eigenvalues[1] == Catch::Approx(2.0).margin(1e-12));
    CHECK(d2.eigenvalues[2] == Catch::Approx(5.0).margin(1e-12));
}

TEST_CASE("eig_sym of the zero-sum projector has eigenvalues (0,1,1)") {
    auto d = eig_sym(zero_sum_projector(3));
    CHECK(d.eigenvalues[0] == Catch::Approx(0.0).margin(1e-12));
    CHECK(d.eigenvalues[1] == Catch::Approx(1.0).margin(1e-12));
    CHECK(d.eigenvalues[2] == Catch::Approx(1.0).margin(1e-12));
    // the kernel direction is the ones vector
    Vec kernel = {d.eigenvectors(0, 0), d.eigenvectors(1, 0), d.eigenvectors(2, 0)};
    CHECK(std::abs(kernel[0] - kernel[1]) < 1e-10);
    CHECK(std::abs(kernel[1] - kernel[2]) < 1e-10);
}

TEST_CASE("eig_sym reconstructs and orthonormalizes on random symmetric input") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 2 + static_cast<std::size_t>(trial % 7);
        SymMatrix m = random_symmetric(n, rng);
        auto d = eig_sym(m);
        CHECK(reconstruction_error(m, d) < 1e-9);
        for (std::size_t i = 0; i + 1 < n; ++i) CHECK(d.eigenvalues[i] <= d.eigenvalues[i + 1]);
        Matrix qtq = d.eigenvectors.transposed().mul(d.eigenvectors);
        CHECK((qtq - Matrix::identity(n)).max_abs() < 1e-10);
    }
}

TEST_CASE("eig_sym of an SPD matrix yields positive eigenvalues") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        auto d = eig_sym(random_spd(4, rng));
        for (double l : d.eigenvalues) CHECK(l > 0.0);
    }
}

TEST_CASE("eig_sym rejects visibly asymmetric input") {
    SymMatrix m(2);
    m(0, 1) = 1.0;
    m(1, 0) = 0.0;
    CHECK_THROWS_AS(eig_sym(m), NonSymmetric);
}

TEST_CASE("pseudoinverse on the worked examples") {
    auto id = pseudoinverse(SymMatrix::identity(3));
    CHECK((id - SymMatrix::identity(3)).frobenius() < 1e-12);

    // Phi is symmetric idempotent, hence its own pseudoinverse.
    auto phi = zero_sum_projector(3);
    CHECK((pseudoinverse(phi) - phi).frobenius() < 1e-12);

    auto d = pseudoinverse(SymMatrix::diagonal({2.0, 0.0, 5.0}));
    CHECK(d(0, 0) == Catch::Approx(0.5).margin(1e-12));
    CHECK(d(1, 1) == Catch::Approx(0.0).margin(1e-12));
    CHECK(d(2, 2) == Catch::Approx(0.2).margin(1e-12));
}

TEST_CASE("pseudoinverse satisfies the Penrose identities and involutes") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n = 2 + static_cast<std::size_t>(trial % 5);
        SymMatrix m = random_symmetric(n, rng);
        SymMatrix p = pseudoinverse(m);
        Matrix mm = m.to_matrix(), pp = p.to_matrix();
        CHECK((mm.mul(pp).mul(mm) - mm).frobenius() < 1e-9 * std::max(1.0, mm.frobenius()));
        CHECK((pp.mul(mm).mul(pp) - pp).frobenius() < 1e-9 * std::max(1.0, pp.frobenius()));
        CHECK(p.max_abs_asymmetry() < 1e-9);
        CHECK((pseudoinverse(p) - m).frobenius() < 1e-8 * std::max(1.0, m.frobenius()));
    }
    SymMatrix zero(3);
    CHECK(pseudoinverse(zero).frobenius() == 0.0);
}

TEST_CASE("(Phi H Phi)^+ is a Hopkins matrix for SPD H") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 25; ++trial) {
        const std::size_t n = 2 + static_cast<std::size_t>(trial % 5);
        SymMatrix h = random_spd(n, rng);
        SymMatrix phi = zero_sum_projector(n);
        Matrix php = phi.to_matrix().mul(h.to_matrix()).mul(phi.to_matrix());
        SymMatrix m = pseudoinverse(SymMatrix::from_matrix(php, 1e-8));

        Vec ones(n, 1.0);
        CHECK(norm_inf(m.apply(ones)) < 1e-9);

        Vec z(n);
        for (std::size_t i = 0; i < n; ++i) z[i] = u(rng);
        const double mean = sum(z) / static_cast<double>(n);
        for (double& v : z) v -= mean;
        if (norm2(z) > 1e-6) CHECK(m.quad(z, z) > 0.0);
    }
}

TEST_CASE("zero_sum_projector worked examples") {
    auto p1 = zero_sum_projector(1);
    CHECK(p1(0, 0) == Catch::Approx(0.0).margin(1e-15));

    auto p2 = zero_sum_projector(2);
    CHECK(p2(0, 0) == Catch::Approx(0.5));
    CHECK(p2(0, 1) == Catch::Approx(-0.5));
    CHECK(p2(1, 1) == Catch::Approx(0.5));

    auto p3 = zero_sum_projector(3);
    Vec z = {1.0, -1.0, 0.0};
    CHECK(norm_inf(sub(p3.apply(z), z)) < 1e-14);
    Vec ones(3, 1.0);
    CHECK(norm_inf(p3.apply(ones)) < 1e-14);
    Matrix sq = p3.to_matrix().mul(p3.to_matrix());
    CHECK((sq - p3.to_matrix()).max_abs() < 1e-14);
}

TEST_CASE("finite_diff_jacobian on identity, square, and entropy gradient") {
    auto ident = [](const Vec& v) { return v; };
    Matrix j = finite_diff_jacobian(ident, {0.3, -0.7, 2.0}, 1e-5);
    CHECK((j - Matrix::identity(3)).max_abs() < 1e-9);

    auto square = [](const Vec& v) { return Vec{v[0] * v[0]}; };
    Matrix j2 = finite_diff_jacobian(square, {3.0}, 1e-5);
    CHECK(j2(0, 0) == Catch::Approx(6.0).margin(1e-8));

    // gradient of sum x log x; its Jacobian is diag(1/x)
    auto dh = [](const Vec& v) {
        Vec g(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) g[i] = 1.0 + std::log(v[i]);
        return g;
    };
    Matrix j3 = finite_diff_jacobian(dh, {0.5, 0.25, 0.25}, 1e-6);
    CHECK(j3(0, 0) == Catch::Approx(2.0).margin(1e-5));
    CHECK(j3(1, 1) == Catch::Approx(4.0).margin(1e-5));
    CHECK(j3(2, 2) == Catch::Approx(4.0).margin(1e-5));
    CHECK(std::abs(j3(0, 1)) < 1e-5);
}

TEST_CASE("finite_diff_jacobian reports undefined stencil points") {
    auto f = [](const Vec& v) -> Vec {
        if (v[0] < 0.0) throw std::domain_error("negative");
        return {std::sqrt(v[0])};
    };
    CHECK_THROWS_AS(finite_diff_jacobian(f, {1e-9}, 1e-5), EvaluationFailure);
}

TEST_CASE("solve_linear distinguishes unique, continuum, inconsistent") {
    Matrix a = Matrix::from_rows({{2.0, 0.0}, {0.0, 4.0}});
    auto r = solve_linear(a, {2.0, 8.0});
    REQUIRE(r.status == SolveStatus::unique);
    CHECK(r.solution[0] == Catch::Approx(1.0));
    CHECK(r.solution[1] == Catch::Approx(2.0));

    Matrix s = Matrix::from_rows({{1.0, 1.0}, {2.0, 2.0}});
    CHECK(solve_linear(s, {1.0, 2.0}).status == SolveStatus::continuum);
    CHECK(solve_linear(s, {1.0, 3.0}).status == SolveStatus::inconsistent);
}
