#pragma once

/*
 * numerics.hpp — small dense symmetric linear algebra.
 *
 * Everything here targets the desk scale of the rest of the library
 * (matrices of dimension <= ~32), so the algorithms favor accuracy and
 * simplicity over asymptotics:
 *
 *   eig_sym        : cyclic Jacobi rotations, eigenvalues ascending
 *   pseudoinverse  : Moore-Penrose via the spectral form
 *                    M^+ = sum_{|lambda| > tol} lambda^-1 u u^T
 *   zero_sum_projector : Phi = I - (1/n) 1 1^T
 *   finite_diff_jacobian : central differences, O(h^2)
 *
 * All operations are pure; values are freely shareable across threads.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <optional>
#include <vector>

#include "errors.hpp"

namespace geoflow {

using Vec = std::vector<double>;

// ── Vector helpers ──────────────────────────────────────────────────────────

inline double dot(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw DimensionMismatch("dot: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double sum(const Vec& a) { return std::accumulate(a.begin(), a.end(), 0.0); }

inline double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }

inline double norm_inf(const Vec& a) {
    double m = 0.0;
    for (double x : a) m = std::max(m, std::abs(x));
    return m;
}

inline Vec axpy(double a, const Vec& x, const Vec& y) {
    if (x.size() != y.size()) throw DimensionMismatch("axpy: size mismatch");
    Vec r(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) r[i] = a * x[i] + y[i];
    return r;
}

inline Vec scaled(double a, const Vec& x) {
    Vec r(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) r[i] = a * x[i];
    return r;
}

inline Vec sub(const Vec& a, const Vec& b) { return axpy(-1.0, b, a); }

inline bool all_finite(const Vec& a) {
    for (double x : a)
        if (!std::isfinite(x)) return false;
    return true;
}

// ── Dense matrices ──────────────────────────────────────────────────────────

/// General dense matrix, row-major.
class Matrix {
  public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), a_(rows * cols, fill) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    static Matrix from_rows(const std::vector<Vec>& rows) {
        if (rows.empty()) return {};
        Matrix m(rows.size(), rows.front().size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != m.cols_) throw DimensionMismatch("from_rows: ragged rows");
            for (std::size_t j = 0; j < m.cols_; ++j) m(i, j) = rows[i][j];
        }
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    Vec apply(const Vec& x) const {
        if (x.size() != cols_) throw DimensionMismatch("Matrix::apply: size mismatch");
        Vec y(rows_, 0.0);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) y[i] += (*this)(i, j) * x[j];
        return y;
    }

    Matrix transposed() const {
        Matrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    Matrix mul(const Matrix& other) const {
        if (cols_ != other.rows_) throw DimensionMismatch("Matrix::mul: size mismatch");
        Matrix r(rows_, other.cols_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t k = 0; k < cols_; ++k) {
                const double aik = (*this)(i, k);
                if (aik == 0.0) continue;
                for (std::size_t j = 0; j < other.cols_; ++j) r(i, j) += aik * other(k, j);
            }
        return r;
    }

    double frobenius() const {
        double s = 0.0;
        for (double v : a_) s += v * v;
        return std::sqrt(s);
    }

    double max_abs() const {
        double m = 0.0;
        for (double v : a_) m = std::max(m, std::abs(v));
        return m;
    }

  private:
    std::size_t rows_ = 0, cols_ = 0;
    Vec a_;
};

inline Matrix operator-(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DimensionMismatch("Matrix operator-: size mismatch");
    Matrix r(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) r(i, j) = a(i, j) - b(i, j);
    return r;
}

/// Square symmetric matrix. Construction checks symmetry within `sym_tol`.
class SymMatrix {
  public:
    SymMatrix() = default;

    explicit SymMatrix(std::size_t n, double fill = 0.0) : n_(n), a_(n * n, fill) {}

    /// Adopts a general square matrix after checking |a_ij - a_ji| <= sym_tol.
    static SymMatrix from_matrix(const Matrix& m, double sym_tol = 1e-9) {
        if (m.rows() != m.cols()) throw NonSymmetric("SymMatrix: not square");
        SymMatrix s(m.rows());
        for (std::size_t i = 0; i < m.rows(); ++i)
            for (std::size_t j = 0; j < m.cols(); ++j) {
                if (std::abs(m(i, j) - m(j, i)) > sym_tol)
                    throw NonSymmetric("SymMatrix: symmetry tolerance violated");
                s(i, j) = 0.5 * (m(i, j) + m(j, i));
            }
        return s;
    }

    static SymMatrix identity(std::size_t n) {
        SymMatrix s(n);
        for (std::size_t i = 0; i < n; ++i) s(i, i) = 1.0;
        return s;
    }

    static SymMatrix diagonal(const Vec& d) {
        SymMatrix s(d.size());
        for (std::size_t i = 0; i < d.size(); ++i) s(i, i) = d[i];
        return s;
    }

    std::size_t dim() const { return n_; }

    double& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }

    /// Symmetrized write: sets both (i,j) and (j,i).
    void set(std::size_t i, std::size_t j, double v) {
        a_[i * n_ + j] = v;
        a_[j * n_ + i] = v;
    }

    Vec apply(const Vec& x) const {
        if (x.size() != n_) throw DimensionMismatch("SymMatrix::apply: size mismatch");
        Vec y(n_, 0.0);
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j) y[i] += (*this)(i, j) * x[j];
        return y;
    }

    /// x^T M y.
    double quad(const Vec& x, const Vec& y) const { return dot(x, apply(y)); }

    Matrix to_matrix() const {
        Matrix m(n_, n_);
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j) m(i, j) = (*this)(i, j);
        return m;
    }

    double frobenius() const {
        double s = 0.0;
        for (double v : a_) s += v * v;
        return std::sqrt(s);
    }

    double max_abs_asymmetry() const {
        double m = 0.0;
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = i + 1; j < n_; ++j)
                m = std::max(m, std::abs((*this)(i, j) - (*this)(j, i)));
        return m;
    }

    /// Principal submatrix on the index set `idx`.
    SymMatrix submatrix(const std::vector<std::size_t>& idx) const {
        SymMatrix s(idx.size());
        for (std::size_t i = 0; i < idx.size(); ++i)
            for (std::size_t j = 0; j < idx.size(); ++j) s(i, j) = (*this)(idx[i], idx[j]);
        return s;
    }

  private:
    std::size_t n_ = 0;
    Vec a_;
};

inline SymMatrix operator-(const SymMatrix& a, const SymMatrix& b) {
    if (a.dim() != b.dim()) throw DimensionMismatch("SymMatrix operator-: size mismatch");
    SymMatrix r(a.dim());
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t j = 0; j < a.dim(); ++j) r(i, j) = a(i, j) - b(i, j);
    return r;
}

// ── Symmetric eigendecomposition ────────────────────────────────────────────

/// Q has the eigenvectors as columns; eigenvalues are sorted ascending, so
/// m == Q diag(lambda) Q^T.
struct EigenDecomp {
    Vec eigenvalues;
    Matrix eigenvectors;
};

/// Cyclic Jacobi rotations. Dimensions here stay small, so O(n^3) sweeps with
/// high accuracy beat anything more sophisticated.
inline EigenDecomp eig_sym(const SymMatrix& m, double sym_tol = 1e-9) {
    const std::size_t n = m.dim();
    if (n == 0) return {};
    if (m.max_abs_asymmetry() > sym_tol) throw NonSymmetric("eig_sym: matrix is not symmetric");

    Matrix a = m.to_matrix();
    Matrix q = Matrix::identity(n);

    auto off_norm = [&]() {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) s += a(i, j) * a(i, j);
        return std::sqrt(2.0 * s);
    };

    const double scale = std::max(a.max_abs(), 1e-300);
    const double stop = 1e-15 * scale * static_cast<double>(n);
    for (int sweep = 0; sweep < 128 && off_norm() > stop; ++sweep) {
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t r = p + 1; r < n; ++r) {
                const double apq = a(p, r);
                if (std::abs(apq) <= 1e-300) continue;
                const double theta = (a(r, r) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, r);
                    a(k, p) = c * akp - s * akq;
                    a(k, r) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(r, k);
                    a(p, k) = c * apk - s * aqk;
                    a(r, k) = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double qkp = q(k, p), qkq = q(k, r);
                    q(k, p) = c * qkp - s * qkq;
                    q(k, r) = s * qkp + c * qkq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });

    EigenDecomp d;
    d.eigenvalues.resize(n);
    d.eigenvectors = Matrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        d.eigenvalues[j] = a(order[j], order[j]);
        for (std::size_t i = 0; i < n; ++i) d.eigenvectors(i, j) = q(i, order[j]);
    }
    return d;
}

// ── Pseudoinverse and projector ─────────────────────────────────────────────

/// Moore-Penrose pseudoinverse of a symmetric matrix via the spectral form.
/// Eigenvalues with |lambda| < rank_tol * |lambda|_max are treated as zero,
/// which separates the structurally-zero eigenvalues of minimal-rank boundary
/// metrics from roundoff. The zero matrix maps to the zero matrix.
inline SymMatrix pseudoinverse(const SymMatrix& m, double rank_tol = 1e-10) {
    const std::size_t n = m.dim();
    EigenDecomp d = eig_sym(m);
    double lmax = 0.0;
    for (double l : d.eigenvalues) lmax = std::max(lmax, std::abs(l));
    SymMatrix r(n);
    if (lmax == 0.0) return r;
    const double cut = rank_tol * lmax;
    for (std::size_t k = 0; k < n; ++k) {
        const double l = d.eigenvalues[k];
        if (std::abs(l) < cut) continue;
        const double inv = 1.0 / l;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                r(i, j) += inv * d.eigenvectors(i, k) * d.eigenvectors(j, k);
    }
    return r;
}

/// Phi = I - (1/n) 1 1^T: symmetric, idempotent, kills the ones vector and
/// fixes every vector whose components sum to zero.
inline SymMatrix zero_sum_projector(std::size_t n) {
    if (n < 1) throw DimensionMismatch("zero_sum_projector: n must be >= 1");
    SymMatrix p(n);
    const double off = -1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) p(i, j) = (i == j ? 1.0 + off : off);
    return p;
}

// ── Finite differences ──────────────────────────────────────────────────────

/// Central-difference Jacobian of a vector-valued map, error O(h^2) for C^3
/// maps. Throws EvaluationFailure if f is undefined (throws or returns a
/// non-finite value) at a stencil point.
inline Matrix finite_diff_jacobian(const std::function<Vec(const Vec&)>& f, const Vec& x,
                                   double h) {
    if (h <= 0.0) throw DimensionMismatch("finite_diff_jacobian: h must be > 0");
    auto eval = [&](const Vec& p) -> Vec {
        Vec v;
        try {
            v = f(p);
        } catch (const std::exception& e) {
            throw EvaluationFailure(std::string("finite_diff_jacobian: map failed: ") + e.what());
        }
        if (!all_finite(v))
            throw EvaluationFailure("finite_diff_jacobian: non-finite value at stencil point");
        return v;
    };
    const std::size_t n = x.size();
    Vec fw, bw;
    Matrix j;
    for (std::size_t c = 0; c < n; ++c) {
        Vec xp = x, xm = x;
        xp[c] += h;
        xm[c] -= h;
        fw = eval(xp);
        bw = eval(xm);
        if (fw.size() != bw.size())
            throw EvaluationFailure("finite_diff_jacobian: inconsistent output size");
        if (c == 0) j = Matrix(fw.size(), n);
        for (std::size_t r = 0; r < fw.size(); ++r) j(r, c) = (fw[r] - bw[r]) / (2.0 * h);
    }
    return j;
}

// ── Linear solves ───────────────────────────────────────────────────────────

enum class SolveStatus { unique, continuum, inconsistent };

struct LinearSolveResult {
    SolveStatus status;
    Vec solution; // meaningful only when status == unique
};

/// Gauss-Jordan with partial pivoting on the augmented system [A | b].
/// Rank-deficient consistent systems are reported as `continuum`,
/// rank-deficient inconsistent ones as `inconsistent`.
inline LinearSolveResult solve_linear(Matrix a, Vec b, double pivot_tol = 1e-10) {
    const std::size_t rows = a.rows(), cols = a.cols();
    if (b.size() != rows) throw DimensionMismatch("solve_linear: rhs size mismatch");
    const double scale = std::max(a.max_abs(), 1.0);
    const double tol = pivot_tol * scale;

    std::vector<std::size_t> pivot_col_of_row;
    std::size_t row = 0;
    for (std::size_t col = 0; col < cols && row < rows; ++col) {
        std::size_t piv = row;
        for (std::size_t r = row + 1; r < rows; ++r)
            if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
        if (std::abs(a(piv, col)) <= tol) continue;
        if (piv != row) {
            for (std::size_t c = 0; c < cols; ++c) std::swap(a(piv, c), a(row, c));
            std::swap(b[piv], b[row]);
        }
        const double d = a(row, col);
        for (std::size_t c = 0; c < cols; ++c) a(row, c) /= d;
        b[row] /= d;
        for (std::size_t r = 0; r < rows; ++r) {
            if (r == row) continue;
            const double f = a(r, col);
            if (f == 0.0) continue;
            for (std::size_t c = 0; c < cols; ++c) a(r, c) -= f * a(row, c);
            b[r] -= f * b[row];
        }
        pivot_col_of_row.push_back(col);
        ++row;
    }

    for (std::size_t r = row; r < rows; ++r)
        if (std::abs(b[r]) > tol * std::max(1.0, norm_inf(b))) return {SolveStatus::inconsistent, {}};
    if (pivot_col_of_row.size() < cols) return {SolveStatus::continuum, {}};

    Vec x(cols, 0.0);
    for (std::size_t r = 0; r < pivot_col_of_row.size(); ++r) x[pivot_col_of_row[r]] = b[r];
    return {SolveStatus::unique, x};
}

/// Inverse of a small SPD-ish symmetric matrix through the pseudoinverse;
/// rank deficiency below rank_tol silently maps to the pseudoinverse.
inline SymMatrix sym_inverse(const SymMatrix& m, double rank_tol = 1e-12) {
    return pseudoinverse(m, rank_tol);
}

} // namespace geoflow
