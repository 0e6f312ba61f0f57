#pragma once

// =============================================================================
// Dense linear algebra kernel: symmetric eigensolves (cyclic Jacobi),
// LU solves, PSD square roots, pencil eigenvalues with a singular
// PSD right-hand side, and a real Hessenberg-QR eigensolver for
// nonsymmetric products. Dimensions up to a few hundred.
// =============================================================================

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace steklab {

using Vec = std::vector<double>;

class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), a_(rows * cols, 0.0) {}
    Matrix(std::initializer_list<std::initializer_list<double>> rows) {
        rows_ = rows.size();
        cols_ = rows_ ? rows.begin()->size() : 0;
        a_.reserve(rows_ * cols_);
        for (const auto& r : rows) {
            if (r.size() != cols_) throw std::invalid_argument("ragged initializer");
            a_.insert(a_.end(), r.begin(), r.end());
        }
    }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return rows_ == 0 || cols_ == 0; }

    double& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    Matrix transpose() const {
        Matrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    Matrix block(std::size_t i0, std::size_t j0, std::size_t r, std::size_t c) const {
        Matrix b(r, c);
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < c; ++j) b(i, j) = (*this)(i0 + i, j0 + j);
        return b;
    }

    void set_block(std::size_t i0, std::size_t j0, const Matrix& b) {
        for (std::size_t i = 0; i < b.rows(); ++i)
            for (std::size_t j = 0; j < b.cols(); ++j) (*this)(i0 + i, j0 + j) = b(i, j);
    }

    Vec col(std::size_t j) const {
        Vec v(rows_);
        for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
        return v;
    }

    double max_abs() const {
        double m = 0.0;
        for (double x : a_) m = std::max(m, std::abs(x));
        return m;
    }

    double frobenius_norm() const {
        double s = 0.0;
        for (double x : a_) s += x * x;
        return std::sqrt(s);
    }

    bool all_finite() const {
        for (double x : a_)
            if (!std::isfinite(x)) return false;
        return true;
    }

    friend Matrix operator+(const Matrix& a, const Matrix& b) {
        Matrix c = a;
        for (std::size_t k = 0; k < c.a_.size(); ++k) c.a_[k] += b.a_[k];
        return c;
    }
    friend Matrix operator-(const Matrix& a, const Matrix& b) {
        Matrix c = a;
        for (std::size_t k = 0; k < c.a_.size(); ++k) c.a_[k] -= b.a_[k];
        return c;
    }
    friend Matrix operator*(double s, const Matrix& a) {
        Matrix c = a;
        for (double& x : c.a_) x *= s;
        return c;
    }
    friend Matrix operator*(const Matrix& a, const Matrix& b) {
        if (a.cols_ != b.rows_) throw std::invalid_argument("matmul shape mismatch");
        Matrix c(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const double aik = a(i, k);
                if (aik == 0.0) continue;
                for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
            }
        return c;
    }
    friend Vec operator*(const Matrix& a, const Vec& v) {
        if (a.cols_ != v.size()) throw std::invalid_argument("matvec shape mismatch");
        Vec w(a.rows_, 0.0);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t j = 0; j < a.cols_; ++j) w[i] += a(i, j) * v[j];
        return w;
    }

private:
    std::size_t rows_ = 0, cols_ = 0;
    Vec a_;
};

inline double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }

inline Matrix symmetrize(const Matrix& a) {
    Matrix s = a;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) s(i, j) = 0.5 * (a(i, j) + a(j, i));
    return s;
}

inline double symmetry_defect(const Matrix& a) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = i + 1; j < a.cols(); ++j)
            m = std::max(m, std::abs(a(i, j) - a(j, i)));
    return m;
}

// -----------------------------------------------------------------------------
// Symmetric eigendecomposition, cyclic Jacobi.
// -----------------------------------------------------------------------------

struct EigenDecomposition {
    Vec values;      // ascending
    Matrix vectors;  // columns, same order
};

/// Cyclic Jacobi on a symmetric matrix. Sweeps until every off-diagonal
/// entry is below tol * max|a_ij|; eigenvalues returned ascending with
/// orthonormal eigenvector columns.
inline EigenDecomposition jacobi_eigh(const Matrix& a_in, double tol = 1e-13) {
    const std::size_t n = a_in.rows();
    if (a_in.cols() != n) throw std::invalid_argument("jacobi_eigh: not square");
    Matrix a = symmetrize(a_in);
    Matrix v = Matrix::identity(n);
    const double scale = std::max(a.max_abs(), 1e-300);

    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off = std::max(off, std::abs(a(p, q)));
        if (off <= tol * scale) break;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (std::abs(apq) <= 0.1 * tol * scale) continue;
                const double theta = 0.5 * (a(q, q) - a(p, p)) / apq;
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });
    EigenDecomposition d;
    d.values.resize(n);
    d.vectors = Matrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        d.values[j] = a(order[j], order[j]);
        for (std::size_t i = 0; i < n; ++i) d.vectors(i, j) = v(i, order[j]);
    }
    return d;
}

inline Vec eigenvalues_sym(const Matrix& a) { return jacobi_eigh(a).values; }

/// Condition number of a symmetric matrix, max|eig| / min|eig|.
inline double cond_sym(const Matrix& a) {
    if (a.rows() == 0) return 1.0;  // empty restriction is bijective
    Vec w = eigenvalues_sym(a);
    double lo = std::abs(w[0]), hi = std::abs(w[0]);
    for (double x : w) {
        lo = std::min(lo, std::abs(x));
        hi = std::max(hi, std::abs(x));
    }
    if (lo == 0.0) return std::numeric_limits<double>::infinity();
    return hi / lo;
}

// -----------------------------------------------------------------------------
// LU with partial pivoting.
// -----------------------------------------------------------------------------

class LuFactorization {
public:
    explicit LuFactorization(Matrix a) : lu_(std::move(a)), piv_(lu_.rows()) {
        const std::size_t n = lu_.rows();
        if (lu_.cols() != n) throw std::invalid_argument("lu: not square");
        sign_ = 1.0;
        for (std::size_t k = 0; k < n; ++k) {
            std::size_t p = k;
            for (std::size_t i = k + 1; i < n; ++i)
                if (std::abs(lu_(i, k)) > std::abs(lu_(p, k))) p = i;
            piv_[k] = p;
            if (p != k) {
                for (std::size_t j = 0; j < n; ++j) std::swap(lu_(k, j), lu_(p, j));
                sign_ = -sign_;
            }
            const double pivot = lu_(k, k);
            if (pivot == 0.0) { singular_ = true; continue; }
            for (std::size_t i = k + 1; i < n; ++i) {
                lu_(i, k) /= pivot;
                const double lik = lu_(i, k);
                if (lik == 0.0) continue;
                for (std::size_t j = k + 1; j < n; ++j) lu_(i, j) -= lik * lu_(k, j);
            }
        }
    }

    bool singular() const { return singular_; }

    /// min / max |pivot|; a cheap invertibility proxy.
    double pivot_ratio() const {
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        for (std::size_t k = 0; k < lu_.rows(); ++k) {
            lo = std::min(lo, std::abs(lu_(k, k)));
            hi = std::max(hi, std::abs(lu_(k, k)));
        }
        return hi == 0.0 ? 0.0 : lo / hi;
    }

    Vec solve(Vec b) const {
        const std::size_t n = lu_.rows();
        if (singular_) throw std::runtime_error("lu: singular matrix");
        for (std::size_t k = 0; k < n; ++k)
            if (piv_[k] != k) std::swap(b[k], b[piv_[k]]);
        for (std::size_t i = 1; i < n; ++i)
            for (std::size_t j = 0; j < i; ++j) b[i] -= lu_(i, j) * b[j];
        for (std::size_t i = n; i-- > 0;) {
            for (std::size_t j = i + 1; j < n; ++j) b[i] -= lu_(i, j) * b[j];
            b[i] /= lu_(i, i);
        }
        return b;
    }

    Matrix solve(const Matrix& b) const {
        Matrix x(b.rows(), b.cols());
        for (std::size_t j = 0; j < b.cols(); ++j) {
            Vec c = solve(b.col(j));
            for (std::size_t i = 0; i < b.rows(); ++i) x(i, j) = c[i];
        }
        return x;
    }

    double log_abs_det(double* sign = nullptr) const {
        double s = sign_, ld = 0.0;
        for (std::size_t k = 0; k < lu_.rows(); ++k) {
            const double p = lu_(k, k);
            if (p < 0) s = -s;
            ld += std::log(std::abs(p));
        }
        if (sign) *sign = (singular_ ? 0.0 : s);
        return ld;
    }

private:
    Matrix lu_;
    std::vector<std::size_t> piv_;
    double sign_ = 1.0;
    bool singular_ = false;
};

inline Matrix solve(const Matrix& a, const Matrix& b) { return LuFactorization(a).solve(b); }
inline Vec solve(const Matrix& a, const Vec& b) { return LuFactorization(a).solve(b); }
inline Matrix inverse(const Matrix& a) {
    return LuFactorization(a).solve(Matrix::identity(a.rows()));
}

/// Operator 2-norm via the largest eigenvalue of A^T A.
inline double spectral_norm(const Matrix& a) {
    if (a.empty()) return 0.0;
    const Matrix g = a.transpose() * a;
    const Vec w = eigenvalues_sym(g);
    return std::sqrt(std::max(w.back(), 0.0));
}

// -----------------------------------------------------------------------------
// PSD functions of symmetric matrices.
// -----------------------------------------------------------------------------

/// Square root of a PSD matrix through its eigendecomposition. Eigenvalues in
/// [clamp, 0) are treated as zero; anything below clamp is a hard error.
inline Matrix psd_sqrt(const Matrix& a, double clamp = -1e-12) {
    EigenDecomposition d = jacobi_eigh(a);
    const double scale = std::max(std::abs(d.values.front()), std::abs(d.values.back()));
    const std::size_t n = a.rows();
    Matrix r(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        double w = d.values[k];
        if (w < clamp * std::max(1.0, scale))
            throw std::runtime_error("psd_sqrt: matrix has a negative eigenvalue");
        w = std::max(w, 0.0);
        const double sq = std::sqrt(w);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) r(i, j) += sq * d.vectors(i, k) * d.vectors(j, k);
    }
    return r;
}

/// Generalized symmetric-definite eigenvalues of (A, B), B SPD, reduced
/// through B^{-1/2}. Ascending.
inline Vec generalized_eigh(const Matrix& a, const Matrix& b) {
    EigenDecomposition db = jacobi_eigh(b);
    if (db.values.front() <= 0.0)
        throw std::runtime_error("generalized_eigh: right-hand operator not SPD");
    const std::size_t n = a.rows();
    Matrix binv_h(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        const double s = 1.0 / std::sqrt(db.values[k]);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                binv_h(i, j) += s * db.vectors(i, k) * db.vectors(j, k);
    }
    return eigenvalues_sym(binv_h * a * binv_h);
}

// -----------------------------------------------------------------------------
// Kernel bases and ranks of rectangular maps (through B^T B).
// -----------------------------------------------------------------------------

inline std::size_t rank_of(const Matrix& b, double tol = 1e-12) {
    if (b.empty()) return 0;
    Vec w = eigenvalues_sym(b.transpose() * b);
    const double cutoff = tol * std::max(w.back(), 0.0) + 1e-300;
    std::size_t r = 0;
    for (double x : w)
        if (x > cutoff) ++r;
    return r;
}

/// Orthonormal basis (columns) of ker b.
inline Matrix nullspace_basis(const Matrix& b, double tol = 1e-12) {
    if (b.cols() == 0) return Matrix(0, 0);
    EigenDecomposition d = jacobi_eigh(b.transpose() * b);
    const double cutoff = tol * std::max(d.values.back(), 0.0) + 1e-300;
    std::size_t k = 0;
    while (k < d.values.size() && d.values[k] <= cutoff) ++k;
    Matrix z(b.cols(), k);
    for (std::size_t j = 0; j < k; ++j)
        for (std::size_t i = 0; i < b.cols(); ++i) z(i, j) = d.vectors(i, j);
    return z;
}

// -----------------------------------------------------------------------------
// Finite eigenvalues of the symmetric linear pencil M - lambda B^T B.
// -----------------------------------------------------------------------------

struct PencilEigen {
    Vec values;                     // ascending, finite eigenvalues only
    std::vector<Vec> vectors;       // unit eigenvectors, same order
};

class singular_pencil_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Eigenvalues of det(M - lambda B^T B) = 0 with B^T B PSD and singular.
///
/// Route 1 (count semantics, accurate near the shift): the identity
/// det(I - t M_s^{-1} B^T B) = det(I - t B M_s^{-1} B^T) at a shift s where
/// M_s = M - s B^T B stays invertible reads the finite spectrum off a dense
/// symmetric eigensolve of size rows(B); near-zero mu are of infinite type.
/// Route 2 (accurate away from zero): deflate ker(B^T B) against M and solve
/// the reduced symmetric-definite problem. Values with |lambda| > 1 take the
/// deflated figure when both routes agree on the count. |lambda| > cap is
/// treated as infinite type throughout.
inline PencilEigen pencil_eigs(const Matrix& m, const Matrix& b, bool want_vectors = false,
                               double cap = 1e12) {
    const Matrix t = symmetrize(b.transpose() * b);
    const double shifts[] = {0.0, 0.12987, -0.37561, 0.77213, -1.51119};
    PencilEigen out;
    bool solved = false;
    for (double s : shifts) {
        Matrix ms = m - s * t;
        LuFactorization lu(ms);
        if (lu.singular() || lu.pivot_ratio() < 1e-14) continue;
        Matrix w = symmetrize(b * lu.solve(b.transpose()));
        EigenDecomposition d = jacobi_eigh(w);
        const double mu_scale = std::max(w.max_abs(), 1e-300);
        std::vector<std::pair<double, std::size_t>> lam;
        for (std::size_t k = 0; k < d.values.size(); ++k) {
            const double mu = d.values[k];
            if (std::abs(mu) <= 1e-14 * mu_scale) continue;  // infinite-type
            const double l = s + 1.0 / mu;
            if (std::abs(l) > cap) continue;
            lam.emplace_back(l, k);
        }
        std::sort(lam.begin(), lam.end());
        for (auto& [l, k] : lam) {
            out.values.push_back(l);
            if (want_vectors) {
                Vec z = d.vectors.col(k);
                Vec x = lu.solve(b.transpose() * z);
                const double nx = norm2(x);
                for (double& xi : x) xi /= nx;
                out.vectors.push_back(std::move(x));
            }
        }
        solved = true;
        break;
    }
    if (!solved)
        throw singular_pencil_error(
            "pencil_eigs: M - s*A_tr singular for all trial shifts (common-kernel degeneracy)");

    bool any_big = false;
    for (double l : out.values) any_big |= std::abs(l) > 1.0;
    if (!any_big) return out;

    // deflation polish
    EigenDecomposition dt = jacobi_eigh(t);
    const double cut = 1e-12 * std::max(dt.values.back(), 0.0) + 1e-300;
    std::size_t k0 = 0;
    while (k0 < dt.values.size() && dt.values[k0] <= cut) ++k0;
    const std::size_t n = t.rows(), nk = k0, nr = n - k0;
    if (nr == 0) return out;
    Matrix q0(n, nk), q1(n, nr);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < nk; ++j) q0(i, j) = dt.vectors(i, j);
        for (std::size_t j = 0; j < nr; ++j) q1(i, j) = dt.vectors(i, nk + j);
    }
    Matrix m11 = q1.transpose() * m * q1;
    if (nk > 0) {
        Matrix m00 = q0.transpose() * m * q0;
        LuFactorization lu00(m00);
        if (lu00.singular() || lu00.pivot_ratio() < 1e-13) return out;  // escape case
        Matrix m01 = q0.transpose() * m * q1;
        m11 = m11 - m01.transpose() * lu00.solve(m01);
    }
    Matrix c(nr, nr);
    for (std::size_t i = 0; i < nr; ++i)
        for (std::size_t j = 0; j < nr; ++j)
            c(i, j) = m11(i, j) / std::sqrt(dt.values[nk + i] * dt.values[nk + j]);
    Vec refined = eigenvalues_sym(symmetrize(c));
    Vec kept;
    for (double l : refined)
        if (std::abs(l) <= cap) kept.push_back(l);
    if (kept.size() != out.values.size()) return out;
    for (std::size_t i = 0; i < kept.size(); ++i)
        if (std::abs(out.values[i]) > 1.0) out.values[i] = kept[i];
    return out;
}

// -----------------------------------------------------------------------------
// Real nonsymmetric eigenvalues: Hessenberg reduction + Francis QR.
// -----------------------------------------------------------------------------

namespace detail {

inline void hessenberg_reduce(Matrix& a) {
    const std::size_t n = a.rows();
    for (std::size_t k = 0; k + 2 < n; ++k) {
        double scale = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) scale = std::max(scale, std::abs(a(i, k)));
        if (scale == 0.0) continue;
        Vec v(n, 0.0);
        double alpha = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) {
            v[i] = a(i, k) / scale;
            alpha += v[i] * v[i];
        }
        alpha = std::sqrt(alpha);
        if (v[k + 1] < 0) alpha = -alpha;
        v[k + 1] += alpha;
        double vnorm2 = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) vnorm2 += v[i] * v[i];
        if (vnorm2 == 0.0) continue;
        // A <- (I - 2vv^T/v^Tv) A (I - 2vv^T/v^Tv)
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t i = k + 1; i < n; ++i) s += v[i] * a(i, j);
            s *= 2.0 / vnorm2;
            for (std::size_t i = k + 1; i < n; ++i) a(i, j) -= s * v[i];
        }
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::size_t j = k + 1; j < n; ++j) s += a(i, j) * v[j];
            s *= 2.0 / vnorm2;
            for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= s * v[j];
        }
    }
    for (std::size_t i = 2; i < n; ++i)
        for (std::size_t j = 0; j + 1 < i; ++j) a(i, j) = 0.0;
}

}  // namespace detail

/// All eigenvalues of a real square matrix (complex output), by Householder
/// Hessenberg reduction followed by the shifted QR iteration (Numerical
/// Recipes hqr scheme). Intended for the dual-route spectral checks at
/// dimension <= a few hundred.
inline std::vector<std::complex<double>> eigenvalues_general(Matrix a) {
    const std::size_t n = a.rows();
    if (a.cols() != n) throw std::invalid_argument("eigenvalues_general: not square");
    std::vector<std::complex<double>> out;
    if (n == 0) return out;
    detail::hessenberg_reduce(a);

    double anorm = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = (i > 0 ? i - 1 : 0); j < n; ++j) anorm += std::abs(a(i, j));
    anorm = std::max(anorm, 1e-300);

    long nn = static_cast<long>(n) - 1;
    double t = 0.0;
    int its_total = 0;
    while (nn >= 0) {
        int its = 0;
        long l;
        do {
            for (l = nn; l >= 1; --l) {
                const double s = std::abs(a(l - 1, l - 1)) + std::abs(a(l, l));
                double sd = (s == 0.0) ? anorm : s;
                if (std::abs(a(l, l - 1)) <= 1e-16 * sd) {
                    a(l, l - 1) = 0.0;
                    break;
                }
            }
            double x = a(nn, nn);
            if (l == nn) {
                out.emplace_back(x + t, 0.0);
                --nn;
            } else {
                double y = a(nn - 1, nn - 1);
                double w = a(nn, nn - 1) * a(nn - 1, nn);
                if (l == nn - 1) {
                    const double p = 0.5 * (y - x);
                    const double q = p * p + w;
                    const double z = std::sqrt(std::abs(q));
                    x += t;
                    if (q >= 0.0) {
                        const double zz = p + (p >= 0 ? z : -z);
                        out.emplace_back(x + zz, 0.0);
                        out.emplace_back(zz != 0.0 ? x - w / zz : x + zz, 0.0);
                    } else {
                        out.emplace_back(x + p, z);
                        out.emplace_back(x + p, -z);
                    }
                    nn -= 2;
                } else {
                    if (its == 30 || its == 60) {
                        // exceptional shift
                        t += x;
                        for (long i = 0; i <= nn; ++i) a(i, i) -= x;
                        const double s = std::abs(a(nn, nn - 1)) + std::abs(a(nn - 1, nn - 2));
                        y = x = 0.75 * s;
                        w = -0.4375 * s * s;
                    }
                    if (++its_total > 3000)
                        throw std::runtime_error("eigenvalues_general: QR failed to converge");
                    ++its;
                    long mm;
                    double p = 0, q = 0, z = 0, r = 0, s = 0;
                    for (mm = nn - 2; mm >= l; --mm) {
                        z = a(mm, mm);
                        r = x - z;
                        s = y - z;
                        p = (r * s - w) / a(mm + 1, mm) + a(mm, mm + 1);
                        q = a(mm + 1, mm + 1) - z - r - s;
                        r = a(mm + 2, mm + 1);
                        s = std::abs(p) + std::abs(q) + std::abs(r);
                        p /= s;
                        q /= s;
                        r /= s;
                        if (mm == l) break;
                        const double u = std::abs(a(mm, mm - 1)) * (std::abs(q) + std::abs(r));
                        const double v = std::abs(p) * (std::abs(a(mm - 1, mm - 1)) +
                                                        std::abs(z) + std::abs(a(mm + 1, mm + 1)));
                        if (u <= 1e-16 * v) break;
                    }
                    for (long i = mm + 2; i <= nn; ++i) {
                        a(i, i - 2) = 0.0;
                        if (i != mm + 2) a(i, i - 3) = 0.0;
                    }
                    for (long k = mm; k <= nn - 1; ++k) {
                        if (k != mm) {
                            p = a(k, k - 1);
                            q = a(k + 1, k - 1);
                            r = (k != nn - 1) ? a(k + 2, k - 1) : 0.0;
                            x = std::abs(p) + std::abs(q) + std::abs(r);
                            if (x != 0.0) {
                                p /= x;
                                q /= x;
                                r /= x;
                            }
                        }
                        s = std::sqrt(p * p + q * q + r * r);
                        if (p < 0) s = -s;
                        if (s == 0.0) continue;
                        if (k == mm) {
                            if (l != mm) a(k, k - 1) = -a(k, k - 1);
                        } else {
                            a(k, k - 1) = -s * x;
                        }
                        p += s;
                        x = p / s;
                        y = q / s;
                        z = r / s;
                        q /= p;
                        r /= p;
                        for (long j = k; j <= nn; ++j) {
                            p = a(k, j) + q * a(k + 1, j);
                            if (k != nn - 1) {
                                p += r * a(k + 2, j);
                                a(k + 2, j) -= p * z;
                            }
                            a(k + 1, j) -= p * y;
                            a(k, j) -= p * x;
                        }
                        const long mmin = (nn < k + 3) ? nn : k + 3;
                        for (long i = l; i <= mmin; ++i) {
                            p = x * a(i, k) + y * a(i, k + 1);
                            if (k != nn - 1) {
                                p += z * a(i, k + 2);
                                a(i, k + 2) -= p * r;
                            }
                            a(i, k + 1) -= p * q;
                            a(i, k) -= p;
                        }
                    }
                }
            }
        } while (l < nn - 1 && nn >= 0);
    }
    std::sort(out.begin(), out.end(), [](const auto& u, const auto& v) {
        return u.real() != v.real() ? u.real() < v.real() : u.imag() < v.imag();
    });
    return out;
}

}  // namespace steklab
