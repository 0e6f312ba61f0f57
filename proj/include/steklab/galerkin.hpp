#pragma once

// =============================================================================
// One-dimensional Galerkin discretizations on the unit ball, one spherical
// harmonic degree at a time. Radial trial functions are r^l times shifted
// Legendre polynomials, integrated with Gauss-Legendre rules exact for all
// assembled polynomial integrands. Each problem reduces to a rank-one
// boundary form, so a degree contributes a single finite eigenvalue
//
//     lambda = 1 / < e, (A - w^2 M)^-1 e >
//
// with e the boundary evaluation vector.
// =============================================================================

#include <cmath>
#include <stdexcept>
#include <vector>

#include "steklab/linalg.hpp"

namespace steklab {

enum class ModifiedProblem { scalar_lb, s_projection };

inline const char* to_string(ModifiedProblem p) {
    return p == ModifiedProblem::scalar_lb ? "ScalarLB" : "SProjection";
}

struct ModifiedSpectrumResult {
    ModifiedProblem problem = ModifiedProblem::scalar_lb;
    int degree = 0;
    int basis_size = 0;
    std::vector<double> eigenvalues;
};

namespace detail {

/// Gauss-Legendre nodes and weights on [0, 1], Newton on the Legendre
/// polynomial from the Chebyshev initial guess.
inline void gauss_legendre_01(int n, Vec& nodes, Vec& weights) {
    nodes.assign(n, 0.0);
    weights.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double x = std::cos(3.14159265358979323846 * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int j = 1; j < n; ++j) {
                const double p2 = ((2.0 * j + 1.0) * x * p1 - j * p0) / (j + 1.0);
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes[i] = 0.5 * (1.0 - x);  // reversed so nodes ascend on [0, 1]
        weights[i] = 1.0 / ((1.0 - x * x) * pp * pp);
    }
    std::reverse(nodes.begin(), nodes.end());
    std::reverse(weights.begin(), weights.end());
}

/// Shifted Legendre values p_k(x) = P_k(2x - 1) with first and second
/// derivatives, all k <= kmax, at one point.
struct LegendreEval {
    Vec p, dp, d2p;
};

inline LegendreEval shifted_legendre(int kmax, double x) {
    LegendreEval e;
    e.p.assign(kmax + 1, 0.0);
    e.dp.assign(kmax + 1, 0.0);
    e.d2p.assign(kmax + 1, 0.0);
    const double t = 2.0 * x - 1.0;
    e.p[0] = 1.0;
    if (kmax >= 1) {
        e.p[1] = t;
        e.dp[1] = 2.0;
    }
    for (int j = 1; j < kmax; ++j) {
        e.p[j + 1] = ((2.0 * j + 1.0) * t * e.p[j] - j * e.p[j - 1]) / (j + 1.0);
        e.dp[j + 1] =
            ((2.0 * j + 1.0) * (2.0 * e.p[j] + t * e.dp[j]) - j * e.dp[j - 1]) / (j + 1.0);
        e.d2p[j + 1] =
            ((2.0 * j + 1.0) * (4.0 * e.dp[j] + t * e.d2p[j]) - j * e.d2p[j - 1]) / (j + 1.0);
    }
    return e;
}

/// lambda = 1 / <e, S^-1 e> for the rank-one reduced pencil S - lambda e e^T.
inline double rank_one_eigenvalue(const Matrix& s, const Vec& e) {
    LuFactorization lu(s);
    if (lu.singular() || lu.pivot_ratio() < 1e-15)
        throw std::runtime_error("galerkin: reduced operator singular at this omega");
    const Vec x = lu.solve(e);
    const double q = dot(e, x);
    if (std::abs(q) < 1e-300)
        throw std::runtime_error("galerkin: boundary form degenerate");
    return 1.0 / q;
}

}  // namespace detail

/// Radial basis r^l p_k(r), k < m, with a Gauss rule exact for the
/// assembled integrands of maximal polynomial degree max_degree.
struct RadialBasis {
    int degree = 1;   // harmonic degree l
    int size = 0;     // m
    Vec nodes, weights;

    RadialBasis(int l, int m, int max_degree) : degree(l), size(m) {
        if (l < 1) throw std::invalid_argument("RadialBasis: degree must be >= 1");
        if (m < 1) throw std::invalid_argument("RadialBasis: basis size must be >= 1");
        const int q = (max_degree + 2) / 2 + 2;
        detail::gauss_legendre_01(q, nodes, weights);
    }
};

/// Laplace-Beltrami boundary problem per degree: assemble
/// a(f, f') = int f' g' r^2 + l(l+1) f g dr against the boundary form
/// l(l+1) f(1) g(1). The harmonic mode r^l lies in the basis, so the single
/// eigenvalue equals -1/(l+1) for every m >= 2; no omega or mu enters.
inline ModifiedSpectrumResult scalar_lb_solve(int l, int m) {
    if (l < 1 || m < 2) throw std::invalid_argument("scalar_lb_solve: need l >= 1, m >= 2");
    RadialBasis basis(l, m, 2 * (l + m - 1) + 2);
    Matrix a(m, m);
    for (std::size_t q = 0; q < basis.nodes.size(); ++q) {
        const double r = basis.nodes[q], w = basis.weights[q];
        const auto le = detail::shifted_legendre(m - 1, r);
        Vec f(m), df(m);
        const double rl = std::pow(r, l), rlm = std::pow(r, l - 1);
        for (int k = 0; k < m; ++k) {
            f[k] = rl * le.p[k];
            df[k] = l * rlm * le.p[k] + rl * le.dp[k];
        }
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                a(i, j) += w * (df[i] * df[j] * r * r + l * (l + 1.0) * f[i] * f[j]);
    }
    const auto le1 = detail::shifted_legendre(m - 1, 1.0);
    Vec e(m);
    for (int k = 0; k < m; ++k) e[k] = le1.p[k];

    ModifiedSpectrumResult res;
    res.problem = ModifiedProblem::scalar_lb;
    res.degree = l;
    res.basis_size = m;
    res.eigenvalues.push_back(-detail::rank_one_eigenvalue(a, e) / (l * (l + 1.0)));
    return res;
}

/// TE radial reduction: u = f(r) (r_hat x grad_s Y_n). Dividing the common
/// n(n+1) factor, the forms per unit harmonic are
///   a(f,g) = int n(n+1) f g + (r f)'(r g)' dr,
///   m(f,g) = int f g r^2 dr,      t(f,g) = f(1) g(1),
/// and the one finite eigenvalue of a - w^2 m - lambda t converges to the
/// analytic TE value as m grows.
inline std::vector<double> te_radial_solve(int n, double omega, int m) {
    if (n < 1 || m < 4)
        throw std::invalid_argument("te_radial_solve: need n >= 1, m >= 4");
    if (omega <= 0.0) throw std::invalid_argument("te_radial_solve: omega must be positive");
    RadialBasis basis(n, m, 2 * (n + m) + 2);
    Matrix a(m, m), mass(m, m);
    for (std::size_t q = 0; q < basis.nodes.size(); ++q) {
        const double r = basis.nodes[q], w = basis.weights[q];
        const auto le = detail::shifted_legendre(m - 1, r);
        Vec f(m), rfp(m);
        const double rl = std::pow(r, n), rlm = std::pow(r, n - 1);
        for (int k = 0; k < m; ++k) {
            f[k] = rl * le.p[k];
            const double df = n * rlm * le.p[k] + rl * le.dp[k];
            rfp[k] = f[k] + r * df;  // (r f)'
        }
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                a(i, j) += w * (n * (n + 1.0) * f[i] * f[j] + rfp[i] * rfp[j]);
                mass(i, j) += w * f[i] * f[j] * r * r;
            }
    }
    const auto le1 = detail::shifted_legendre(m - 1, 1.0);
    Vec e(m);
    for (int k = 0; k < m; ++k) e[k] = le1.p[k];
    return {detail::rank_one_eigenvalue(a - (omega * omega) * mass, e)};
}

/// S-projection modified problem per degree, on the divergence-free
/// zero-normal-trace ansatz u = beta(r) Y r_hat + alpha(r) grad_s Y with
/// alpha = (2 beta + r beta')/(n(n+1)) and beta(1) = 0, realized by
/// beta_k = r^(n-1) (1 - r) p_k. The trace is alpha(1) grad_s Y, purely in
/// the gradient part, so the S-projection boundary form is
/// n(n+1) alpha(1) alpha'(1); a TE-type trace (curl part) contributes
/// nothing by construction.
inline ModifiedSpectrumResult s_projection_solve(int n, double omega, int m) {
    if (n < 1 || m < 4)
        throw std::invalid_argument("s_projection_solve: need n >= 1, m >= 4");
    if (omega <= 0.0) throw std::invalid_argument("s_projection_solve: omega must be positive");
    RadialBasis basis(n, m, 2 * (n + m + 1) + 4);
    const double nn1 = n * (n + 1.0);
    Matrix a(m, m), mass(m, m);
    for (std::size_t q = 0; q < basis.nodes.size(); ++q) {
        const double r = basis.nodes[q], w = basis.weights[q];
        const auto le = detail::shifted_legendre(m - 1, r);
        const double rn1 = std::pow(r, n - 1);
        const double rn2 = n >= 2 ? std::pow(r, n - 2) : std::pow(r, n - 2.0);
        const double rn3 = n >= 3 ? std::pow(r, n - 3) : std::pow(r, n - 3.0);
        Vec beta(m), alpha(m), crl(m);
        for (int k = 0; k < m; ++k) {
            const double p = le.p[k], dp = le.dp[k], d2p = le.d2p[k];
            beta[k] = rn1 * (1.0 - r) * p;
            const double dbeta = (n - 1.0) * rn2 * (1.0 - r) * p - rn1 * p + rn1 * (1.0 - r) * dp;
            const double d2beta = ((n - 1.0) * (n - 2.0) * rn3 * (1.0 - r) -
                                   2.0 * (n - 1.0) * rn2) * p +
                                  (2.0 * (n - 1.0) * rn2 * (1.0 - r) - 2.0 * rn1) * dp +
                                  rn1 * (1.0 - r) * d2p;
            alpha[k] = (2.0 * beta[k] + r * dbeta) / nn1;
            const double dalpha = (3.0 * dbeta + r * d2beta) / nn1;
            crl[k] = dalpha + (alpha[k] - beta[k]) / r;  // (1/r)[(r alpha)' - beta]
        }
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                a(i, j) += w * nn1 * crl[i] * crl[j];
                mass(i, j) += w * r * r * (beta[i] * beta[j] + nn1 * alpha[i] * alpha[j]);
            }
    }
    // boundary vector: alpha(1) = beta'(1)/(n(n+1)) = -p_k(1)/(n(n+1))
    const auto le1 = detail::shifted_legendre(m - 1, 1.0);
    Vec e(m);
    for (int k = 0; k < m; ++k) e[k] = -le1.p[k] / nn1;

    ModifiedSpectrumResult res;
    res.problem = ModifiedProblem::s_projection;
    res.degree = n;
    res.basis_size = m;
    res.eigenvalues.push_back(
        detail::rank_one_eigenvalue(a - (omega * omega) * mass, e) / nn1);
    return res;
}

}  // namespace steklab
