#pragma once

// =============================================================================
// Closed-form Stekloff spectrum of the unit ball with eps = mu = identity.
//
// Separated modes (vector spherical harmonics, azimuthal order 0 without
// loss of generality) give one TE and one TM eigenvalue per degree n >= 1:
//
//     TE:  lambda = [j_n(w) + w j_n'(w)] / j_n(w)
//     TM:  lambda = -w^2 j_n(w) / [j_n(w) + w j_n'(w)]
//
// and for the Laplace-Beltrami boundary problem, lambda_l = -1/(l+1).
// Every emitted eigenvalue is gated behind residual_check, which rebuilds
// the separated field on a grid and applies the strong boundary condition
// through high-order finite differences.
// =============================================================================

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "steklab/specfun.hpp"

namespace steklab {

enum class ModeFamily { te, tm, scalar_lb };

inline const char* to_string(ModeFamily f) {
    switch (f) {
        case ModeFamily::te: return "TE";
        case ModeFamily::tm: return "TM";
        case ModeFamily::scalar_lb: return "ScalarLB";
    }
    return "?";
}

struct ModeIndex {
    ModeFamily family = ModeFamily::te;
    int degree = 1;
};

struct DispersionResult {
    ModeIndex mode;
    double omega = 0.0;
    double lambda = 0.0;
    int multiplicity = 0;
    double residual = 0.0;
};

/// Discrete analogue of an exceptional frequency: a dispersion denominator
/// degenerates at the requested (family, degree, omega).
class pole_error : public std::domain_error {
public:
    pole_error(ModeFamily family, int degree, double omega)
        : std::domain_error(std::string("pole: ") + to_string(family) + " degree " +
                            std::to_string(degree) + " at omega " + std::to_string(omega)),
          family(family), degree(degree), omega(omega) {}
    ModeFamily family;
    int degree;
    double omega;
};

namespace detail {

inline double legendre_p(int n, double c) {
    double p0 = 1.0, p1 = c;
    if (n == 0) return p0;
    for (int j = 1; j < n; ++j) {
        const double p2 = ((2.0 * j + 1.0) * c * p1 - j * p0) / (j + 1.0);
        p0 = p1;
        p1 = p2;
    }
    return p1;
}

/// d/dtheta P_n(cos theta); valid away from the poles.
inline double legendre_p_dtheta(int n, double theta) {
    const double c = std::cos(theta), s = std::sin(theta);
    const double pn = legendre_p(n, c), pm = legendre_p(n - 1, c);
    const double dpdc = n * (c * pn - pm) / (c * c - 1.0);
    return -s * dpdc;
}

// 9-point central stencils, order 8.
inline double fd_derivative1(const std::function<double(double)>& f, double x, double h) {
    static const double w[9] = {3.0 / 840.0,  -32.0 / 840.0, 168.0 / 840.0,
                                -672.0 / 840.0, 0.0,          672.0 / 840.0,
                                -168.0 / 840.0, 32.0 / 840.0, -3.0 / 840.0};
    double s = 0.0;
    for (int i = 0; i < 9; ++i) s += w[i] * f(x + (i - 4) * h);
    return s / h;
}

inline double fd_derivative2(const std::function<double(double)>& f, double x, double h) {
    static const double w[9] = {-9.0 / 5040.0,   128.0 / 5040.0,  -1008.0 / 5040.0,
                                8064.0 / 5040.0, -14350.0 / 5040.0, 8064.0 / 5040.0,
                                -1008.0 / 5040.0, 128.0 / 5040.0,  -9.0 / 5040.0};
    double s = 0.0;
    for (int i = 0; i < 9; ++i) s += w[i] * f(x + (i - 4) * h);
    return s / (h * h);
}

inline double oracle_step(int degree, double omega) {
    const double scale = std::max({static_cast<double>(degree), omega, 2.0});
    return std::min(0.02, 0.06 / std::pow(scale, 1.125));
}

inline std::vector<double> oracle_thetas() {
    std::vector<double> t;
    const int m = 21;
    for (int i = 0; i < m; ++i) t.push_back(0.2 + (3.14159265358979323846 - 0.4) * i / (m - 1.0));
    return t;
}

}  // namespace detail

/// Max-norm residual of the strong boundary condition for a separated mode,
/// relative to the boundary trace scale. Field values come from the series
/// reference path; the boundary operator (curl / normal derivative / surface
/// Laplacian) is applied by 9-point finite differences.
inline double residual_check(ModeIndex mode, double omega, double lambda) {
    if (mode.degree < 1) throw std::domain_error("residual_check: degree must be >= 1");
    if (omega <= 0.0) throw std::domain_error("residual_check: omega must be positive");
    const int n = mode.degree;
    const double h = detail::oracle_step(n, omega);
    double num = 0.0, den = 0.0;

    for (double th : detail::oracle_thetas()) {
        if (mode.family == ModeFamily::te) {
            const double g = detail::legendre_p_dtheta(n, th);
            auto u_phi = [&](double r) { return sph_bessel_series_reference(n, omega * r) * g; };
            const double curl_th =
                -detail::fd_derivative1([&](double r) { return r * u_phi(r); }, 1.0, h);
            const double bc = curl_th + lambda * u_phi(1.0);
            num = std::max(num, std::abs(bc));
            den = std::max({den, std::abs(curl_th), std::abs(lambda * u_phi(1.0))});
        } else if (mode.family == ModeFamily::tm) {
            auto u_r = [&](double t) {
                return n * (n + 1.0) / omega * sph_bessel_series_reference(n, omega) *
                       detail::legendre_p(n, std::cos(t));
            };
            auto u_th = [&](double r) {
                const double x = omega * r;
                return (sph_bessel_series_reference(n, x) +
                        x * sph_bessel_series_reference_deriv(n, x)) /
                       x * detail::legendre_p_dtheta(n, th);
            };
            const double curl_phi =
                detail::fd_derivative1([&](double r) { return r * u_th(r); }, 1.0, h) -
                detail::fd_derivative1(u_r, th, h);
            const double bc = -curl_phi + lambda * u_th(1.0);
            num = std::max(num, std::abs(bc));
            den = std::max({den, std::abs(curl_phi), std::abs(lambda * u_th(1.0))});
        } else {
            auto u_of_r = [&](double r) { return std::pow(r, n) * detail::legendre_p(n, std::cos(th)); };
            auto u_of_th = [&](double t) { return detail::legendre_p(n, std::cos(t)); };
            const double dr = detail::fd_derivative1(u_of_r, 1.0, h);
            const double lap = detail::fd_derivative2(u_of_th, th, h) +
                               std::cos(th) / std::sin(th) *
                                   detail::fd_derivative1(u_of_th, th, h);
            const double bc = dr - lambda * lap;
            num = std::max(num, std::abs(bc));
            den = std::max({den, std::abs(dr), std::abs(lambda * lap)});
        }
    }
    return num / std::max(den, 1e-300);
}

namespace detail {

/// Relative degeneracy test for a dispersion denominator: the two numerator
/// pieces set the scale, so the trigger is invariant under the (2n+1)!!
/// decay of j_n at fixed omega.
inline bool pole_degenerate(double den, double ja, double jb) {
    return std::abs(den) < 1e-13 * (std::abs(ja) + std::abs(jb));
}

}  // namespace detail

inline DispersionResult te_eigenvalue(int n, double omega) {
    if (n < 1) throw std::domain_error("te_eigenvalue: degree must be >= 1");
    if (omega <= 0.0) throw std::domain_error("te_eigenvalue: omega must be positive");
    const BesselEval b = sph_bessel(n, omega);
    const double wjp = omega * b.derivative;
    if (detail::pole_degenerate(b.value, b.value, wjp)) throw pole_error(ModeFamily::te, n, omega);
    DispersionResult r;
    r.mode = {ModeFamily::te, n};
    r.omega = omega;
    r.lambda = (b.value + wjp) / b.value;
    r.multiplicity = 2 * n + 1;
    r.residual = residual_check(r.mode, omega, r.lambda);
    return r;
}

inline DispersionResult tm_eigenvalue(int n, double omega) {
    if (n < 1) throw std::domain_error("tm_eigenvalue: degree must be >= 1");
    if (omega <= 0.0) throw std::domain_error("tm_eigenvalue: omega must be positive");
    const BesselEval b = sph_bessel(n, omega);
    const double den = b.value + omega * b.derivative;
    if (detail::pole_degenerate(den, b.value, omega * b.derivative))
        throw pole_error(ModeFamily::tm, n, omega);
    DispersionResult r;
    r.mode = {ModeFamily::tm, n};
    r.omega = omega;
    r.lambda = -omega * omega * b.value / den;
    r.multiplicity = 2 * n + 1;
    r.residual = residual_check(r.mode, omega, r.lambda);
    return r;
}

/// Laplace-Beltrami boundary problem on the ball: -div grad u = 0 inside,
/// nu . grad u = lambda Lap_boundary u on the sphere. Independent of omega
/// and mu; the separated mode r^l Y_l gives lambda = -1/(l+1) exactly.
inline DispersionResult scalar_lb_eigenvalue(int l) {
    if (l < 1) throw std::domain_error("scalar_lb_eigenvalue: degree must be >= 1");
    DispersionResult r;
    r.mode = {ModeFamily::scalar_lb, l};
    r.omega = 1.0;
    r.lambda = -1.0 / (l + 1.0);
    r.multiplicity = 2 * l + 1;
    r.residual = residual_check(r.mode, 1.0, r.lambda);
    return r;
}

/// All TE and TM eigenvalues for degrees 1..n_max, sorted by lambda.
inline std::vector<DispersionResult> ball_spectrum(double omega, int n_max) {
    if (n_max < 1) throw std::domain_error("ball_spectrum: n_max must be >= 1");
    std::vector<DispersionResult> out;
    for (int n = 1; n <= n_max; ++n) {
        out.push_back(tm_eigenvalue(n, omega));
        out.push_back(te_eigenvalue(n, omega));
    }
    std::sort(out.begin(), out.end(),
              [](const DispersionResult& a, const DispersionResult& b) { return a.lambda < b.lambda; });
    return out;
}

}  // namespace steklab
