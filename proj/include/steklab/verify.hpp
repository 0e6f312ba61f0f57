#pragma once

// =============================================================================
// Verification layer on top of blockop: the assumption audit, the abstract
// spectral lemma check, the penalty-rate experiment, the gap check, and the
// per-model verification report the CLI serializes.
// =============================================================================

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "steklab/blockop.hpp"

namespace steklab {

// -----------------------------------------------------------------------------
// Assumption audit (discrete analogues, condition threshold 1e12).
// -----------------------------------------------------------------------------

struct AuditEntry {
    std::string name;
    bool pass = false;
    double condition = 0.0;
};

inline constexpr double kAuditConditionThreshold = 1e12;

/// The five frequency assumptions as restriction-invertibility audits;
/// failures are data, not errors (exceptional-frequency semantics).
inline std::vector<AuditEntry> assumption_audit(const DiscreteModel& m) {
    std::vector<AuditEntry> out;
    const Matrix mv = m.m_v();
    const Matrix mfull = m.a_c - (m.omega * m.omega) * m.a_eps;

    auto push = [&out](const std::string& name, double cond) {
        out.push_back({name, cond < kAuditConditionThreshold, cond});
    };
    auto restricted_cond = [](const Matrix& a, const Matrix& z) {
        if (z.cols() == 0) return 1.0;  // empty restriction is bijective
        return cond_sym(symmetrize(z.transpose() * (a * z)));
    };

    push("NoNeumann", cond_sym(mv));
    push("NoDirichlet2", restricted_cond(mfull, nullspace_basis(m.b_tr)));

    const Matrix bv = m.b_tr_on(Block::V);
    const Matrix z1 = nullspace_basis(bv);
    push("NoDirichlet", restricted_cond(mv, z1));

    const Matrix pg_bv = bv.block(0, 0, m.dim_lgrad, m.dims.v);
    const Matrix z2 = m.dim_lgrad > 0 ? nullspace_basis(pg_bv) : Matrix::identity(m.dims.v);
    push("NoHybrid", restricted_cond(mv, z2));

    // NoReduced: both projected-resolvent restrictions
    double cond_reduced = std::numeric_limits<double>::infinity();
    if (out[0].pass && m.dims.v > 0) {
        const Matrix mv_inv = inverse(mv);
        cond_reduced = std::max(restricted_cond(mv_inv, z1), restricted_cond(mv_inv, z2));
    } else if (m.dims.v == 0) {
        cond_reduced = 1.0;
    }
    push("NoReduced", cond_reduced);
    return out;
}

// -----------------------------------------------------------------------------
// Abstract spectral lemma: spectra of (I+G)K and K^(1/2)(I+G)K^(1/2).
// -----------------------------------------------------------------------------

struct AbstractLemmaReport {
    bool ig_invertible = false;
    bool kernel_condition_ok = false;
    double max_imaginary = 0.0;      // from the general eigensolve
    double max_mismatch = 0.0;       // sorted spectra, elementwise
    int negative_count_symmetric = 0;
    int negative_count_general = 0;
    bool spectra_match = false;
    bool negative_counts_match = false;
};

/// Dual-route comparison: the symmetric route diagonalizes
/// K^(1/2)(I+G)K^(1/2) with Jacobi; the general route runs Hessenberg-QR on
/// the nonsymmetric product (I+G)K. K must be PSD, G symmetric.
inline AbstractLemmaReport abstract_lemma_check(const Matrix& k, const Matrix& g,
                                                double tol = 1e-9) {
    const std::size_t n = k.rows();
    AbstractLemmaReport rep;
    const Matrix ig = Matrix::identity(n) + g;

    const Vec ig_eigs = eigenvalues_sym(ig);
    double ig_min = std::abs(ig_eigs.front());
    for (double w : ig_eigs) ig_min = std::min(ig_min, std::abs(w));
    rep.ig_invertible = ig_min > 1e-10;

    const Matrix kh = psd_sqrt(k);
    const Matrix sym = symmetrize(kh * (ig * kh));
    const Vec tau_sym = eigenvalues_sym(sym);
    rep.kernel_condition_ok = rank_of(kh) == rank_of(sym, 1e-10);

    const auto tau_gen_c = eigenvalues_general(ig * k);
    Vec tau_gen;
    for (const auto& z : tau_gen_c) {
        rep.max_imaginary = std::max(rep.max_imaginary, std::abs(z.imag()));
        tau_gen.push_back(z.real());
    }
    std::sort(tau_gen.begin(), tau_gen.end());

    const double scale = std::max(1.0, sym.max_abs());
    for (std::size_t i = 0; i < n; ++i)
        rep.max_mismatch = std::max(rep.max_mismatch, std::abs(tau_sym[i] - tau_gen[i]));
    rep.spectra_match = rep.max_mismatch <= tol && rep.max_imaginary <= tol;

    const double neg_cut = 1e-10 * scale;
    for (double t : tau_sym)
        if (t < -neg_cut) ++rep.negative_count_symmetric;
    for (double t : tau_gen)
        if (t < -neg_cut) ++rep.negative_count_general;
    rep.negative_counts_match = rep.negative_count_symmetric == rep.negative_count_general;
    return rep;
}

/// The lemma inputs the verification workflow derives from a model:
/// G = (P_V(A_c - w^2 A_eps)|_V)^-1 - I_V and K = K_V~(lambda_tilde).
inline std::pair<Matrix, Matrix> derived_lemma_operators(const DiscreteModel& m,
                                                         const GapConstants& g) {
    const double lt = 0.5 / g.c_infty;
    const SchurContext sv = schur_v(m, lt, g);
    const Matrix gmat = symmetrize(inverse(m.m_v())) - Matrix::identity(m.dims.v);
    Matrix k = sv.k_v;
    // clamp the roundoff-negative kernel eigenvalues so K is PSD by construction
    EigenDecomposition d = jacobi_eigh(k);
    Matrix kk(m.dims.v, m.dims.v);
    for (std::size_t j = 0; j < d.values.size(); ++j) {
        const double w = std::max(d.values[j], 0.0);
        for (std::size_t r = 0; r < m.dims.v; ++r)
            for (std::size_t c = 0; c < m.dims.v; ++c)
                kk(r, c) += w * d.vectors(r, j) * d.vectors(c, j);
    }
    return {symmetrize(kk), gmat};
}

// -----------------------------------------------------------------------------
// Penalty-rate experiment.
// -----------------------------------------------------------------------------

struct PenaltyResult {
    std::vector<double> lambdas;
    std::vector<double> errors;              // ||u - u_lambda|| per lambda
    std::optional<double> slope;             // log-log fit; absent when an error is 0
    bool errors_decreasing = false;
};

/// u solves (A_c + A_eps) u = f on ker B_tr (Galerkin restriction); u_lambda
/// solves the penalized system (A_c + A_eps + lambda A_tr) u_lambda = f.
inline PenaltyResult penalty_experiment(const DiscreteModel& m, const Vec& f,
                                        std::vector<double> lambdas) {
    PenaltyResult out;
    out.lambdas = lambdas;
    const Matrix a = m.a_c + m.a_eps;
    const Matrix z = nullspace_basis(m.b_tr);
    if (z.cols() == 0) throw model_invariant_error("penalty_experiment: ker B_tr is trivial");
    const Matrix az = symmetrize(z.transpose() * (a * z));
    if (eigenvalues_sym(az).front() <= 0.0)
        throw model_invariant_error("penalty_experiment: constrained system singular");
    const Vec zf = z.transpose() * f;
    const Vec u = z * solve(az, zf);

    for (double lam : lambdas) {
        const Vec ul = solve(a + lam * m.a_tr, f);
        double err = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) err += (u[i] - ul[i]) * (u[i] - ul[i]);
        out.errors.push_back(std::sqrt(err));
    }
    out.errors_decreasing = true;
    for (std::size_t i = 0; i + 1 < out.errors.size(); ++i)
        if (out.errors[i + 1] > out.errors[i]) out.errors_decreasing = false;

    bool all_positive = true;
    for (double e : out.errors) all_positive &= e > 1e-300;
    if (all_positive && out.errors.size() >= 2) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const double nn = static_cast<double>(out.errors.size());
        for (std::size_t i = 0; i < out.errors.size(); ++i) {
            const double x = std::log(lambdas[i]), y = std::log(out.errors[i]);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        out.slope = (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
    }
    return out;
}

// -----------------------------------------------------------------------------
// Gap check.
// -----------------------------------------------------------------------------

struct GapCheckResult {
    bool pass = false;
    bool left_checked = false;  // false when the left bound is uncertified
    std::vector<double> right_violations;  // eigenvalues inside (0, c0)
    std::vector<double> left_violations;   // eigenvalues inside (-inf, -c_infty)
};

/// Asserts the eigenvalue-free intervals (0, c0) and (-inf, -c_infty) on a
/// computed spectrum. Interval endpoints carry a 1e-9 relative guard since
/// the certified left bound can be attained exactly.
inline GapCheckResult gap_check(const std::vector<EigenvalueEntry>& spectrum,
                                const GapConstants& g) {
    GapCheckResult r;
    r.left_checked = g.left_gap_certified;
    for (const auto& e : spectrum) {
        if (e.lambda > 1e-12 && e.lambda < g.c0 * (1.0 - 1e-9))
            r.right_violations.push_back(e.lambda);
        if (r.left_checked && e.lambda < -g.c_infty * (1.0 + 1e-9))
            r.left_violations.push_back(e.lambda);
    }
    r.pass = r.right_violations.empty() && r.left_violations.empty();
    return r;
}

// -----------------------------------------------------------------------------
// Full per-model verification (the model-verify workflow).
// -----------------------------------------------------------------------------

struct AgreementSide {
    std::string side;
    double window_lo = 0.0, window_hi = 0.0;  // in lambda
    std::vector<double> direct_in_window;
    std::vector<double> fixed_point;
    double max_deviation = 0.0;   // relative to max(1, |lambda|)
    bool counts_match = false;
    bool pass = false;
};

struct ModelVerifyReport {
    ModelDims dims;
    std::uint64_t seed = 0;
    double omega = 0.0;
    std::vector<EigenvalueEntry> eigenvalues;
    GapConstants gap;
    GapCheckResult gap_check_result;
    std::vector<AuditEntry> audits;
    AbstractLemmaReport abstract_lemma;
    PenaltyResult penalty;
    AgreementSide agreement_w1, agreement_v;
    double w2_component_max = 0.0;  // largest relative W2 part of any eigenvector
    bool pass_non_audit = false;    // everything except audit entries
};

inline constexpr double kAgreementTolerance = 1e-8;

namespace detail {

inline AgreementSide compare_agreement(const std::vector<EigenvalueEntry>& direct,
                                       const FixedPointResult& fp, double lo, double hi,
                                       const char* name) {
    AgreementSide a;
    a.side = name;
    a.window_lo = lo;
    a.window_hi = hi;
    for (const auto& e : direct)
        for (int c = 0; c < e.multiplicity; ++c)
            if (e.lambda > lo && e.lambda < hi) a.direct_in_window.push_back(e.lambda);
    a.fixed_point = fp.eigenvalues;
    a.counts_match = a.direct_in_window.size() == a.fixed_point.size();
    if (a.counts_match) {
        for (std::size_t i = 0; i < a.fixed_point.size(); ++i) {
            const double d = std::abs(a.direct_in_window[i] - a.fixed_point[i]) /
                             std::max(1.0, std::abs(a.direct_in_window[i]));
            a.max_deviation = std::max(a.max_deviation, d);
        }
    }
    a.pass = a.counts_match && a.max_deviation <= kAgreementTolerance;
    return a;
}

}  // namespace detail

/// Runs the whole verification workflow on one model: direct oracle, both
/// fixed-point solvers with agreement, gap check, assumption audit, the
/// abstract-lemma check on the derived (G, K), and the penalty experiment.
inline ModelVerifyReport verify_model(const DiscreteModel& m) {
    ModelVerifyReport rep;
    rep.dims = m.dims;
    rep.seed = m.seed;
    rep.omega = m.omega;
    m.require_valid();

    rep.eigenvalues = direct_solve(m);
    rep.gap = gap_constants(m);
    rep.gap_check_result = gap_check(rep.eigenvalues, rep.gap);
    rep.audits = assumption_audit(m);

    // fixed-point searches over the guaranteed windows
    const double rw = 0.999 * rep.gap.w1_window_radius;
    const FixedPointResult fpw =
        rw > 0 ? fixed_point_eigensolve(m, SchurSide::w1, {-rw, rw})
               : FixedPointResult{};
    const double vhi = 0.999 / rep.gap.c_infty;
    const FixedPointResult fpv = fixed_point_eigensolve(m, SchurSide::v, {0.0, vhi});
    rep.agreement_w1 = detail::compare_agreement(rep.eigenvalues, fpw, -rw, rw, "W1side");
    rep.agreement_v =
        detail::compare_agreement(rep.eigenvalues, fpv, 1.0 / vhi, 1e12, "Vside");

    // W2 decoupling of eigenvectors
    const PencilEigen pairs = direct_eigenpairs(m);
    for (const auto& x : pairs.vectors) {
        double w2n = 0.0;
        for (std::size_t i = m.offset(Block::W2); i < m.dims.total(); ++i) w2n += x[i] * x[i];
        rep.w2_component_max = std::max(rep.w2_component_max, std::sqrt(w2n));
    }

    auto [k, g] = derived_lemma_operators(m, rep.gap);
    rep.abstract_lemma = abstract_lemma_check(k, g);

    Rng frng(m.seed ^ 0x70656e616c7479ull);
    Vec f(m.dims.total());
    for (double& x : f) x = frng.normal();
    rep.penalty = penalty_experiment(m, f, {1e2, 1e3, 1e4, 1e5, 1e6});

    rep.pass_non_audit = rep.gap_check_result.pass && rep.agreement_w1.pass &&
                         rep.agreement_v.pass && rep.abstract_lemma.spectra_match &&
                         rep.abstract_lemma.negative_counts_match &&
                         rep.penalty.errors_decreasing && rep.w2_component_max <= 1e-12;
    return rep;
}

}  // namespace steklab
