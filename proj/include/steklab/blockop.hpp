#pragma once

// =============================================================================
// Finite-dimensional realization of the block-operator machinery: synthetic
// models X = V + W1 + W2 carrying A_c, A_eps, A_tr = B_tr^T B_tr with the
// structural invariants of the continuous problem, the linear pencil
// A_X(lambda) = A_c - w^2 A_eps - lambda A_tr, both Schur complements, gap
// constants, tau-branch curves and the fixed-point eigenvalue search, plus
// the brute-force pencil oracle they are checked against.
// =============================================================================

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "steklab/linalg.hpp"
#include "steklab/rng.hpp"

namespace steklab {

class validity_error : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class model_invariant_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// -----------------------------------------------------------------------------
// Model generation knobs.
// -----------------------------------------------------------------------------

/// Spectral knobs for synthetic models. Compactness of the continuous
/// operators is mirrored by geometric eigenvalue decay: A_eps on V and W1
/// (the L2 mass is compact there) and the singular values of B_tr|_V (the
/// trace is compact on V). B_tr|_W1 stays well conditioned since
/// P_W1 A_tr|_W1 is strictly positive definite, not compact.
struct SpectralKnobs {
    double ac_min = 2.0, ac_max = 4.0;    // eigenvalue band of A_c|_V
    double eps_min = 0.5, eps_max = 1.5;  // base band of A_eps eigenvalues
    double eps_decay = 0.5;               // geometric ratio on the V and W1 blocks
    double eps_floor = 1e-8;              // decay floor, keeps A_eps resolvably PD
    double bw1_min = 0.7, bw1_max = 1.3;  // singular values of B_tr|_W1
    double bv_sigma0 = 0.3;               // leading singular value of B_tr|_V
    double bv_decay = 0.5;
    double bv_floor = 1e-3;
    int bv_rank = -1;    // -1: ceil(dim V / 2); clamped to min(dim V, dim L)
    int dim_lgrad = -1;  // -1: max(1, dim V / 2)

    static SpectralKnobs defaults() { return {}; }

    /// No decay, full-rank trace map. The penalty estimate presumes a stable
    /// saddle point (inf-sup bounded trace operator), which decayed singular
    /// values deliberately break.
    static SpectralKnobs well_conditioned() {
        SpectralKnobs k;
        k.eps_decay = 1.0;
        k.bv_sigma0 = 1.0;
        k.bv_decay = 1.0;
        k.bv_rank = 1 << 20;
        return k;
    }
};

struct ModelDims {
    std::size_t v = 0, w1 = 0, w2 = 0;
    std::size_t total() const { return v + w1 + w2; }
};

enum class Block { V = 0, W1 = 1, W2 = 2 };

// -----------------------------------------------------------------------------
// DiscreteModel
// -----------------------------------------------------------------------------

/// Finite-dimensional avatar of X = (V + W1) + W2 with coordinate blocks.
/// The boundary space L splits as L_grad (first dim_lgrad coordinates)
/// orthogonal to L_curl (the remaining dim W1 coordinates).
struct DiscreteModel {
    ModelDims dims;
    double omega = 1.0;
    std::uint64_t seed = 0;
    Matrix a_c, a_eps, a_tr;  // n x n, exactly symmetric
    Matrix b_tr;              // dim L x n
    std::size_t dim_lgrad = 0;

    std::size_t dim_l() const { return b_tr.rows(); }
    std::size_t offset(Block b) const {
        switch (b) {
            case Block::V: return 0;
            case Block::W1: return dims.v;
            case Block::W2: return dims.v + dims.w1;
        }
        return 0;
    }
    std::size_t dim(Block b) const {
        switch (b) {
            case Block::V: return dims.v;
            case Block::W1: return dims.w1;
            case Block::W2: return dims.w2;
        }
        return 0;
    }
    Matrix block_of(const Matrix& m, Block r, Block c) const {
        return m.block(offset(r), offset(c), dim(r), dim(c));
    }
    /// Columns of B_tr over one block.
    Matrix b_tr_on(Block b) const { return b_tr.block(0, offset(b), dim_l(), dim(b)); }

    Matrix m_v() const {
        return block_of(a_c, Block::V, Block::V) -
               (omega * omega) * block_of(a_eps, Block::V, Block::V);
    }

    /// Invariant suite; returns the names of violated invariants.
    std::vector<std::string> validate() const;
    void require_valid() const {
        auto v = validate();
        if (!v.empty()) {
            std::string msg = "model invariant violated:";
            for (const auto& s : v) msg += " " + s;
            throw model_invariant_error(msg);
        }
    }
};

inline std::vector<std::string> DiscreteModel::validate() const {
    std::vector<std::string> bad;
    const std::size_t n = dims.total();
    if (dims.w1 < 1) bad.push_back("w1_nontrivial");
    if (a_c.rows() != n || a_eps.rows() != n || a_tr.rows() != n || b_tr.cols() != n) {
        bad.push_back("shape");
        return bad;
    }
    if (!(a_c.all_finite() && a_eps.all_finite() && a_tr.all_finite() && b_tr.all_finite()))
        bad.push_back("finite_entries");
    if (symmetry_defect(a_c) != 0.0 || symmetry_defect(a_eps) != 0.0 ||
        symmetry_defect(a_tr) != 0.0)
        bad.push_back("symmetry");

    // A_tr = B_tr^T B_tr to machine precision
    const Matrix d = a_tr - b_tr.transpose() * b_tr;
    const double sc = std::max(1.0, a_tr.max_abs());
    if (d.max_abs() > 1e-13 * sc) bad.push_back("a_tr_factorization");

    // A_eps positive definite and block diagonal (the decomposition is
    // A_eps-orthogonal in the continuous setting, per the block form)
    if (eigenvalues_sym(a_eps).front() <= 0.0) bad.push_back("a_eps_positive_definite");
    {
        bool eps_ok = true;
        for (Block r : {Block::V, Block::W1, Block::W2})
            for (Block c : {Block::V, Block::W1, Block::W2})
                if (r != c && block_of(a_eps, r, c).max_abs() != 0.0) eps_ok = false;
        if (!eps_ok) bad.push_back("a_eps_block_diagonal");
    }

    // A_c PSD with kernel exactly W1 + W2
    {
        bool off_ok = true;
        for (Block r : {Block::V, Block::W1, Block::W2})
            for (Block c : {Block::V, Block::W1, Block::W2})
                if ((r != Block::V || c != Block::V) && block_of(a_c, r, c).max_abs() != 0.0)
                    off_ok = false;
        if (!off_ok) bad.push_back("a_c_kernel_w1w2");
        if (dims.v > 0 && eigenvalues_sym(block_of(a_c, Block::V, Block::V)).front() <= 0.0)
            bad.push_back("a_c_positive_on_v");
    }

    // B_tr vanishes on W2, is injective on W1 with range exactly L_curl
    if (dims.w2 > 0 && b_tr_on(Block::W2).max_abs() != 0.0) bad.push_back("b_tr_w2_zero");
    if (dims.w1 > 0) {
        const Matrix bw1 = b_tr_on(Block::W1);
        if (rank_of(bw1) != dims.w1) bad.push_back("b_tr_w1_injective");
        if (dim_lgrad > 0 && bw1.block(0, 0, dim_lgrad, dims.w1).max_abs() != 0.0)
            bad.push_back("b_tr_w1_range_lcurl");
        if (dim_l() < dim_lgrad + dims.w1) bad.push_back("boundary_split_shape");
    }
    return bad;
}

// -----------------------------------------------------------------------------
// make_model
// -----------------------------------------------------------------------------

namespace detail {

inline Matrix spd_from_spectrum(Rng& rng, const Vec& eigs) {
    const std::size_t d = eigs.size();
    if (d == 0) return Matrix(0, 0);
    Matrix q = rng.orthogonal(d);
    Matrix qd = q;
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) qd(i, j) *= eigs[j];
    return qd * q.transpose();
}

inline Vec decayed_band(Rng& rng, std::size_t d, double lo, double hi, double decay,
                        double floor) {
    Vec e(d);
    for (std::size_t i = 0; i < d; ++i)
        e[i] = rng.uniform(lo, hi) * std::max(std::pow(decay, static_cast<double>(i)), floor);
    return e;
}

}  // namespace detail

inline DiscreteModel make_model(ModelDims dims, std::uint64_t seed, double omega = 1.0,
                                const SpectralKnobs& knobs = SpectralKnobs::defaults()) {
    if (dims.w1 < 1)
        throw std::invalid_argument("make_model: dim W1 must be >= 1 (W1 is infinite "
                                    "dimensional in the continuous problem)");
    if (omega <= 0.0) throw std::invalid_argument("make_model: omega must be positive");
    if (knobs.eps_min <= 0.0 || knobs.eps_max < knobs.eps_min)
        throw std::invalid_argument("make_model: infeasible knobs (A_eps band must be positive)");
    if (knobs.ac_min <= 0.0 || knobs.ac_max < knobs.ac_min)
        throw std::invalid_argument("make_model: infeasible knobs (A_c band must be positive)");
    if (knobs.bw1_min <= 0.0 || knobs.eps_floor <= 0.0 || knobs.bv_floor <= 0.0 ||
        knobs.eps_decay <= 0.0 || knobs.bv_decay <= 0.0)
        throw std::invalid_argument("make_model: infeasible knobs (scales must be positive)");

    Rng rng(seed ^ 0x5374656b6c6f6666ull);  // stream tied to the seed only
    const std::size_t dv = dims.v, dw1 = dims.w1, dw2 = dims.w2, n = dims.total();

    DiscreteModel m;
    m.dims = dims;
    m.omega = omega;
    m.seed = seed;
    m.dim_lgrad = knobs.dim_lgrad >= 0 ? static_cast<std::size_t>(knobs.dim_lgrad)
                                       : std::max<std::size_t>(1, dv / 2);
    const std::size_t dl = m.dim_lgrad + dw1;

    m.a_c = Matrix(n, n);
    if (dv > 0) {
        Vec ce(dv);
        for (std::size_t i = 0; i < dv; ++i) ce[i] = rng.uniform(knobs.ac_min, knobs.ac_max);
        m.a_c.set_block(0, 0, detail::spd_from_spectrum(rng, ce));
    }

    m.a_eps = Matrix(n, n);
    if (dv > 0)
        m.a_eps.set_block(0, 0,
                          detail::spd_from_spectrum(
                              rng, detail::decayed_band(rng, dv, knobs.eps_min, knobs.eps_max,
                                                        knobs.eps_decay, knobs.eps_floor)));
    m.a_eps.set_block(dv, dv,
                      detail::spd_from_spectrum(
                          rng, detail::decayed_band(rng, dw1, knobs.eps_min, knobs.eps_max,
                                                    knobs.eps_decay, knobs.eps_floor)));
    if (dw2 > 0) {
        Vec e2(dw2);
        for (std::size_t i = 0; i < dw2; ++i) e2[i] = rng.uniform(knobs.eps_min, knobs.eps_max);
        m.a_eps.set_block(dv + dw1, dv + dw1, detail::spd_from_spectrum(rng, e2));
    }

    m.b_tr = Matrix(dl, n);
    {
        // B_tr|_W1: range exactly L_curl, well conditioned
        Matrix u = rng.orthogonal(dw1), v = rng.orthogonal(dw1);
        Matrix ud = u;
        for (std::size_t i = 0; i < dw1; ++i) {
            const double s = rng.uniform(knobs.bw1_min, knobs.bw1_max);
            for (std::size_t r = 0; r < dw1; ++r) ud(r, i) *= s;
        }
        m.b_tr.set_block(m.dim_lgrad, dv, ud * v.transpose());
    }
    if (dv > 0 && knobs.bv_sigma0 > 0.0) {
        // B_tr|_V: rank-limited with geometric singular value decay
        std::size_t r = knobs.bv_rank >= 0 ? static_cast<std::size_t>(knobs.bv_rank)
                                           : (dv + 1) / 2;
        r = std::min({r, dv, dl});
        Matrix ul = rng.orthogonal(dl).block(0, 0, dl, r);
        Matrix vr = rng.orthogonal(dv).block(0, 0, dv, r);
        Matrix uld = ul;
        for (std::size_t i = 0; i < r; ++i) {
            const double s = knobs.bv_sigma0 *
                             std::max(std::pow(knobs.bv_decay, static_cast<double>(i)),
                                      knobs.bv_floor);
            for (std::size_t row = 0; row < dl; ++row) uld(row, i) *= s;
        }
        m.b_tr.set_block(0, 0, uld * vr.transpose());
    }
    m.a_tr = m.b_tr.transpose() * m.b_tr;
    m.require_valid();
    return m;
}

// -----------------------------------------------------------------------------
// Pencil assembly and block form.
// -----------------------------------------------------------------------------

/// A_X(lambda) = A_c - w^2 A_eps - lambda A_tr.
inline Matrix assemble_pencil(const DiscreteModel& m, double lambda) {
    return m.a_c - (m.omega * m.omega) * m.a_eps - lambda * m.a_tr;
}

struct BlockForm {
    std::array<std::array<Matrix, 3>, 3> blocks;
    std::vector<std::string> pattern_violations;  // empty when the zero pattern holds
};

/// Nine blocks of A_X(lambda) in V/W1/W2 coordinates with the zero-pattern
/// assertion: A_c only on V x V, A_tr only on (V+W1)^2, W2 fully decoupled.
inline BlockForm block_form(const DiscreteModel& m, double lambda) {
    BlockForm f;
    const Matrix ax = assemble_pencil(m, lambda);
    const Block bs[3] = {Block::V, Block::W1, Block::W2};
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) f.blocks[r][c] = m.block_of(ax, bs[r], bs[c]);

    auto check_zero = [&](const Matrix& b, const std::string& name) {
        if (b.max_abs() != 0.0) f.pattern_violations.push_back(name);
    };
    for (Block r : bs)
        for (Block c : bs) {
            if (r != Block::V || c != Block::V)
                check_zero(m.block_of(m.a_c, r, c), "a_c outside VxV");
            if (r == Block::W2 || c == Block::W2) {
                if (r != c) check_zero(m.block_of(m.a_eps, r, c), "a_eps couples W2");
                check_zero(m.block_of(m.a_tr, r, c), "a_tr touches W2");
            }
        }
    return f;
}

// -----------------------------------------------------------------------------
// Gap constants.
// -----------------------------------------------------------------------------

struct GapConstants {
    double c0 = 0.0;             // right gap radius, (0, c0) eigenvalue-free
    double c_infty = 0.0;        // left gap threshold, (-inf, -c_infty) eigenvalue-free
    double neumann_norm = 0.0;   // ||(P_V(A_c - w^2 A_eps)|_V)^-1 P_V A_tr|_V||
    double schur_radius = 0.0;   // Neumann-series validity |lambda| < 1/neumann_norm
    double c0_neumann = 0.0;     // the 1/(2 neumann_norm) bound
    double w1_window_radius = 0.0;  // sampled positivity radius of T_W1 + H_W1(lambda)
    double c_infty_pd = 0.0;     // w^2 max gen. eigenvalue of (A_eps|_W1, A_tr|_W1)
    bool left_gap_certified = false;
};

namespace detail {

inline Matrix th_w1(const DiscreteModel& m, double lambda) {
    const Matrix t1 = m.block_of(m.a_tr, Block::W1, Block::W1);
    if (lambda == 0.0) return t1;
    const Matrix mv = m.m_v();
    const Matrix tv = m.block_of(m.a_tr, Block::V, Block::V);
    const Matrix tvw = m.block_of(m.a_tr, Block::V, Block::W1);
    const Matrix h = lambda * (tvw.transpose() * solve(mv - lambda * tv, tvw));
    return t1 + symmetrize(h);
}

}  // namespace detail

/// c0 from the Neumann-series bound intersected with the sampled positivity
/// radius of P_W1 A_tr|_W1 + H_W1(lambda); c_infty is the certified left-gap
/// constant: the largest finite generalized eigenvalue of
/// (diag(-M_V, w^2 A_eps|_W1), A_tr|_{V+W1}). Pairing the eigenvalue
/// equations of A_X(-s), s > 0, gives s * |B_tr u|^2 = w^2 <A_eps w1, w1> -
/// <M_V v, v> for any eigenvector u = (v, w1), so s never exceeds that
/// generalized eigenvalue once M_V is positive definite on ker B_tr|_V.
inline GapConstants gap_constants(const DiscreteModel& m) {
    GapConstants g;
    const double w2 = m.omega * m.omega;
    const Matrix mv = m.m_v();
    if (m.dims.v > 0 && cond_sym(mv) > 1e12)
        throw validity_error("gap_constants: NoNeumann fails, P_V(A_c - w^2 A_eps)|_V singular");

    const Matrix tv = m.block_of(m.a_tr, Block::V, Block::V);
    g.neumann_norm = m.dims.v > 0 ? spectral_norm(solve(mv, tv)) : 0.0;
    g.schur_radius = g.neumann_norm > 1e-300 ? 1.0 / g.neumann_norm : 1e300;
    g.c0_neumann = 0.5 * g.schur_radius;

    // positivity radius of T_W1 + H_W1, sampled at 64 points per side
    auto positive_at = [&](double lam) {
        return eigenvalues_sym(detail::th_w1(m, lam)).front() > 0.0;
    };
    const double rs = 0.999 * std::min(g.schur_radius, 1e300);
    double ok = 0.0;
    for (int k = 1; k <= 64; ++k) {
        const double lam = rs * k / 64.0;
        if (!positive_at(lam) || !positive_at(-lam)) break;
        ok = lam;
    }
    g.w1_window_radius = ok;
    g.c0 = std::min(g.c0_neumann, ok);

    // PD / Schur-validity threshold on the W1 block
    const Matrix e1 = m.block_of(m.a_eps, Block::W1, Block::W1);
    const Matrix t1 = m.block_of(m.a_tr, Block::W1, Block::W1);
    g.c_infty_pd = w2 * generalized_eigh(e1, t1).back();

    // certified left gap
    const std::size_t dv = m.dims.v, dw1 = m.dims.w1;
    Matrix d(dv + dw1, dv + dw1);
    d.set_block(0, 0, -1.0 * mv);
    d.set_block(dv, dv, w2 * e1);
    const Matrix bvw = m.b_tr.block(0, 0, m.dim_l(), dv + dw1);
    bool kernel_negative = true;
    if (dv > 0) {
        const Matrix z = nullspace_basis(m.b_tr_on(Block::V));
        if (z.cols() > 0) {
            const Vec wz = eigenvalues_sym(z.transpose() * (mv * z));
            kernel_negative = wz.front() > 0.0;
        }
    }
    try {
        const PencilEigen pe = pencil_eigs(d, bvw);
        g.c_infty = pe.values.empty() ? g.c_infty_pd : std::max(pe.values.back(), g.c_infty_pd);
        g.left_gap_certified = kernel_negative && !pe.values.empty();
    } catch (const singular_pencil_error&) {
        g.c_infty = g.c_infty_pd;
        g.left_gap_certified = false;
    }
    return g;
}

// -----------------------------------------------------------------------------
// Schur complements.
// -----------------------------------------------------------------------------

enum class SchurSide { w1, v };

inline const char* to_string(SchurSide s) { return s == SchurSide::w1 ? "W1side" : "Vside"; }

/// One Schur complement of the pencil at a fixed parameter, with the
/// operators the fixed-point analysis needs. W1 side: parameter is lambda,
/// carries A_W1(lambda) and H_W1(lambda). V side: parameter is
/// lambda-tilde = 1/lambda, carries K_V and S_V tilde forms; the frozen
/// pencil map is exposed through frozen_pencil(tau).
struct SchurContext {
    SchurSide side = SchurSide::w1;
    double parameter = 0.0;
    double validity_bound = 0.0;  // |parameter| must stay below this
    Matrix a_w1, h_w1;            // W1 side
    Matrix k_v, s_v;              // V side
    Matrix mv, e_w1, t_w1;        // frozen-pencil ingredients
    double omega = 0.0;
    double h_norm = 0.0;          // ||H_W1(lambda)||
    double h_norm_bound = 0.0;    // 2|lambda| ||M_V^-1|| ||A_tr||^2 (W1 side)

    Matrix frozen_pencil(double tau) const {
        if (side == SchurSide::w1)
            return -1.0 * ((omega * omega) * e_w1) - tau * th();
        return tau * mv - k_v;
    }
    Matrix th() const { return t_w1 + h_w1; }
};

inline SchurContext schur_w1(const DiscreteModel& m, double lambda, const GapConstants& g) {
    if (std::abs(lambda) >= g.schur_radius)
        throw validity_error("schur_w1: |lambda| outside the Neumann-series validity ball, bound " +
                             std::to_string(g.schur_radius));
    SchurContext c;
    c.side = SchurSide::w1;
    c.parameter = lambda;
    c.validity_bound = g.schur_radius;
    c.omega = m.omega;
    c.mv = m.m_v();
    c.e_w1 = m.block_of(m.a_eps, Block::W1, Block::W1);
    c.t_w1 = m.block_of(m.a_tr, Block::W1, Block::W1);

    const Matrix tvw = m.block_of(m.a_tr, Block::V, Block::W1);
    const Matrix tv = m.block_of(m.a_tr, Block::V, Block::V);
    if (lambda == 0.0 || m.dims.v == 0) {
        c.h_w1 = Matrix(m.dims.w1, m.dims.w1);
    } else {
        c.h_w1 = symmetrize(lambda * (tvw.transpose() * solve(c.mv - lambda * tv, tvw)));
    }
    c.a_w1 = -1.0 * ((m.omega * m.omega) * c.e_w1) - lambda * (c.t_w1 + c.h_w1);
    c.h_norm = spectral_norm(c.h_w1);
    const double minv = m.dims.v > 0 ? spectral_norm(inverse(c.mv)) : 0.0;
    const double atr = spectral_norm(m.a_tr);
    c.h_norm_bound = 2.0 * std::abs(lambda) * minv * atr * atr;
    return c;
}

inline SchurContext schur_w1(const DiscreteModel& m, double lambda) {
    return schur_w1(m, lambda, gap_constants(m));
}

inline SchurContext schur_v(const DiscreteModel& m, double lambda_tilde, const GapConstants& g) {
    if (std::abs(lambda_tilde) >= 1.0 / g.c_infty)
        throw validity_error("schur_v: |lambda_tilde| outside 1/c_infty = " +
                             std::to_string(1.0 / g.c_infty));
    SchurContext c;
    c.side = SchurSide::v;
    c.parameter = lambda_tilde;
    c.validity_bound = 1.0 / g.c_infty;
    c.omega = m.omega;
    c.mv = m.m_v();
    c.e_w1 = m.block_of(m.a_eps, Block::W1, Block::W1);
    c.t_w1 = m.block_of(m.a_tr, Block::W1, Block::W1);

    const Matrix tw = c.t_w1 + (m.omega * m.omega * lambda_tilde) * c.e_w1;
    const Vec wtw = eigenvalues_sym(tw);
    if (wtw.front() <= 0.0)
        throw validity_error("schur_v: W1 block w^2 lt A_eps + A_tr lost positivity");
    c.s_v = symmetrize(inverse(tw));
    const Matrix tvw = m.block_of(m.a_tr, Block::V, Block::W1);
    c.k_v = symmetrize(m.block_of(m.a_tr, Block::V, Block::V) -
                       tvw * (c.s_v * tvw.transpose()));
    return c;
}

inline SchurContext schur_v(const DiscreteModel& m, double lambda_tilde) {
    return schur_v(m, lambda_tilde, gap_constants(m));
}

// -----------------------------------------------------------------------------
// Tau curves and the fixed-point eigenvalue search.
// -----------------------------------------------------------------------------

struct TauCurve {
    SchurSide side = SchurSide::w1;
    int branch = 0;
    std::vector<std::pair<double, double>> samples;  // (lambda, tau_n(lambda))
};

namespace detail {

/// Branch values of the frozen pencil at one parameter value, ascending.
/// W1 side: generalized eigenvalues of (-w^2 E_W1, T_W1 + H(lambda)); the
/// right operator must be positive definite (Lemma-level model audit).
/// V side: eigenvalues of K^(1/2) M_V^-1 K^(1/2).
inline Vec tau_branches(const DiscreteModel& m, SchurSide side, double t,
                        const GapConstants& g) {
    if (side == SchurSide::w1) {
        const SchurContext c = schur_w1(m, t, g);
        const Matrix th = c.th();
        if (eigenvalues_sym(th).front() <= 0.0)
            throw model_invariant_error(
                "tau_branches: frozen W1 pencil indefinite, positivity of T_W1 + H failed");
        return generalized_eigh(-1.0 * ((m.omega * m.omega) * c.e_w1), th);
    }
    const SchurContext c = schur_v(m, t, g);
    const Matrix kh = psd_sqrt(c.k_v, -1e-10);
    return eigenvalues_sym(symmetrize(kh * solve(c.mv, kh)));
}

}  // namespace detail

/// Sampled branch curves lambda -> tau_n(lambda) over a parameter grid.
/// Branches are threaded by sorted order with multiplicity; sorted branches
/// are continuous in the parameter, which is all the fixed-point argument
/// uses.
inline std::vector<TauCurve> tau_curves(const DiscreteModel& m, SchurSide side,
                                        const std::vector<double>& grid,
                                        std::size_t branch_count) {
    const GapConstants g = gap_constants(m);
    const std::size_t dim = side == SchurSide::w1 ? m.dims.w1 : m.dims.v;
    branch_count = std::min(branch_count, dim);
    std::vector<TauCurve> curves(branch_count);
    for (std::size_t b = 0; b < branch_count; ++b) {
        curves[b].side = side;
        curves[b].branch = static_cast<int>(b);
    }
    for (double t : grid) {
        const Vec taus = detail::tau_branches(m, side, t, g);
        for (std::size_t b = 0; b < branch_count; ++b)
            curves[b].samples.emplace_back(t, taus[b]);
    }
    return curves;
}

struct FixedPointRoot {
    int branch = 0;
    double location = 0.0;   // parameter value t* with tau_n(t*) = t*
    double eigenvalue = 0.0; // lambda (V side maps 1/t*)
    double f_residual = 0.0;
};

struct FixedPointResult {
    SchurSide side = SchurSide::w1;
    std::vector<FixedPointRoot> roots;          // sorted by eigenvalue
    std::vector<double> eigenvalues;            // convenience copy, sorted
    std::size_t branches_searched = 0;
    std::vector<int> branches_without_root;     // reported, not fatal
};

/// Scan + bisection for fixed points tau_n(t) = t of the sorted branches.
/// The scan uses grid_n points over the window; each sign change is refined
/// by bisection until the bracket is exhausted in double precision. V-side
/// roots below the infinite-type horizon (|lambda| > 1e12) and kernel
/// branches (tau identically zero at machine scale) are discarded.
inline FixedPointResult fixed_point_eigensolve(const DiscreteModel& m, SchurSide side,
                                               std::pair<double, double> window,
                                               std::size_t branch_count = SIZE_MAX,
                                               std::size_t grid_n = 200) {
    const GapConstants g = gap_constants(m);
    const double bound = side == SchurSide::w1 ? g.schur_radius : 1.0 / g.c_infty;
    if (!(window.first < window.second))
        throw validity_error("fixed_point_eigensolve: empty window");
    if (std::max(std::abs(window.first), std::abs(window.second)) >= bound)
        throw validity_error("fixed_point_eigensolve: window outside the validity region, bound " +
                             std::to_string(bound));
    if (side == SchurSide::v && window.first < 0.0)
        throw validity_error(
            "fixed_point_eigensolve: V-side windows require lambda_tilde >= 0 "
            "(positivity of K_V)");

    const std::size_t dim = side == SchurSide::w1 ? m.dims.w1 : m.dims.v;
    branch_count = std::min(branch_count, dim);
    grid_n = std::max<std::size_t>(grid_n, 8);

    std::vector<double> grid(grid_n);
    for (std::size_t i = 0; i < grid_n; ++i)
        grid[i] = window.first + (window.second - window.first) * i / (grid_n - 1.0);
    std::vector<Vec> taus(grid_n);
    for (std::size_t i = 0; i < grid_n; ++i) taus[i] = detail::tau_branches(m, side, grid[i], g);

    FixedPointResult out;
    out.side = side;
    out.branches_searched = branch_count;
    const double zero_horizon = 1e-12;

    for (std::size_t b = 0; b < branch_count; ++b) {
        double max_tau = 0.0;
        for (std::size_t i = 0; i < grid_n; ++i)
            max_tau = std::max(max_tau, std::abs(taus[i][b]));
        if (side == SchurSide::v && max_tau < 1e-11) continue;  // kernel branch

        bool found = false;
        for (std::size_t i = 0; i + 1 < grid_n; ++i) {
            const double f0 = taus[i][b] - grid[i];
            const double f1 = taus[i + 1][b] - grid[i + 1];
            if (!(f0 * f1 < 0.0)) continue;
            double lo = grid[i], hi = grid[i + 1], flo = f0;
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (hi - lo <= 1e-15 * std::max({std::abs(lo), std::abs(hi), 1e-13})) break;
                const double fm = detail::tau_branches(m, side, mid, g)[b] - mid;
                if (flo * fm <= 0.0) {
                    hi = mid;
                } else {
                    lo = mid;
                    flo = fm;
                }
            }
            const double t_star = 0.5 * (lo + hi);
            if (side == SchurSide::v && t_star <= zero_horizon) continue;
            FixedPointRoot root;
            root.branch = static_cast<int>(b);
            root.location = t_star;
            root.eigenvalue = side == SchurSide::w1 ? t_star : 1.0 / t_star;
            root.f_residual = std::abs(detail::tau_branches(m, side, t_star, g)[b] - t_star);
            out.roots.push_back(root);
            found = true;
        }
        if (!found) out.branches_without_root.push_back(static_cast<int>(b));
    }
    std::sort(out.roots.begin(), out.roots.end(),
              [](const FixedPointRoot& a, const FixedPointRoot& b) {
                  return a.eigenvalue < b.eigenvalue;
              });
    for (const auto& r : out.roots) out.eigenvalues.push_back(r.eigenvalue);
    return out;
}

// -----------------------------------------------------------------------------
// Brute-force oracle.
// -----------------------------------------------------------------------------

struct EigenvalueEntry {
    double lambda = 0.0;
    int multiplicity = 1;
    std::string method;  // direct | fixedpoint-W1 | fixedpoint-V
    int side = 0;        // sign of lambda
};

/// All finite eigenvalues of the pencil (A_c - w^2 A_eps, A_tr), clustered
/// into multiplicities at relative tolerance 1e-9.
inline std::vector<EigenvalueEntry> direct_solve(const DiscreteModel& m) {
    const Matrix big = m.a_c - (m.omega * m.omega) * m.a_eps;
    const PencilEigen pe = pencil_eigs(big, m.b_tr);
    std::vector<EigenvalueEntry> out;
    for (double l : pe.values) {
        if (!out.empty() &&
            std::abs(l - out.back().lambda) <= 1e-9 * std::max(1.0, std::abs(l))) {
            out.back().multiplicity += 1;
            continue;
        }
        EigenvalueEntry e;
        e.lambda = l;
        e.method = "direct";
        e.side = l > 0 ? 1 : (l < 0 ? -1 : 0);
        out.push_back(e);
    }
    return out;
}

/// Direct eigenpairs (for decoupling diagnostics).
inline PencilEigen direct_eigenpairs(const DiscreteModel& m) {
    return pencil_eigs(m.a_c - (m.omega * m.omega) * m.a_eps, m.b_tr, true);
}

}  // namespace steklab
