#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "linalg.hpp"
#include "realization.hpp"

namespace ntk {

enum class SteinOrientation {
    Forward,  // X − A X A* = R
    Adjoint,  // X − A* X A = R
};

template <typename Real>
struct SteinSolution {
    CMatrix<Real> X;
    Real residual = 0;  // ‖X − A X A* − R‖_F (or the adjoint form)
    int doublings = 0;
};

/**
 * @brief Solves the discrete Stein equation by squared-iterate doubling.
 *
 * X_{k+1} = X_k + A_k X_k A_k*, A_{k+1} = A_k², stopping when the update drops below
 * tol.stein_update·‖X_k‖ or after tol.stein_max_doublings steps. The result is symmetrized.
 */
template <typename Real>
SteinSolution<Real> solve_stein(const CMatrix<Real>& a, const CMatrix<Real>& r, SteinOrientation orientation,
                                const Tolerances& tol = {}) {
    if (a.rows() != a.cols() || r.rows() != a.rows() || r.cols() != a.rows())
        throw Error(ErrorKind::DimensionMismatch, "solve_stein: A and R must be square of equal size");
    const Real rad = spectral_radius(a);
    if (!(rad < Real(1) - Real(tol.stability_margin)))
        throw Error(ErrorKind::Unstable, "solve_stein: spectral radius " + std::to_string(double(rad)));

    CMatrix<Real> ak = orientation == SteinOrientation::Forward ? CMatrix<Real>(a) : CMatrix<Real>(a.adjoint());
    CMatrix<Real> x = hermitian_part<Real>(r);
    SteinSolution<Real> sol;
    for (; sol.doublings < tol.stein_max_doublings; ++sol.doublings) {
        const CMatrix<Real> update = ak * x * ak.adjoint();
        x += update;
        ak = (ak * ak).eval();
        if (update.norm() <= Real(tol.stein_update) * x.norm()) {
            ++sol.doublings;
            break;
        }
    }
    x = hermitian_part<Real>(x);

    const CMatrix<Real> res = orientation == SteinOrientation::Forward ? CMatrix<Real>(x - a * x * a.adjoint() - r)
                                                                        : CMatrix<Real>(x - a.adjoint() * x * a - r);
    sol.residual = res.norm();
    if (!(sol.residual <= Real(tol.stein_residual) * std::max(Real(1), x.norm())))
        throw Error(ErrorKind::NotConvergent,
                    "solve_stein: residual " + std::to_string(double(sol.residual)) + " after " +
                        std::to_string(sol.doublings) + " doublings");
    sol.X = std::move(x);
    return sol;
}

template <typename Real>
struct GramianPair {
    CMatrix<Real> P;  // P − APA* = BB*
    CMatrix<Real> Q;  // Q − A*QA = C*C
    Real residual_P = 0;
    Real residual_Q = 0;
};

template <typename Real>
GramianPair<Real> gramians(const Realization<Real>& r, const Tolerances& tol = {}) {
    auto p = solve_stein<Real>(r.A(), r.B() * r.B().adjoint(), SteinOrientation::Forward, tol);
    auto q = solve_stein<Real>(r.A(), r.C().adjoint() * r.C(), SteinOrientation::Adjoint, tol);
    return {std::move(p.X), std::move(q.X), p.residual, q.residual};
}

namespace detail {

template <typename Real>
Real gramian_neg_tol(const CMatrix<Real>& m) {
    return Real(1e-10) * std::max(Real(1), m.norm());
}

// P^{1/2} Q P^{1/2}
template <typename Real>
CMatrix<Real> balanced_product(const GramianPair<Real>& g) {
    const CMatrix<Real> ph = psd_sqrt<Real>(g.P, gramian_neg_tol<Real>(g.P), "P");
    const RVector<Real> qev = hermitian_eigenvalues<Real>(g.Q);
    if (qev.size() > 0 && qev(0) < -gramian_neg_tol<Real>(g.Q))
        throw Error(ErrorKind::IndefiniteGramian, "Q has eigenvalue " + std::to_string(double(qev(0))));
    return hermitian_part<Real>(ph * g.Q * ph);
}

}  // namespace detail

/// Hankel singular values σ_i = sqrt(λ_i(PQ)), descending.
template <typename Real>
std::vector<Real> hankel_spectrum(const GramianPair<Real>& g) {
    const RVector<Real> ev = hermitian_eigenvalues<Real>(detail::balanced_product(g));
    std::vector<Real> out;
    for (Index i = ev.size() - 1; i >= 0; --i) out.push_back(std::sqrt(std::max(ev(i), Real(0))));
    return out;
}

/// Width of the band around zero inside which eigenvalues of I − PQ are rejected.
template <typename Real>
Real inertia_band(const GramianPair<Real>& g, const Tolerances& tol = {}) {
    return Real(tol.inertia) * (Real(1) + spectral_norm(g.P * g.Q));
}

/// κ₁ = ν₋(I − PQ), computed on the Hermitian congruent form I − P^{1/2}QP^{1/2}.
template <typename Real>
Index negativity_index(const GramianPair<Real>& g, const Tolerances& tol = {}) {
    const RVector<Real> pev = hermitian_eigenvalues<Real>(g.P);
    if (pev.size() > 0 && !(pev(0) > Real(0)))
        throw Error(ErrorKind::IndefiniteGramian, "negativity_index requires P > 0");
    const Index n = g.P.rows();
    const CMatrix<Real> h = CMatrix<Real>::Identity(n, n) - detail::balanced_product(g);
    const Real band = inertia_band(g, tol);
    const Inertia in = hermitian_inertia<Real>(h, band);
    if (in.zero > 0)
        throw Error(ErrorKind::BoundaryDegenerate,
                    "1 is numerically an eigenvalue of PQ (band " + std::to_string(double(band)) + ")");
    return in.negative;
}

/// Cholesky factor of P with a condition-number refusal.
template <typename Real>
Eigen::LLT<CMatrix<Real>> factor_gramian(const CMatrix<Real>& p, const Tolerances& tol = {}) {
    const Real cond = hermitian_condition<Real>(p);
    if (!(cond <= Real(tol.max_condition)))
        throw Error(ErrorKind::IllConditioned, "controllability gramian condition " + std::to_string(double(cond)));
    Eigen::LLT<CMatrix<Real>> llt(p);
    if (llt.info() != Eigen::Success) throw Error(ErrorKind::IndefiniteGramian, "P is not positive definite");
    return llt;
}

template <typename Real>
struct PickData {
    CMatrix<Real> P_tilde;         // solution of A* P̃ A − P̃ = C̃* j C̃
    CMatrix<Real> P_tilde_closed;  // P⁻¹ − Q
    CMatrix<Real> C_tilde;         // [C; B*(I − A*)⁻¹P⁻¹(I − A)], (p+q) × n
    Real cross_discrepancy = 0;    // ‖P̃ − (P⁻¹ − Q)‖_F
    Real condition_P = 0;
    Index kappa1 = 0;              // ν₋(P̃)
};

template <typename Real>
PickData<Real> pick_matrix(const Realization<Real>& r, const GramianPair<Real>& g, const Tolerances& tol = {}) {
    const Index n = r.n(), p = r.p(), q = r.q();
    const CMatrix<Real> id = CMatrix<Real>::Identity(n, n);
    const auto llt = factor_gramian<Real>(g.P, tol);
    const CMatrix<Real> p_inv = llt.solve(id);

    PickData<Real> out;
    out.condition_P = hermitian_condition<Real>(g.P);
    out.C_tilde.resize(p + q, n);
    out.C_tilde.topRows(p) = r.C();
    // B*(I − A*)⁻¹ = ((I − A)⁻¹B)*
    const CMatrix<Real> ia_inv_b = checked_lu<Real>(id - r.A(), tol.singular_rcond, "I - A").solve(r.B());
    out.C_tilde.bottomRows(q) = ia_inv_b.adjoint() * p_inv * (id - r.A());

    RVector<Real> signs(p + q);
    signs.head(p).setOnes();
    signs.tail(q).setConstant(Real(-1));
    const CMatrix<Real> rhs = -(out.C_tilde.adjoint() * signs.asDiagonal() * out.C_tilde);
    out.P_tilde = solve_stein<Real>(r.A(), rhs, SteinOrientation::Adjoint, tol).X;
    out.P_tilde_closed = hermitian_part<Real>(p_inv - g.Q);

    out.cross_discrepancy = (out.P_tilde - out.P_tilde_closed).norm();
    const Real scale = out.P_tilde.norm();
    if (!(out.cross_discrepancy <= Real(tol.pick_cross_check) * std::max(scale, Real(1e-300))))
        throw Error(ErrorKind::CrossCheckFailure,
                    "Pick matrix routes differ by " + std::to_string(double(out.cross_discrepancy)));

    const Real band = Real(tol.inertia) * (Real(1) + spectral_norm(out.P_tilde));
    const Inertia in = hermitian_inertia<Real>(out.P_tilde, band);
    if (in.zero > 0) throw Error(ErrorKind::BoundaryDegenerate, "Pick matrix is numerically singular");
    out.kappa1 = in.negative;
    return out;
}

}  // namespace ntk
