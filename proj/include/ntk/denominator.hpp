#pragma once

#include <utility>

#include "linalg.hpp"
#include "realization.hpp"
#include "stein.hpp"

namespace ntk {

/**
 * @brief Inner denominator b₂ of f₀ and the analytic function K = f₀ b₂.
 *
 * With W = P⁻¹(I − A)⁻¹B and V = B*(I − A*)⁻¹P⁻¹:
 *   b₂(z)   = I − (1 − z) B*(I − zA*)⁻¹ W
 *   b₂(z)⁻¹ = I + (1 − z) V (zI − A)⁻¹ B
 *   K(z)    = C P (I − A*)(I − zA*)⁻¹ W
 * The last form never touches (zI − A)⁻¹, so K is finite at the poles of f₀.
 */
template <typename Real>
class DenominatorData {
   public:
    DenominatorData(Realization<Real> r, GramianPair<Real> g, const Tolerances& tol = {})
        : r_(std::move(r)), g_(std::move(g)), tol_(tol), p_llt_(factor_gramian<Real>(g_.P, tol)) {
        const Index n = r_.n();
        const CMatrix<Real> id = CMatrix<Real>::Identity(n, n);
        ia_inv_b_ = checked_lu<Real>(id - r_.A(), tol_.singular_rcond, "I - A").solve(r_.B());
        w_ = p_llt_.solve(ia_inv_b_);
        v_ = w_.adjoint();  // (P⁻¹(I − A)⁻¹B)* = B*(I − A*)⁻¹P⁻¹
        k_left_ = r_.C() * g_.P * (id - r_.A().adjoint());
    }

    const Realization<Real>& realization() const { return r_; }
    const GramianPair<Real>& gramians() const { return g_; }
    const CMatrix<Real>& ia_inv_b() const { return ia_inv_b_; }
    const CMatrix<Real>& w() const { return w_; }
    const CMatrix<Real>& v() const { return v_; }
    const CMatrix<Real>& k_left() const { return k_left_; }
    const Tolerances& tolerances() const { return tol_; }

    /// (I − zA*)⁻¹ W
    CMatrix<Real> reflected_solve(Complex<Real> z) const {
        const Index n = r_.n();
        const CMatrix<Real> m = CMatrix<Real>::Identity(n, n) - z * r_.A().adjoint();
        return checked_lu<Real>(m, tol_.singular_rcond, "I - zA*", Real(1) + std::abs(z) * r_.A().norm()).solve(w_);
    }

   private:
    Realization<Real> r_;
    GramianPair<Real> g_;
    Tolerances tol_;
    Eigen::LLT<CMatrix<Real>> p_llt_;
    CMatrix<Real> ia_inv_b_, w_, v_, k_left_;
};

/// b₂(z), or b₂(z)⁻¹ when inverse is set; each from its own closed form.
template <typename Real>
CMatrix<Real> b2_evaluate(const DenominatorData<Real>& d, Complex<Real> z, bool inverse = false) {
    const auto& r = d.realization();
    const Index n = r.n(), q = r.q();
    const CMatrix<Real> iq = CMatrix<Real>::Identity(q, q);
    if (!inverse) return iq - (Real(1) - z) * r.B().adjoint() * d.reflected_solve(z);
    const CMatrix<Real> shifted = z * CMatrix<Real>::Identity(n, n) - r.A();
    const CMatrix<Real> x = checked_lu<Real>(shifted, d.tolerances().singular_rcond, "zI - A", std::abs(z) + norm1(r.A())).solve(r.B());
    return iq + (Real(1) - z) * d.v() * x;
}

/// K(z) = f₀(z) b₂(z) through the pole-free form.
template <typename Real>
CMatrix<Real> k_evaluate(const DenominatorData<Real>& d, Complex<Real> z) {
    return d.k_left() * d.reflected_solve(z);
}

/// ‖(zI − A)⁻¹B b₂(z) − P(I − A*)(I − zA*)⁻¹P⁻¹(I − A)⁻¹B‖_F
template <typename Real>
Real intertwining_defect(const DenominatorData<Real>& d, Complex<Real> z) {
    const auto& r = d.realization();
    const Index n = r.n();
    const CMatrix<Real> id = CMatrix<Real>::Identity(n, n);
    const CMatrix<Real> lhs =
        checked_lu<Real>(z * id - r.A(), d.tolerances().singular_rcond, "zI - A", std::abs(z) + norm1(r.A())).solve(r.B()) * b2_evaluate(d, z);
    const CMatrix<Real> rhs = d.gramians().P * (id - r.A().adjoint()) * d.reflected_solve(z);
    return (lhs - rhs).norm();
}

}  // namespace ntk
