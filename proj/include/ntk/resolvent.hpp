#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "fourier.hpp"
#include "linalg.hpp"
#include "realization.hpp"
#include "stein.hpp"

namespace ntk {

/**
 * @brief Matrices behind the resolvent:
 *   M = diag(−A, I),  N = diag(−I, A*),  Λ = [−Q I; I −P],
 *   G(z) = diag(C, B*)(M − zN)⁻¹.
 */
template <typename Real>
struct ResolventData {
    Realization<Real> realization;
    CMatrix<Real> M, N;
    CMatrix<Real> Lambda, Lambda_inv;
    CMatrix<Real> G1_star;  // G(1)*, 2n × m
    RVector<Real> j;        // diagonal of j_pq
    Index n = 0, p = 0, q = 0, m = 0;
    Index kappa1 = 0;
    Real condition_Lambda = 0;
    Tolerances tol;
};

template <typename Real>
RVector<Real> signature(Index p, Index q) {
    RVector<Real> j(p + q);
    j.head(p).setOnes();
    j.tail(q).setConstant(Real(-1));
    return j;
}

/// j_pq as a dense complex matrix.
template <typename Real>
CMatrix<Real> signature_matrix(const RVector<Real>& j) {
    return j.template cast<Complex<Real>>().asDiagonal();
}

/// G(z) from two independent n × n solves (M − zN is block diagonal).
template <typename Real>
CMatrix<Real> g_evaluate(const ResolventData<Real>& rd, Complex<Real> z) {
    const auto& r = rd.realization;
    const Index n = rd.n;
    const CMatrix<Real> id = CMatrix<Real>::Identity(n, n);
    CMatrix<Real> g = CMatrix<Real>::Zero(rd.m, 2 * n);
    // C(zI − A)⁻¹ = ((z̄I − A*)⁻¹C*)* and B*(I − zA*)⁻¹ = ((I − z̄A)⁻¹B)*
    const auto lu1 = checked_lu<Real>(std::conj(z) * id - r.A().adjoint(), rd.tol.singular_rcond, "zI - A",
                                      std::abs(z) + r.A().norm());
    g.topLeftCorner(rd.p, n) = lu1.solve(r.C().adjoint()).adjoint();
    const auto lu2 = checked_lu<Real>(id - std::conj(z) * r.A(), rd.tol.singular_rcond, "I - zA*",
                                      Real(1) + std::abs(z) * r.A().norm());
    g.bottomRightCorner(rd.q, n) = lu2.solve(r.B()).adjoint();
    return g;
}

namespace detail {

template <typename Real>
ResolventData<Real> resolvent_skeleton(const Realization<Real>& r, const Tolerances& tol) {
    ResolventData<Real> rd;
    rd.realization = r;
    rd.n = r.n();
    rd.p = r.p();
    rd.q = r.q();
    rd.m = rd.p + rd.q;
    rd.tol = tol;
    rd.j = signature<Real>(rd.p, rd.q);
    const Index n = rd.n;
    const CMatrix<Real> id = CMatrix<Real>::Identity(n, n);
    rd.M = CMatrix<Real>::Zero(2 * n, 2 * n);
    rd.M.topLeftCorner(n, n) = -r.A();
    rd.M.bottomRightCorner(n, n) = id;
    rd.N = CMatrix<Real>::Zero(2 * n, 2 * n);
    rd.N.topLeftCorner(n, n) = -id;
    rd.N.bottomRightCorner(n, n) = r.A().adjoint();
    return rd;
}

}  // namespace detail

/// Builds Λ, Λ⁻¹ and G(1)* for a minimal stable realization with 1 ∉ σ(PQ).
template <typename Real>
ResolventData<Real> assemble(const Realization<Real>& r, const GramianPair<Real>& g, const Tolerances& tol = {}) {
    const Index kappa1 = negativity_index(g, tol);  // BoundaryDegenerate when 1 ∈ σ(PQ)
    ResolventData<Real> rd = detail::resolvent_skeleton(r, tol);
    rd.kappa1 = kappa1;
    const Index n = rd.n;
    const CMatrix<Real> id = CMatrix<Real>::Identity(n, n);
    rd.Lambda.resize(2 * n, 2 * n);
    rd.Lambda << -g.Q, id, id, -g.P;
    rd.Lambda = hermitian_part<Real>(rd.Lambda);

    const auto sv = singular_values(rd.Lambda);
    rd.condition_Lambda = sv(sv.size() - 1) > Real(0) ? sv(0) / sv(sv.size() - 1) : std::numeric_limits<Real>::infinity();
    if (!(rd.condition_Lambda <= Real(tol.max_condition)))
        throw Error(ErrorKind::BoundaryDegenerate,
                    "Lambda condition number " + std::to_string(double(rd.condition_Lambda)));
    rd.Lambda_inv = hermitian_part<Real>(rd.Lambda.partialPivLu().solve(CMatrix<Real>::Identity(2 * n, 2 * n)));
    rd.G1_star = g_evaluate(rd, Complex<Real>(1)).adjoint();
    return rd;
}

/// Rebuilds resolvent data from stored Λ⁻¹ (as read back from an export).
template <typename Real>
ResolventData<Real> resolvent_from_parts(const Realization<Real>& r, CMatrix<Real> lambda, CMatrix<Real> lambda_inv,
                                         Index kappa1, const Tolerances& tol = {}) {
    ResolventData<Real> rd = detail::resolvent_skeleton(r, tol);
    if (lambda.rows() != 2 * rd.n || lambda.cols() != 2 * rd.n || lambda_inv.rows() != 2 * rd.n ||
        lambda_inv.cols() != 2 * rd.n)
        throw Error(ErrorKind::DimensionMismatch, "Lambda and Lambda_inv must be 2n x 2n");
    rd.Lambda = std::move(lambda);
    rd.Lambda_inv = std::move(lambda_inv);
    rd.kappa1 = kappa1;
    const auto sv = singular_values(rd.Lambda);
    rd.condition_Lambda = sv(sv.size() - 1) > Real(0) ? sv(0) / sv(sv.size() - 1) : std::numeric_limits<Real>::infinity();
    const CMatrix<Real> id = CMatrix<Real>::Identity(2 * rd.n, 2 * rd.n);
    const Real defect = (rd.Lambda * rd.Lambda_inv - id).norm();
    if (!(defect <= Real(tol.pick_cross_check) * std::max(Real(1), rd.condition_Lambda)))
        throw Error(ErrorKind::CrossCheckFailure, "stored Lambda_inv is not the inverse of Lambda");
    rd.G1_star = g_evaluate(rd, Complex<Real>(1)).adjoint();
    return rd;
}

/**
 * @brief The generalized γ-generating matrix 𝔄(μ) = I − (1 − μ) G(μ) Λ⁻¹ G(1)* j.
 *
 * Evaluated pointwise. Λ⁻¹G(1)*j is precomputed at construction; nothing is mutated
 * afterwards, so concurrent evaluation is safe.
 */
template <typename Real>
class GammaGeneratingMatrix {
   public:
    explicit GammaGeneratingMatrix(ResolventData<Real> rd) : rd_(std::move(rd)) {
        h_ = rd_.Lambda_inv * rd_.G1_star * signature_matrix(rd_.j);
    }

    const ResolventData<Real>& data() const { return rd_; }
    Index p() const { return rd_.p; }
    Index q() const { return rd_.q; }
    Index m() const { return rd_.m; }
    Index kappa1() const { return rd_.kappa1; }

    /// Λ⁻¹ G(1)* j, 2n × m.
    const CMatrix<Real>& right_factor() const { return h_; }

    CMatrix<Real> operator()(Complex<Real> mu) const {
        const CMatrix<Real> id = CMatrix<Real>::Identity(rd_.m, rd_.m);
        if (mu == Complex<Real>(1)) return id;
        return id - (Real(1) - mu) * g_evaluate(rd_, mu) * h_;
    }

   private:
    ResolventData<Real> rd_;
    CMatrix<Real> h_;
};

template <typename Real>
CMatrix<Real> gamma_evaluate(const GammaGeneratingMatrix<Real>& a, Complex<Real> mu) {
    return a(mu);
}

// Block accessors for an m × m value split as p + q.
template <typename Derived>
auto a11(const Eigen::MatrixBase<Derived>& v, Index p) { return v.topLeftCorner(p, p); }
template <typename Derived>
auto a12(const Eigen::MatrixBase<Derived>& v, Index p) { return v.topRightCorner(p, v.cols() - p); }
template <typename Derived>
auto a21(const Eigen::MatrixBase<Derived>& v, Index p) { return v.bottomLeftCorner(v.rows() - p, p); }
template <typename Derived>
auto a22(const Eigen::MatrixBase<Derived>& v, Index p) { return v.bottomRightCorner(v.rows() - p, v.cols() - p); }

template <typename Real>
void require_on_circle(Complex<Real> mu, const Tolerances& tol) {
    if (std::abs(std::abs(mu) - Real(1)) > Real(tol.circle))
        throw Error(ErrorKind::NotOnCircle, "|mu| = " + std::to_string(double(std::abs(mu))));
}

/// ‖𝔄(μ) j 𝔄(μ)* − j‖_F for |μ| = 1.
template <typename Real>
Real j_unitarity_defect(const GammaGeneratingMatrix<Real>& a, Complex<Real> mu) {
    require_on_circle(mu, a.data().tol);
    const CMatrix<Real> v = a(mu);
    const auto& j = a.data().j;
    return (v * signature_matrix(j) * v.adjoint() - signature_matrix(j)).norm();
}

template <typename Real>
struct S21Value {
    CMatrix<Real> value;     // −a₂₂⁻¹ a₂₁
    Real discrepancy = 0;    // distance to −a₁₂*(a₁₁*)⁻¹
};

/// s₂₁(λ) = −a₂₂(λ)⁻¹a₂₁(λ); meaningful anywhere a₂₂(λ) is invertible.
/// Invertibility test for a diagonal block, scaled by the whole matrix so a 1×1 block near zero counts as singular.
template <typename Real>
bool block_invertible(const Eigen::PartialPivLU<CMatrix<Real>>& lu, const CMatrix<Real>& block,
                      const CMatrix<Real>& whole, Real min_rcond) {
    const Real scale = whole.cwiseAbs().colwise().sum().maxCoeff();
    const Real norm = block.cwiseAbs().colwise().sum().maxCoeff();
    return scale > Real(0) && lu.rcond() * norm / scale >= min_rcond;
}

template <typename Real>
CMatrix<Real> s21_at(const GammaGeneratingMatrix<Real>& a, Complex<Real> lambda) {
    const CMatrix<Real> v = a(lambda);
    const Index p = a.p();
    const CMatrix<Real> d = a22(v, p);
    Eigen::PartialPivLU<CMatrix<Real>> lu(d);
    if (!block_invertible(lu, d, v, Real(a.data().tol.singular_rcond)))
        throw Error(ErrorKind::BlockSingular, "a22 is singular");
    return -lu.solve(CMatrix<Real>(a21(v, p)));
}

/// s₂₁ on the circle together with the discrepancy between its two block formulas.
template <typename Real>
S21Value<Real> s21_evaluate(const GammaGeneratingMatrix<Real>& a, Complex<Real> mu) {
    require_on_circle(mu, a.data().tol);
    const CMatrix<Real> v = a(mu);
    const Index p = a.p();
    const Real min_rcond = Real(a.data().tol.singular_rcond);
    Eigen::PartialPivLU<CMatrix<Real>> lu22{CMatrix<Real>(a22(v, p))};
    Eigen::PartialPivLU<CMatrix<Real>> lu11{CMatrix<Real>(a11(v, p))};
    if (!block_invertible(lu22, CMatrix<Real>(a22(v, p)), v, min_rcond))
        throw Error(ErrorKind::BlockSingular, "a22 is singular");
    if (!block_invertible(lu11, CMatrix<Real>(a11(v, p)), v, min_rcond))
        throw Error(ErrorKind::BlockSingular, "a11 is singular");
    S21Value<Real> out;
    out.value = -lu22.solve(CMatrix<Real>(a21(v, p)));
    // −a₁₂*(a₁₁*)⁻¹ = −(a₁₁⁻¹a₁₂)*
    const CMatrix<Real> second = -lu11.solve(CMatrix<Real>(a12(v, p))).adjoint();
    out.discrepancy = (out.value - second).norm();
    return out;
}

/**
 * @brief Zeros of det a₂₂ inside 𝔻, the candidate poles of s₂₁.
 *
 * a₂₂(μ) = I − (1 − μ)B*(I − μA*)⁻¹X with X the lower-right block of Λ⁻¹G(1)*j, so
 * det a₂₂(μ)·det(I − μA*) = det((I − XB*) − μ(A* − XB*)); the zeros are μ = 1/ν for the
 * eigenvalues ν of (I − XB*)⁻¹(A* − XB*) with |ν| > 1.
 */
template <typename Real>
std::vector<Complex<Real>> a22_zeros_in_disk(const GammaGeneratingMatrix<Real>& a) {
    const auto& rd = a.data();
    const Index n = rd.n;
    const CMatrix<Real> x = a.right_factor().bottomRightCorner(n, rd.q);
    const CMatrix<Real> xb = x * rd.realization.B().adjoint();
    const CMatrix<Real> id = CMatrix<Real>::Identity(n, n);
    const CMatrix<Real> e = id - xb;
    const CMatrix<Real> t = rd.realization.A().adjoint() - xb;
    const CMatrix<Real> pencil = e.partialPivLu().solve(t);
    Eigen::ComplexEigenSolver<CMatrix<Real>> es(pencil, false);
    std::vector<Complex<Real>> zeros;
    for (Index i = 0; i < es.eigenvalues().size(); ++i) {
        const Complex<Real> nu = es.eigenvalues()(i);
        if (std::abs(nu) > Real(1)) zeros.push_back(Real(1) / nu);
    }
    std::sort(zeros.begin(), zeros.end(), [](Complex<Real> l, Complex<Real> r) {
        if (std::abs(l) != std::abs(r)) return std::abs(l) < std::abs(r);
        return std::arg(l) < std::arg(r);
    });
    return zeros;
}

struct MembershipReport {
    Index grid_size = 0;
    double max_j_unitarity_defect = 0;
    double max_s21_discrepancy = 0;
    double max_s21_norm = 0;                 // sup over the grid of σ_max(s₂₁)
    Index s21_pole_count_hankel = 0;         // Hankel rank of the γ_k(s₂₁)
    std::vector<double> s21_hankel_singular_values;
    Index a22_zero_count = 0;                // zeros of det a₂₂ in 𝔻
    Index winding_det_a22 = 0;
    Index winding_det_a11_star = 0;
    Index kappa1 = 0;
    Index coefficient_grid = 0;
    Index coefficient_count = 0;
    double defect_tolerance = 0;
    bool pass = false;
};

/**
 * @brief Runtime verification of the three defining conditions of the generalized
 * γ-generating class on a uniform circle grid.
 *
 * (1) j-unitarity; (2) the pole count of s₂₁ in 𝔻 from the Hankel rank of its
 * Fourier coefficients, cross-checked with the zeros of det a₂₂; (3) winding numbers of
 * det a₂₂ and det a₁₁* as a zero-count surrogate for outerness of a₁, a₂.
 */
template <typename Real>
MembershipReport membership_report(const GammaGeneratingMatrix<Real>& a, Index grid_size,
                                   double defect_tol = 1e-8, Index coefficient_count = 48,
                                   Index coefficient_grid = 4096) {
    if (grid_size < 4) throw Error(ErrorKind::GridTooCoarse, "membership grid must have at least 4 points");
    MembershipReport rep;
    rep.grid_size = grid_size;
    rep.kappa1 = a.kappa1();
    rep.defect_tolerance = defect_tol;
    const Index p = a.p();

    std::vector<Complex<Real>> det22, det11s;
    det22.reserve(static_cast<std::size_t>(grid_size));
    det11s.reserve(static_cast<std::size_t>(grid_size));
    const auto& j = a.data().j;
    for (Index l = 0; l < grid_size; ++l) {
        const Complex<Real> mu = unit_root<Real>(l, grid_size);
        const CMatrix<Real> v = a(mu);
        const Real defect = (v * signature_matrix(j) * v.adjoint() - signature_matrix(j)).norm();
        rep.max_j_unitarity_defect = std::max(rep.max_j_unitarity_defect, double(defect));
        det22.push_back(CMatrix<Real>(a22(v, p)).determinant());
        det11s.push_back(std::conj(CMatrix<Real>(a11(v, p)).determinant()));
        const S21Value<Real> s = s21_evaluate(a, mu);
        rep.max_s21_discrepancy = std::max(rep.max_s21_discrepancy, double(s.discrepancy));
        rep.max_s21_norm = std::max(rep.max_s21_norm, double(spectral_norm(s.value)));
    }
    rep.winding_det_a22 = winding_number<Real>(det22);
    rep.winding_det_a11_star = winding_number<Real>(det11s);

    rep.coefficient_grid = coefficient_grid;
    rep.coefficient_count = coefficient_count;
    const MatrixFunction<Real> s21 = [&a](Complex<Real> mu) { return s21_at(a, mu); };
    const auto fc = fourier_coefficients<Real>(s21, coefficient_grid, coefficient_count);
    for (Real s : hankel_singular_values<Real>(fc.coeffs)) rep.s21_hankel_singular_values.push_back(double(s));
    // s₂₁ is contractive on 𝕋, so unit scale is the natural floor for the rank decision.
    rep.s21_pole_count_hankel = hankel_rank<Real>(fc.coeffs, a.data().tol.hankel_rank, a.data().tol.hankel_rank);
    rep.a22_zero_count = static_cast<Index>(a22_zeros_in_disk(a).size());

    rep.pass = rep.max_j_unitarity_defect <= defect_tol && rep.s21_pole_count_hankel == rep.kappa1 &&
               rep.a22_zero_count == rep.kappa1 && rep.winding_det_a22 == rep.kappa1 &&
               rep.winding_det_a11_star == rep.kappa1;
    return rep;
}

}  // namespace ntk
