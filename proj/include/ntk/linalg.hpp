#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "types.hpp"

namespace ntk {

template <typename Derived>
auto singular_values(const Eigen::MatrixBase<Derived>& m) {
    using Scalar = typename Derived::Scalar;
    using Plain = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    if (m.size() == 0) return typename Eigen::BDCSVD<Plain>::SingularValuesType{};
    Eigen::BDCSVD<Plain> svd(m.derived());
    return typename Eigen::BDCSVD<Plain>::SingularValuesType(svd.singularValues());
}

template <typename Derived>
auto spectral_norm(const Eigen::MatrixBase<Derived>& m) {
    using Real = typename Eigen::NumTraits<typename Derived::Scalar>::Real;
    const auto sv = singular_values(m);
    return sv.size() == 0 ? Real(0) : sv(0);
}

/// Number of singular values above rel_tol·σ_max.
template <typename Derived>
Index numerical_rank(const Eigen::MatrixBase<Derived>& m, double rel_tol) {
    using Real = typename Eigen::NumTraits<typename Derived::Scalar>::Real;
    const auto sv = singular_values(m);
    if (sv.size() == 0 || sv(0) == Real(0)) return 0;
    const Real threshold = Real(rel_tol) * sv(0);
    return static_cast<Index>((sv.array() > threshold).count());
}

template <typename Real>
Real spectral_radius(const CMatrix<Real>& a) {
    if (a.size() == 0) return Real(0);
    Eigen::ComplexEigenSolver<CMatrix<Real>> es(a, false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

template <typename Real>
CMatrix<Real> hermitian_part(const CMatrix<Real>& x) {
    return (x + x.adjoint()) / Real(2);
}

/// Ascending eigenvalues of a Hermitian matrix (only the lower triangle is read).
template <typename Real>
RVector<Real> hermitian_eigenvalues(const CMatrix<Real>& h) {
    if (h.size() == 0) return RVector<Real>();
    Eigen::SelfAdjointEigenSolver<CMatrix<Real>> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

struct Inertia {
    Index negative = 0;
    Index zero = 0;
    Index positive = 0;
};

/// Inertia of a Hermitian matrix; eigenvalues with |λ| ≤ band count as zero.
template <typename Real>
Inertia hermitian_inertia(const CMatrix<Real>& h, Real band) {
    Inertia in;
    const RVector<Real> ev = hermitian_eigenvalues(h);
    for (Index i = 0; i < ev.size(); ++i) {
        if (ev(i) < -band)
            ++in.negative;
        else if (ev(i) > band)
            ++in.positive;
        else
            ++in.zero;
    }
    return in;
}

/// Principal square root of a positive semidefinite Hermitian matrix. Eigenvalues below
/// -neg_tol raise IndefiniteGramian; smaller negative roundoff is clamped to zero.
template <typename Real>
CMatrix<Real> psd_sqrt(const CMatrix<Real>& h, Real neg_tol, const char* name) {
    if (h.size() == 0) return h;
    Eigen::SelfAdjointEigenSolver<CMatrix<Real>> es(h);
    RVector<Real> ev = es.eigenvalues();
    if (ev.minCoeff() < -neg_tol)
        throw Error(ErrorKind::IndefiniteGramian,
                    std::string(name) + " has eigenvalue " + std::to_string(double(ev.minCoeff())));
    ev = ev.cwiseMax(Real(0)).cwiseSqrt();
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

/// 2-norm condition number of a Hermitian positive definite matrix from its eigenvalues.
template <typename Real>
Real hermitian_condition(const CMatrix<Real>& h) {
    const RVector<Real> ev = hermitian_eigenvalues(h);
    if (ev.size() == 0) return Real(1);
    if (ev(0) <= Real(0)) return std::numeric_limits<Real>::infinity();
    return ev(ev.size() - 1) / ev(0);
}

template <typename Real>
Real norm1(const CMatrix<Real>& m) {
    return m.size() == 0 ? Real(0) : m.cwiseAbs().colwise().sum().maxCoeff();
}

/// LU factorization that refuses (numerically) singular matrices.
/// With a positive scale the rcond estimate is taken relative to that norm instead of ‖m‖₁,
/// which is what catches a 1×1 matrix that is tiny only by cancellation.
template <typename Real>
Eigen::PartialPivLU<CMatrix<Real>> checked_lu(const CMatrix<Real>& m, double min_rcond, const char* what,
                                              Real scale = Real(0)) {
    Eigen::PartialPivLU<CMatrix<Real>> lu(m);
    Real rc = lu.rcond();
    if (scale > Real(0)) rc *= norm1(m) / scale;
    if (!(rc >= Real(min_rcond)))
        throw Error(ErrorKind::SingularEvaluation,
                    std::string(what) + " is numerically singular (rcond " + std::to_string(double(rc)) + ")");
    return lu;
}

template <typename Real>
bool all_finite(const CMatrix<Real>& m) {
    return m.allFinite();
}

}  // namespace ntk
