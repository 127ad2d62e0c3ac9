#pragma once

#include <cmath>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "linalg.hpp"
#include "types.hpp"

namespace ntk {

// Disk geometry. Ω₊ = 𝔻, Ω₀ = 𝕋, Ω₋ = exterior.

template <typename Real>
Complex<Real> rho(Complex<Real> omega, Complex<Real> lambda) {
    return Real(1) - lambda * std::conj(omega);
}

/// λ° = 1/conj(λ), the reflection across the unit circle.
template <typename Real>
Complex<Real> reflect(Complex<Real> lambda) {
    return Real(1) / std::conj(lambda);
}

template <typename Real>
Complex<Real> unit_root(Index k, Index n) {
    const Real theta = Real(2) * Real(EIGEN_PI) * Real(k) / Real(n);
    return std::polar(Real(1), theta);
}

/**
 * @brief State-space data of a strictly proper rational function f₀(z) = C(zI − A)⁻¹B.
 *
 * Construction checks dimensions and finiteness only. Stability and minimality are
 * reported by validate() and enforced by the solver entry points.
 */
template <typename Real>
class Realization {
   public:
    Realization() = default;

    Realization(CMatrix<Real> a, CMatrix<Real> b, CMatrix<Real> c)
        : A_(std::move(a)), B_(std::move(b)), C_(std::move(c)) {
        if (A_.rows() != A_.cols() || A_.rows() == 0)
            throw Error(ErrorKind::DimensionMismatch, "A must be square and nonempty");
        if (B_.rows() != A_.rows() || B_.cols() == 0)
            throw Error(ErrorKind::DimensionMismatch,
                        "B must have n = " + std::to_string(A_.rows()) + " rows and at least one column");
        if (C_.cols() != A_.rows() || C_.rows() == 0)
            throw Error(ErrorKind::DimensionMismatch,
                        "C must have n = " + std::to_string(A_.rows()) + " columns and at least one row");
        if (!A_.allFinite() || !B_.allFinite() || !C_.allFinite())
            throw Error(ErrorKind::InvalidParameter, "realization has non-finite entries");
    }

    const CMatrix<Real>& A() const { return A_; }
    const CMatrix<Real>& B() const { return B_; }
    const CMatrix<Real>& C() const { return C_; }

    Index n() const { return A_.rows(); }
    Index p() const { return C_.rows(); }
    Index q() const { return B_.cols(); }

   private:
    CMatrix<Real> A_, B_, C_;
};

struct MinimalityReport {
    bool controllable = false;
    bool observable = false;
    double spectral_radius = 0.0;
    Index rank_Xi = 0;
    Index rank_Omega = 0;
    Index n = 0;

    bool stable(double margin = 1e-12) const { return spectral_radius < 1.0 - margin; }
    bool minimal() const { return controllable && observable; }
};

template <typename Real>
struct KalmanMatrices {
    CMatrix<Real> Xi;     // [B AB … A^{n−1}B], n × nq
    CMatrix<Real> Omega;  // [C; CA; …; CA^{n−1}], np × n
};

template <typename Real>
KalmanMatrices<Real> kalman_matrices(const Realization<Real>& r) {
    const Index n = r.n(), p = r.p(), q = r.q();
    KalmanMatrices<Real> k{CMatrix<Real>(n, n * q), CMatrix<Real>(n * p, n)};
    CMatrix<Real> ab = r.B();
    CMatrix<Real> ca = r.C();
    for (Index i = 0; i < n; ++i) {
        k.Xi.middleCols(i * q, q) = ab;
        k.Omega.middleRows(i * p, p) = ca;
        ab = r.A() * ab;
        ca = ca * r.A();
    }
    return k;
}

template <typename Real>
MinimalityReport validate(const Realization<Real>& r, const Tolerances& tol = {}) {
    const auto km = kalman_matrices(r);
    MinimalityReport rep;
    rep.n = r.n();
    rep.rank_Xi = numerical_rank(km.Xi, tol.rank);
    rep.rank_Omega = numerical_rank(km.Omega, tol.rank);
    rep.controllable = rep.rank_Xi == r.n();
    rep.observable = rep.rank_Omega == r.n();
    rep.spectral_radius = double(spectral_radius(r.A()));
    return rep;
}

/// Throws Unstable or NotMinimal unless the realization satisfies the solver hypotheses.
template <typename Real>
MinimalityReport require_minimal_stable(const Realization<Real>& r, const Tolerances& tol = {}) {
    const MinimalityReport rep = validate(r, tol);
    if (!rep.stable(tol.stability_margin))
        throw Error(ErrorKind::Unstable, "spectral radius of A is " + std::to_string(rep.spectral_radius));
    if (!rep.minimal())
        throw Error(ErrorKind::NotMinimal, "rank Xi = " + std::to_string(rep.rank_Xi) +
                                               ", rank Omega = " + std::to_string(rep.rank_Omega) +
                                               ", n = " + std::to_string(rep.n));
    return rep;
}

/// f₀(z) = C(zI − A)⁻¹B by a direct solve.
template <typename Real>
CMatrix<Real> evaluate(const Realization<Real>& r, Complex<Real> z, const Tolerances& tol = {}) {
    const CMatrix<Real> shifted = z * CMatrix<Real>::Identity(r.n(), r.n()) - r.A();
    const auto lu = checked_lu<Real>(shifted, tol.singular_rcond, "zI - A", std::abs(z) + norm1(r.A()));
    return r.C() * lu.solve(r.B());
}

/// γ_k = C A^{k−1} B, the k-th Fourier coefficient of f₀ (k ≥ 1).
template <typename Real>
CMatrix<Real> markov(const Realization<Real>& r, Index k) {
    if (k < 1) throw Error(ErrorKind::InvalidParameter, "Markov index must be >= 1");
    CMatrix<Real> x = r.B();
    for (Index i = 1; i < k; ++i) x = r.A() * x;
    return r.C() * x;
}

/// γ_1 … γ_count.
template <typename Real>
std::vector<CMatrix<Real>> markov_sequence(const Realization<Real>& r, Index count) {
    std::vector<CMatrix<Real>> out;
    out.reserve(static_cast<std::size_t>(count));
    CMatrix<Real> x = r.B();
    for (Index k = 0; k < count; ++k) {
        out.push_back(r.C() * x);
        x = r.A() * x;
    }
    return out;
}

template <typename Real, typename Rng>
CMatrix<Real> random_complex_normal(Index rows, Index cols, Rng& rng) {
    // Standard complex normal: E|z|² = 1.
    std::normal_distribution<double> nd(0.0, std::sqrt(0.5));
    CMatrix<Real> m(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i) m(i, j) = Complex<Real>(Real(nd(rng)), Real(nd(rng)));
    return m;
}

/// Random instance: i.i.d. standard complex normal entries, A rescaled to spectral radius 0.8.
template <typename Real, typename Rng>
Realization<Real> random_realization(Index n, Index p, Index q, Rng& rng, Real target_radius = Real(0.8)) {
    CMatrix<Real> a = random_complex_normal<Real>(n, n, rng);
    const Real rad = spectral_radius(a);
    if (rad > Real(0)) a *= target_radius / rad;
    CMatrix<Real> b = random_complex_normal<Real>(n, q, rng);
    CMatrix<Real> c = random_complex_normal<Real>(p, n, rng);
    return Realization<Real>(std::move(a), std::move(b), std::move(c));
}

}  // namespace ntk
