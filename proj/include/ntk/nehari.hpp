#pragma once

#include <algorithm>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "denominator.hpp"
#include "fourier.hpp"
#include "linalg.hpp"
#include "realization.hpp"
#include "resolvent.hpp"
#include "schur.hpp"
#include "stein.hpp"

namespace ntk {

struct SolverReport {
    Index kappa = 0;
    Index kappa1 = 0;
    bool solvable = false;
    std::vector<double> hankel_spectrum;
    MinimalityReport minimality;
    double residual_P = 0;
    double residual_Q = 0;
    double condition_P = 0;
    double pick_cross_discrepancy = 0;
    Index pick_kappa1 = 0;
    double inertia_band = 0;
    Tolerances tol;
};

/// Solvability test: the problem with budget κ is solvable iff κ₁ = ν₋(I − PQ) ≤ κ.
template <typename Real>
SolverReport check(const Realization<Real>& r, Index kappa, const Tolerances& tol = {}) {
    if (kappa < 0) throw Error(ErrorKind::InvalidParameter, "kappa must be nonnegative");
    SolverReport rep;
    rep.kappa = kappa;
    rep.tol = tol;
    rep.minimality = require_minimal_stable(r, tol);
    const auto g = gramians(r, tol);
    rep.residual_P = double(g.residual_P);
    rep.residual_Q = double(g.residual_Q);
    for (Real s : hankel_spectrum(g)) rep.hankel_spectrum.push_back(double(s));
    rep.inertia_band = double(inertia_band(g, tol));
    rep.kappa1 = negativity_index(g, tol);
    const auto pick = pick_matrix(r, g, tol);
    rep.condition_P = double(pick.condition_P);
    rep.pick_cross_discrepancy = double(pick.cross_discrepancy);
    rep.pick_kappa1 = pick.kappa1;
    if (pick.kappa1 != rep.kappa1)
        throw Error(ErrorKind::CrossCheckFailure, "inertia of the Pick matrix differs from nu_-(I - PQ)");
    rep.solvable = rep.kappa1 <= kappa;
    return rep;
}

/// Resolvent matrix of the problem; refuses with NotSolvable when κ < κ₁.
template <typename Real>
GammaGeneratingMatrix<Real> solve(const Realization<Real>& r, Index kappa, const Tolerances& tol = {}) {
    const SolverReport rep = check(r, kappa, tol);
    if (!rep.solvable)
        throw Error(ErrorKind::NotSolvable,
                    "kappa = " + std::to_string(kappa) + " < kappa1 = " + std::to_string(rep.kappa1));
    return GammaGeneratingMatrix<Real>(assemble(r, gramians(r, tol), tol));
}

/**
 * @brief Parameter ε of the linear fractional transformation.
 *
 * Constant: a p × q contraction. BlaschkeScaled: ε(μ) = c / b(μ) with b a scalar
 * Blaschke product; it has as many poles in 𝔻 as b has zeros.
 */
template <typename Real>
class SchurParameter {
   public:
    enum class Kind { Constant, BlaschkeScaled };

    static SchurParameter constant(CMatrix<Real> value) {
        SchurParameter e;
        e.kind_ = Kind::Constant;
        e.value_ = std::move(value);
        if (spectral_norm(e.value_) > Real(1) + Real(1e-12))
            throw Error(ErrorKind::InvalidParameter, "constant Schur parameter must satisfy sigma_max <= 1");
        return e;
    }

    static SchurParameter blaschke_scaled(std::vector<Complex<Real>> zeros, CMatrix<Real> value) {
        SchurParameter e;
        e.kind_ = Kind::BlaschkeScaled;
        e.value_ = std::move(value);
        e.zeros_ = std::move(zeros);
        e.product_ = BlaschkeProduct<Real>::scalar(e.zeros_);
        if (!(spectral_norm(e.value_) < Real(1)))
            throw Error(ErrorKind::InvalidParameter, "scaled Schur parameter needs sigma_max(constant) < 1");
        return e;
    }

    static SchurParameter zero(Index p, Index q) { return constant(CMatrix<Real>::Zero(p, q)); }

    Kind kind() const { return kind_; }
    const CMatrix<Real>& value() const { return value_; }
    const std::vector<Complex<Real>>& zeros() const { return zeros_; }
    Index rows() const { return value_.rows(); }
    Index cols() const { return value_.cols(); }

    /// Poles of ε in 𝔻 (an upper bound on its negative-square index).
    Index pole_count() const {
        if (kind_ == Kind::Constant || value_.isZero(0)) return 0;
        return static_cast<Index>(zeros_.size());
    }

    CMatrix<Real> operator()(Complex<Real> mu) const {
        if (kind_ == Kind::Constant) return value_;
        const Complex<Real> b = product_(mu)(0, 0);
        if (b == Complex<Real>(0)) throw Error(ErrorKind::SingularEvaluation, "Schur parameter evaluated at a pole");
        return value_ / b;
    }

   private:
    Kind kind_ = Kind::Constant;
    CMatrix<Real> value_;
    std::vector<Complex<Real>> zeros_;
    BlaschkeProduct<Real> product_{1};
};

/// Throws unless ε fits the budget κ − κ₁.
template <typename Real>
void require_parameter_budget(const SchurParameter<Real>& eps, Index kappa, Index kappa1) {
    if (eps.pole_count() > kappa - kappa1)
        throw Error(ErrorKind::InvalidParameter, "Schur parameter has " + std::to_string(eps.pole_count()) +
                                                     " poles but the budget is " + std::to_string(kappa - kappa1));
}

/**
 * @brief f = T_𝔄[ε] = (a₁₁ε + a₁₂)(a₂₁ε + a₂₂)⁻¹, evaluable pointwise.
 *
 * Custom parameters (any pointwise-evaluable p × q function) can be injected for
 * verification.
 */
template <typename Real>
class SolutionHandle {
   public:
    SolutionHandle(std::shared_ptr<const GammaGeneratingMatrix<Real>> a, MatrixFunction<Real> eps, Index eps_poles = 0)
        : a_(std::move(a)), eps_(std::move(eps)), eps_poles_(eps_poles) {}

    const GammaGeneratingMatrix<Real>& resolvent() const { return *a_; }
    Index parameter_poles() const { return eps_poles_; }
    Index p() const { return a_->p(); }
    Index q() const { return a_->q(); }

    CMatrix<Real> operator()(Complex<Real> mu) const {
        const CMatrix<Real> v = (*a_)(mu);
        const CMatrix<Real> e = eps_(mu);
        const Index p = a_->p();
        const CMatrix<Real> num = a11(v, p) * e + a12(v, p);
        const CMatrix<Real> den = a21(v, p) * e + a22(v, p);
        // num · den⁻¹ = (den^{-T} num^T)^T
        Eigen::PartialPivLU<CMatrix<Real>> lu(den.transpose());
        const Real scale = norm1(v) * (Real(1) + norm1(e));
        if (!(lu.rcond() * norm1(den) >= Real(a_->data().tol.singular_rcond) * scale))
            throw Error(ErrorKind::SingularEvaluation, "a21 eps + a22 is singular");
        return lu.solve(num.transpose()).transpose();
    }

    MatrixFunction<Real> as_function() const {
        auto self = *this;
        return [self](Complex<Real> mu) { return self(mu); };
    }

   private:
    std::shared_ptr<const GammaGeneratingMatrix<Real>> a_;
    MatrixFunction<Real> eps_;
    Index eps_poles_ = 0;
};

namespace detail {

template <typename Real>
void check_probe_grid(const SolutionHandle<Real>& h, Index probes) {
    Index singular = 0;
    for (Index l = 0; l < probes; ++l) {
        try {
            const CMatrix<Real> v = h(unit_root<Real>(l, probes));
            if (!v.allFinite()) ++singular;
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::SingularEvaluation) throw;
            ++singular;
        }
    }
    if (10 * singular > probes)
        throw Error(ErrorKind::DenominatorSingularEverywhere,
                    std::to_string(singular) + " of " + std::to_string(probes) + " probe points are singular");
}

}  // namespace detail

template <typename Real>
SolutionHandle<Real> sample_solution(std::shared_ptr<const GammaGeneratingMatrix<Real>> a, const SchurParameter<Real>& eps) {
    if (eps.rows() != a->p() || eps.cols() != a->q())
        throw Error(ErrorKind::DimensionMismatch, "Schur parameter must be p x q");
    SolutionHandle<Real> h(std::move(a), [eps](Complex<Real> mu) { return eps(mu); }, eps.pole_count());
    detail::check_probe_grid(h, 64);
    return h;
}

/// Injects an arbitrary pointwise parameter (not generated by this library).
template <typename Real>
SolutionHandle<Real> sample_solution(std::shared_ptr<const GammaGeneratingMatrix<Real>> a, MatrixFunction<Real> eps,
                                     Index eps_poles) {
    SolutionHandle<Real> h(std::move(a), std::move(eps), eps_poles);
    detail::check_probe_grid(h, 64);
    return h;
}

struct VerifyOptions {
    Index sup_grid = 256;
    Index coeff_count = 48;
    Index coeff_grid = 4096;
};

struct VerifyReport {
    Index kappa = 0;
    double sup_norm = 0;
    std::vector<double> circle_sigma_max;
    std::vector<double> difference_hankel_spectrum;
    Index hankel_rank = 0;
    double tail_norm = 0;
    double aliasing_bound = 0;
    std::vector<Index> perturbed_points;
    bool pass = false;
    VerifyOptions options;
    double sup_tolerance = 0;
    double rank_tolerance = 0;
};

/**
 * @brief Certifies ‖f‖_∞ ≤ 1 and rank(Γ(f) − Γ(f₀)) ≤ κ on finite grids.
 *
 * The rank threshold is rel_tol·max(σ₁, 1): the difference sequence of a solution is of
 * unit order, so a vanishing difference must not be ranked against its own roundoff.
 */
template <typename Real>
VerifyReport verify_solution(const MatrixFunction<Real>& f, const Realization<Real>& r, Index kappa,
                             const VerifyOptions& opt = {}, const Tolerances& tol = {}) {
    VerifyReport rep;
    rep.kappa = kappa;
    rep.options = opt;
    rep.sup_tolerance = tol.sup_norm;
    rep.rank_tolerance = tol.hankel_rank;

    std::vector<Index> moved;
    const auto samples = sample_circle<Real>(f, opt.sup_grid, &moved);
    for (const auto& v : samples) {
        if (v.rows() != r.p() || v.cols() != r.q())
            throw Error(ErrorKind::DimensionMismatch, "solution and realization differ in (p, q)");
        const double s = double(spectral_norm(v));
        rep.circle_sigma_max.push_back(s);
        rep.sup_norm = std::max(rep.sup_norm, s);
    }
    rep.perturbed_points = moved;

    const MatrixFunction<Real> diff = [&f, &r, &tol](Complex<Real> mu) -> CMatrix<Real> {
        return f(mu) - evaluate(r, mu, tol);
    };
    const auto fc = fourier_coefficients<Real>(diff, opt.coeff_grid, opt.coeff_count);
    for (Real s : hankel_singular_values<Real>(fc.coeffs)) rep.difference_hankel_spectrum.push_back(double(s));
    rep.hankel_rank = hankel_rank<Real>(fc.coeffs, tol.hankel_rank, tol.hankel_rank);
    rep.tail_norm = double(fc.tail_norm);
    rep.aliasing_bound = double(fc.aliasing_bound);
    rep.pass = rep.sup_norm <= 1.0 + tol.sup_norm && rep.hankel_rank <= kappa;
    return rep;
}

template <typename Real>
VerifyReport verify_solution(const SolutionHandle<Real>& h, const Realization<Real>& r, Index kappa,
                             const VerifyOptions& opt = {}, const Tolerances& tol = {}) {
    if (h.p() != r.p() || h.q() != r.q())
        throw Error(ErrorKind::DimensionMismatch, "solution and realization differ in (p, q)");
    return verify_solution<Real>(h.as_function(), r, kappa, opt, tol);
}

}  // namespace ntk
