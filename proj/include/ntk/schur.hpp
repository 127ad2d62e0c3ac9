#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "linalg.hpp"
#include "realization.hpp"
#include "types.hpp"

namespace ntk {

/// b_α(λ) = (λ − α)/(1 − λᾱ)
template <typename Real>
Complex<Real> blaschke_factor(Complex<Real> alpha, Complex<Real> lambda) {
    const Complex<Real> den = Real(1) - lambda * std::conj(alpha);
    const Real eps = std::numeric_limits<Real>::epsilon();
    if (std::abs(den) <= Real(8) * eps * std::max(Real(1), std::abs(lambda * std::conj(alpha))))
        throw Error(ErrorKind::SingularEvaluation, "Blaschke factor evaluated at its pole");
    return (lambda - alpha) / den;
}

/// Elementary Blaschke–Potapov factor I − P + b_α(λ)P with P an orthogonal projector.
template <typename Real>
struct BPFactor {
    Complex<Real> alpha;
    CMatrix<Real> projector;

    BPFactor(Complex<Real> a, CMatrix<Real> proj) : alpha(a), projector(std::move(proj)) {
        if (!(std::abs(alpha) < Real(1))) throw Error(ErrorKind::InvalidParameter, "BP factor needs |alpha| < 1");
        if (projector.rows() != projector.cols() || projector.rows() == 0)
            throw Error(ErrorKind::DimensionMismatch, "projector must be square");
        const Real scale = std::max(Real(1), projector.norm());
        if ((projector - projector.adjoint()).norm() > Real(1e-10) * scale ||
            (projector * projector - projector).norm() > Real(1e-10) * scale)
            throw Error(ErrorKind::InvalidParameter, "projector must be Hermitian and idempotent");
        if (rank() < 1) throw Error(ErrorKind::InvalidParameter, "projector must be nonzero");
    }

    /// Rank-one factor along the direction u (normalized internally).
    static BPFactor primary(Complex<Real> a, const CVector<Real>& u) {
        const CVector<Real> v = u.normalized();
        return BPFactor(a, v * v.adjoint());
    }

    Index dim() const { return projector.rows(); }

    Index rank() const { return static_cast<Index>(std::llround(double(projector.trace().real()))); }

    CMatrix<Real> operator()(Complex<Real> lambda) const {
        const CMatrix<Real> id = CMatrix<Real>::Identity(dim(), dim());
        return id - projector + blaschke_factor(alpha, lambda) * projector;
    }
};

/// Ordered product B₁(λ)B₂(λ)⋯ of elementary factors (leftmost first).
template <typename Real>
class BlaschkeProduct {
   public:
    explicit BlaschkeProduct(Index dim = 1) : dim_(dim) {}

    BlaschkeProduct(Index dim, std::vector<BPFactor<Real>> factors) : dim_(dim), factors_(std::move(factors)) {
        for (const auto& f : factors_)
            if (f.dim() != dim_) throw Error(ErrorKind::DimensionMismatch, "BP factor dimension differs from product");
    }

    /// Scalar product Π b_{α_k}.
    static BlaschkeProduct scalar(const std::vector<Complex<Real>>& zeros) {
        BlaschkeProduct b(1);
        for (const auto& z : zeros) b.append(BPFactor<Real>(z, CMatrix<Real>::Identity(1, 1)));
        return b;
    }

    Index dim() const { return dim_; }
    const std::vector<BPFactor<Real>>& factors() const { return factors_; }

    Index degree() const {
        Index d = 0;
        for (const auto& f : factors_) d += f.rank();
        return d;
    }

    void append(BPFactor<Real> f) {
        if (f.dim() != dim_) throw Error(ErrorKind::DimensionMismatch, "BP factor dimension differs from product");
        factors_.push_back(std::move(f));
    }

    void prepend(BPFactor<Real> f) {
        if (f.dim() != dim_) throw Error(ErrorKind::DimensionMismatch, "BP factor dimension differs from product");
        factors_.insert(factors_.begin(), std::move(f));
    }

    CMatrix<Real> operator()(Complex<Real> lambda) const {
        CMatrix<Real> out = CMatrix<Real>::Identity(dim_, dim_);
        for (const auto& f : factors_) out = out * f(lambda);
        return out;
    }

   private:
    Index dim_;
    std::vector<BPFactor<Real>> factors_;
};

template <typename Real>
CMatrix<Real> bp_evaluate(const BlaschkeProduct<Real>& b, Complex<Real> lambda) {
    return b(lambda);
}

template <typename Real>
struct LaurentPrincipalPart {
    std::vector<CMatrix<Real>> coeffs;  // coeffs[j − 1] = φ_{−j}
    Real radius = 0;
    Index points = 0;
    Real contour_sup = 0;               // max ‖f‖_F on the contour
    /// Level below which coefficients are indistinguishable from quadrature noise.
    Real noise_floor(double tol) const { return Real(tol) * contour_sup * radius; }
};

namespace detail {

template <typename Real>
LaurentPrincipalPart<Real> trapezoid_laurent(const MatrixFunction<Real>& f, Complex<Real> center, Index depth,
                                             Real radius, Index points) {
    LaurentPrincipalPart<Real> out;
    out.radius = radius;
    out.points = points;
    for (Index l = 0; l < points; ++l) {
        const Complex<Real> e = unit_root<Real>(l, points);
        const Complex<Real> offset = radius * e;
        CMatrix<Real> v;
        try {
            v = f(center + offset);
        } catch (const Error& err) {
            if (err.kind() == ErrorKind::SingularEvaluation || err.kind() == ErrorKind::BlockSingular)
                throw Error(ErrorKind::RadiusTooLarge, "contour passes through a singularity");
            throw;
        }
        if (out.coeffs.empty()) out.coeffs.assign(static_cast<std::size_t>(depth), CMatrix<Real>::Zero(v.rows(), v.cols()));
        out.contour_sup = std::max(out.contour_sup, v.norm());
        // φ_{−j} = (1/2πi)∮ f(ζ)(ζ − λ₀)^{j−1} dζ = mean of f(ζ)·(r e^{iθ})^j
        Complex<Real> w = offset;
        for (Index j = 0; j < depth; ++j) {
            out.coeffs[static_cast<std::size_t>(j)] += v * (w / Real(points));
            w *= offset;
        }
    }
    return out;
}

template <typename Real>
Real coefficient_gap(const LaurentPrincipalPart<Real>& a, const LaurentPrincipalPart<Real>& b) {
    Real gap = 0;
    for (std::size_t j = 0; j < a.coeffs.size(); ++j) gap = std::max(gap, (a.coeffs[j] - b.coeffs[j]).norm());
    return gap;
}

template <typename Real>
Real coefficient_scale(const LaurentPrincipalPart<Real>& a) {
    Real s = 1;
    for (const auto& c : a.coeffs) s = std::max(s, c.norm());
    return s;
}

}  // namespace detail

/**
 * @brief Principal-part Laurent coefficients φ_{−1} … φ_{−depth} of f at λ₀ by the
 * trapezoid rule on |λ − λ₀| = radius.
 *
 * The point count starts at 256 and doubles until two successive results agree; the
 * result is then recomputed at radius/2 and RadiusTooLarge is raised if it moves.
 */
template <typename Real>
LaurentPrincipalPart<Real> laurent_coefficients(const MatrixFunction<Real>& f, Complex<Real> center, Index depth,
                                                Real radius, double tol = 1e-8, Index max_points = 8192) {
    if (depth < 1) throw Error(ErrorKind::InvalidParameter, "Laurent depth must be >= 1");
    if (!(radius > Real(0))) throw Error(ErrorKind::InvalidParameter, "contour radius must be positive");

    auto converged = [&](Real r) {
        Index n = 256;
        auto prev = detail::trapezoid_laurent<Real>(f, center, depth, r, n);
        while (n < max_points) {
            n *= 2;
            auto next = detail::trapezoid_laurent<Real>(f, center, depth, r, n);
            const Real gap = detail::coefficient_gap(prev, next);
            prev = std::move(next);
            if (gap <= Real(tol) * detail::coefficient_scale(prev)) break;
        }
        return prev;
    };

    auto full = converged(radius);
    const auto half = converged(radius / Real(2));
    if (detail::coefficient_gap(full, half) > Real(tol) * detail::coefficient_scale(full))
        throw Error(ErrorKind::RadiusTooLarge, "Laurent coefficients change when the contour radius is halved");
    return full;
}

/// Lower-triangular block-Toeplitz matrix with φ_{−k} on the diagonal and φ_{−1} in the corner.
template <typename Real>
CMatrix<Real> laurent_toeplitz(const std::vector<CMatrix<Real>>& principal, Index order) {
    if (order == 0 || principal.empty()) return CMatrix<Real>();
    const Index r = principal.front().rows(), c = principal.front().cols();
    CMatrix<Real> t = CMatrix<Real>::Zero(order * r, order * c);
    for (Index i = 0; i < order; ++i)
        for (Index j = 0; j <= i; ++j)
            t.block(i * r, j * c, r, c) = principal[static_cast<std::size_t>(order - 1 - (i - j))];
    return t;
}

/// Highest j with ‖φ_{−j}‖ above the noise floor (0 when f is analytic at λ₀).
template <typename Real>
Index pole_order(const LaurentPrincipalPart<Real>& lp, double tol) {
    const Real floor = lp.noise_floor(tol);
    for (Index j = static_cast<Index>(lp.coeffs.size()); j >= 1; --j)
        if (lp.coeffs[static_cast<std::size_t>(j - 1)].norm() > floor) return j;
    return 0;
}

/// Pole multiplicity at λ₀: numerical rank of the Laurent block-Toeplitz matrix.
template <typename Real>
Index pole_multiplicity(const MatrixFunction<Real>& f, Complex<Real> center, Real radius = Real(0.05),
                        Index max_depth = 8, double tol = 1e-8) {
    const auto lp = laurent_coefficients<Real>(f, center, max_depth, radius, tol);
    const Index order = pole_order(lp, tol);
    if (order == 0) return 0;
    const CMatrix<Real> t = laurent_toeplitz<Real>(lp.coeffs, order);
    const auto sv = singular_values(t);
    const Real floor = lp.noise_floor(tol);
    return static_cast<Index>((sv.array() > floor).count());
}

/// Pole of a function together with its pole multiplicity (number of primary factors).
template <typename Real>
struct PoleSpec {
    Complex<Real> location;
    Index multiplicity = 1;
};

template <typename Real>
struct KLFactorization {
    BlaschkeProduct<Real> b_left;
    MatrixFunction<Real> s_left;      // b_left · s with removable singularities filled in
    Index kappa = 0;
    Real coprimality_certificate = 0;  // min over the disk grid of σ_min([b_ℓ(λ) s_ℓ(λ)])
    std::vector<PoleSpec<Real>> poles; // extraction order
    std::vector<Real> radii;
};

namespace detail {

template <typename Real>
std::vector<Complex<Real>> disk_grid(Index radial, Index angular, Real max_radius) {
    std::vector<Complex<Real>> pts{Complex<Real>(0)};
    for (Index i = 1; i <= radial; ++i) {
        const Real rr = max_radius * Real(i) / Real(radial);
        for (Index k = 0; k < angular; ++k) pts.push_back(rr * unit_root<Real>(k, angular));
    }
    return pts;
}

}  // namespace detail

/**
 * @brief Left Krein–Langer factorization s = b_ℓ⁻¹ s_ℓ of a rational generalized Schur
 * function with the listed poles in 𝔻.
 *
 * Poles are processed by ascending modulus, then phase. At each step the leading
 * Laurent coefficient of the current product b_ℓ s is computed and a primary factor is
 * prepended whose projector is the dominant left singular direction of that coefficient.
 */
template <typename Real>
KLFactorization<Real> kl_factorize(const MatrixFunction<Real>& s, std::vector<PoleSpec<Real>> poles,
                                   double tol = 1e-8, Index circle_grid = 256) {
    for (const auto& pole : poles) {
        if (!(std::abs(pole.location) < Real(1)))
            throw Error(ErrorKind::InvalidParameter, "listed poles must lie strictly inside the unit disk");
        if (pole.multiplicity < 1) throw Error(ErrorKind::InvalidParameter, "pole multiplicity must be >= 1");
    }
    std::sort(poles.begin(), poles.end(), [](const PoleSpec<Real>& l, const PoleSpec<Real>& r) {
        if (std::abs(l.location) != std::abs(r.location)) return std::abs(l.location) < std::abs(r.location);
        return std::arg(l.location) < std::arg(r.location);
    });

    Index rows = 0, cols = 0;
    Real circle_sup = 0;
    for (Index l = 0; l < circle_grid; ++l) {
        const CMatrix<Real> v = s(unit_root<Real>(l, circle_grid));
        rows = v.rows();
        cols = v.cols();
        circle_sup = std::max(circle_sup, spectral_norm(v));
    }
    if (circle_sup > Real(1) + Real(tol))
        throw Error(ErrorKind::NotSchurOnCircle, "sup norm on the circle is " + std::to_string(double(circle_sup)));

    KLFactorization<Real> out;
    out.b_left = BlaschkeProduct<Real>(rows);
    out.poles = poles;

    std::vector<Real> radii;
    for (std::size_t i = 0; i < poles.size(); ++i) {
        Real nearest = std::numeric_limits<Real>::infinity();
        for (std::size_t k = 0; k < poles.size(); ++k)
            if (k != i) nearest = std::min(nearest, std::abs(poles[i].location - poles[k].location));
        Real r = std::isfinite(double(nearest)) ? nearest / Real(2) : Real(0.25);
        r = std::min({r, Real(0.25), (Real(1) - std::abs(poles[i].location)) / Real(2)});
        radii.push_back(std::max(r, Real(1e-3)));
    }
    out.radii = radii;

    auto current = [&out, &s](Complex<Real> z) -> CMatrix<Real> { return out.b_left(z) * s(z); };

    for (std::size_t i = 0; i < poles.size(); ++i) {
        const auto& pole = poles[i];
        for (Index step = 0; step < pole.multiplicity; ++step) {
            const auto lp = laurent_coefficients<Real>(current, pole.location, pole.multiplicity, radii[i], tol);
            const Index order = pole_order(lp, tol);
            if (order == 0)
                throw Error(ErrorKind::InvalidParameter,
                            "listed multiplicity exceeds the pole multiplicity found at a listed pole");
            Eigen::JacobiSVD<CMatrix<Real>> svd(lp.coeffs[static_cast<std::size_t>(order - 1)], Eigen::ComputeThinU);
            out.b_left.prepend(BPFactor<Real>::primary(pole.location, svd.matrixU().col(0)));
        }
        const auto check = laurent_coefficients<Real>(current, pole.location, pole.multiplicity, radii[i], tol);
        if (pole_order(check, tol) != 0)
            throw Error(ErrorKind::PoleNotCancelled, "pole remains after extracting the listed multiplicity");
    }
    out.kappa = out.b_left.degree();

    // s_ℓ = b_ℓ s; near a listed pole the value is recovered from the Cauchy integral.
    const auto b = out.b_left;
    MatrixFunction<Real> product = [b, s](Complex<Real> z) -> CMatrix<Real> { return b(z) * s(z); };
    out.s_left = [product, poles, radii](Complex<Real> z) -> CMatrix<Real> {
        for (std::size_t i = 0; i < poles.size(); ++i) {
            if (std::abs(z - poles[i].location) < radii[i] / Real(2)) {
                const Index n = 256;
                CMatrix<Real> acc;
                for (Index l = 0; l < n; ++l) {
                    const Complex<Real> offset = radii[i] * unit_root<Real>(l, n);
                    const Complex<Real> zeta = poles[i].location + offset;
                    const CMatrix<Real> term = product(zeta) * (offset / ((zeta - z) * Real(n)));
                    acc = l == 0 ? term : CMatrix<Real>(acc + term);
                }
                return acc;
            }
        }
        return product(z);
    };

    auto grid = detail::disk_grid<Real>(12, 48, Real(0.98));
    for (const auto& pole : poles) grid.push_back(pole.location);
    Real cert = std::numeric_limits<Real>::infinity();
    for (const auto& z : grid) {
        CMatrix<Real> joined(rows, rows + cols);
        joined << b(z), out.s_left(z);
        const auto sv = singular_values(joined);
        cert = std::min(cert, sv(sv.size() - 1));
    }
    out.coprimality_certificate = cert;
    return out;
}

/**
 * @brief Potapov–Ginzburg transform S = [w₁₁ w₁₂; 0 I][I 0; w₂₁ w₂₂]⁻¹ of an m × m value.
 */
template <typename Real>
CMatrix<Real> pg_transform(const CMatrix<Real>& w, Index p, Index q, double min_rcond = 1e-13) {
    if (w.rows() != p + q || w.cols() != p + q) throw Error(ErrorKind::DimensionMismatch, "pg_transform: W must be (p+q) square");
    const CMatrix<Real> w22 = w.bottomRightCorner(q, q);
    Eigen::PartialPivLU<CMatrix<Real>> lu(w22);
    if (!(lu.rcond() >= Real(min_rcond))) throw Error(ErrorKind::BlockSingular, "w22 is singular");
    CMatrix<Real> left = CMatrix<Real>::Zero(p + q, p + q);
    left.topRows(p) = w.topRows(p);
    left.bottomRightCorner(q, q).setIdentity();
    // [I 0; w₂₁ w₂₂]⁻¹ = [I 0; −w₂₂⁻¹w₂₁ w₂₂⁻¹]
    CMatrix<Real> right_inv = CMatrix<Real>::Zero(p + q, p + q);
    right_inv.topLeftCorner(p, p).setIdentity();
    right_inv.bottomLeftCorner(q, p) = -lu.solve(CMatrix<Real>(w.bottomLeftCorner(q, p)));
    right_inv.bottomRightCorner(q, q) = lu.inverse();
    return left * right_inv;
}

/**
 * @brief ν₋ of the Gram matrix ⟨Λ^s_{ω_j}(ω_k)u_j, u_k⟩ with
 * Λ^s_ω(λ) = (I − s(λ)s(ω)*)/(1 − λω̄).
 *
 * This is a lower bound for the number of negative squares of the kernel.
 */
template <typename Real>
Index kernel_negative_squares(const MatrixFunction<Real>& s, const std::vector<Complex<Real>>& points,
                              const std::vector<CVector<Real>>& directions, double tol = 1e-10) {
    if (points.size() != directions.size())
        throw Error(ErrorKind::DimensionMismatch, "one direction per point is required");
    std::vector<CMatrix<Real>> values;
    values.reserve(points.size());
    for (const auto& w : points) {
        if (!(std::abs(w) < Real(1))) throw Error(ErrorKind::InvalidParameter, "kernel points must lie in the disk");
        try {
            values.push_back(s(w));
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::SingularEvaluation || e.kind() == ErrorKind::BlockSingular)
                throw Error(ErrorKind::EvaluationAtPole, "kernel point is a pole of s");
            throw;
        }
        if (!values.back().allFinite()) throw Error(ErrorKind::EvaluationAtPole, "kernel point is a pole of s");
    }
    const Index n = static_cast<Index>(points.size());
    CMatrix<Real> gram(n, n);
    for (Index k = 0; k < n; ++k) {
        for (Index j = 0; j < n; ++j) {
            const auto& sk = values[static_cast<std::size_t>(k)];
            const auto& sj = values[static_cast<std::size_t>(j)];
            const CMatrix<Real> ker = (CMatrix<Real>::Identity(sk.rows(), sk.rows()) - sk * sj.adjoint()) /
                                      rho(points[static_cast<std::size_t>(j)], points[static_cast<std::size_t>(k)]);
            gram(k, j) = directions[static_cast<std::size_t>(k)].dot(ker * directions[static_cast<std::size_t>(j)]);
        }
    }
    gram = hermitian_part<Real>(gram);
    const Real band = Real(tol) * std::max(Real(1), spectral_norm(gram));
    return hermitian_inertia<Real>(gram, band).negative;
}

/// Block form: every standard basis direction at every point.
template <typename Real>
Index kernel_negative_squares(const MatrixFunction<Real>& s, const std::vector<Complex<Real>>& points,
                              double tol = 1e-10) {
    if (points.empty()) return 0;
    const Index dim = s(points.front()).rows();
    std::vector<Complex<Real>> pts;
    std::vector<CVector<Real>> dirs;
    for (const auto& w : points) {
        for (Index i = 0; i < dim; ++i) {
            pts.push_back(w);
            dirs.push_back(CVector<Real>::Unit(dim, i));
        }
    }
    return kernel_negative_squares<Real>(s, pts, dirs, tol);
}

}  // namespace ntk
