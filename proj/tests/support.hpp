#pragma once

#include <cmath>
#include <numbers>
#include <random>
#include <utility>
#include <vector>

#include <ntk/ntk.hpp>

namespace ntk::testing {

using Real = double;
using Mat = CMatrix<double>;
using Cx = std::complex<double>;

inline Mat scalar(Cx v) { return Mat::Constant(1, 1, v); }

/// The worked scalar system f₀(z) = c/(z − 0.5).
inline Realization<double> scalar_system(double c = 1.0) {
    return Realization<double>(scalar(0.5), scalar(1.0), scalar(c));
}

/**
 * Random minimal stable instance with exactly kappa1 Hankel singular values above 1.
 * B is rescaled so that 1 sits geometrically between σ_{κ₁} and σ_{κ₁+1}; draws whose
 * neighbouring singular values are closer than min_gap, or whose P is badly conditioned,
 * are rejected.
 */
template <typename Rng>
Realization<double> instance_with_kappa1(Index n, Index p, Index q, Index kappa1, Rng& rng, double min_gap = 1.2,
                                         double max_cond_p = 1e9) {
    for (;;) {
        const auto r = random_realization<double>(n, p, q, rng);
        const auto rep = validate(r);
        if (!rep.minimal()) continue;
        const auto g = gramians(r);
        if (hermitian_condition<double>(g.P) > max_cond_p) continue;
        const auto s = hankel_spectrum(g);
        double c = 0;
        if (kappa1 == 0) {
            c = 1.0 / (s[0] * min_gap);
        } else if (kappa1 == n) {
            c = min_gap / s[static_cast<std::size_t>(n - 1)];
        } else {
            const double hi = s[static_cast<std::size_t>(kappa1 - 1)], lo = s[static_cast<std::size_t>(kappa1)];
            if (hi / lo < min_gap * min_gap) continue;
            c = 1.0 / std::sqrt(hi * lo);
        }
        return Realization<double>(r.A(), c * r.B(), r.C());
    }
}

/// Independent oracle: ν₋(I − Γ_N*Γ_N) for the N × N block finite section built from Markov powers.
inline Index finite_section_negativity(const Realization<double>& r, Index n_blocks) {
    const auto gamma = markov_sequence(r, 2 * n_blocks - 1);
    const Index p = r.p(), q = r.q();
    Mat h(p * n_blocks, q * n_blocks);
    for (Index j = 0; j < n_blocks; ++j)
        for (Index k = 0; k < n_blocks; ++k) h.block(j * p, k * q, p, q) = gamma[static_cast<std::size_t>(j + k)];
    const Mat m = Mat::Identity(q * n_blocks, q * n_blocks) - h.adjoint() * h;
    Eigen::SelfAdjointEigenSolver<Mat> es(m, Eigen::EigenvaluesOnly);
    return static_cast<Index>((es.eigenvalues().array() < 0.0).count());
}

/// Random p × q matrix with spectral norm exactly `norm`.
template <typename Rng>
Mat random_contraction(Index p, Index q, double norm, Rng& rng) {
    Mat e = random_complex_normal<double>(p, q, rng);
    return e * (norm / spectral_norm(e));
}

template <typename Rng>
Mat random_unitary(Index n, Rng& rng) {
    Eigen::HouseholderQR<Mat> qr(random_complex_normal<double>(n, n, rng));
    return qr.householderQ() * Mat::Identity(n, n);
}

template <typename Rng>
CVector<double> random_direction(Index n, Rng& rng) {
    return random_complex_normal<double>(n, 1, rng).col(0).normalized();
}

/// s = b⁻¹ s₀ with s₀(λ) = 0.85·U diag(b_β(λ), 1) V a classical Schur function.
struct ConstructedSchur {
    BlaschkeProduct<double> b{2};
    MatrixFunction<double> s0;
    MatrixFunction<double> s;
    std::vector<PoleSpec<double>> poles;
};

/**
 * Each layout entry (α, count) stacks `count` rank-one factors at α, either along one
 * direction (a pole of order count) or alternating between orthogonal directions.
 */
template <typename Rng>
ConstructedSchur construct_generalized_schur(const std::vector<std::pair<Cx, int>>& layout, bool repeat_direction, Rng& rng) {
    ConstructedSchur c;
    for (const auto& [alpha, count] : layout) {
        const CVector<double> u = random_direction(2, rng);
        CVector<double> v(2);
        v << -std::conj(u(1)), std::conj(u(0));  // orthogonal to u
        for (int k = 0; k < count; ++k)
            c.b.append(BPFactor<double>::primary(alpha, repeat_direction || k % 2 == 0 ? u : v));
        c.poles.push_back({alpha, count});
    }
    const Mat u = random_unitary(2, rng), v = random_unitary(2, rng);
    const Cx beta(-0.3, -0.5);
    c.s0 = [u, v, beta](Cx z) {
        Mat d = Mat::Identity(2, 2);
        d(0, 0) = blaschke_factor(beta, z);
        return Mat(0.85 * u * d * v);
    };
    const auto b = c.b;
    const auto s0 = c.s0;
    c.s = [b, s0](Cx z) -> Mat {
        Eigen::PartialPivLU<Mat> lu(b(z));
        if (!(lu.rcond() > 1e-13)) throw Error(ErrorKind::SingularEvaluation, "pole");
        return lu.solve(s0(z));
    };
    return c;
}

inline std::vector<Cx> circle_points(Index n) {
    std::vector<Cx> out;
    for (Index k = 0; k < n; ++k) out.push_back(unit_root<double>(k, n));
    return out;
}

}  // namespace ntk::testing
