#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "linalg.hpp"
#include "realization.hpp"
#include "types.hpp"

namespace ntk {

template <typename Real>
struct FourierResult {
    std::vector<CMatrix<Real>> coeffs;  // coeffs[k − 1] = γ_k, k = 1 … K
    std::vector<Index> perturbed;       // grid indices moved radially off a singular point
    Real tail_norm = 0;                 // max ‖γ_k‖_F for K < k ≤ min(2K, N/2)
    Real aliasing_bound = 0;            // max ‖c_k‖_F over the band around k = N/2
};

inline bool is_power_of_two(Index n) { return n > 0 && (n & (n - 1)) == 0; }

namespace detail {

template <typename Real>
CMatrix<Real> sample_with_perturbation(const MatrixFunction<Real>& f, Complex<Real> mu, bool& perturbed) {
    perturbed = false;
    try {
        CMatrix<Real> v = f(mu);
        if (v.allFinite()) return v;
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::SingularEvaluation && e.kind() != ErrorKind::BlockSingular) throw;
    }
    perturbed = true;
    try {
        CMatrix<Real> v = f((Real(1) - Real(1e-9)) * mu);
        if (v.allFinite()) return v;
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::SingularEvaluation && e.kind() != ErrorKind::BlockSingular) throw;
    }
    throw Error(ErrorKind::GridSingular, "function is singular at and next to a circle grid point");
}

}  // namespace detail

/// Samples f on the N-th roots of unity, moving singular samples to (1 − 1e-9)μ.
template <typename Real>
std::vector<CMatrix<Real>> sample_circle(const MatrixFunction<Real>& f, Index n_grid, std::vector<Index>* perturbed = nullptr) {
    std::vector<CMatrix<Real>> out;
    out.reserve(static_cast<std::size_t>(n_grid));
    for (Index l = 0; l < n_grid; ++l) {
        bool moved = false;
        out.push_back(detail::sample_with_perturbation(f, unit_root<Real>(l, n_grid), moved));
        if (moved && perturbed) perturbed->push_back(l);
    }
    return out;
}

/**
 * @brief γ_k(f) = (1/2π)∫ e^{ikθ} f(e^{iθ}) dθ for k = 1 … K by an N-point FFT.
 *
 * N must be a power of two with N ≥ 4K.
 */
template <typename Real>
FourierResult<Real> fourier_coefficients(const MatrixFunction<Real>& f, Index n_grid, Index count) {
    if (!is_power_of_two(n_grid) || count < 1 || n_grid < 4 * count)
        throw Error(ErrorKind::InvalidParameter, "fourier_coefficients needs N a power of two and N >= 4K");
    FourierResult<Real> res;
    const auto samples = sample_circle<Real>(f, n_grid, &res.perturbed);
    const Index rows = samples.front().rows(), cols = samples.front().cols();

    std::vector<CMatrix<Real>> full(static_cast<std::size_t>(n_grid), CMatrix<Real>::Zero(rows, cols));
    Eigen::FFT<Real> fft;
    std::vector<Complex<Real>> in(static_cast<std::size_t>(n_grid)), out;
    for (Index i = 0; i < rows; ++i) {
        for (Index j = 0; j < cols; ++j) {
            for (Index l = 0; l < n_grid; ++l) in[static_cast<std::size_t>(l)] = samples[static_cast<std::size_t>(l)](i, j);
            // inv() computes (1/N) Σ_l x_l e^{+2πi lk/N}, which is γ_k for the samples at e^{2πi l/N}.
            fft.inv(out, in);
            for (Index k = 0; k < n_grid; ++k) full[static_cast<std::size_t>(k)](i, j) = out[static_cast<std::size_t>(k)];
        }
    }

    res.coeffs.assign(full.begin() + 1, full.begin() + 1 + count);
    for (Index k = count + 1; k <= std::min(2 * count, n_grid / 2); ++k)
        res.tail_norm = std::max(res.tail_norm, full[static_cast<std::size_t>(k)].norm());
    const Index band = std::max<Index>(1, n_grid / 8);
    for (Index k = n_grid / 2 - band; k <= n_grid / 2 + band && k < n_grid; ++k)
        res.aliasing_bound = std::max(res.aliasing_bound, full[static_cast<std::size_t>(k)].norm());
    return res;
}

/// Block-Hankel matrix with block (j, k) = γ_{j+k−1}; rows + cols − 1 coefficients are used.
template <typename Real>
CMatrix<Real> block_hankel(const std::vector<CMatrix<Real>>& coeffs, Index block_rows, Index block_cols) {
    if (coeffs.empty() || block_rows < 1 || block_cols < 1 ||
        static_cast<Index>(coeffs.size()) < block_rows + block_cols - 1)
        throw Error(ErrorKind::InvalidParameter, "block_hankel: not enough coefficients");
    const Index p = coeffs.front().rows(), q = coeffs.front().cols();
    CMatrix<Real> h(p * block_rows, q * block_cols);
    for (Index j = 0; j < block_rows; ++j)
        for (Index k = 0; k < block_cols; ++k) h.block(j * p, k * q, p, q) = coeffs[static_cast<std::size_t>(j + k)];
    return h;
}

/// The most nearly square block-Hankel matrix that uses every coefficient.
template <typename Real>
CMatrix<Real> square_block_hankel(const std::vector<CMatrix<Real>>& coeffs) {
    const Index k = static_cast<Index>(coeffs.size());
    const Index rows = (k + 1) / 2;
    return block_hankel<Real>(coeffs, rows, k + 1 - rows);
}

template <typename Real>
std::vector<Real> hankel_singular_values(const std::vector<CMatrix<Real>>& coeffs) {
    const auto sv = singular_values(square_block_hankel<Real>(coeffs));
    return std::vector<Real>(sv.data(), sv.data() + sv.size());
}

/// Count of σ_i > max(rel_tol·σ₁, abs_floor) for the block-Hankel matrix of the sequence.
template <typename Real>
Index hankel_rank(const std::vector<CMatrix<Real>>& coeffs, double rel_tol, double abs_floor = 0.0) {
    if (coeffs.empty()) throw Error(ErrorKind::InvalidParameter, "hankel_rank: empty coefficient list");
    const auto sv = hankel_singular_values<Real>(coeffs);
    if (sv.empty() || sv.front() == Real(0)) return 0;
    const Real threshold = std::max(Real(rel_tol) * sv.front(), Real(abs_floor));
    return static_cast<Index>(std::count_if(sv.begin(), sv.end(), [&](Real s) { return s > threshold; }));
}

/// Winding number of a closed sampled curve around the origin.
template <typename Real>
Index winding_number(const std::vector<Complex<Real>>& values) {
    if (values.size() < 2) throw Error(ErrorKind::GridTooCoarse, "winding number needs at least two samples");
    Real total = 0;
    const Real limit = Real(EIGEN_PI) / Real(2);
    for (std::size_t i = 0; i < values.size(); ++i) {
        const Complex<Real> a = values[i];
        const Complex<Real> b = values[(i + 1) % values.size()];
        if (a == Complex<Real>(0) || b == Complex<Real>(0))
            throw Error(ErrorKind::GridSingular, "curve passes through the origin");
        const Real step = std::arg(b / a);
        if (std::abs(step) > limit)
            throw Error(ErrorKind::GridTooCoarse, "phase increment " + std::to_string(double(step)) + " exceeds pi/2");
        total += step;
    }
    return static_cast<Index>(std::llround(double(total / (Real(2) * Real(EIGEN_PI)))));
}

}  // namespace ntk
