#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

using namespace ntk;
using namespace ntk::testing;

namespace {

MatrixFunction<double> of(const Realization<double>& r) {
    return [r](Cx z) { return evaluate(r, z); };
}

MatrixFunction<double> monomial(int k) {
    return [k](Cx z) { return scalar(std::pow(z, k)); };
}

}  // namespace

TEST(Fourier, ScalarCoefficientsAreGeometric) {
    const auto fc = fourier_coefficients<double>(of(scalar_system()), 1024, 20);
    ASSERT_EQ(fc.coeffs.size(), 20u);
    for (int k = 1; k <= 20; ++k)
        EXPECT_NEAR(std::abs(fc.coeffs[static_cast<std::size_t>(k - 1)](0, 0) - std::pow(0.5, k - 1)), 0, 1e-14);
    EXPECT_LT(fc.aliasing_bound, 1e-15);
}

TEST(Fourier, CoefficientsMatchMarkovSequence) {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 5; ++trial) {
        const auto r = random_realization<double>(1 + trial, 2, 1 + trial % 2, rng);
        const auto fc = fourier_coefficients<double>(of(r), 4096, 48);
        const auto gamma = markov_sequence(r, 48);
        for (std::size_t k = 0; k < 48; ++k) EXPECT_LT((fc.coeffs[k] - gamma[k]).norm(), 1e-10 * (1 + gamma[0].norm()));
    }
}

TEST(Fourier, AnalyticPartIsInvisible) {
    // z^{-3} has γ_3 = 1; z^2 contributes nothing to negative-index coefficients.
    const MatrixFunction<double> f = [](Cx z) { return scalar(std::pow(z, -3) + std::pow(z, 2)); };
    const auto fc = fourier_coefficients<double>(f, 64, 8);
    for (std::size_t k = 0; k < 8; ++k) EXPECT_NEAR(std::abs(fc.coeffs[k](0, 0)), k == 2 ? 1.0 : 0.0, 1e-14);
}

TEST(Fourier, RejectsBadGrids) {
    EXPECT_THROW(fourier_coefficients<double>(monomial(1), 100, 10), Error);
    EXPECT_THROW(fourier_coefficients<double>(monomial(1), 64, 17), Error);
    EXPECT_THROW(fourier_coefficients<double>(monomial(1), 64, 0), Error);
}

TEST(Fourier, SingularSamplesArePerturbedInward) {
    const MatrixFunction<double> f = [](Cx z) -> Mat {
        if (z == Cx(1)) throw Error(ErrorKind::SingularEvaluation, "test");
        return scalar(1.0 / z);
    };
    std::vector<Index> moved;
    const auto samples = sample_circle<double>(f, 8, &moved);
    ASSERT_EQ(moved.size(), 1u);
    EXPECT_EQ(moved[0], 0);
    EXPECT_NEAR(std::abs(samples[0](0, 0) - 1.0), 0, 1e-8);

    const MatrixFunction<double> dead = [](Cx) -> Mat { throw Error(ErrorKind::SingularEvaluation, "test"); };
    try {
        sample_circle<double>(dead, 4);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::GridSingular);
    }
}

TEST(Hankel, BlockLayoutAndRank) {
    std::vector<Mat> coeffs;
    for (int k = 0; k < 6; ++k) coeffs.push_back(scalar(double(k + 1)));
    const Mat h = block_hankel<double>(coeffs, 3, 3);
    EXPECT_EQ(h(0, 0), Cx(1));
    EXPECT_EQ(h(1, 2), Cx(4));
    EXPECT_EQ(h(2, 2), Cx(5));
    EXPECT_EQ(square_block_hankel<double>(coeffs).rows(), 3);
    // γ_k = k is the Markov sequence of (z − 1)^{-2}: rank 2.
    EXPECT_EQ(hankel_rank<double>(coeffs, 1e-10), 2);
}

TEST(Hankel, ZeroSequenceRespectsFloor) {
    std::vector<Mat> coeffs(10, scalar(1e-14));
    EXPECT_EQ(hankel_rank<double>(coeffs, 1e-6), 1);
    EXPECT_EQ(hankel_rank<double>(coeffs, 1e-6, 1e-6), 0);
}

TEST(Hankel, KroneckerRankOfRandomSystems) {
    std::mt19937_64 rng(2024);
    for (Index n = 1; n <= 5; ++n) {
        const auto r = random_realization<double>(n, 2, 2, rng);
        EXPECT_EQ(hankel_rank<double>(markov_sequence(r, 48), 1e-6), n);
    }
}

TEST(Winding, CountsZeros) {
    for (int k : {-3, 0, 1, 2, 5}) {
        std::vector<Cx> vals;
        for (const Cx z : circle_points(64)) vals.push_back(std::pow(z, k) * Cx(2.0, 1.0));
        EXPECT_EQ(winding_number<double>(vals), k);
    }
    // z − 0.5 winds once, z − 2 not at all.
    std::vector<Cx> inner, outer;
    for (const Cx z : circle_points(32)) {
        inner.push_back(z - 0.5);
        outer.push_back(z - 2.0);
    }
    EXPECT_EQ(winding_number<double>(inner), 1);
    EXPECT_EQ(winding_number<double>(outer), 0);
}

TEST(Winding, GuardsCoarseAndSingularGrids) {
    std::vector<Cx> fast, zero;
    for (const Cx z : circle_points(256)) {
        fast.push_back(std::pow(z, 100));
        zero.push_back(z - 1.0);
    }
    try {
        winding_number<double>(fast);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::GridTooCoarse);
    }
    try {
        winding_number<double>(zero);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::GridSingular);
    }
}
