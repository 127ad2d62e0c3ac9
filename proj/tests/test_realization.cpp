#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

using namespace ntk;
using namespace ntk::testing;

TEST(Realization, RejectsInconsistentDimensions) {
    EXPECT_THROW(Realization<double>(Mat::Zero(2, 2), Mat::Zero(3, 1), Mat::Zero(1, 2)), Error);
    EXPECT_THROW(Realization<double>(Mat::Zero(2, 3), Mat::Zero(2, 1), Mat::Zero(1, 2)), Error);
    try {
        Realization<double>(Mat::Zero(2, 2), Mat::Zero(2, 1), Mat::Zero(1, 3));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::DimensionMismatch);
    }
}

TEST(Realization, ValidateScalar) {
    const auto rep = validate(scalar_system());
    EXPECT_TRUE(rep.controllable);
    EXPECT_TRUE(rep.observable);
    EXPECT_NEAR(rep.spectral_radius, 0.5, 1e-15);
}

TEST(Realization, ValidateDetectsUncontrollable) {
    Mat b(2, 1), c(1, 2);
    b << 1, 0;
    c << 1, 0;
    const Realization<double> r(Mat::Zero(2, 2), b, c);
    const auto rep = validate(r);
    EXPECT_EQ(rep.rank_Xi, 1);
    EXPECT_FALSE(rep.minimal());
    EXPECT_THROW(require_minimal_stable(r), Error);
}

TEST(Realization, RandomInstancesAreMinimalAndDeterministic) {
    std::mt19937_64 rng(7);
    const auto r = random_realization<double>(4, 2, 3, rng);
    const auto rep = validate(r);
    EXPECT_EQ(rep.rank_Xi, 4);
    EXPECT_EQ(rep.rank_Omega, 4);
    EXPECT_NEAR(rep.spectral_radius, 0.8, 1e-12);
    // Oracle: ranks from an independent JacobiSVD.
    const auto km = kalman_matrices(r);
    Eigen::JacobiSVD<Mat> svd(km.Xi);
    EXPECT_GT(svd.singularValues()(3), 1e-10 * svd.singularValues()(0));

    const auto again = validate(r);
    EXPECT_EQ(again.rank_Xi, rep.rank_Xi);
    EXPECT_EQ(again.spectral_radius, rep.spectral_radius);
}

TEST(Realization, EvaluateScalar) {
    const auto r = scalar_system();
    EXPECT_NEAR(std::abs(evaluate(r, Cx(0))(0, 0) - Cx(-2)), 0, 1e-15);
    EXPECT_NEAR(std::abs(evaluate(r, Cx(1))(0, 0) - Cx(2)), 0, 1e-15);
    try {
        evaluate(r, Cx(0.5));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::SingularEvaluation);
    }
}

TEST(Realization, MarkovCoefficients) {
    const auto r = scalar_system();
    EXPECT_NEAR(std::abs(markov(r, 1)(0, 0) - 1.0), 0, 1e-15);
    EXPECT_NEAR(std::abs(markov(r, 3)(0, 0) - 0.25), 0, 1e-15);
    EXPECT_THROW(markov(r, 0), Error);

    std::mt19937_64 rng(3);
    const Realization<double> z(Mat::Zero(3, 3), random_complex_normal<double>(3, 2, rng),
                                random_complex_normal<double>(2, 3, rng));
    EXPECT_EQ(markov(z, 2).norm(), 0.0);
}

TEST(Realization, KalmanMatrices) {
    Mat a = Mat::Zero(2, 2), b(2, 1), c(1, 2);
    a(0, 0) = 0.5;
    a(1, 1) = 0.3;
    b << 1, 1;
    c << 1, 1;
    const auto km = kalman_matrices(Realization<double>(a, b, c));
    Mat expected(2, 2);
    expected << 1, 0.5, 1, 0.3;
    EXPECT_LT((km.Xi - expected).norm(), 1e-15);

    const auto s = kalman_matrices(scalar_system());
    EXPECT_EQ(s.Xi(0, 0), Cx(1));
    EXPECT_EQ(s.Omega(0, 0), Cx(1));
}

TEST(Realization, HankelFactorsThroughKalmanMatrices) {
    std::mt19937_64 rng(11);
    const auto r = random_realization<double>(3, 2, 2, rng);
    const Index big = 8, n = r.n(), p = r.p(), q = r.q();
    // Extended Ω, Ξ to N block rows/cols; Γ_N must equal their product.
    Mat omega(big * p, n), xi(n, big * q);
    Mat ca = r.C(), ab = r.B();
    for (Index i = 0; i < big; ++i) {
        omega.middleRows(i * p, p) = ca;
        xi.middleCols(i * q, q) = ab;
        ca = ca * r.A();
        ab = r.A() * ab;
    }
    const auto gamma = markov_sequence(r, 2 * big - 1);
    Mat h(big * p, big * q);
    for (Index j = 0; j < big; ++j)
        for (Index k = 0; k < big; ++k) h.block(j * p, k * q, p, q) = gamma[static_cast<std::size_t>(j + k)];
    EXPECT_LT((h - omega * xi).norm(), 1e-12 * h.norm());
    // First n block columns of the extended matrices are the Kalman matrices.
    const auto km = kalman_matrices(r);
    EXPECT_LT((km.Xi - xi.leftCols(n * q)).norm(), 1e-13);
    EXPECT_LT((km.Omega - omega.topRows(n * p)).norm(), 1e-13);
}

TEST(Realization, CircleValuesMatchTruncatedMarkovSeries) {
    std::mt19937_64 rng(5);
    const auto r = random_realization<double>(4, 2, 2, rng);
    const auto gamma = markov_sequence(r, 200);
    double c = 0;
    for (Index k = 0; k < 200; ++k)
        c = std::max(c, gamma[static_cast<std::size_t>(k)].norm() / std::pow(0.8 + 1e-3, double(k)));
    for (const Cx z : circle_points(16)) {
        Mat sum = Mat::Zero(2, 2);
        Cx zk = 1.0;
        for (Index k = 0; k < 200; ++k) {
            zk /= z;
            sum += gamma[static_cast<std::size_t>(k)] * zk;
        }
        EXPECT_LT((evaluate(r, z) - sum).norm(), 1e-9 + c * std::pow(0.801, 200.0) / (1 - 0.801));
    }
}

TEST(Realization, MarkovDecay) {
    std::mt19937_64 rng(9);
    const auto r = random_realization<double>(3, 1, 2, rng);
    const auto gamma = markov_sequence(r, 120);
    // ‖A^k‖ ≤ c (0.8 + δ)^k for any δ > 0; check with δ = 0.05.
    const double c = r.C().norm() * r.B().norm() * 1e3;
    for (Index k = 0; k < 120; ++k)
        EXPECT_LE(gamma[static_cast<std::size_t>(k)].norm(), c * std::pow(0.85, double(k)));
}

TEST(Geometry, DiskHelpers) {
    EXPECT_GT(rho<double>(Cx(0.3, 0.4), Cx(0.3, 0.4)).real(), 0);
    EXPECT_NEAR(rho<double>(Cx(0.6, 0.8), Cx(0.6, 0.8)).real(), 0, 1e-15);
    EXPECT_LT(rho<double>(Cx(2, 0), Cx(2, 0)).real(), 0);
    const Cx l(0.3, -0.2);
    EXPECT_NEAR(std::abs(reflect<double>(l)) * std::abs(l), 1.0, 1e-15);
}
