#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

using namespace ntk;
using namespace ntk::testing;

TEST(Denominator, ScalarClosedForms) {
    const auto r = scalar_system();
    const DenominatorData<double> d(r, gramians(r));
    std::vector<Cx> pts = circle_points(16);
    pts.insert(pts.end(), {Cx(0), Cx(0.3, 0.4), Cx(-0.9, 0), Cx(3, 1)});
    for (const Cx z : pts) {
        const Cx b = (z - 0.5) / (1.0 - 0.5 * z);
        EXPECT_NEAR(std::abs(b2_evaluate(d, z)(0, 0) - b), 0, 1e-13);
        EXPECT_NEAR(std::abs(k_evaluate(d, z)(0, 0) - 1.0 / (1.0 - 0.5 * z)), 0, 1e-13);
        if (z != Cx(0.5)) EXPECT_NEAR(std::abs(b2_evaluate(d, z, true)(0, 0) - 1.0 / b), 0, 1e-12);
    }
}

TEST(Denominator, InverseFailsAtEigenvalues) {
    const auto r = scalar_system();
    const DenominatorData<double> d(r, gramians(r));
    EXPECT_THROW(b2_evaluate(d, Cx(0.5), true), Error);
    EXPECT_NEAR(std::abs(b2_evaluate(d, Cx(0.5))(0, 0)), 0, 1e-15);
    EXPECT_THROW(b2_evaluate(d, Cx(2.0)), Error);  // reflected pole 1/conj(0.5)
}

class DenominatorRandom : public ::testing::TestWithParam<int> {};

TEST_P(DenominatorRandom, InnerIntertwiningAndPoleFree) {
    std::mt19937_64 rng(static_cast<std::uint64_t>(1000 + GetParam()));
    const Index n = 1 + GetParam() % 4, p = 1 + GetParam() % 2, q = 1 + GetParam() % 3;
    const auto r = instance_with_kappa1(n, p, q, GetParam() % (n + 1), rng);
    const DenominatorData<double> d(r, gramians(r));
    const Mat id = Mat::Identity(q, q);

    EXPECT_LT((b2_evaluate(d, Cx(1)) - id).norm(), 1e-12);
    for (const Cx mu : circle_points(32)) {
        const Mat b = b2_evaluate(d, mu);
        EXPECT_LT((b.adjoint() * b - id).norm(), 1e-9);
        EXPECT_LT((b * b2_evaluate(d, mu, true) - id).norm(), 1e-9);
    }
    std::uniform_real_distribution<double> u(-0.7, 0.7);
    for (int i = 0; i < 20; ++i) {
        const Cx z(u(rng), u(rng));
        // Intertwining f₀ b₂ = K, checked against direct evaluation of f₀.
        const Mat lhs = evaluate(r, z) * b2_evaluate(d, z);
        EXPECT_LT((lhs - k_evaluate(d, z)).norm(), 1e-9 * (1 + lhs.norm()));
        EXPECT_LT(intertwining_defect(d, z), 1e-9 * (1 + lhs.norm()));
        // Contractive inside the disk.
        EXPECT_LE(spectral_norm(b2_evaluate(d, z)), 1 + 1e-10);
    }
    // b₂ vanishes on the eigenvectors of A; K stays finite there.
    Eigen::ComplexEigenSolver<Mat> es(r.A());
    for (Index i = 0; i < n; ++i) {
        const Cx lam = es.eigenvalues()(i);
        const auto sv = singular_values(b2_evaluate(d, lam));
        EXPECT_LT(sv(sv.size() - 1), 1e-8);
        EXPECT_TRUE(k_evaluate(d, lam).allFinite());
    }
}

INSTANTIATE_TEST_SUITE_P(Seeds, DenominatorRandom, ::testing::Range(0, 12));

TEST(Denominator, DeterminantDegreeMatchesStateDimension) {
    // det b₂ is a scalar Blaschke product of degree n: winding number n on the circle.
    std::mt19937_64 rng(77);
    for (Index n = 1; n <= 4; ++n) {
        const auto r = random_realization<double>(n, 2, 2, rng);
        const DenominatorData<double> d(r, gramians(r));
        std::vector<Cx> dets;
        for (const Cx mu : circle_points(512)) dets.push_back(b2_evaluate(d, mu).determinant());
        EXPECT_EQ(winding_number<double>(dets), n);
    }
}
