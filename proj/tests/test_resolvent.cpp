#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

using namespace ntk;
using namespace ntk::testing;

namespace {

GammaGeneratingMatrix<double> scalar_resolvent(double c = 1.0) {
    const auto r = scalar_system(c);
    return GammaGeneratingMatrix<double>(assemble(r, gramians(r)));
}

void expect_matrix(const Mat& got, std::initializer_list<std::initializer_list<double>> want, double tol) {
    Index i = 0;
    for (const auto& row : want) {
        Index k = 0;
        for (double v : row) {
            EXPECT_NEAR(std::abs(got(i, k) - v), 0, tol) << "entry (" << i << ", " << k << ")";
            ++k;
        }
        ++i;
    }
}

}  // namespace

TEST(Resolvent, ScalarSkeleton) {
    const auto a = scalar_resolvent();
    const auto& rd = a.data();
    expect_matrix(rd.Lambda_inv, {{-12.0 / 7, -9.0 / 7}, {-9.0 / 7, -12.0 / 7}}, 1e-13);
    expect_matrix(rd.M, {{-0.5, 0}, {0, 1}}, 0);
    expect_matrix(rd.N, {{-1, 0}, {0, 0.5}}, 0);
    expect_matrix(g_evaluate(rd, Cx(1)), {{2, 0}, {0, 2}}, 1e-14);
    expect_matrix(g_evaluate(rd, Cx(0)), {{-2, 0}, {0, 1}}, 1e-14);
    EXPECT_EQ(rd.kappa1, 1);
}

TEST(Resolvent, ScalarValues) {
    const auto a = scalar_resolvent();
    expect_matrix(a(Cx(-1)), {{-25.0 / 7, 24.0 / 7}, {24.0 / 7, -25.0 / 7}}, 1e-12);
    expect_matrix(a(Cx(0)), {{-41.0 / 7, 36.0 / 7}, {18.0 / 7, -17.0 / 7}}, 1e-12);
    EXPECT_EQ((a(Cx(1)) - Mat::Identity(2, 2)).norm(), 0.0);
    EXPECT_NEAR(std::abs(s21_evaluate(a, Cx(-1)).value(0, 0) - 24.0 / 25.0), 0, 1e-13);
}

TEST(Resolvent, ScalarA22ZeroIsIndependentlyAZero) {
    const auto a = scalar_resolvent();
    const auto zeros = a22_zeros_in_disk(a);
    ASSERT_EQ(zeros.size(), 1u);
    EXPECT_NEAR(std::abs(zeros[0] - 34.0 / 41.0), 0, 1e-12);
    EXPECT_NEAR(std::abs(a22(a(zeros[0]), 1)(0, 0)), 0, 1e-12);
    EXPECT_THROW(s21_at(a, zeros[0]), Error);
}

TEST(Resolvent, SubcriticalScalarHasNoA22Zeros) {
    const auto a = scalar_resolvent(0.5);
    EXPECT_EQ(a.kappa1(), 0);
    EXPECT_TRUE(a22_zeros_in_disk(a).empty());
    const auto rep = membership_report(a, 128);
    EXPECT_TRUE(rep.pass);
    EXPECT_EQ(rep.winding_det_a22, 0);
}

TEST(Resolvent, CircleOnlyOperationsRejectInteriorPoints) {
    const auto a = scalar_resolvent();
    try {
        s21_evaluate(a, Cx(0.5));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NotOnCircle);
    }
    EXPECT_THROW(j_unitarity_defect(a, Cx(0.2)), Error);
}

TEST(Resolvent, BoundaryCaseRefused) {
    const Mat id = Mat::Identity(2, 2);
    const Realization<double> r(Mat::Zero(2, 2), id, id);
    try {
        assemble(r, gramians(r));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::BoundaryDegenerate);
    }
}

TEST(Resolvent, RoundTripFromParts) {
    const auto a = scalar_resolvent();
    const auto& rd = a.data();
    const GammaGeneratingMatrix<double> b(resolvent_from_parts(rd.realization, rd.Lambda, rd.Lambda_inv, rd.kappa1));
    for (const Cx mu : circle_points(8)) EXPECT_LT((a(mu) - b(mu)).norm(), 1e-15);
    Mat bad = rd.Lambda_inv;
    bad(0, 0) += 0.1;
    try {
        resolvent_from_parts(rd.realization, rd.Lambda, bad, rd.kappa1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::CrossCheckFailure);
    }
}

class ResolventRandom : public ::testing::TestWithParam<int> {};

TEST_P(ResolventRandom, MembershipOfGeneralizedClass) {
    const int seed = GetParam();
    std::mt19937_64 rng(static_cast<std::uint64_t>(500 + seed));
    const Index n = 2 + seed % 3, k1 = seed % 3;
    const auto r = instance_with_kappa1(n, 1 + seed % 2, 1 + (seed / 2) % 2, k1, rng);
    const GammaGeneratingMatrix<double> a(assemble(r, gramians(r)));
    ASSERT_EQ(a.kappa1(), k1);

    for (const Cx mu : circle_points(128)) EXPECT_LE(j_unitarity_defect(a, mu), 1e-8);
    EXPECT_LE((a(Cx(1)) - Mat::Identity(a.m(), a.m())).norm(), 1e-12);

    const auto rep = membership_report(a, 256);
    EXPECT_TRUE(rep.pass) << "kappa1=" << k1 << " hankel=" << rep.s21_pole_count_hankel
                          << " zeros=" << rep.a22_zero_count << " w22=" << rep.winding_det_a22
                          << " w11=" << rep.winding_det_a11_star;
    EXPECT_LE(rep.max_s21_norm, 1 + 1e-8);
    EXPECT_LE(rep.max_s21_discrepancy, 1e-8);

    // Each reported zero of det a₂₂ is a zero when a₂₂ is evaluated directly.
    for (const Cx z : a22_zeros_in_disk(a)) {
        const auto sv = singular_values(Mat(a22(a(z), a.p())));
        EXPECT_LT(sv(sv.size() - 1), 1e-7 * (1 + sv(0)));
    }
}

INSTANTIATE_TEST_SUITE_P(Seeds, ResolventRandom, ::testing::Range(0, 15));

TEST(Resolvent, JUnitarityAtArbitraryCirclePoints) {
    std::mt19937_64 rng(31);
    const auto r = instance_with_kappa1(3, 2, 2, 1, rng);
    const GammaGeneratingMatrix<double> a(assemble(r, gramians(r)));
    std::uniform_real_distribution<double> th(0, 2 * std::numbers::pi);
    for (int i = 0; i < 50; ++i) EXPECT_LE(j_unitarity_defect(a, std::polar(1.0, th(rng))), 1e-8);
}

TEST(Resolvent, LongDoubleInstantiation) {
    using LD = long double;
    const auto one = [](LD v) { return CMatrix<LD>::Constant(1, 1, v); };
    const Realization<LD> r(one(0.5L), one(1.0L), one(1.0L));
    const GammaGeneratingMatrix<LD> a(assemble(r, gramians(r)));
    const auto v = a(Complex<LD>(-1));
    EXPECT_NEAR(double(std::abs(v(0, 0) + 25.0L / 7.0L)), 0, 1e-16);
    EXPECT_NEAR(double(std::abs(v(0, 1) - 24.0L / 7.0L)), 0, 1e-16);
}
