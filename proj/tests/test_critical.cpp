#include <cmath>

#include <gtest/gtest.h>

#include "ecm/critical.hpp"

using namespace ecm;

TEST(ClosedFormN2, HessianValueForSmallestCase)
{
    const auto cf = closed_form_N2(3, 1);
    EXPECT_NEAR(std::abs(cf.hess - cplx(-16.0)), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(cf.report.point[0] - 0.5), 0.0, 1e-15);
}

class ClosedFormN2Sweep : public ::testing::TestWithParam<std::pair<int, int>>
{
};

TEST_P(ClosedFormN2Sweep, RootsReproduceFormulas)
{
    const auto [l, m1] = GetParam();
    const auto cf = closed_form_N2(m1, l);
    ASSERT_EQ(int(cf.report.point.size()), l);
    EXPECT_LT(cf.report.grad_norm, newton_tolerance);
    for (int i = 0; i < l; ++i)
        EXPECT_LT(std::abs(cf.sigma_from_roots[i] - cf.sigma[i]), 1e-10 * std::max(1.0, std::abs(cf.sigma[i])));
    EXPECT_LT(std::abs(cf.delta - cf.delta_formula), 1e-9 * std::abs(cf.delta_formula));
    EXPECT_LT(std::abs(cf.hess - cf.hess_formula), 1e-9 * std::abs(cf.hess_formula));
}

INSTANTIATE_TEST_SUITE_P(Grid, ClosedFormN2Sweep,
                         ::testing::Values(std::pair{1, 4}, std::pair{2, 4}, std::pair{2, 7}, std::pair{3, 5},
                                           std::pair{3, 9}, std::pair{4, 6}, std::pair{1, -4}, std::pair{2, -5}));

TEST(ClosedFormN2, DegenerateLabelIsRejected)
{
    try {
        closed_form_N2(1, 1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::domain);
    }
    EXPECT_THROW(closed_form_N2(3, 0), Error);
}

TEST(ClosedFormN3, ThirdRootForSymmetricLabels)
{
    const auto cf = closed_form_N3_l1(3, 3);
    EXPECT_NEAR(std::abs(cf.points[0][2] - 5.0 / 14.0), 0.0, 1e-15);
    // conjugate pair
    EXPECT_NEAR(std::abs(cf.points[0][0] - std::conj(cf.points[0][1])), 0.0, 1e-14);
    EXPECT_LT(cf.report.grad_norm, 1e-12);
}

TEST(ClosedFormN3, IdentitiesAndHessianMagnitude)
{
    for (auto [m1, m2] : {std::pair{2, 2}, std::pair{2, 4}, std::pair{3, 2}, std::pair{4, 5}, std::pair{-3, -2}}) {
        const auto cf = closed_form_N3_l1(m1, m2);
        EXPECT_LT(std::abs(cf.product - cf.product_formula), 1e-12);
        EXPECT_LT(std::abs(cf.shifted_product - cf.shifted_product_formula), 1e-12);
        EXPECT_LT(std::abs(cf.discriminant - cf.discriminant_formula), 1e-12);
        EXPECT_LT(std::abs(cf.discriminant / cf.discriminant_printed + 8.0), 1e-9);
        EXPECT_NEAR(std::abs(cf.hess), std::abs(cf.hess_formula), 1e-9 * std::abs(cf.hess_formula));
    }
}

TEST(ClosedFormN3, ExcludedLabels)
{
    EXPECT_THROW(closed_form_N3_l1(1, 3), Error);
    EXPECT_THROW(closed_form_N3_l1(2, -3), Error);
    EXPECT_THROW(closed_form_N3_l1(0, 2), Error);
}

TEST(Degeneracy, ScaleInvariantThreshold)
{
    Eigen::MatrixXcd h(2, 2);
    h << 1e6, 0.0, 0.0, 1e-6;
    EXPECT_TRUE(non_degenerate(h));
    h << 1.0, 1.0, 1.0, 1.0 + 1e-13;
    EXPECT_FALSE(non_degenerate(h));
}

TEST(Search, TwoParticleUsesClosedForm)
{
    const RootSystem rs(2, 2);
    const auto res = find_admissible_critical_point(Weight::from_dynkin({4.0}), rs);
    EXPECT_EQ(res.method, "closed-form");
    EXPECT_EQ(res.sigma, (std::vector<int>{0, 1}));
    EXPECT_LT(res.report.grad_norm, newton_tolerance);
}

TEST(Search, NewtonBranchForLargerSystems)
{
    // N = 3, l = 2 has no closed form
    const RootSystem rs(3, 2);
    const auto res = find_admissible_critical_point(Weight::from_dynkin({3.0, 3.0}), rs);
    EXPECT_EQ(res.method, "newton");
    const MasterFunction mf(rs, res.xi);
    EXPECT_LT(norm2(mf.log_phi_tri_grad(res.report.point)), newton_tolerance);
    EXPECT_TRUE(non_degenerate(mf.hessian_tri(res.report.point)));
}

TEST(Search, InadmissibleIsDomainError)
{
    try {
        find_admissible_critical_point(Weight::from_dynkin({1.0}), RootSystem(2, 1));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::domain);
    }
}

TEST(Continuation, ScheduleIsMonotone)
{
    const auto s = continuation_schedule(0.05);
    ASSERT_FALSE(s.empty());
    EXPECT_NEAR(std::abs(s.back() - 0.05), 0.0, 1e-17);
    for (std::size_t i = 1; i < s.size(); ++i)
        EXPECT_GT(std::abs(s[i]), std::abs(s[i - 1]));
    EXPECT_TRUE(continuation_schedule(0.0).empty());
}

TEST(Continuation, PathStaysOnBranch)
{
    const MasterFunction mf(RootSystem(2, 2), Weight::from_dynkin({5.0}));
    const auto cf = closed_form_N2(5, 2);
    const auto path = continue_nome(mf, cf.report.point, 0.05);
    EXPECT_NEAR(std::abs(path.end().p - 0.05), 0.0, 1e-17);
    for (const auto& pt : path.points) {
        EXPECT_LT(pt.grad_norm, newton_tolerance);
        EXPECT_GT(std::abs(pt.hess_det), 0.0);
    }
    const auto d = path_displacements(path);
    EXPECT_EQ(d.front(), 0.0);
    EXPECT_GT(d.back(), 0.0);
}

TEST(Continuation, ComplexAndNegativeNome)
{
    const MasterFunction mf(RootSystem(2, 1), Weight::from_dynkin({3.0}));
    const std::vector<cplx> T{0.5};
    for (cplx p : {cplx(-0.02, 0.0), cplx(0.0, 0.02)})
        EXPECT_LT(continue_nome(mf, T, p).end().grad_norm, newton_tolerance);
}

TEST(Continuation, GuardsItsInputs)
{
    const MasterFunction mf(RootSystem(2, 1), Weight::from_dynkin({3.0}));
    EXPECT_THROW(continue_nome(mf, {0.5}, 0.5), Error);
    try {
        continue_nome(mf, {1.0}, 0.01);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::membership);
    }
}
