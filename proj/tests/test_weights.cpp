#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "ecm/weights.hpp"

using namespace ecm;

TEST(Weight, FromDynkinIsTraceless)
{
    const Weight w = Weight::from_dynkin({3.0, 1.0});
    ASSERT_EQ(w.N(), 3);
    double sum = 0.0;
    for (double c : w.coords())
        sum += c;
    EXPECT_NEAR(sum, 0.0, 1e-15);
    EXPECT_NEAR(w.coords()[0] - w.coords()[1], 3.0, 1e-15);
    EXPECT_NEAR(w.coords()[1] - w.coords()[2], 1.0, 1e-15);
}

TEST(Weight, FundamentalWeightOfA1)
{
    const Weight w = Weight::from_dynkin({1.0});
    EXPECT_DOUBLE_EQ(w.coords()[0], 0.5);
    EXPECT_DOUBLE_EQ(w.coords()[1], -0.5);
    EXPECT_DOUBLE_EQ(w.norm2(), 0.5);
}

TEST(Weight, CoordsRoundTrip)
{
    const std::vector<double> raw{2.5, 1.0, -0.5};
    const Weight w = Weight::from_coords(raw);
    const Weight v = Weight::from_dynkin(w.dynkin());
    for (int i = 0; i < 3; ++i)
        EXPECT_NEAR(v.coords()[i], w.coords()[i], 1e-14);
}

TEST(Weight, LatticeMembership)
{
    EXPECT_TRUE(Weight::from_dynkin({2.0, -1.0}).in_P());
    EXPECT_FALSE(Weight::from_dynkin({2.0, -1.0}).in_P_plus());
    EXPECT_FALSE(Weight::from_dynkin({0.5}).in_P());
    EXPECT_TRUE(Weight::from_dynkin({0.0, 4.0}).in_P_plus());
}

TEST(Weight, PermutationKeepsLabelsExact)
{
    const Weight w = Weight::from_dynkin({3.0, 3.0});
    const std::vector<int> rev{2, 1, 0};
    const Weight r = w.permuted(rev);
    EXPECT_EQ(r.dynkin()[0], -3.0);
    EXPECT_EQ(r.dynkin()[1], -3.0);
    EXPECT_NEAR(r.norm2(), w.norm2(), 1e-13);
}

TEST(Admissible, PairingsMustExceedCoupling)
{
    EXPECT_TRUE(admissible(Weight::from_dynkin({3.0}), RootSystem(2, 2)));
    EXPECT_FALSE(admissible(Weight::from_dynkin({2.0}), RootSystem(2, 2)));
    EXPECT_FALSE(admissible(Weight::from_dynkin({2.5}), RootSystem(2, 1)));
    // (xi, e1 - e3) = 0 although both simple pairings are large
    EXPECT_FALSE(admissible(Weight::from_dynkin({4.0, -4.0}), RootSystem(3, 1)));
    EXPECT_TRUE(admissible(Weight::from_dynkin({2.0, 2.0}), RootSystem(3, 1)));
}

TEST(Admissible, LambdaPlusShiftedRhoIsAlwaysAdmissible)
{
    for (int l = 1; l <= 3; ++l)
        for (double a : {0.0, 1.0, 2.0, 5.0})
            for (double b : {0.0, 1.0, 3.0})
                EXPECT_TRUE(admissible(lambda_to_xi(Weight::from_dynkin({a, b}), l), RootSystem(3, l)));
}

TEST(Energies, JackEnergyAsPairSum)
{
    // sum_i lambda_i^2 + (1/alpha) sum_{i<j} (lambda_i - lambda_j)
    const std::vector<double> lam{1.5, -0.5, -1.0};
    const double alpha = 0.5;
    double direct = 0.0;
    for (std::size_t i = 0; i < lam.size(); ++i) {
        direct += lam[i] * lam[i];
        for (std::size_t j = i + 1; j < lam.size(); ++j)
            direct += (lam[i] - lam[j]) / alpha;
    }
    EXPECT_NEAR(jack_energy(lam, alpha), direct, 1e-13);
}

TEST(Energies, TargetVariantsDifferByConstant)
{
    const int N = 3, l = 2;
    const auto t = target_eigenvalue(Weight::from_dynkin({1.0, 0.0}), N, l);
    EXPECT_NEAR(t.with_constant - t.without_constant, pi * pi * N * (N - 1) * l * (l + 1) / 6.0, 1e-10);
    EXPECT_NEAR(t.e0, ground_energy(N, l), 0.0);
}

TEST(Energies, GroundStateOfTwoParticles)
{
    // lambda = 0: e0 = pi^2 (l+1)^2 N (N^2-1)/6 = 4 pi^2 for N = 2, l = 1
    const auto t = target_eigenvalue(Weight::from_dynkin({0.0}), 2, 1);
    EXPECT_NEAR(t.without_constant, 4.0 * pi * pi, 1e-12);
}

TEST(Indexing, SizesMatchCounts)
{
    for (int N = 2; N <= 4; ++N)
        for (int l = 1; l <= 2; ++l) {
            const auto idx = build_indexing(N, l);
            EXPECT_EQ(idx.m, l * N * (N - 1) / 2);
            EXPECT_EQ(double(idx.W.size()), detail::w_count(N, l));
            EXPECT_EQ(idx.terms().size(), idx.term_count());
            // colours are non-decreasing and every colour block has (N-1-c) l members
            for (int c = 0; c < N - 1; ++c)
                EXPECT_EQ(idx.bounds[c + 1] - idx.bounds[c], (N - 1 - c) * l);
        }
}

TEST(Indexing, TwoParticlePartnerIsSecondParticle)
{
    const auto idx = build_indexing(2, 3);
    for (const auto& term : idx.terms()) {
        std::set<int> partners(term.partner.begin(), term.partner.end());
        EXPECT_EQ(partners, std::set<int>{1});
    }
}
