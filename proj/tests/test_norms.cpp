#include <gtest/gtest.h>

#include "generators.hpp"
#include "mixbound/norms.hpp"
#include "oracles.hpp"

using namespace mixbound;

namespace {

const FiniteSpace kBinary = FiniteSpace::indexed(2);

PathFunction indicator_00() { return PathFunction(kBinary, 2, {1, 0, 0, 0}); }
PathFunction signed_pair() { return PathFunction(kBinary, 2, {1, 0, 0, -1}); }

}  // namespace

TEST(Hamming, Basics) {
    const std::vector<std::size_t> a{0, 1, 1}, b{0, 0, 1}, c{1, 0, 0};
    EXPECT_EQ(hamming(a, a), 0u);
    EXPECT_EQ(hamming(a, b), 1u);
    EXPECT_EQ(hamming(a, c), 3u);
    EXPECT_THROW(hamming(a, std::vector<std::size_t>{0, 1}), LengthMismatch);
}

TEST(Lipschitz, ConstantAndOccupation) {
    EXPECT_DOUBLE_EQ(lipschitz_constant(PathFunction(kBinary, 3, std::vector<double>(8, 4.0))), 0.0);
    auto f = PathFunction::occupation_fraction(FiniteSpace::indexed(3), 4, {true, false, true});
    EXPECT_NEAR(lipschitz_constant(f), 0.25, 1e-15);
}

TEST(Lipschitz, AdjacencyEqualsAllPairs) {
    gen::Engine rng(31);
    for (int rep = 0; rep < 30; ++rep) {
        const std::size_t k = gen::pick(rng, 2, 3), n = gen::pick(rng, 1, 3);
        auto v = gen::table(rng, oracle::ipow(k, n));
        EXPECT_NEAR(lipschitz_constant(PathFunction(FiniteSpace::indexed(k), n, v)), oracle::lipschitz(v, k, n),
                    1e-12);
    }
}

TEST(Project, CountingMeasure) {
    auto p = project(indicator_00());
    ASSERT_EQ(p.horizon(), 1u);
    EXPECT_DOUBLE_EQ(p[0], 1.0);
    EXPECT_DOUBLE_EQ(p[1], 0.0);

    auto scalar = project(PathFunction(FiniteSpace::indexed(3), 1, {0.5, 1.0, 2.0}));
    EXPECT_EQ(scalar.horizon(), 0u);
    EXPECT_DOUBLE_EQ(scalar[0], 3.5);

    // f depends only on x₂: the projection is |Ω| times the slice.
    auto g = project(PathFunction::from(FiniteSpace::indexed(3), 2, [](const auto& x) { return 1.0 + x[1]; }));
    for (std::size_t s = 0; s < 3; ++s) EXPECT_DOUBLE_EQ(g[s], 3.0 * (1.0 + s));
}

TEST(Project, WeightsAndErrors) {
    const double w[] = {0.25, 0.75};
    auto p = project(PathFunction(kBinary, 1, {4.0, 8.0}), w);
    EXPECT_DOUBLE_EQ(p[0], 7.0);
    const double bad[] = {1.0};
    EXPECT_THROW(project(PathFunction(kBinary, 1, {4.0, 8.0}), bad), LengthMismatch);
    EXPECT_THROW(project(PathFunction(kBinary, 0, {1.0})), DomainError);
}

TEST(Psi, WorkedValues) {
    EXPECT_DOUBLE_EQ(psi_functional(PathFunction(kBinary, 2, std::vector<double>(4, 0.0))), 0.0);
    EXPECT_DOUBLE_EQ(psi_functional(indicator_00()), 2.0);
    EXPECT_DOUBLE_EQ(psi_functional(signed_pair()), 2.0);
    EXPECT_DOUBLE_EQ(psi_norm(signed_pair()), 2.0);
    EXPECT_DOUBLE_EQ(psi_norm(-signed_pair()), psi_norm(signed_pair()));
}

TEST(Psi, RecursionMatchesFlatSum) {
    gen::Engine rng(32);
    for (int rep = 0; rep < 40; ++rep) {
        const std::size_t k = gen::pick(rng, 2, 3), n = gen::pick(rng, 1, 4);
        auto v = gen::table(rng, oracle::ipow(k, n));
        EXPECT_NEAR(psi_functional(PathFunction(FiniteSpace::indexed(k), n, v)), oracle::psi(v, k, n), 1e-10);
    }
}

TEST(Phi, WorkedValues) {
    EXPECT_DOUBLE_EQ(phi_norm(PathFunction(kBinary, 2, std::vector<double>(4, 0.0))), 0.0);
    auto sol = phi_sup(indicator_00());
    EXPECT_NEAR(sol.value, 2.0, 1e-9);
    EXPECT_NEAR(sol.g[0], 2.0, 1e-9);
    EXPECT_NEAR(phi_norm(indicator_00()), 2.0, 1e-9);
    EXPECT_NEAR(phi_norm(signed_pair()), 2.0, 1e-9);
    EXPECT_DOUBLE_EQ(phi_norm(PathFunction(FiniteSpace::indexed(1), 3, {5.0})), 0.0);
}

TEST(Phi, LimitIsEnforced) {
    PathFunction f(kBinary, 9, std::vector<double>(512, 1.0));
    EXPECT_THROW(phi_norm(f), OptimizationLimitExceeded);
    EXPECT_THROW(phi_norm(PathFunction(kBinary, 3, std::vector<double>(8, 1.0)), NormLimits{4}),
                 OptimizationLimitExceeded);
}

TEST(Phi, MatchesIntegerSearchAndIsFeasible) {
    gen::Engine rng(33);
    for (int rep = 0; rep < 25; ++rep) {
        const std::size_t n = gen::pick(rng, 1, 3);
        auto v = gen::table(rng, oracle::ipow(2, n));
        PathFunction f(kBinary, n, v);
        auto sol = phi_sup(f);
        EXPECT_NEAR(sol.value, oracle::phi_integer(v, 2, n), 1e-9);
        EXPECT_TRUE(is_phi_feasible(kBinary, n, sol.g));
    }
}

TEST(Domination, NonNegativeSlack) {
    gen::Engine rng(34);
    EXPECT_NEAR(check_psi_domination(PathFunction(kBinary, 2, std::vector<double>(4, 0.0))).slack, 0.0, 1e-12);
    for (int rep = 0; rep < 40; ++rep) {
        auto v = gen::table(rng, 4);
        if (rep % 2 == 0)
            for (double& x : v) x = std::abs(x);
        auto r = check_psi_domination(PathFunction(kBinary, 2, v));
        EXPECT_TRUE(r.dominated) << "slack " << r.slack;
    }
    // Grid-constant functions on a two-cell partition behave the same way.
    for (int rep = 0; rep < 20; ++rep) {
        auto v = gen::table(rng, 8);
        EXPECT_TRUE(check_psi_domination(PathFunction(kBinary, 3, v)).dominated);
    }
}

TEST(Norms, SandwichHomogeneityTriangle) {
    gen::Engine rng(35);
    for (int rep = 0; rep < 30; ++rep) {
        const std::size_t n = gen::pick(rng, 1, 3), k = gen::pick(rng, 2, 3);
        if (oracle::ipow(k, n) > 27) continue;
        auto space = FiniteSpace::indexed(k);
        PathFunction f(space, n, gen::table(rng, oracle::ipow(k, n)));
        PathFunction g(space, n, gen::table(rng, oracle::ipow(k, n)));
        const double a = std::uniform_real_distribution<double>(-3.0, 3.0)(rng);
        auto r = norm_report(f);
        const double nn = static_cast<double>(n);
        EXPECT_GE(r.phi, 0.5 * r.l1 - 1e-9);
        EXPECT_LE(r.phi, nn * r.l1 + 1e-9);
        EXPECT_GE(r.psi, 0.5 * r.l1 - 1e-9);
        EXPECT_LE(r.psi, nn * r.l1 + 1e-9);
        EXPECT_LE(r.phi, r.psi + 1e-9);
        EXPECT_NEAR(phi_norm(f.scaled(a)), std::abs(a) * r.phi, 1e-8);
        EXPECT_NEAR(psi_norm(f.scaled(a)), std::abs(a) * r.psi, 1e-9);
        EXPECT_LE(phi_norm(f + g), r.phi + phi_norm(g) + 1e-9);
        EXPECT_LE(psi_norm(f + g), r.psi + psi_norm(g) + 1e-9);
    }
}

TEST(PathFunction, Validation) {
    EXPECT_THROW(PathFunction(kBinary, 2, {1, 2, 3}), LengthMismatch);
    EXPECT_THROW(PathFunction(kBinary, 1, {1, std::nan("")}), DomainError);
    EXPECT_THROW(PathFunction(kBinary, 1, {1, 2}) + PathFunction(kBinary, 2, {1, 2, 3, 4}), SpaceMismatch);
}
