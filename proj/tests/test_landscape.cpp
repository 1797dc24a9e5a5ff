#include <doctest.h>

#include <cmath>
#include <vector>

#include "regpot/eigen.hpp"
#include "regpot/error.hpp"
#include "regpot/landscape.hpp"

using namespace regpot;

namespace {

Potential constant(const Grid1D& g, double c) {
    return Potential(g, std::vector<double>(static_cast<std::size_t>(g.size()), c));
}

}  // namespace

TEST_SUITE("landscape") {
    TEST_CASE("free landscape is the parabola x(1-x)/2 at the nodes") {
        const Grid1D g(3001);
        const auto u = landscape_function(constant(g, 0.0));
        for (int i = 0; i < g.size(); ++i) {
            const double x = g.node(i);
            CHECK(u.values[static_cast<std::size_t>(i)] == doctest::Approx(x * (1 - x) / 2).epsilon(1e-9));
        }
        CHECK(u.values[1500] == doctest::Approx(0.125).epsilon(1e-12));
        // Backward-stable bound: residual within a few ulps of ||H|| ||u||.
        CHECK(u.residual <= 16.0 * 2.2e-16 * 4.0 / (g.spacing() * g.spacing()) * 0.125);
        CHECK(u.rhs == std::vector<double>(3001, 1.0));
        REQUIRE(u.potential);
        CHECK(u.potential->max() == 0.0);
    }

    TEST_CASE("large constant potential: u -> 1/c in the interior") {
        const Grid1D g(1000);
        const double c = 1e8;
        const auto u = landscape_function(constant(g, c));
        const auto w = inverse_landscape(u);
        for (int i = 100; i < 900; ++i) {
            CHECK(u.values[static_cast<std::size_t>(i)] == doctest::Approx(1.0 / c).epsilon(1e-6));
            CHECK(w[static_cast<std::size_t>(i)] == doctest::Approx(c).epsilon(1e-6));
        }
    }

    TEST_CASE("linearity of the solve") {
        const Grid1D g(500);
        const Potential v = gen_piecewise_potential(g, 10, 1e4, 4);
        const auto f1 = gen_random_rhs(g, 1).values;
        const auto f2 = gen_random_rhs(g, 2).values;
        std::vector<double> sum(f1.size());
        for (std::size_t i = 0; i < sum.size(); ++i) sum[i] = f1[i] + f2[i];
        const auto a = generalized_landscape(v, f1);
        const auto b = generalized_landscape(v, f2);
        const auto c = generalized_landscape(v, sum);
        for (std::size_t i = 0; i < sum.size(); ++i)
            CHECK(c.values[i] == doctest::Approx(a.values[i] + b.values[i]).epsilon(1e-12));
    }

    TEST_CASE("maximum principle over 1000 seeded potentials") {
        const Grid1D g(300);
        int positive = 0;
        for (std::uint64_t seed = 0; seed < 1000; ++seed) {
            const auto u = landscape_function(gen_piecewise_potential(g, 1 + static_cast<int>(seed % 40), 1e5, seed));
            bool ok = true;
            for (double x : u.values) ok = ok && x > 0.0;
            positive += ok;
        }
        CHECK(positive == 1000);
    }

    TEST_CASE("inverse landscape: reciprocal and order reversal") {
        LandscapeSolution half;
        half.values.assign(5, 0.5);
        CHECK(inverse_landscape(half) == std::vector<double>(5, 2.0));
        const Grid1D g(400);
        const auto u = landscape_function(gen_piecewise_potential(g, 9, 1e4, 3));
        const auto w = inverse_landscape(u);
        for (std::size_t i = 1; i < w.size(); ++i)
            if (u.values[i] >= u.values[i - 1]) CHECK(w[i] <= w[i - 1]);
        LandscapeSolution bad;
        bad.values = {1.0, 0.0, 1.0};
        CHECK_THROWS_AS(inverse_landscape(bad), NumericalError);
    }

    TEST_CASE("right-hand side validation") {
        const Grid1D g(10);
        const auto h = assemble_hamiltonian(g, constant(g, 0.0));
        std::vector<double> f(10, 1.0);
        f[3] = 0.0;
        CHECK_THROWS_AS(solve_landscape(h, f), ValidationError);
        CHECK_THROWS_AS(solve_landscape(h, std::vector<double>(9, 1.0)), ValidationError);
    }

    TEST_CASE("generalized effective potential: constant f recovers 1/u exactly") {
        const Grid1D g(3000);
        const Potential v = gen_piecewise_potential(g, 20, 1e5, 7);
        const auto u = landscape_function(v);
        const auto eff = generalized_effective_potential(u, 0.001);
        const auto inv = inverse_landscape(u);
        for (std::size_t i = 0; i < inv.size(); ++i) CHECK(eff[i] == inv[i]);
    }

    TEST_CASE("generalized effective potential is invariant under f -> 2f") {
        const Grid1D g(800);
        const Potential v = gen_piecewise_potential(g, 12, 1e5, 9);
        auto f = gen_random_rhs(g, 3).values;
        const auto a = generalized_effective_potential(generalized_landscape(v, f), 0.001);
        for (double& x : f) x *= 2.0;
        const auto b = generalized_effective_potential(generalized_landscape(v, f), 0.001);
        for (std::size_t i = 0; i < a.size(); ++i) CHECK(b[i] == doctest::Approx(a[i]).epsilon(1e-13));
    }

    TEST_CASE("pointwise eigenfunction bound |phi| <= lambda u ||phi||") {
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            const Grid1D g(1500);
            const Potential v = gen_piecewise_potential(g, 20, 1e5, seed);
            const auto u = landscape_function(v);
            const double umax = norm_inf(u.values);
            for (const auto& p : lowest_eigenpairs(assemble_hamiltonian(g, v), 5)) {
                const double pmax = norm_inf(p.phi);
                for (std::size_t i = 0; i < u.values.size(); ++i)
                    CHECK(std::fabs(p.phi[i]) - p.lambda * u.values[i] * pmax <= 1e-8 * p.lambda * umax);
            }
        }
    }
}
