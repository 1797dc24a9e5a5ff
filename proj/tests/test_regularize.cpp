#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "regpot/analysis.hpp"
#include "regpot/error.hpp"
#include "regpot/regularize.hpp"

using namespace regpot;

namespace {

double sin2(double x) { return std::pow(std::sin(2.0 * oracle::pi * x), 2); }

}  // namespace

TEST_SUITE("regularize") {
    TEST_CASE("discrete kernel: symmetry, unit mass, truncation radius") {
        for (double t : {1e-6, 1e-4, 1e-3, 1e-2}) {
            const double h = 1.0 / 3001.0;
            const auto k = sample_kernel({1, t}, h);
            CHECK_FALSE(k.identity);
            CHECK(k.radius * h >= std::max(10.0 * std::sqrt(t), 5.0 * h) - 1e-15);
            double mass = 0.0;
            for (int j = -k.radius; j <= k.radius; ++j) {
                CHECK(k.weight(j) == k.weight(-j));
                CHECK(k.weight(j) >= 0.0);
                mass += k.weight(j) * h;
            }
            CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
        }
    }

    TEST_CASE("renormalization drift below 1e-6 once t >= 4 h^2") {
        const double h = 1.0 / 3001.0;
        for (double q : {4.0, 10.0, 100.0, 1e4}) {
            const auto k = sample_kernel({1, q * h * h}, h);
            CHECK(k.renormalization_drift <= 1e-6);
        }
    }

    TEST_CASE("weights agree with independent cell masses") {
        const double h = 1.0 / 501.0, t = 3e-4;
        const auto k = sample_kernel({1, t}, h);
        double total = 0.0;
        for (int j = -k.radius; j <= k.radius; ++j) total += oracle::kernel_cell_mass(t, (j - 0.5) * h, (j + 0.5) * h);
        for (int j = -k.radius; j <= k.radius; ++j) {
            const double ref = oracle::kernel_cell_mass(t, (j - 0.5) * h, (j + 0.5) * h) / total / h;
            CHECK(k.weight(j) == doctest::Approx(ref).epsilon(1e-9));
        }
    }

    TEST_CASE("identity fallback for kernels narrower than a cell") {
        const double h = 1e-2;
        const auto k = sample_kernel({1, 1e-9}, h);
        CHECK(k.identity);
        const Grid1D g(99);
        const Potential v = gen_piecewise_potential(g, 9, 10.0, 1);
        const auto vt = regularized_potential(v, 1e-9);
        CHECK(vt.identity);
        CHECK(vt.values == v.vector());
        CHECK(regularized_potential(v, 0.0).values == v.vector());
        CHECK_THROWS_AS(regularized_potential(v, -1.0), ValidationError);
    }

    TEST_CASE("constants are preserved exactly under reflection") {
        const Grid1D g(3000);
        for (double c : {1.0, 3.7, 1e5}) {
            const Potential v(g, std::vector<double>(3000, c));
            for (double t : {1e-5, 1e-3, 1e-2}) {
                const auto vt = regularized_potential(v, t);
                for (double x : vt.values) CHECK(x == c);
            }
        }
        const auto k = sample_kernel({1, 1e-3}, g.spacing());
        const auto ones = convolve(std::vector<double>(3000, 1.0), k, BoundaryPolicy::ZeroPad);
        CHECK(ones[1500] == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(ones[0] < 0.75);
    }

    TEST_CASE("matches a direct reflected convolution oracle") {
        const Grid1D g(400);
        const Potential v = gen_piecewise_potential(g, 13, 1e4, 21);
        for (double t : {1e-5, 1e-4, 2e-3}) {
            const auto k = sample_kernel({1, t}, g.spacing());
            const auto ref = oracle::convolve_reflect(v.vector(), t, g.spacing(), k.radius);
            const auto got = regularized_potential(v, t).values;
            for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i] == doctest::Approx(ref[i]).epsilon(1e-10).scale(1e4));
            CHECK(convolve_at(v.vector(), k, BoundaryPolicy::Reflect, 7) == got[7]);
        }
    }

    TEST_CASE("averaging bounds: 0 <= V_t <= ||V||") {
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const Grid1D g(1000);
            const Potential v = gen_piecewise_potential(g, 20, 1e5, seed);
            for (auto policy : {BoundaryPolicy::Reflect, BoundaryPolicy::ZeroPad}) {
                const auto vt = regularized_potential(v, 1e-3, policy).values;
                for (double x : vt) {
                    CHECK(x >= 0.0);
                    CHECK(x <= v.max() * (1 + 1e-14));
                }
            }
        }
    }

    TEST_CASE("smooth potential: V_t - V ~ (t/2) V'' at x = 1/4") {
        const Grid1D g(3999);  // node 999 is x = 0.25
        const Potential v = sample_potential(g, sin2);
        REQUIRE(g.node(999) == doctest::Approx(0.25).epsilon(1e-15));
        const double t = 1e-4;
        const double diff = regularized_potential(v, t).values[999] - v[999];
        CHECK(diff == doctest::Approx(-4.0 * oracle::pi * oracle::pi * t).epsilon(0.05));
    }

    TEST_CASE("second-moment calibration on x^2") {
        const Grid1D g(3000);
        const Potential v = sample_potential(g, [](double x) { return x * x; });
        const double h = g.spacing();
        for (double t : {100 * h * h, 1e-4, 1e-3}) {
            const auto vt = regularized_potential(v, t).values;
            const auto window = interior_window(g, t);
            for (int i = 0; i < g.size(); ++i)
                if (window[static_cast<std::size_t>(i)])
                    CHECK(vt[static_cast<std::size_t>(i)] - v[i] == doctest::Approx(t).epsilon(0.01));
        }
    }

    TEST_CASE("rough potentials |x - 1/2|^a: convolution error slope a/2") {
        const Grid1D g(2999);  // node 1499 is x = 1/2
        for (double alpha : {0.5, 1.0}) {
            const Potential v = sample_potential(g, [&](double x) { return std::pow(std::fabs(x - 0.5), alpha); });
            const auto ts = log_sweep(1e-3, 1e-6, 10);
            std::vector<double> err;
            for (double t : ts) err.push_back(regularized_potential(v, t).values[1499] - v[1499]);
            CHECK(std::fabs(loglog_slope(ts, err) - alpha / 2) <= 0.05);
        }
    }

    TEST_CASE("default scale is 1/mean(V) clamped") {
        const Grid1D g(3000);
        CHECK(default_scale(Potential(g, std::vector<double>(3000, 1e3))) == doctest::Approx(1e-3));
        CHECK(default_scale(Potential(g, std::vector<double>(3000, 1e12))) == doctest::Approx(4 * g.spacing() * g.spacing()));
        CHECK(default_scale(Potential(g, std::vector<double>(3000, 0.0))) == 1e-2);
    }

    TEST_CASE("second-order term: c^2 t^2 for constant V, 0 for V = 0") {
        const Grid1D g(3000);
        for (double c : {1.0, 250.0, 1e5}) {
            const Potential v(g, std::vector<double>(3000, c));
            for (double t : {1e-5, 1e-4}) CHECK(second_order_term(v, 1500, t) == doctest::Approx(c * c * t * t).epsilon(1e-8));
        }
        const Potential zero(g, std::vector<double>(3000, 0.0));
        CHECK(second_order_term(zero, 1500, 1e-4) == 0.0);
        CHECK_THROWS_AS(second_order_term(zero, 3, 1e-4), ValidationError);
    }

    TEST_CASE("boundary policy names") {
        CHECK(parse_boundary_policy("reflect") == BoundaryPolicy::Reflect);
        CHECK(parse_boundary_policy(to_string(BoundaryPolicy::ZeroPad)) == BoundaryPolicy::ZeroPad);
        CHECK_THROWS_AS(parse_boundary_policy("periodic"), ValidationError);
    }
}
