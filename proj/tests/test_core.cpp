#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "normsolve/field.hpp"
#include "normsolve/grid.hpp"
#include "normsolve/profiles.hpp"
#include "normsolve/state.hpp"

using namespace normsolve;

namespace {

constexpr double kPi = std::numbers::pi;

// adaptive Simpson oracle, independent of the grid quadrature
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol, int depth = 0) {
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4 * fm + fb);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double left = (m - a) / 6.0 * (fa + 4 * f(lm) + fm);
    const double right = (b - m) / 6.0 * (fm + 4 * f(rm) + fb);
    if (depth > 40 || std::abs(left + right - whole) < 15 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(f, a, m, tol / 2, depth + 1) +
           adaptive_simpson(f, m, b, tol / 2, depth + 1);
}

RadialField gaussian(const GridPtr& g, double width) {
    return RadialField::sample(g, [=](double r) { return std::exp(-width * r * r); });
}

} // namespace

TEST_CASE("ball volumes for all dimensions") {
    struct Case { int N; double vol; };
    const Case cases[] = {
        {1, 2.0 * 20.0},
        {2, kPi * 400.0},
        {3, 4.0 / 3.0 * kPi * 8000.0},
        {4, kPi * kPi / 2.0 * 160000.0},
    };
    for (const auto& c : cases) {
        auto g = build_radial_grid(c.N, 20.0, 2048, Spacing::uniform);
        const RadialField one = RadialField::sample(g, [](double) { return 1.0; });
        CHECK(integrate(one) == doctest::Approx(c.vol).epsilon(1e-10));
    }
}

TEST_CASE("1D grid doubles the half-line integral") {
    auto g = build_radial_grid(1, 30.0, 1024, Spacing::uniform);
    const RadialField one = RadialField::sample(g, [](double) { return 1.0; });
    CHECK(integrate(one) == doctest::Approx(60.0).epsilon(1e-12));
}

TEST_CASE("quadrature integrates degree <= 2 polynomials to machine accuracy") {
    for (int N : {1, 2, 3, 4}) {
        auto g = build_radial_grid(N, 7.0, 256, Spacing::uniform);
        auto gg = build_radial_grid(N, 7.0, 256, Spacing::graded);
        const double omega = RadialGrid::sphere_area(N);
        for (int q : {0, 1, 2}) {
            const double exact = omega * std::pow(7.0, q + N) / (q + N);
            for (const auto& grid : {g, gg}) {
                const RadialField f =
                    RadialField::sample(grid, [=](double r) { return std::pow(r, q); });
                CHECK(integrate(f) == doctest::Approx(exact).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("weights nonnegative and nodes increasing") {
    for (auto sp : {Spacing::uniform, Spacing::graded}) {
        auto g = build_radial_grid(4, 40.0, 512, sp);
        for (std::size_t j = 0; j < g->size(); ++j) CHECK(g->weight(j) >= 0.0);
        for (std::size_t j = 1; j < g->size(); ++j)
            CHECK(g->node(j) > g->node(j - 1));
    }
}

TEST_CASE("gaussian integral in 3D") {
    auto g = build_radial_grid(3, 20.0, 2048, Spacing::uniform);
    const RadialField f = gaussian(g, 1.0);
    CHECK(integrate(f) == doctest::Approx(std::pow(kPi, 1.5)).epsilon(1e-8));
}

TEST_CASE("graded 4D grid matches adaptive quadrature on the squared bubble") {
    auto g = build_radial_grid(4, 40.0, 4096, Spacing::graded);
    const RadialField u = aubin_talenti(1.0, g);
    const RadialField u2 = pointwise(u, [](double x) { return x * x; });
    const double got = integrate(u2);
    const double oracle = 2.0 * kPi * kPi *
        adaptive_simpson([](double r) {
            const double u = 2.0 * std::sqrt(2.0) / (1.0 + r * r);
            return u * u * r * r * r;
        }, 0.0, 40.0, 1e-12);
    CHECK(got == doctest::Approx(oracle).epsilon(1e-6));
}

TEST_CASE("laplacian of a constant vanishes in the interior") {
    auto g = build_radial_grid(3, 10.0, 256, Spacing::uniform);
    const RadialField one = RadialField::sample(g, [](double) { return 1.0; });
    const RadialField lap = laplacian_apply(one);
    for (std::size_t j = 0; j + 4 < g->size(); ++j)
        CHECK(std::abs(lap[j]) < 1e-10);
}

TEST_CASE("laplacian of a gaussian in 2D") {
    auto g = build_radial_grid(2, 12.0, 2048, Spacing::uniform);
    const RadialField f = gaussian(g, 1.0);
    const RadialField lap = laplacian_apply(f);
    // symbolic: laplacian of e^{-r^2} in 2D is (4 r^2 - 4) e^{-r^2}
    double worst = 0.0;
    for (std::size_t j = 0; j + 8 < g->size(); ++j) {
        const double r = g->node(j);
        const double exact = (4.0 * r * r - 4.0) * std::exp(-r * r);
        worst = std::max(worst, std::abs(lap[j] - exact));
    }
    CHECK(worst < 1e-6); // fourth-order stencil on a uniform grid
}

TEST_CASE("bubble solves -laplacian u = u^3 pointwise") {
    auto g = build_radial_grid(4, 30.0, 3000, Spacing::uniform);
    const RadialField u = aubin_talenti(1.0, g);
    const RadialField lap = laplacian_apply(u);
    double worst = 0.0;
    for (std::size_t j = 0; j + 12 < g->size(); ++j)
        worst = std::max(worst, std::abs(-lap[j] - u[j] * u[j] * u[j]));
    CHECK(worst < 5e-6);
}

TEST_CASE("laplacian pairing is exactly symmetric and equals the Dirichlet form") {
    auto g = build_radial_grid(3, 16.0, 1024, Spacing::uniform);
    const RadialField f = gaussian(g, 1.0);
    const RadialField h = RadialField::sample(
        g, [](double r) { return r * std::exp(-0.7 * r * r); });
    const double fg = inner(f, -1.0 * laplacian_variational(h));
    const double gf = inner(h, -1.0 * laplacian_variational(f));
    const double form = grad_inner(f, h);
    CHECK(fg == doctest::Approx(form).epsilon(1e-12));
    CHECK(gf == doctest::Approx(form).epsilon(1e-12));
}

TEST_CASE("pointwise laplacian is consistent with the Dirichlet form") {
    // the stiffness form carries the O(h^2) interpolation constant, so this
    // agreement is second order, unlike the exact pairing above
    auto g = build_radial_grid(3, 16.0, 2048, Spacing::uniform);
    const RadialField f = gaussian(g, 1.0);
    const RadialField h = RadialField::sample(
        g, [](double r) { return std::exp(-0.5 * r * r); });
    const double quad = inner(f, -1.0 * laplacian_apply(h));
    CHECK(quad == doctest::Approx(grad_inner(f, h)).epsilon(1e-4));
}

TEST_CASE("dilation basics") {
    auto g = build_radial_grid(3, 20.0, 2048, Spacing::uniform);
    const RadialField u = gaussian(g, 1.0);
    const RadialField v = gaussian(g, 2.0);
    const StatePair s = normalize_masses(u, v, 0.7, 0.4);

    SUBCASE("t = 0 is the identity") {
        const StatePair d = dilate(s, 0.0);
        CHECK(h1_distance(s, d) == doctest::Approx(0.0));
    }
    SUBCASE("masses preserved") {
        const StatePair d = dilate(s, 0.3);
        CHECK(mass_sq(d.u) == doctest::Approx(0.49).epsilon(1e-8));
        CHECK(mass_sq(d.v) == doctest::Approx(0.16).epsilon(1e-8));
    }
    SUBCASE("kinetic term scales like e^{2t}") {
        auto fine = build_radial_grid(3, 14.0, 4096, Spacing::uniform);
        const StatePair w = normalize_masses(gaussian(fine, 0.5), gaussian(fine, 0.8),
                                             0.7, 0.4);
        const StatePair d = dilate(w, 0.5);
        const double ratio = (kinetic(d.u) + kinetic(d.v)) / (kinetic(w.u) + kinetic(w.v));
        CHECK(ratio == doctest::Approx(std::exp(1.0)).epsilon(1e-6));
    }
    SUBCASE("composition is additive in t") {
        const StatePair once = dilate(dilate(s, 0.25), -0.45);
        const StatePair direct = dilate(s, -0.2);
        const double rel = h1_distance(once, direct) /
                           std::sqrt(h1_norm_sq(direct.u) + h1_norm_sq(direct.v));
        CHECK(rel < 1e-6);
    }
    SUBCASE("aliasing dilation is rejected") {
        const RadialField narrow = gaussian(g, 60.0);
        const StatePair sn = normalize_masses(narrow, narrow, 1.0, 1.0);
        CHECK_THROWS_AS(dilate(sn, 3.0), DilationRangeError);
    }
}

TEST_CASE("h1 distance") {
    auto g = build_radial_grid(3, 20.0, 1024, Spacing::uniform);
    const StatePair a = normalize_masses(gaussian(g, 1.0), gaussian(g, 1.5), 1.0, 1.0);
    SUBCASE("zero against itself") { CHECK(h1_distance(a, a) == doctest::Approx(0.0)); }
    SUBCASE("equals the H1 norm against a zero-like state") {
        const RadialField tiny = 1e-30 * a.u;
        const StatePair z(tiny, tiny, 1.0, 1.0);
        const double expect = std::sqrt(h1_norm_sq(a.u) + h1_norm_sq(a.v));
        CHECK(h1_distance(a, z) == doctest::Approx(expect).epsilon(1e-9));
    }
    SUBCASE("dilation distance shrinks monotonically as t -> 0") {
        double prev = 1e9;
        for (double t : {0.1, 0.05, 0.025, 0.0125}) {
            const double d = h1_distance(a, dilate(a, t));
            CHECK(d < prev);
            prev = d;
        }
        // distance ~ t * H1 norm of the dilation generator
        CHECK(prev < 0.0125 * 10.0 * std::sqrt(h1_norm_sq(a.u) + h1_norm_sq(a.v)));
    }
}

TEST_CASE("random fields respect the GN-type quadrature sanity") {
    // smoke: integrate never returns NaN on random smooth data
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> w(0.3, 3.0);
    auto g = build_radial_grid(2, 18.0, 512, Spacing::uniform);
    for (int k = 0; k < 10; ++k) {
        const RadialField f = gaussian(g, w(rng));
        CHECK(std::isfinite(integrate(f)));
    }
}
