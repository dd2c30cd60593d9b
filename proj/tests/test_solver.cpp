#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "normsolve/asymptotics.hpp"
#include "normsolve/profiles.hpp"
#include "normsolve/solver.hpp"

using namespace normsolve;

namespace {

const ConstantsTable& C() { return default_constants(); }

double beta_at_fraction(const ProblemParams& p, double fraction) {
    ProblemParams q = p;
    q.beta = 1.0;
    return fraction * (2.0 * std::sqrt(6.0) / 3.0) / condition_3d_lhs(q, C());
}

ProblemParams params_a3(double fraction = 0.5) {
    ProblemParams p;
    p.N = 3;
    p.mu1 = p.mu2 = 1.0;
    p.rho = 5.0;
    p.b1 = p.b2 = 0.5;
    p.beta = beta_at_fraction(p, fraction);
    return p;
}

GridPtr local_grid(const ProblemParams& p) {
    const CollapseScaling s = make_collapse_scaling(p, C());
    const double r_max = 25.0 / std::min(s.theta1, s.theta2);
    return build_radial_grid(3, r_max, 2048, Spacing::uniform);
}

GridPtr mp_grid3() { return build_radial_grid(3, 20.0, 4096, Spacing::graded); }

} // namespace

TEST_CASE("1D global minimum") {
    ProblemParams p;
    p.N = 1;
    p.mu1 = p.mu2 = p.rho = 1.0;
    p.beta = 1.0;
    p.b1 = p.b2 = 1.0;
    auto g = build_radial_grid(1, 30.0, 1024, Spacing::uniform);
    SolveConfig cfg;
    cfg.seed = 2;
    const SolveResult r = solve_global_min(p, g, cfg);
    CHECK(r.converged);
    CHECK(r.diag.energy < 0.0);
    CHECK(r.diag.lambda1 > 0.0);
    CHECK(r.diag.lambda2 > 0.0);
    for (std::size_t j = 0; j < r.state.u.size(); ++j) CHECK(r.state.u[j] >= -1e-12);
}

TEST_CASE("1D subadditivity of the ground level") {
    ProblemParams p;
    p.N = 1;
    p.mu1 = p.mu2 = p.rho = 1.0;
    p.beta = 1.0;
    auto g = build_radial_grid(1, 30.0, 1024, Spacing::uniform);
    SolveConfig cfg;
    cfg.seed = 3;
    auto level = [&](double b1, double b2) {
        ProblemParams q = p;
        q.b1 = b1;
        q.b2 = b2;
        return solve_global_min(q, g, cfg).diag.energy;
    };
    const double splits[][4] = {
        {0.8, 0.5, 0.6, 0.9}, {1.0, 0.3, 0.4, 0.8}, {0.5, 0.5, 0.5, 0.5}};
    for (const auto& s : splits) {
        const double c1 = std::sqrt(s[0] * s[0] + s[2] * s[2]);
        const double c2 = std::sqrt(s[1] * s[1] + s[3] * s[3]);
        const double lhs = level(s[0], s[1]) + level(s[2], s[3]);
        CHECK(lhs >= level(c1, c2) - 1e-4);
    }
}

TEST_CASE("2D coercive global minimum and quotient constant") {
    ProblemParams p;
    p.N = 2;
    p.mu1 = p.mu2 = p.rho = 1.0;
    p.beta = 0.5;
    p.b1 = p.b2 = 0.1 * std::sqrt(C().q_mass_sq);
    auto g = build_radial_grid(2, 400.0, 2048, Spacing::uniform);
    SolveConfig cfg;
    cfg.seed = 4;

    SUBCASE("minimizer certificates") {
        const SolveResult r = solve_global_min(p, g, cfg);
        CHECK(r.converged);
        CHECK(r.diag.energy < 0.0);
        CHECK(r.diag.lambda1 > 0.0);
        CHECK(r.diag.lambda2 > 0.0);
        const double res = multiplier_identity_residual(r.state, p, r.diag.lambda1,
                                                        r.diag.lambda2);
        CHECK(res < 1e-5);
    }
    SUBCASE("quotient constant sits in its bracket and above one half") {
        const double A = estimate_constant_A(p, g, cfg);
        auto [lo, hi] = constant_A_bracket(p, C());
        CHECK(A > 0.5);
        CHECK(A >= lo * 0.99);
        CHECK(A <= hi * 1.01);
    }
    SUBCASE("asymmetric parameters: quotient stays inside the bracket") {
        ProblemParams q = p;
        q.mu1 = 0.7;
        q.mu2 = 1.4;
        q.rho = 0.9;
        q.b1 = 0.12 * std::sqrt(C().q_mass_sq);
        q.b2 = 0.07 * std::sqrt(C().q_mass_sq);
        const double A = estimate_constant_A(q, g, cfg);
        auto [lo, hi] = constant_A_bracket(q, C());
        CHECK(lo <= hi);
        CHECK(A >= lo * 0.99);
        CHECK(A <= hi * 1.01);
    }
    SUBCASE("non-coercive parameters are refused") {
        ProblemParams q = p;
        q.b1 = q.b2 = 2.0 * std::sqrt(C().q_mass_sq);
        CHECK_THROWS_AS(solve_global_min(q, g, cfg), RegimeError);
    }
}

TEST_CASE("3D two-branch solve") {
    const ProblemParams p = params_a3();
    SolveConfig cfg;
    cfg.seed = 3;

    auto lg = local_grid(p);
    const SolveResult ground = solve_local_min(p, lg, cfg);
    const auto rep = classify_regime(p, C());
    REQUIRE(ground.converged);

    SUBCASE("ground-state certificates") {
        CHECK(ground.diag.energy < 0.0);
        CHECK(std::sqrt(ground.diag.kinetic) < *rep.R0);
        CHECK(ground.diag.fiber_second > 0.0);
        CHECK(ground.diag.lambda1 > 0.0);
        CHECK(ground.diag.lambda2 > 0.0);
        CHECK(p.beta * ground.diag.cubic_coupling > 0.0);
        CHECK(std::abs(ground.diag.pohozaev) < 1e-6 * ground.diag.kinetic);
        CHECK(check_3d_window_membership(ground.state, p, C()) ==
              WindowPosition::inside_ball);
    }
    SUBCASE("ground state beats random fiber-projected probes in the ball") {
        std::mt19937_64 rng(77);
        std::uniform_real_distribution<double> w(0.5, 4.0), mix(0.0, 0.8);
        int probes = 0;
        for (int k = 0; k < 40 && probes < 20; ++k) {
            const double w1 = w(rng), w2 = w(rng), m = mix(rng);
            RadialField u = RadialField::sample(lg, [=](double r) {
                const double x = r / 40.0;
                return std::exp(-w1 * x * x) + m * std::exp(-2.0 * w1 * x * x);
            });
            RadialField v = RadialField::sample(lg, [=](double r) {
                const double x = r / 40.0;
                return std::exp(-w2 * x * x);
            });
            StatePair s = normalize_masses(u, v, p.b1, p.b2);
            try {
                const FiberCriticalPoints cp = fiber_critical_points(s, p);
                if (!cp.s) continue;
                StatePair proj = dilate(s, *cp.s, 1e-3);
                proj = normalize_masses(proj.u, proj.v, p.b1, p.b2);
                if (std::sqrt(kinetic(proj.u) + kinetic(proj.v)) >= *rep.R0) continue;
                ++probes;
                CHECK(ground.diag.energy <= energy(proj, p) + 1e-12);
            } catch (const StructureError&) {
            } catch (const DilationRangeError&) {
            }
        }
        CHECK(probes >= 10);
    }
    SUBCASE("mountain pass sits above zero and separates from the ground branch") {
        const SolveResult mp = solve_mountain_pass(p, mp_grid3(), cfg);
        REQUIRE(mp.converged);
        CHECK(mp.diag.energy > 0.0);
        CHECK(mp.diag.fiber_second < 0.0);
        CHECK(std::abs(mp.diag.pohozaev) < 1e-6 * mp.diag.kinetic);
        CHECK(ground.diag.energy < 0.0);
        const double t = std::sqrt(mp.diag.kinetic);
        CHECK(t > *rep.R0);
    }
    SUBCASE("multi-start consistency") {
        // tight explicit tolerances pin both runs to the discrete critical
        // point, so the profiles coincide well below the default-accuracy band
        SolveConfig tight = cfg;
        tight.tol_grad = 5e-7;
        const SolveResult first = solve_local_min(p, lg, tight);
        SolveConfig other = tight;
        other.seed = 11;
        const SolveResult again = solve_local_min(p, lg, other);
        REQUIRE(first.converged);
        REQUIRE(again.converged);
        CHECK(again.diag.energy == doctest::Approx(first.diag.energy).epsilon(1e-6));
        const double rel = h1_distance(again.state, first.state) /
                           std::sqrt(h1_norm_sq(first.state.u) +
                                     h1_norm_sq(first.state.v));
        CHECK(rel < 1e-4);
    }
    SUBCASE("negative coupling is refused in 3D") {
        ProblemParams q = p;
        q.beta = -0.1;
        CHECK_THROWS_AS(solve_local_min(q, lg, cfg), RegimeError);
    }
    SUBCASE("outside the window the local solve is refused") {
        ProblemParams q = p;
        q.beta = beta_at_fraction(p, 1.5);
        CHECK_THROWS_AS(solve_local_min(q, lg, cfg), RegimeError);
    }
}

TEST_CASE("beta monotonicity of the mountain-pass level") {
    ProblemParams p = params_a3();
    SolveConfig cfg;
    cfg.seed = 5;
    auto g = mp_grid3();
    double prev = -1e300;
    // increasing beta must not increase the level
    ProblemParams q = p;
    q.beta = 0.0;
    double m0 = solve_mountain_pass(q, g, cfg).diag.energy;
    for (double f : {0.2, 0.4, 0.6}) {
        q.beta = beta_at_fraction(p, f);
        const SolveResult r = solve_mountain_pass(q, g, cfg);
        REQUIRE(r.converged);
        CHECK(r.diag.energy <= m0 + 1e-4);
        if (prev > -1e299) CHECK(r.diag.energy <= prev + 1e-4);
        prev = r.diag.energy;
    }
}

TEST_CASE("coupled mountain pass undercuts both semi-trivial levels") {
    const ProblemParams p = params_a3();
    SolveConfig cfg;
    cfg.seed = 6;
    auto g = mp_grid3();
    const SolveResult mp = solve_mountain_pass(p, g, cfg);
    REQUIRE(mp.converged);
    const ScalarMountainPass s1 = scalar_mountain_pass(p.mu1, p.b1, cfg);
    const ScalarMountainPass s2 = scalar_mountain_pass(p.mu2, p.b2, cfg);
    CHECK(mp.diag.energy < std::min(s1.level, s2.level));
}

TEST_CASE("scalar mountain pass matches the closed form") {
    SolveConfig cfg;
    cfg.seed = 8;
    cfg.max_iters = 4000;
    for (double mu : {1.0, 2.0}) {
        const ScalarMountainPass s = scalar_mountain_pass(mu, 0.5, cfg);
        const double ref = scalar_mountain_pass_level_reference(mu, 0.5);
        CHECK(s.converged);
        CHECK(s.level == doctest::Approx(ref).epsilon(2e-3));
        CHECK(s.lambda > 0.0);
    }
}

TEST_CASE("4D mountain pass in the critical window") {
    ProblemParams p;
    p.N = 4;
    p.mu1 = 1.0;
    p.mu2 = 2.0;
    p.rho = 3.0;
    p.beta = 0.5;
    p.b1 = p.b2 = 0.3;
    auto g = build_radial_grid(4, 60.0, 4096, Spacing::graded);
    SolveConfig cfg;
    cfg.seed = 7;
    const SolveResult r = solve_mountain_pass(p, g, cfg);
    REQUIRE(r.converged);
    const BubbleParams bp = bubble_params(p.mu1, p.mu2, p.rho);
    const double target = 0.25 * (bp.k1 + bp.k2) * C().sobolev_S * C().sobolev_S;
    CHECK(r.diag.energy > 0.0);
    CHECK(r.diag.energy < target);
    CHECK(r.diag.fiber_second < 0.0);
    CHECK(std::abs(r.diag.pohozaev) < 1e-6 * r.diag.kinetic);

    SUBCASE("beta < 0 is refused") {
        ProblemParams q = p;
        q.beta = -0.5;
        CHECK_THROWS_AS(solve_mountain_pass(q, g, cfg), RegimeError);
    }
    SUBCASE("rho inside the excluded band is refused") {
        ProblemParams q = p;
        q.rho = 1.5;
        CHECK_THROWS_AS(solve_mountain_pass(q, g, cfg), RegimeError);
    }
}
