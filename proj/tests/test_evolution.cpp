#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "normsolve/asymptotics.hpp"
#include "normsolve/evolution.hpp"

using namespace normsolve;

namespace {

struct GroundFixture {
    ProblemParams p;
    GridPtr grid;
    SolveResult ground;

    static SolveResult make(ProblemParams& p, GridPtr& grid) {
        const auto& c = default_constants();
        p.N = 3;
        p.mu1 = p.mu2 = 1.0;
        p.rho = 5.0;
        p.b1 = p.b2 = 0.5;
        ProblemParams unit = p;
        unit.beta = 1.0;
        p.beta = 0.5 * (2.0 * std::sqrt(6.0) / 3.0) / condition_3d_lhs(unit, c);
        const CollapseScaling s = make_collapse_scaling(p, c);
        grid = build_radial_grid(3, 25.0 / std::min(s.theta1, s.theta2), 2048,
                                 Spacing::uniform);
        SolveConfig cfg;
        cfg.seed = 3;
        return solve_local_min(p, grid, cfg);
    }
    GroundFixture() : ground(make(p, grid)) {}
};

const GroundFixture& fixture() {
    static GroundFixture f;
    return f;
}

double sup_dist(const EvolutionTrace& tr) {
    double s = 0.0;
    for (double d : tr.dist_to_ground) s = std::max(s, d);
    return s;
}

} // namespace

TEST_CASE("standing wave is a fixed orbit up to scheme error") {
    const auto& f = fixture();
    REQUIRE(f.ground.converged);
    const EvolutionTrace tr =
        evolve(ComplexPair::from_real(f.ground.state), f.p, 1e-3, 8.0, &f.ground.state);
    CHECK_FALSE(tr.blow_up);
    CHECK(sup_dist(tr) < 1e-4);

    SUBCASE("masses conserved to machine level") {
        for (std::size_t k = 0; k < tr.times.size(); ++k) {
            CHECK(std::abs(tr.mass1[k] - tr.mass1[0]) / tr.mass1[0] < 1e-6);
            CHECK(std::abs(tr.mass2[k] - tr.mass2[0]) / tr.mass2[0] < 1e-6);
        }
    }
    SUBCASE("flow energy conserved") {
        double drift = 0.0;
        for (double e : tr.energy) drift = std::max(drift, std::abs(e - tr.energy[0]));
        CHECK(drift < 1e-4 * std::abs(tr.energy[0]));
    }
    SUBCASE("phase advances at rate -lambda1") {
        const double rate = (tr.phase0.back() - tr.phase0.front()) /
                            (tr.times.back() - tr.times.front());
        CHECK(rate == doctest::Approx(-f.ground.diag.lambda1).epsilon(1e-3));
    }
}

TEST_CASE("second-order self-convergence in dt") {
    const auto& f = fixture();
    // perturbed data so the dynamics are nontrivial
    ComplexPair init = ComplexPair::from_real(f.ground.state);
    for (std::size_t j = 0; j < init.u.size(); ++j) {
        const double r = f.grid->node(j);
        init.u[j] += 1e-3 * std::exp(-r * r / 900.0) * std::complex<double>(0.6, 0.8);
    }
    auto final_of = [&](double dt) {
        return evolve(init, f.p, dt, 1.0, nullptr, 1000000).final_state;
    };
    const ComplexPair a = final_of(4e-3), b = final_of(2e-3), c = final_of(1e-3);
    auto dist = [&](const ComplexPair& x, const ComplexPair& y) {
        double s = 0.0;
        for (std::size_t j = 0; j < x.u.size(); ++j)
            s += f.grid->weight(j) * (std::norm(x.u[j] - y.u[j]) + std::norm(x.v[j] - y.v[j]));
        return std::sqrt(s);
    };
    const double d1 = dist(a, b), d2 = dist(b, c);
    CHECK(d1 / d2 > 2.5);
    CHECK(d1 / d2 < 6.5);
}

TEST_CASE("time reversal returns the initial data") {
    const auto& f = fixture();
    ComplexPair init = ComplexPair::from_real(f.ground.state);
    for (std::size_t j = 0; j < init.u.size(); ++j) {
        const double r = f.grid->node(j);
        init.v[j] += 2e-3 * std::exp(-r * r / 400.0);
    }
    const EvolutionTrace fwd = evolve(init, f.p, 1e-3, 2.0, nullptr, 1000000);
    const EvolutionTrace back = evolve(fwd.final_state, f.p, -1e-3, 2.0, nullptr, 1000000);
    double err = 0.0, scale = 0.0;
    for (std::size_t j = 0; j < init.u.size(); ++j) {
        err += f.grid->weight(j) * (std::norm(back.final_state.u[j] - init.u[j]) +
                                    std::norm(back.final_state.v[j] - init.v[j]));
        scale += f.grid->weight(j) * (std::norm(init.u[j]) + std::norm(init.v[j]));
    }
    CHECK(std::sqrt(err / scale) < 1e-8);
}

TEST_CASE("small perturbations stay near the ground orbit") {
    const auto& f = fixture();
    const StabilityReport rep =
        stability_experiment(f.ground, f.p, 1e-3, 2, 5.0, 1e-3, 9);
    CHECK(rep.stable);
    CHECK(rep.scheme_error < 1e-4);
    for (const auto& r : rep.runs) {
        CHECK_FALSE(r.blow_up);
        CHECK(r.sup_dist < 1e-2 * rep.ground_h1);
        CHECK(r.mass_drift < 1e-6);
        CHECK(r.energy_drift < 1e-4);
    }
}

TEST_CASE("zero-amplitude experiment reproduces the scheme error") {
    const auto& f = fixture();
    const StabilityReport rep =
        stability_experiment(f.ground, f.p, 0.0, 1, 2.0, 1e-3, 5);
    REQUIRE(rep.runs.size() == 1);
    CHECK(rep.runs[0].sup_dist == doctest::Approx(rep.scheme_error).epsilon(0.5));
}

TEST_CASE("decoupled mountain-pass state shows growth under perturbation") {
    // with the quadratic coupling off, the excited state is expected to shed
    // perturbations by growing; record growth rather than rigorous blow-up
    const auto& f = fixture();
    ProblemParams p0 = f.p;
    p0.beta = 0.0;
    auto g = build_radial_grid(3, 20.0, 2048, Spacing::graded);
    SolveConfig cfg;
    cfg.seed = 4;
    const SolveResult mp = solve_mountain_pass(p0, g, cfg);
    REQUIRE(mp.converged);

    ComplexPair init = ComplexPair::from_real(mp.state);
    for (std::size_t j = 0; j < init.u.size(); ++j) {
        const double r = g->node(j);
        const double bump = std::exp(-r * r / 0.01);
        init.u[j] *= 1.0 + 1e-2 * bump;
        init.v[j] *= 1.0 + 1e-2 * bump;
    }
    const EvolutionTrace tr = evolve(init, p0, 5e-4, 30.0, nullptr, 100);
    double kin_max = 0.0;
    for (double k : tr.kinetic) kin_max = std::max(kin_max, k);
    const bool grew = tr.blow_up || kin_max > 2.0 * tr.kinetic.front();
    CHECK(grew);
}
