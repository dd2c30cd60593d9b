#include "normsolve/evolution.hpp"

#include <random>
#include <cmath>

namespace normsolve {

namespace {

using cplx = std::complex<double>;

double mass_of(const GridPtr& g, const std::vector<cplx>& f) {
    const auto& w = g->weights();
    double s = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) s += w[j] * std::norm(f[j]);
    return s;
}

double kinetic_of(const GridPtr& g, const std::vector<cplx>& f) {
    const auto& c = g->face_coeff();
    double s = 0.0;
    for (std::size_t k = 0; k + 1 < f.size(); ++k)
        s += c[k] * std::norm(f[k + 1] - f[k]);
    return s;
}

// conserved energy of the flow; the modulus coupling carries weight beta, not
// beta/2, which is what makes both masses individually conserved
double flow_energy(const GridPtr& g, const ProblemParams& p,
                   const std::vector<cplx>& u, const std::vector<cplx>& v) {
    const auto& w = g->weights();
    double quart = 0.0, coup = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) {
        const double a2 = std::norm(u[j]), b2 = std::norm(v[j]);
        quart += w[j] * (p.mu1 * a2 * a2 + p.mu2 * b2 * b2 + 2.0 * p.rho * a2 * b2);
        coup += w[j] * a2 * std::sqrt(b2);
    }
    return 0.5 * (kinetic_of(g, u) + kinetic_of(g, v)) - 0.25 * quart - p.beta * coup;
}

// Crank-Nicolson step of i f_z = -A f with A the variational -Laplacian:
// (W - i dt/2 K') f+ = (W + i dt/2 K') f, Dirichlet clamp on the last node.
struct CrankNicolson {
    GridPtr grid;
    double dt;
    std::vector<cplx> dl, d, du; // factored lower/diag/upper of the LHS
    std::vector<cplx> bl, bd, bu; // RHS bands

    CrankNicolson(GridPtr g, double step) : grid(std::move(g)), dt(step) {
        const auto& w = grid->weights();
        const auto& c = grid->face_coeff();
        const std::size_t n = grid->size();
        dl.assign(n, 0.0);
        d.assign(n, 0.0);
        du.assign(n, 0.0);
        bl.assign(n, 0.0);
        bd.assign(n, 0.0);
        bu.assign(n, 0.0);
        const cplx half(0.0, 0.5 * dt);
        for (std::size_t j = 0; j < n; ++j) {
            d[j] = w[j];
            bd[j] = w[j];
        }
        for (std::size_t k = 0; k + 1 < n; ++k) {
            // K tridiagonal: +c on the diagonal pair, -c off-diagonal
            d[k] += -half * c[k];
            d[k + 1] += -half * c[k];
            du[k] += half * c[k];
            dl[k + 1] += half * c[k];
            bd[k] += half * c[k];
            bd[k + 1] += half * c[k];
            bu[k] += -half * c[k];
            bl[k + 1] += -half * c[k];
        }
        // Dirichlet clamp
        const std::size_t last = n - 1;
        dl[last] = 0.0;
        d[last] = 1.0;
        bl[last] = 0.0;
        bd[last] = 0.0;
        bu[last] = 0.0;
    }

    void step(std::vector<cplx>& f) const {
        const std::size_t n = f.size();
        std::vector<cplx> rhs(n);
        rhs[0] = bd[0] * f[0] + bu[0] * f[1];
        for (std::size_t j = 1; j + 1 < n; ++j)
            rhs[j] = bl[j] * f[j - 1] + bd[j] * f[j] + bu[j] * f[j + 1];
        rhs[n - 1] = 0.0;
        // Thomas solve
        std::vector<cplx> dd = d, uu = du;
        for (std::size_t j = 1; j < n; ++j) {
            const cplx m = dl[j] / dd[j - 1];
            dd[j] -= m * uu[j - 1];
            rhs[j] -= m * rhs[j - 1];
        }
        f[n - 1] = rhs[n - 1] / dd[n - 1];
        for (std::size_t j = n - 1; j-- > 0;)
            f[j] = (rhs[j] - uu[j] * f[j + 1]) / dd[j];
    }
};

// half-step pointwise phase rotation: i f_z = G f with real G means
// f <- exp(-i G tau) f, and the moduli (hence G itself) stay frozen
void phase_rotate(const ProblemParams& p, double tau, std::vector<cplx>& u,
                  std::vector<cplx>& v) {
    for (std::size_t j = 0; j < u.size(); ++j) {
        const double au = std::abs(u[j]), av = std::abs(v[j]);
        const double g1 = p.beta * av + p.mu1 * au * au + p.rho * av * av;
        const double g2 = 0.5 * p.beta * au * au / std::max(av, 1e-300) +
                          p.mu2 * av * av + p.rho * au * au;
        u[j] *= std::polar(1.0, g1 * tau);
        v[j] *= std::polar(1.0, g2 * tau);
    }
}

double phase_distance_sq(const GridPtr& g, const std::vector<cplx>& f,
                         const RadialField& ref) {
    // min over a global phase of || f - e^{i theta} ref ||_H1^2
    const auto& w = g->weights();
    const auto& c = g->face_coeff();
    cplx pair(0.0, 0.0);
    double nf = 0.0, nr = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) {
        pair += w[j] * f[j] * ref[j];
        nf += w[j] * std::norm(f[j]);
        nr += w[j] * ref[j] * ref[j];
    }
    for (std::size_t k = 0; k + 1 < w.size(); ++k) {
        pair += c[k] * (f[k + 1] - f[k]) * (ref[k + 1] - ref[k]);
        nf += c[k] * std::norm(f[k + 1] - f[k]);
        nr += c[k] * (ref[k + 1] - ref[k]) * (ref[k + 1] - ref[k]);
    }
    return std::max(0.0, nf + nr - 2.0 * std::abs(pair));
}

} // namespace

ComplexPair ComplexPair::from_real(const StatePair& s) {
    ComplexPair c;
    c.grid = s.grid_ptr();
    c.u.assign(s.u.values().begin(), s.u.values().end());
    c.v.assign(s.v.values().begin(), s.v.values().end());
    return c;
}

EvolutionTrace evolve(const ComplexPair& initial, const ProblemParams& p, double dt,
                      double t_end, const StatePair* reference, int sample_every) {
    if (!(dt != 0.0)) throw UsageError("evolve: dt must be nonzero");
    const GridPtr g = initial.grid;
    std::vector<cplx> u = initial.u, v = initial.v;
    const CrankNicolson cn(g, dt);

    EvolutionTrace tr;
    tr.final_state.grid = g;
    const double kin0 = kinetic_of(g, u) + kinetic_of(g, v);
    const long steps = std::lround(std::abs(t_end / dt));
    double prev_phase = std::arg(u[0]), unwrapped = prev_phase;

    auto sample = [&](long k) {
        tr.times.push_back(k * dt);
        tr.mass1.push_back(mass_of(g, u));
        tr.mass2.push_back(mass_of(g, v));
        tr.energy.push_back(flow_energy(g, p, u, v));
        tr.kinetic.push_back(kinetic_of(g, u) + kinetic_of(g, v));
        if (reference) {
            const double d2 = phase_distance_sq(g, u, reference->u) +
                              phase_distance_sq(g, v, reference->v);
            tr.dist_to_ground.push_back(std::sqrt(d2));
        } else {
            tr.dist_to_ground.push_back(0.0);
        }
        const double ph = std::arg(u[0]);
        double delta = ph - prev_phase;
        while (delta > M_PI) delta -= 2.0 * M_PI;
        while (delta < -M_PI) delta += 2.0 * M_PI;
        unwrapped += delta;
        prev_phase = ph;
        tr.phase0.push_back(unwrapped);
    };

    sample(0);
    for (long k = 1; k <= steps; ++k) {
        phase_rotate(p, -0.5 * dt, u, v);
        cn.step(u);
        cn.step(v);
        phase_rotate(p, -0.5 * dt, u, v);
        if (k % sample_every == 0 || k == steps) {
            // phase unwrapping needs every sample, blow-up check is cheap
            sample(k);
            if (tr.kinetic.back() > 1e3 * kin0) {
                tr.blow_up = true;
                break;
            }
        }
    }
    tr.final_state.u = std::move(u);
    tr.final_state.v = std::move(v);
    return tr;
}

StabilityReport stability_experiment(const SolveResult& ground, const ProblemParams& p,
                                     double amplitude, int n_perturbations,
                                     double t_end, double dt, std::uint64_t seed) {
    StabilityReport rep;
    const StatePair& ref = ground.state;
    const GridPtr g = ref.grid_ptr();
    rep.ground_h1 = std::sqrt(h1_norm_sq(ref.u) + h1_norm_sq(ref.v));

    auto run_one = [&](const ComplexPair& init) {
        const EvolutionTrace tr = evolve(init, p, dt, t_end, &ref);
        StabilityRun r;
        for (double d : tr.dist_to_ground) r.sup_dist = std::max(r.sup_dist, d);
        r.blow_up = tr.blow_up;
        for (std::size_t k = 0; k < tr.times.size(); ++k) {
            r.mass_drift = std::max(
                r.mass_drift, std::abs(tr.mass1[k] - tr.mass1[0]) / tr.mass1[0]);
            r.mass_drift = std::max(
                r.mass_drift, std::abs(tr.mass2[k] - tr.mass2[0]) / tr.mass2[0]);
            r.energy_drift =
                std::max(r.energy_drift, std::abs(tr.energy[k] - tr.energy[0]));
        }
        r.energy_drift /= std::max(std::abs(tr.energy[0]), 1e-300);
        return r;
    };

    rep.scheme_error = run_one(ComplexPair::from_real(ref)).sup_dist;

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> width(0.5, 2.0), phase(0.0, 2.0 * M_PI);
    for (int k = 0; k < n_perturbations; ++k) {
        // smooth complex H1 perturbation of prescribed relative size
        const double w1 = width(rng), w2 = width(rng);
        const double ph1 = phase(rng), ph2 = phase(rng);
        const double core = 3.0 / std::sqrt(kinetic(ref.u) / mass_sq(ref.u) + 1.0);
        RadialField bump1 = RadialField::sample(g, [&](double r) {
            const double x = r / core;
            return std::exp(-w1 * x * x);
        });
        RadialField bump2 = RadialField::sample(g, [&](double r) {
            const double x = r / core;
            return x * std::exp(-w2 * x * x);
        });
        const double n1 = std::sqrt(h1_norm_sq(bump1)), n2 = std::sqrt(h1_norm_sq(bump2));
        const double scale = amplitude * rep.ground_h1 / std::sqrt(2.0);

        ComplexPair init = ComplexPair::from_real(ref);
        for (std::size_t j = 0; j < init.u.size(); ++j) {
            init.u[j] += scale / n1 * bump1[j] * std::polar(1.0, ph1);
            init.v[j] += scale / n2 * bump2[j] * std::polar(1.0, ph2);
        }
        rep.runs.push_back(run_one(init));
    }

    rep.stable = true;
    for (const auto& r : rep.runs) {
        if (r.blow_up || r.sup_dist >= 10.0 * amplitude * rep.ground_h1)
            rep.stable = false;
    }
    return rep;
}

} // namespace normsolve
