#pragma once

#include <complex>

#include "normsolve/solver.hpp"

namespace normsolve {

/// Complex two-component field for the time-dependent system.
struct ComplexPair {
    GridPtr grid;
    std::vector<std::complex<double>> u;
    std::vector<std::complex<double>> v;

    static ComplexPair from_real(const StatePair& s);
};

struct EvolutionTrace {
    std::vector<double> times;
    std::vector<double> mass1;
    std::vector<double> mass2;
    std::vector<double> energy;          // conserved flow energy
    std::vector<double> dist_to_ground;  // H1 distance mod per-component phase
    std::vector<double> kinetic;
    std::vector<double> phase0;          // unwrapped arg of the first component at r = 0
    bool blow_up = false;
    ComplexPair final_state;
};

/// Strang split-step integration of the focusing flow whose standing waves are
/// exactly the stationary pairs: the nonlinearity acts by pointwise phase
/// rotation (conserving both masses), the linear step is Crank-Nicolson on
/// the variational Laplacian. Terminates early with blow_up set once the
/// kinetic term exceeds 1e3 times its initial value.
EvolutionTrace evolve(const ComplexPair& initial, const ProblemParams& p, double dt,
                      double t_end, const StatePair* reference = nullptr,
                      int sample_every = 20);

struct StabilityRun {
    double sup_dist = 0.0;
    bool blow_up = false;
    double mass_drift = 0.0;   // max relative drift over the run
    double energy_drift = 0.0; // relative to the initial energy scale
};

struct StabilityReport {
    std::vector<StabilityRun> runs;
    double ground_h1 = 0.0;
    double scheme_error = 0.0; // sup distance of the unperturbed run
    bool stable = false;       // all sups < 10 * amplitude * ||ground||_H1
};

StabilityReport stability_experiment(const SolveResult& ground, const ProblemParams& p,
                                     double amplitude, int n_perturbations,
                                     double t_end, double dt,
                                     std::uint64_t seed = 1);

} // namespace normsolve
