#pragma once

#include <cstdint>
#include <string>

#include "normsolve/functional.hpp"
#include "normsolve/thresholds.hpp"

namespace normsolve {

enum class SolveMode { global_min, local_min, mountain_pass, rayleigh_quotient_A };
enum class Branch { ground_plus, excited_minus, global, quotient };

std::string to_string(SolveMode m);
std::string to_string(Branch b);

struct SolveConfig {
    SolveMode mode = SolveMode::global_min;
    double step = 1e-2;          // initial gradient step, grows under success
    double tol_grad = 0.0;       // <= 0: default 1e-7 (b1 + b2)
    double tol_pohozaev = 1e-6;  // relative to the kinetic term
    int max_iters = 50000;
    std::uint64_t seed = 1;
    double ball_radius = 0.0;    // local_min: 0 selects R0 from the thresholds
};

struct SolveResult {
    StatePair state;
    Diagnostics diag;
    bool converged = false;
    int iterations = 0;
    Branch branch = Branch::global;
    std::string note;
};

/// Regime-checked global minimization (N = 1, coercive N = 2) by projected
/// preconditioned descent with per-step renormalization and positivity.
SolveResult solve_global_min(const ProblemParams& p, const GridPtr& grid,
                             const SolveConfig& cfg);

/// 3D local minimizer inside the kinetic ball: each iterate is replaced by its
/// fiber projection onto the Psi'' > 0 branch before the gradient step.
SolveResult solve_local_min(const ProblemParams& p, const GridPtr& grid,
                            const SolveConfig& cfg);

/// Mountain-pass state: minimizes the reduced functional
/// max_t J(t * (u, v)) over the product sphere (N = 3 two-solution regime or
/// the 4D critical window).
SolveResult solve_mountain_pass(const ProblemParams& p, const GridPtr& grid,
                                const SolveConfig& cfg);

/// Minimum of kinetic/quartic over the product sphere (N = 2).
double estimate_constant_A(const ProblemParams& p, const GridPtr& grid,
                           const SolveConfig& cfg);

SolveResult solve(const ProblemParams& p, const GridPtr& grid, const SolveConfig& cfg);

/// Scalar normalized problem -Delta v + lambda v = mu v^3 on T_b in R^3:
/// mountain-pass level and state, for semi-trivial comparisons.
struct ScalarMountainPass {
    RadialField v;
    double level = 0.0;
    double lambda = 0.0;
    bool converged = false;
};

ScalarMountainPass scalar_mountain_pass(double mu, double b, const GridPtr& grid,
                                        const SolveConfig& cfg);

/// Same, on an internally built grid scaled to the solution width 1/sqrt(lambda).
ScalarMountainPass scalar_mountain_pass(double mu, double b, const SolveConfig& cfg);

/// Closed-form level of the same problem through the cubic ground state.
double scalar_mountain_pass_level_reference(double mu, double b);

/// Mass-normalized gaussian pair used as the default initial guess.
StatePair initial_gaussian_state(const ProblemParams& p, const GridPtr& grid,
                                 std::uint64_t seed);

} // namespace normsolve
