#pragma once

#include <vector>

#include "normsolve/solver.hpp"

namespace normsolve {

/// Collapse scalings of the 3D ground state: the rescaled profile
/// (L1^{-1} u(theta1^{-1} x), L2^{-1} v(theta2^{-1} x)) approaches the
/// explicit solution of the quadratic-only system as the masses vanish.
struct CollapseScaling {
    double theta1 = 0.0;
    double theta2 = 0.0;
    double L1 = 0.0;
    double L2 = 0.0;
    double lambda1_ref = 0.0; // theta1^2
    double lambda2_ref = 0.0; // theta2^2
};

CollapseScaling make_collapse_scaling(const ProblemParams& p, const ConstantsTable& c);

/// The explicit profile (L1 u0(theta1 x), L2 v0(theta2 x)) with
/// (u0, v0) = (sqrt2 w / beta, w / beta) built from the computed w. Solves the
/// quadratic-only system exactly when b1^2 = 2 b2^2.
StatePair explicit_quadratic_state(const ProblemParams& p, const GridPtr& grid,
                                   const ConstantsTable& c);

/// Closed-form refined upper bound for the ground-state level.
double refined_bound_value(const ProblemParams& p, const ConstantsTable& c);

struct RefinedBoundReport {
    double bound = 0.0;
    double energy = 0.0;
    bool satisfied = false;
    double margin = 0.0; // bound - energy
};

RefinedBoundReport refined_energy_bound_check(const ProblemParams& p,
                                              const SolveResult& ground,
                                              const ConstantsTable& c);

struct FitResult {
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0; // rms of log residuals
};

FitResult fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

struct CollapsePoint {
    ProblemParams params;
    bool converged = false;
    double energy = 0.0;
    double kinetic = 0.0;
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    double lambda1_ratio = 0.0;   // lambda1 / theta1^2
    double lambda2_ratio = 0.0;   // lambda2 / theta2^2
    double rescaled_h1_error = 0.0;
    double bound = 0.0;           // refined closed-form bound
    bool below_bound = false;
};

struct CollapseSweep {
    std::vector<CollapsePoint> points;
    FitResult kinetic_slope;      // log kinetic vs log b1
    double limit_h1_norm = 0.0;   // H1 norm of the limit profile
    bool errors_decreasing = false;
};

CollapseSweep collapse_experiment(const ProblemParams& p_base,
                                  const std::vector<std::pair<double, double>>& ladder,
                                  std::size_t grid_n, const SolveConfig& cfg);

struct BubblePoint {
    ProblemParams params;
    bool converged = false;
    double energy = 0.0;
    double energy_gap = 0.0;      // |m - (k1+k2) S^2 / 4|
    double eps_fit = 0.0;
    double d12_error = 0.0;       // gradient-norm distance to the fitted pair
    double component_ratio = 0.0; // ||u||_4 / ||v||_4
    double coupling = 0.0;        // beta int u^2 v
};

struct BubbleSweep {
    std::vector<BubblePoint> points;
    double target = 0.0;          // (k1+k2) S^2 / 4
    double ratio_target = 0.0;    // (k1/k2)^{1/4}
    bool gaps_decreasing = false;
    bool errors_decreasing = false;
};

BubbleSweep bubble_limit_experiment(const ProblemParams& p_base,
                                    const std::vector<std::pair<double, double>>& ladder,
                                    std::size_t grid_n, const SolveConfig& cfg);

struct CutoffReport {
    std::vector<double> eps;
    std::vector<double> grad_deficit; // | ||grad W||^2 - S^2 |
    std::vector<double> l4_deficit;   // | ||W||_4^4 - S^2 |
    std::vector<double> l3;           // ||W||_3^3
    std::vector<double> l2_over_log;  // ||W||_2^2 / |ln eps|
    FitResult slope_grad, slope_l4, slope_l3, slope_l2;
};

CutoffReport cutoff_bubble_estimates(const std::vector<double>& eps_ladder,
                                     const GridPtr& grid);

struct BetaPoint {
    double beta = 0.0;
    bool ground_converged = false;
    bool excited_converged = false;
    double m_plus = 0.0;
    double m_minus = 0.0;
    double excited_h1_to_limit = 0.0; // distance to the beta = 0 excited state
};

struct BetaSweep {
    std::vector<BetaPoint> points;
    double m_minus_zero = 0.0; // beta = 0 mountain-pass level
    bool m_plus_to_zero = false;
    bool m_minus_monotone = false;
};

BetaSweep beta_limit_experiment(const ProblemParams& p_base,
                                const std::vector<double>& beta_ladder,
                                const GridPtr& grid, const SolveConfig& cfg);

} // namespace normsolve
