#pragma once

#include <optional>
#include <string>

#include "normsolve/constants.hpp"
#include "normsolve/functional.hpp"
#include "normsolve/params.hpp"

namespace normsolve {

enum class Regime {
    coercive_1d,
    coercive_2d,
    unbounded_2d,
    indeterminate_2d,
    two_solution_3d,
    outside_3d_window,
    critical_4d_ok,
    outside_4d_window,
    nonexistence_beta_negative,
};

std::string to_string(Regime r);

struct ThresholdReport {
    Regime regime = Regime::outside_3d_window;
    std::optional<double> R0;
    std::optional<double> R1;
    double condition_lhs = 0.0;
    double condition_rhs = 0.0;
    std::optional<double> A_lower;
    std::optional<double> A_upper;
    std::string notes;
};

/// 3D lower envelope of the energy as a function of the kinetic norm:
/// h(t) = t^2/2 - (D1 + D2 + rho D3) t^3/4 - |beta| D4 t^{3/2}/2.
double h_eval(double t, const ProblemParams& p, const ConstantsTable& c);

/// Location of the interior maximum of the reduced envelope.
double h_t_tilde(const ProblemParams& p, const ConstantsTable& c);

/// Left-hand side of the two-solution smallness condition; the bound is 2 sqrt6 / 3.
double condition_3d_lhs(const ProblemParams& p, const ConstantsTable& c);

/// The two positive zeros of h (requires the smallness condition).
std::pair<double, double> solve_R0_R1(const ProblemParams& p, const ConstantsTable& c);

ThresholdReport classify_regime(const ProblemParams& p, const ConstantsTable& c);

std::pair<double, double> constant_A_bracket(const ProblemParams& p,
                                             const ConstantsTable& c);

enum class WindowPosition { inside_ball, annulus, outside };
WindowPosition check_3d_window_membership(const StatePair& s, const ProblemParams& p,
                                          const ConstantsTable& c);

} // namespace normsolve
