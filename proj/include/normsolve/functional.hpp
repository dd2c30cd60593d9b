#pragma once

#include <optional>

#include "normsolve/params.hpp"
#include "normsolve/state.hpp"

namespace normsolve {

struct StructureError : std::runtime_error {
    explicit StructureError(const std::string& what) : std::runtime_error(what) {}
};

/// The three integrals the energy is assembled from.
struct EnergyParts {
    double kinetic = 0.0;        // int |grad u|^2 + |grad v|^2
    double quartic = 0.0;        // int mu1 u^4 + mu2 v^4 + 2 rho u^2 v^2
    double cubic_coupling = 0.0; // int u^2 v
};

EnergyParts energy_parts(const StatePair& s, const ProblemParams& p);
double energy_from_parts(const EnergyParts& e, const ProblemParams& p);
double energy(const StatePair& s, const ProblemParams& p);

/// Unconstrained L2 gradient of the energy; the multiplier terms come from
/// project_tangent.
std::pair<RadialField, RadialField> gradient(const StatePair& s, const ProblemParams& p);

struct TangentProjection {
    RadialField gu;
    RadialField gv;
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    double norm() const;
};

TangentProjection project_tangent(const StatePair& s,
                                  const std::pair<RadialField, RadialField>& g);

/// Dilation derivative of the energy at t = 0:
/// P = kinetic - (N/4) quartic - (N beta / 4) int u^2 v.
double pohozaev(const EnergyParts& e, const ProblemParams& p);
double pohozaev(const StatePair& s, const ProblemParams& p);

/// | lambda1 b1^2 + lambda2 b2^2 - RHS | for the dimension-specific
/// stationary-state identity (N = 2 or 3 only).
double multiplier_identity_residual(const StatePair& s, const ProblemParams& p,
                                    double l1, double l2);
double multiplier_identity_residual(const EnergyParts& e, const ProblemParams& p,
                                    double l1, double l2);

/// Energy along the dilation orbit, evaluated through the closed-form scaling.
double fiber_map(const EnergyParts& e, const ProblemParams& p, double t);
double fiber_map(const StatePair& s, const ProblemParams& p, double t);
double fiber_deriv(const EnergyParts& e, const ProblemParams& p, double t);
double fiber_second(const EnergyParts& e, const ProblemParams& p, double t);

/// Critical points of the fiber map.  s: local minimum (when the geometry has
/// one), t: maximum, zeros: sign changes of the fiber map itself.
struct FiberCriticalPoints {
    std::optional<double> s;
    std::optional<double> t;
    std::optional<double> zero_lo;
    std::optional<double> zero_hi;
};

FiberCriticalPoints fiber_critical_points(const StatePair& s, const ProblemParams& p);
FiberCriticalPoints fiber_critical_points(const EnergyParts& e, const ProblemParams& p);

/// Per-solution certificate.
struct Diagnostics {
    double energy = 0.0;
    double kinetic = 0.0;
    double quartic = 0.0;
    double cubic_coupling = 0.0;
    double pohozaev = 0.0;
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    double grad_norm = 0.0;
    double fiber_second = 0.0; // Psi''(0)
};

Diagnostics diagnostics(const StatePair& s, const ProblemParams& p);

} // namespace normsolve
