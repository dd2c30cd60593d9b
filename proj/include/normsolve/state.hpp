#pragma once

#include "normsolve/field.hpp"

namespace normsolve {

struct DilationRangeError : std::runtime_error {
    explicit DilationRangeError(const std::string& what) : std::runtime_error(what) {}
};

/// Point on the product of mass spheres T_{b1} x T_{b2}.
struct StatePair {
    RadialField u;
    RadialField v;
    double b1 = 0.0;
    double b2 = 0.0;

    StatePair(RadialField u_, RadialField v_, double b1_, double b2_);
    const RadialGrid& grid() const { return u.grid(); }
    GridPtr grid_ptr() const { return u.grid_ptr(); }
};

/// Rescale each component to its mass sphere (relative mass error < 1e-10
/// afterwards by construction).
StatePair normalize_masses(const RadialField& u, const RadialField& v,
                           double b1, double b2);

/// Mass-preserving dilation t*u = e^{Nt/2} u(e^t x), resampled by cubic
/// interpolation with zero extension beyond r_max. Throws DilationRangeError
/// when resampling drifts the mass by more than max_drift relative (1e-6 by
/// default; solvers that renormalize right after may pass a looser guard).
RadialField dilate(const RadialField& f, double t, double max_drift = 1e-6);
StatePair dilate(const StatePair& s, double t, double max_drift = 1e-6);

double h1_distance(const StatePair& a, const StatePair& b);

} // namespace normsolve
