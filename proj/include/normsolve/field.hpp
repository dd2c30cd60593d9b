#pragma once

#include <functional>
#include <vector>

#include "normsolve/grid.hpp"

namespace normsolve {

struct UsageError : std::runtime_error {
    explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

/// Real radial field sampled on a RadialGrid. Immutable by convention once
/// handed to a solver; all free functions return fresh fields.
class RadialField {
public:
    RadialField(GridPtr grid, std::vector<double> values);
    static RadialField zero(GridPtr grid);
    static RadialField sample(GridPtr grid, const std::function<double(double)>& f);

    const RadialGrid& grid() const { return *grid_; }
    GridPtr grid_ptr() const { return grid_; }
    std::size_t size() const { return values_.size(); }
    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }
    double operator[](std::size_t j) const { return values_[j]; }
    double& operator[](std::size_t j) { return values_[j]; }

    /// Cubic (4-point Lagrange) interpolation; zero beyond r_max.
    double eval(double r) const;

    double max_abs() const;

private:
    GridPtr grid_;
    std::vector<double> values_;
};

double integrate(const RadialField& f);
/// integral of f*g over R^N
double inner(const RadialField& f, const RadialField& g);
double mass_sq(const RadialField& f);       // int f^2
double lp_norm_p(const RadialField& f, int p); // int |f|^p

/// Dirichlet form int grad f . grad g, assembled from the P1 stiffness
/// coefficients of the grid. By construction this equals the quadrature
/// pairing of f with -laplacian of g, so the three expressions agree to
/// machine precision.
double grad_inner(const RadialField& f, const RadialField& g);
double kinetic(const RadialField& f);       // int |grad f|^2

/// Pointwise radial Laplacian f'' + (N-1)/r f', Neumann at 0 (L'Hopital row,
/// N f''(0)), Dirichlet beyond r_max. Fourth order on uniform grids, second
/// order on graded ones.
RadialField laplacian_apply(const RadialField& f);

/// Variational Laplacian -W^{-1} K: satisfies inner(f, -laplacian_variational(g))
/// == grad_inner(f, g) exactly, so it is the Laplacian the grid quadrature sees.
/// Used by energy gradients and the evolution step.
RadialField laplacian_variational(const RadialField& f);

RadialField operator+(const RadialField& a, const RadialField& b);
RadialField operator-(const RadialField& a, const RadialField& b);
RadialField operator*(double c, const RadialField& a);
RadialField pointwise(const RadialField& a, const std::function<double(double)>& f);

double h1_norm_sq(const RadialField& f);

void require_same_grid(const RadialField& a, const RadialField& b);

} // namespace normsolve
