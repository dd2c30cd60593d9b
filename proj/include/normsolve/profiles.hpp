#pragma once

#include "normsolve/field.hpp"
#include "normsolve/params.hpp"

namespace normsolve {

struct ProfileSolveError : std::runtime_error {
    explicit ProfileSolveError(const std::string& what) : std::runtime_error(what) {}
};

/// Positive radial ground state of -Delta u + u = u^p in R^N, computed by
/// shooting on the radial ODE. Keeps the fine ODE mesh and its norms so that
/// integral identities can be checked well below grid accuracy.
struct ScalarGroundState {
    int N = 0;
    int p = 0;
    double amplitude = 0.0;   // u(0)
    double r_stop = 0.0;      // radius where the computed tail is cut
    double tail_coeff = 0.0;  // u ~ C r^{-(N-1)/2} e^{-r} beyond r_stop
    double h = 0.0;
    std::vector<double> r, u, du;

    // fine-mesh integrals over R^N
    double l2_sq = 0.0;       // int u^2
    double kinetic = 0.0;     // int |grad u|^2
    double l3 = 0.0;          // int |u|^3
    double l4 = 0.0;          // int u^4
    double lp1 = 0.0;         // int u^{p+1}

    double eval(double radius) const;
    RadialField sample(const GridPtr& grid) const;
};

/// Shooting amplitude search. `a_lo`/`a_hi` must bracket the ground-state
/// amplitude (classify() < 0 at a_lo, > 0 at a_hi).
double find_ground_amplitude(int N, int p, double a_lo, double a_hi);
int shoot_classify(int N, int p, double amplitude);

const ScalarGroundState& scalar_ground_state(int N, int p);
ScalarGroundState solve_scalar_ground_state_ode(int N, int p);

/// Sample the (N, p) ground state on a grid and polish it against the
/// discrete operator until the discrete PDE residual is at solver level.
RadialField solve_scalar_ground_state(int N, int p, const GridPtr& grid);

/// L2 norm of -Delta u + u - u^p under the grid quadrature.
double scalar_pde_residual(const RadialField& u, int p);

/// Aubin-Talenti bubble U_eps(x) = 2 sqrt2 eps / (eps^2 + |x|^2) on an N = 4 grid.
RadialField aubin_talenti(double eps, const GridPtr& grid);

/// int |grad U_eps|^2 over the truncated ball, from the closed-form gradient.
double bubble_grad_sq_truncated(double eps, const GridPtr& grid);

// closed-form tails over {r > R} in R^4
double bubble_tail_grad_sq(double eps, double R);
double bubble_tail_l4(double eps, double R);
double bubble_tail_l3(double eps, double R);

/// Amplitude factors of the least-energy bubble pair of the critical system.
struct BubbleParams {
    double k1 = 0.0;
    double k2 = 0.0;
    double coupled_S = 0.0; // sqrt(k1 + k2) * S
};

BubbleParams bubble_params(double mu1, double mu2, double rho);

} // namespace normsolve
