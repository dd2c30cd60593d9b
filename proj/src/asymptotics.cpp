#include "normsolve/asymptotics.hpp"
#include "normsolve/profiles.hpp"

#include <cmath>

namespace normsolve {

CollapseScaling make_collapse_scaling(const ProblemParams& p, const ConstantsTable& c) {
    const double w2 = c.w_mass_sq;
    const double b1 = p.b1, b2 = p.b2, beta = p.beta;
    CollapseScaling s;
    s.theta1 = 2.0 * beta * beta * std::pow(b1, 1.2) * std::pow(b2, 0.8) /
               (std::pow(16.0, 0.4) * w2);
    s.theta2 = beta * beta * std::pow(b1, 1.6) * std::pow(b2, 0.4) /
               (std::pow(16.0, 0.2) * w2);
    s.L1 = 2.0 * std::pow(beta, 4) * std::pow(b1, 2.8) * std::pow(b2, 1.2) /
           (std::pow(16.0, 0.6) * w2 * w2);
    s.L2 = 4.0 * std::pow(beta, 4) * std::pow(b1, 2.4) * std::pow(b2, 1.6) /
           (std::pow(16.0, 0.8) * w2 * w2);
    s.lambda1_ref = s.theta1 * s.theta1;
    s.lambda2_ref = s.theta2 * s.theta2;
    return s;
}

StatePair explicit_quadratic_state(const ProblemParams& p, const GridPtr& grid,
                                   const ConstantsTable& c) {
    if (grid->dim() != 3) throw UsageError("explicit quadratic state lives in 3D");
    if (!(p.beta > 0)) throw UsageError("explicit quadratic state needs beta > 0");
    const CollapseScaling s = make_collapse_scaling(p, c);
    const ScalarGroundState& w = scalar_ground_state(3, 2);
    const double cu = s.L1 * std::sqrt(2.0) / p.beta;
    const double cv = s.L2 / p.beta;
    RadialField u = RadialField::sample(
        grid, [&](double r) { return cu * w.eval(s.theta1 * r); });
    RadialField v = RadialField::sample(
        grid, [&](double r) { return cv * w.eval(s.theta2 * r); });
    return StatePair(std::move(u), std::move(v), p.b1, p.b2);
}

double refined_bound_value(const ProblemParams& p, const ConstantsTable& c) {
    const double w2 = c.w_mass_sq;
    const double b4 = std::pow(p.beta, 4);
    const double term1 = 4.0 * b4 * std::pow(p.b1, 22.0 / 5.0) *
                         std::pow(p.b2, 8.0 / 5.0) / (std::pow(16.0, 0.8) * w2 * w2 * w2);
    const double term2 = b4 * std::pow(p.b1, 16.0 / 5.0) * std::pow(p.b2, 14.0 / 5.0) /
                         (std::pow(16.0, 0.4) * w2 * w2 * w2);
    return -(term1 + term2) * c.w_kinetic / 6.0;
}

RefinedBoundReport refined_energy_bound_check(const ProblemParams& p,
                                              const SolveResult& ground,
                                              const ConstantsTable& c) {
    RefinedBoundReport r;
    r.bound = refined_bound_value(p, c);
    r.energy = ground.diag.energy;
    r.margin = r.bound - r.energy;
    r.satisfied = ground.converged && r.energy < r.bound;
    return r;
}

FitResult fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw UsageError("fit: need at least two points");
    const std::size_t n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double lx = std::log(x[i]), ly = std::log(std::abs(y[i]));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    FitResult f;
    const double det = n * sxx - sx * sx;
    f.slope = (n * sxy - sx * sy) / det;
    f.intercept = (sy - f.slope * sx) / n;
    double ss = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = std::log(std::abs(y[i])) - f.slope * std::log(x[i]) - f.intercept;
        ss += r * r;
    }
    f.residual = std::sqrt(ss / n);
    return f;
}

CollapseSweep collapse_experiment(const ProblemParams& p_base,
                                  const std::vector<std::pair<double, double>>& ladder,
                                  std::size_t grid_n, const SolveConfig& cfg) {
    const ConstantsTable& c = default_constants();
    CollapseSweep sweep;

    // reference grid holding the limit profile
    auto ref_grid = build_radial_grid(3, 25.0, 2048, Spacing::uniform);
    const ScalarGroundState& w = scalar_ground_state(3, 2);
    const double beta = p_base.beta;
    const RadialField u_lim = RadialField::sample(
        ref_grid, [&](double r) { return std::sqrt(2.0) / beta * w.eval(r); });
    const RadialField v_lim = RadialField::sample(
        ref_grid, [&](double r) { return w.eval(r) / beta; });
    sweep.limit_h1_norm = std::sqrt(h1_norm_sq(u_lim) + h1_norm_sq(v_lim));

    std::vector<double> b1s, kins;
    for (auto [b1, b2] : ladder) {
        ProblemParams p = p_base;
        p.b1 = b1;
        p.b2 = b2;
        const CollapseScaling s = make_collapse_scaling(p, c);

        // the profile spreads like 1/theta; resolve out to where w has decayed
        const double r_max = 25.0 / std::min(s.theta1, s.theta2);
        auto grid = build_radial_grid(3, r_max, grid_n, Spacing::uniform);

        CollapsePoint pt;
        pt.params = p;
        SolveResult res = solve_local_min(p, grid, cfg);
        pt.converged = res.converged;
        pt.energy = res.diag.energy;
        pt.kinetic = res.diag.kinetic;
        pt.lambda1 = res.diag.lambda1;
        pt.lambda2 = res.diag.lambda2;
        pt.lambda1_ratio = res.diag.lambda1 / s.lambda1_ref;
        pt.lambda2_ratio = res.diag.lambda2 / s.lambda2_ref;
        pt.bound = refined_bound_value(p, c);
        pt.below_bound = res.converged && res.diag.energy < pt.bound;

        const RadialField ru = RadialField::sample(ref_grid, [&](double r) {
            return res.state.u.eval(r / s.theta1) / s.L1;
        });
        const RadialField rv = RadialField::sample(ref_grid, [&](double r) {
            return res.state.v.eval(r / s.theta2) / s.L2;
        });
        pt.rescaled_h1_error =
            std::sqrt(h1_norm_sq(ru - u_lim) + h1_norm_sq(rv - v_lim));

        sweep.points.push_back(pt);
        if (res.converged) {
            b1s.push_back(b1);
            kins.push_back(res.diag.kinetic);
        }
    }

    sweep.errors_decreasing = sweep.points.size() >= 2;
    for (std::size_t i = 1; i < sweep.points.size(); ++i)
        if (!(sweep.points[i].rescaled_h1_error < sweep.points[i - 1].rescaled_h1_error))
            sweep.errors_decreasing = false;
    if (b1s.size() >= 2) sweep.kinetic_slope = fit_loglog(b1s, kins);
    return sweep;
}

namespace {

double half_width_radius(const RadialField& u) {
    const double half = u[0] / 2.0;
    for (std::size_t j = 1; j < u.size(); ++j) {
        if (u[j] <= half) {
            // linear interpolation between nodes j-1 and j
            const double r0 = u.grid().node(j - 1), r1 = u.grid().node(j);
            const double f0 = u[j - 1], f1 = u[j];
            return r0 + (half - f0) * (r1 - r0) / (f1 - f0);
        }
    }
    return u.grid().r_max();
}

} // namespace

BubbleSweep bubble_limit_experiment(const ProblemParams& p_base,
                                    const std::vector<std::pair<double, double>>& ladder,
                                    std::size_t grid_n, const SolveConfig& cfg) {
    const ConstantsTable& c = default_constants();
    const BubbleParams bp = bubble_params(p_base.mu1, p_base.mu2, p_base.rho);
    BubbleSweep sweep;
    sweep.target = 0.25 * (bp.k1 + bp.k2) * c.sobolev_S * c.sobolev_S;
    sweep.ratio_target = std::pow(bp.k1 / bp.k2, 0.25);

    for (auto [b1, b2] : ladder) {
        ProblemParams p = p_base;
        p.b1 = b1;
        p.b2 = b2;
        auto grid = build_radial_grid(4, 20.0, grid_n, Spacing::graded);

        BubblePoint pt;
        pt.params = p;
        SolveResult res = solve_mountain_pass(p, grid, cfg);
        pt.converged = res.converged;
        pt.energy = res.diag.energy;
        pt.energy_gap = std::abs(res.diag.energy - sweep.target);
        pt.coupling = p.beta * res.diag.cubic_coupling;

        // match the bubble by the half-width of the first component
        pt.eps_fit = half_width_radius(res.state.u);
        const RadialField U = aubin_talenti(pt.eps_fit, grid);
        const RadialField du = res.state.u - std::sqrt(bp.k1) * U;
        const RadialField dv = res.state.v - std::sqrt(bp.k2) * U;
        pt.d12_error = std::sqrt(kinetic(du) + kinetic(dv));
        pt.component_ratio = std::pow(lp_norm_p(res.state.u, 4), 0.25) /
                             std::pow(lp_norm_p(res.state.v, 4), 0.25);
        sweep.points.push_back(pt);
    }

    sweep.gaps_decreasing = sweep.points.size() >= 2;
    sweep.errors_decreasing = sweep.points.size() >= 2;
    for (std::size_t i = 1; i < sweep.points.size(); ++i) {
        if (!(sweep.points[i].energy_gap < sweep.points[i - 1].energy_gap))
            sweep.gaps_decreasing = false;
        if (!(sweep.points[i].d12_error < sweep.points[i - 1].d12_error))
            sweep.errors_decreasing = false;
    }
    return sweep;
}

CutoffReport cutoff_bubble_estimates(const std::vector<double>& eps_ladder,
                                     const GridPtr& grid) {
    if (grid->dim() != 4) throw UsageError("cutoff estimates live in 4D");
    if (grid->r_max() < 2.0) throw UsageError("cutoff support needs r_max >= 2");
    const ConstantsTable& c = default_constants();
    const double S2 = c.sobolev_S * c.sobolev_S;

    CutoffReport rep;
    for (double eps : eps_ladder) {
        // W = xi U_eps with a C^1 radially decreasing cutoff, xi = 1 on the
        // unit ball and 0 outside radius 2; gradients sampled in closed form
        auto xi = [](double r) {
            if (r <= 1.0) return 1.0;
            if (r >= 2.0) return 0.0;
            const double s = r - 1.0;
            return 1.0 - s * s * (3.0 - 2.0 * s);
        };
        auto dxi = [](double r) {
            if (r <= 1.0 || r >= 2.0) return 0.0;
            const double s = r - 1.0;
            return -6.0 * s * (1.0 - s);
        };
        const double e2 = eps * eps;
        auto U = [=](double r) { return 2.0 * std::sqrt(2.0) * eps / (e2 + r * r); };
        auto dU = [=](double r) {
            const double d = e2 + r * r;
            return -4.0 * std::sqrt(2.0) * eps * r / (d * d);
        };

        const RadialField grad2 = RadialField::sample(grid, [&](double r) {
            const double g = dxi(r) * U(r) + xi(r) * dU(r);
            return g * g;
        });
        const RadialField w4 = RadialField::sample(grid, [&](double r) {
            return std::pow(xi(r) * U(r), 4);
        });
        const RadialField w3 = RadialField::sample(grid, [&](double r) {
            return std::pow(xi(r) * U(r), 3);
        });
        const RadialField w2 = RadialField::sample(grid, [&](double r) {
            return std::pow(xi(r) * U(r), 2);
        });

        rep.eps.push_back(eps);
        rep.grad_deficit.push_back(std::abs(integrate(grad2) - S2));
        rep.l4_deficit.push_back(std::abs(integrate(w4) - S2));
        rep.l3.push_back(integrate(w3));
        rep.l2_over_log.push_back(integrate(w2) / std::abs(std::log(eps)));
    }
    rep.slope_grad = fit_loglog(rep.eps, rep.grad_deficit);
    rep.slope_l4 = fit_loglog(rep.eps, rep.l4_deficit);
    rep.slope_l3 = fit_loglog(rep.eps, rep.l3);
    rep.slope_l2 = fit_loglog(rep.eps, rep.l2_over_log);
    return rep;
}

BetaSweep beta_limit_experiment(const ProblemParams& p_base,
                                const std::vector<double>& beta_ladder,
                                const GridPtr& grid, const SolveConfig& cfg) {
    BetaSweep sweep;

    ProblemParams p0 = p_base;
    p0.beta = 0.0;
    SolveResult limit = solve_mountain_pass(p0, grid, cfg);
    sweep.m_minus_zero = limit.diag.energy;

    for (double beta : beta_ladder) {
        ProblemParams p = p_base;
        p.beta = beta;
        BetaPoint pt;
        pt.beta = beta;
        try {
            SolveResult ground = solve_local_min(p, grid, cfg);
            pt.ground_converged = ground.converged;
            pt.m_plus = ground.diag.energy;
        } catch (const RegimeError&) {
            pt.ground_converged = false; // branch loss at small beta is expected
        }
        SolveResult excited = solve_mountain_pass(p, grid, cfg);
        pt.excited_converged = excited.converged;
        pt.m_minus = excited.diag.energy;
        if (limit.converged && excited.converged)
            pt.excited_h1_to_limit = h1_distance(excited.state, limit.state);
        sweep.points.push_back(pt);
    }

    // ladder is ordered by decreasing beta
    sweep.m_plus_to_zero = true;
    sweep.m_minus_monotone = true;
    for (std::size_t i = 1; i < sweep.points.size(); ++i) {
        const auto& prev = sweep.points[i - 1];
        const auto& cur = sweep.points[i];
        if (prev.ground_converged && cur.ground_converged &&
            !(std::abs(cur.m_plus) <= std::abs(prev.m_plus) + 1e-12))
            sweep.m_plus_to_zero = false;
        if (prev.excited_converged && cur.excited_converged &&
            !(cur.m_minus >= prev.m_minus - 1e-4))
            sweep.m_minus_monotone = false;
    }
    if (!sweep.points.empty() && sweep.points.back().excited_converged &&
        !(sweep.m_minus_zero >= sweep.points.back().m_minus - 1e-4))
        sweep.m_minus_monotone = false;
    return sweep;
}

} // namespace normsolve
