#include "normsolve/solver.hpp"
#include "normsolve/profiles.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <random>

namespace normsolve {

std::string to_string(SolveMode m) {
    switch (m) {
        case SolveMode::global_min: return "global_min";
        case SolveMode::local_min: return "local_min";
        case SolveMode::mountain_pass: return "mountain_pass";
        case SolveMode::rayleigh_quotient_A: return "rayleigh_quotient_A";
    }
    return "unknown";
}

std::string to_string(Branch b) {
    switch (b) {
        case Branch::ground_plus: return "ground_plus";
        case Branch::excited_minus: return "excited_minus";
        case Branch::global: return "global";
        case Branch::quotient: return "quotient";
    }
    return "unknown";
}

namespace {

// The fiber-projected state's gradient norm bottoms out at the h^2 mismatch
// between the closed-form dilation derivative and the discrete energy's true
// tangent, amplified by the multiplier scale, plus the apex consistency error
// of the cubic terms for concentrated profiles. The default tolerance tracks
// those floors; an explicit cfg.tol_grad overrides it.
double default_tol_grad(const ProblemParams& p, const SolveConfig& cfg,
                        double lambda_scale, double amp_cubed) {
    return cfg.tol_grad > 0 ? cfg.tol_grad
                            : 1e-4 * (p.b1 + p.b2) * (1.0 + lambda_scale) +
                                  5e-8 * amp_cubed;
}

// (shift W + K) d = W g : H1 preconditioner for the descent direction; the
// shift tracks the multiplier scale of the current iterate
RadialField precondition(const RadialField& g, double shift = 1.0) {
    const auto& grid = g.grid();
    const auto& w = grid.weights();
    const auto& c = grid.face_coeff();
    const std::size_t n = g.size();
    std::vector<double> dl(n, 0.0), d(n, 0.0), du(n, 0.0), rhs(n);
    for (std::size_t j = 0; j < n; ++j) {
        d[j] = shift * w[j];
        rhs[j] = w[j] * g[j];
    }
    for (std::size_t k = 0; k + 1 < n; ++k) {
        d[k] += c[k];
        d[k + 1] += c[k];
        dl[k + 1] = -c[k];
        du[k] = -c[k];
    }
    for (std::size_t j = 1; j < n; ++j) {
        const double m = dl[j] / d[j - 1];
        d[j] -= m * du[j - 1];
        rhs[j] -= m * rhs[j - 1];
    }
    std::vector<double> out(n);
    out[n - 1] = rhs[n - 1] / d[n - 1];
    for (std::size_t j = n - 1; j-- > 0;)
        out[j] = (rhs[j] - du[j] * out[j + 1]) / d[j];
    return RadialField(g.grid_ptr(), std::move(out));
}

bool essentially_positive(const RadialField& f) {
    double mn = 0.0, mx = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j) {
        mn = std::min(mn, f[j]);
        mx = std::max(mx, std::abs(f[j]));
    }
    return mn > -1e-6 * mx;
}

RadialField abs_field(const RadialField& f) {
    std::vector<double> v(f.size());
    for (std::size_t j = 0; j < f.size(); ++j) v[j] = std::abs(f[j]);
    return RadialField(f.grid_ptr(), std::move(v));
}

StatePair retract(const StatePair& x, const RadialField& du, const RadialField& dv,
                  double step, bool positive) {
    RadialField nu = x.u - step * du;
    RadialField nv = x.v - step * dv;
    if (positive) {
        nu = abs_field(nu);
        nv = abs_field(nv);
    }
    return normalize_masses(nu, nv, x.b1, x.b2);
}

// fiber projection onto the requested branch, staged so no single resampling
// crosses more than one e-folding
StatePair project_fiber(const StatePair& x, const ProblemParams& p, bool min_branch) {
    StatePair out = x;
    for (int stage = 0; stage < 60; ++stage) {
        const FiberCriticalPoints cp = fiber_critical_points(out, p);
        const std::optional<double>& t = min_branch ? cp.s : cp.t;
        if (!t) throw StructureError("fiber projection: requested branch absent");
        if (std::abs(*t) < 1e-14) return out;
        const double move = std::clamp(*t, -1.0, 1.0);
        try {
            // transient iterates carry positivity-fold kinks, so the guard is
            // looser than the public contract; masses are renormalized here
            StatePair next = dilate(out, move, 1e-3);
            out = normalize_masses(next.u, next.v, x.b1, x.b2);
        } catch (const DilationRangeError& err) {
            if (std::getenv("NORMSOLVE_TRACE"))
                std::fprintf(stderr, "  project_fiber: t=%.3e stage=%d: %s\n", *t,
                             stage, err.what());
            throw;
        }
        if (std::abs(*t) <= 1.0) return out;
    }
    throw StructureError("fiber projection: staging did not settle");
}

// Newton polish of the stationarity system
//   -Delta u + l1 u = beta u v + mu1 u^3 + rho v^2 u
//   -Delta v + l2 v = (beta/2) u^2 + mu2 v^3 + rho u^2 v
// with both masses pinned. Interleaving (u_j, v_j) gives a bandwidth-2 system
// bordered by the two multiplier columns; root-finding Newton converges to the
// nearby critical point whatever its Morse index.
struct BandedSystem {
    // diagonals[k + 2] holds offset k in [-2, 2]
    std::size_t n = 0;
    std::vector<double> band; // 5 * n, row-major by offset
    double& at(std::size_t row, int off) { return band[5 * row + std::size_t(off + 2)]; }

    // in-place LU without pivoting (near-convergence systems are strongly
    // diagonally dominant); returns false on a vanishing pivot
    bool factor() {
        for (std::size_t i = 0; i < n; ++i) {
            const double piv = at(i, 0);
            if (!(std::abs(piv) > 1e-300)) return false;
            for (int k = 1; k <= 2; ++k) {
                if (i + k >= n) continue;
                const double m = at(i + k, -k) / piv;
                at(i + k, -k) = m;
                for (int j = 1; j <= 2; ++j) {
                    const int off = j - k;
                    if (off >= -2 && off <= 2 && i + j < n)
                        at(i + k, off) -= m * at(i, j);
                }
            }
        }
        return true;
    }
    void solve(std::vector<double>& rhs) const {
        for (std::size_t i = 0; i < n; ++i)
            for (int k = 1; k <= 2; ++k)
                if (i >= std::size_t(k)) rhs[i] -= band[5 * i + std::size_t(2 - k)] * rhs[i - k];
        for (std::size_t i = n; i-- > 0;) {
            double acc = rhs[i];
            for (int k = 1; k <= 2; ++k)
                if (i + k < n) acc -= band[5 * i + std::size_t(2 + k)] * rhs[i + k];
            rhs[i] = acc / band[5 * i + 2];
        }
    }
};

bool newton_polish(StatePair& x, const ProblemParams& p, double& l1, double& l2,
                   int max_steps) {
    const auto& grid = x.grid();
    const auto& w = grid.weights();
    const auto& cface = grid.face_coeff();
    const std::size_t n = x.u.size();

    auto stationarity_norm = [&](const StatePair& s, double a1, double a2) {
        const auto g = gradient(s, p);
        double acc = 0.0;
        for (std::size_t j = 0; j + 1 < n; ++j) { // last node is Dirichlet
            const double ru = g.first[j] + a1 * s.u[j];
            const double rv = g.second[j] + a2 * s.v[j];
            acc += w[j] * (ru * ru + rv * rv);
        }
        return std::sqrt(acc);
    };

    double best = stationarity_norm(x, l1, l2);
    for (int step = 0; step < max_steps; ++step) {
        const auto g = gradient(x, p);
        BandedSystem M;
        M.n = 2 * n;
        M.band.assign(5 * M.n, 0.0);

        std::vector<double> rhs(2 * n + 2, 0.0);
        std::vector<double> bc1(2 * n, 0.0), bc2(2 * n, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            const double u = x.u[j], v = x.v[j];
            const std::size_t ru = 2 * j, rv = 2 * j + 1;
            // weak-form rows: W (gradient residual + lambda term)
            const double duu = w[j] * (l1 - p.beta * v - 3.0 * p.mu1 * u * u - p.rho * v * v);
            const double dvv = w[j] * (l2 - 3.0 * p.mu2 * v * v - p.rho * u * u);
            const double cross = w[j] * (-p.beta * u - 2.0 * p.rho * u * v);
            M.at(ru, 0) += duu;
            M.at(rv, 0) += dvv;
            M.at(ru, 1) += cross;
            M.at(rv, -1) += cross;
            rhs[ru] = -w[j] * (g.first[j] + l1 * u);
            rhs[rv] = -w[j] * (g.second[j] + l2 * v);
            bc1[ru] = w[j] * u;
            bc2[rv] = w[j] * v;
        }
        for (std::size_t k = 0; k + 1 < n; ++k) {
            // stiffness couplings of -Delta under the quadrature pairing
            const std::size_t a = 2 * k, b = 2 * (k + 1);
            M.at(a, 0) += cface[k];
            M.at(b, 0) += cface[k];
            M.at(a + 1, 0) += cface[k];
            M.at(b + 1, 0) += cface[k];
            M.at(a, 2) -= cface[k];
            M.at(b, -2) -= cface[k];
            M.at(a + 1, 2) -= cface[k];
            M.at(b + 1, -2) -= cface[k];
        }
        // Dirichlet clamp on the last node
        for (std::size_t row : {2 * n - 2, 2 * n - 1}) {
            for (int off = -2; off <= 2; ++off) M.at(row, off) = 0.0;
            M.at(row, 0) = 1.0;
            rhs[row] = 0.0;
            bc1[row] = 0.0;
            bc2[row] = 0.0;
        }

        if (!M.factor()) return false;
        std::vector<double> z0(rhs.begin(), rhs.begin() + 2 * n);
        std::vector<double> z1 = bc1, z2 = bc2;
        M.solve(z0);
        M.solve(z1);
        M.solve(z2);

        const double c1 = -0.5 * (mass_sq(x.u) - p.b1 * p.b1);
        const double c2 = -0.5 * (mass_sq(x.v) - p.b2 * p.b2);
        double a11 = 0, a12 = 0, a21 = 0, a22 = 0, r1 = 0, r2 = 0;
        for (std::size_t j = 0; j < 2 * n; ++j) {
            a11 += bc1[j] * z1[j];
            a12 += bc1[j] * z2[j];
            a21 += bc2[j] * z1[j];
            a22 += bc2[j] * z2[j];
            r1 += bc1[j] * z0[j];
            r2 += bc2[j] * z0[j];
        }
        const double det = a11 * a22 - a12 * a21;
        if (!(std::abs(det) > 1e-300)) return false;
        const double dl1 = ((r1 - c1) * a22 - (r2 - c2) * a12) / det;
        const double dl2 = (a11 * (r2 - c2) - a21 * (r1 - c1)) / det;

        StatePair trial = x;
        for (std::size_t j = 0; j < n; ++j) {
            trial.u[j] = x.u[j] + (z0[2 * j] - dl1 * z1[2 * j] - dl2 * z2[2 * j]);
            trial.v[j] = x.v[j] + (z0[2 * j + 1] - dl1 * z1[2 * j + 1] - dl2 * z2[2 * j + 1]);
        }
        const double tl1 = l1 + dl1, tl2 = l2 + dl2;
        const double cand = stationarity_norm(trial, tl1, tl2);
        if (std::getenv("NORMSOLVE_TRACE"))
            std::fprintf(stderr, "  newton %d: res %.3e -> %.3e (dl1=%.2e dl2=%.2e)\n",
                         step, best, cand, dl1, dl2);
        if (!(cand < best)) return step > 0;
        x = trial;
        l1 = tl1;
        l2 = tl2;
        best = cand;
        if (best < 1e-13 * (1.0 + std::abs(l1) + std::abs(l2))) break;
    }
    return true;
}

enum class DescentKind { plain, fiber_min, fiber_max };

SolveResult descend(const ProblemParams& p, const SolveConfig& cfg, StatePair x,
                    DescentKind kind, Branch branch, double ball_radius) {
    const bool positive = p.beta >= 0; // negative-coupling exploration keeps signed iterates
    double step = cfg.step > 0 ? cfg.step : 1e-2;

    SolveResult res{x, Diagnostics{}, false, 0, branch, ""};
    // the line search compares values along the fiber-reduced functional
    // (closed form, no resampling); raw energies of off-manifold trials would
    // mask genuine descent near convergence
    auto reduced_value = [&](const EnergyParts& e) {
        if (kind == DescentKind::fiber_max) {
            const FiberCriticalPoints cp = fiber_critical_points(e, p);
            return fiber_map(e, p, cp.t.value());
        }
        if (kind == DescentKind::fiber_min) {
            const FiberCriticalPoints cp = fiber_critical_points(e, p);
            return fiber_map(e, p, cp.s.value());
        }
        try {
            const FiberCriticalPoints cp = fiber_critical_points(e, p);
            if (cp.s) return fiber_map(e, p, *cp.s);
        } catch (const StructureError&) {
        }
        return energy_from_parts(e, p);
    };
    // trials whose branch point has drifted beyond one e-folding would defeat
    // the next resampled projection
    auto trial_reachable = [&](const EnergyParts& e) {
        if (kind == DescentKind::plain) return true;
        const FiberCriticalPoints cp = fiber_critical_points(e, p);
        const std::optional<double>& t = (kind == DescentKind::fiber_min) ? cp.s : cp.t;
        return t && std::abs(*t) < 1.5;
    };
    auto make_diag = [&](const EnergyParts& e, const TangentProjection& tp) {
        Diagnostics d;
        d.kinetic = e.kinetic;
        d.quartic = e.quartic;
        d.cubic_coupling = e.cubic_coupling;
        d.energy = energy_from_parts(e, p);
        d.pohozaev = pohozaev(e, p);
        d.fiber_second = fiber_second(e, p, 0.0);
        d.lambda1 = tp.lambda1;
        d.lambda2 = tp.lambda2;
        d.grad_norm = tp.norm();
        return d;
    };
    auto grad_tol_at = [&](const Diagnostics& d) {
        const double lam = std::max(std::abs(d.lambda1), std::abs(d.lambda2));
        const double au = x.u.max_abs(), av = x.v.max_abs();
        return default_tol_grad(p, cfg, lam, au * au * au + av * av * av);
    };
    auto passes = [&](const Diagnostics& d, double soften) {
        const double grad_tol = soften * grad_tol_at(d);
        bool ok = d.grad_norm < grad_tol;
        ok = ok && std::abs(d.pohozaev) <
                       cfg.tol_pohozaev * std::max(d.kinetic, 1e-300);
        // with projection multipliers the stationary-state identity residual
        // collapses to |P| exactly, so the certificate is one more bound on it
        if (p.N == 2 || p.N == 3)
            ok = ok && std::abs(d.pohozaev) < 10.0 * grad_tol;
        return ok;
    };

    int ball_escapes = 0;
    int last_polish = -100;
    // once the descent is in the basin, the bordered Newton solve finishes the
    // job at machine level, and the final fiber projection restores the
    // Pohozaev certificate; engage when the gradient is small on the scale of
    // the multipliers
    auto try_newton = [&](const Diagnostics& diag, SolveResult* out) {
        StatePair cand = x;
        double a1 = diag.lambda1, a2 = diag.lambda2;
        // alternate polish and projection: the resampling smears residuals of
        // rough iterates, and the next polish smooths them out again
        for (int round = 0; round < 4; ++round) {
            if (!newton_polish(cand, p, a1, a2, 14)) return false;
            if (positive &&
                !(essentially_positive(cand.u) && essentially_positive(cand.v)))
                return false; // drifted toward a sign-changing critical point
            if (kind != DescentKind::plain) {
                try {
                    cand = project_fiber(cand, p, kind == DescentKind::fiber_min);
                } catch (const DilationRangeError&) {
                    return false;
                }
            }
            const EnergyParts ce = energy_parts(cand, p);
            const TangentProjection ct = project_tangent(cand, gradient(cand, p));
            const Diagnostics cd = make_diag(ce, ct);
            if (std::getenv("NORMSOLVE_TRACE"))
                std::fprintf(stderr, "  newton state: grad=%.3e P/kin=%.3e E=%.8e\n",
                             cd.grad_norm, cd.pohozaev / cd.kinetic, cd.energy);
            if (cd.grad_norm < diag.grad_norm) x = cand;
            if (passes(cd, 1.0)) {
                out->state = cand;
                out->diag = cd;
                out->converged = true;
                return true;
            }
            a1 = cd.lambda1;
            a2 = cd.lambda2;
        }
        return false;
    };
    // Polak-Ribiere conjugate directions in the preconditioned metric; plain
    // preconditioned descent crawls along the nearly flat collapse directions
    bool have_prev = false;
    double prev_gPg = 0.0;
    RadialField prev_pu = RadialField::zero(x.grid_ptr());
    RadialField prev_pv = RadialField::zero(x.grid_ptr());
    RadialField dir_u = RadialField::zero(x.grid_ptr());
    RadialField dir_v = RadialField::zero(x.grid_ptr());

    for (int it = 0; it < cfg.max_iters; ++it) {
        res.iterations = it + 1;
        // keep the iterate on its fiber branch; this pins the Pohozaev
        // residual at root-finder level
        if (kind != DescentKind::plain) {
            try {
                x = project_fiber(x, p, kind == DescentKind::fiber_min);
            } catch (const DilationRangeError&) {
                res.note = "fiber projection left the resolvable range";
                break;
            }
        } else {
            try {
                x = project_fiber(x, p, true);
            } catch (const StructureError&) {
                // no fiber minimum at this state; plain steps are fine
            } catch (const DilationRangeError&) {
            }
        }

        if (ball_radius > 0) {
            const double kin = kinetic(x.u) + kinetic(x.v);
            if (std::sqrt(kin) >= ball_radius) {
                ++ball_escapes;
                step *= 0.5; // trust-region shrink on ball escape
                if (ball_escapes > 60) {
                    res.note = "iterates kept escaping the kinetic ball";
                    break;
                }
            }
        }

        const EnergyParts e = energy_parts(x, p);
        const auto g = gradient(x, p);
        const TangentProjection tp = project_tangent(x, g);
        const Diagnostics diag = make_diag(e, tp);
        if (std::getenv("NORMSOLVE_TRACE"))
            std::fprintf(stderr,
                         "  it=%5d kin=%.6e E=%.6e grad=%.3e P/kin=%.2e step=%.2e\n",
                         it, diag.kinetic, diag.energy, diag.grad_norm,
                         diag.pohozaev / std::max(diag.kinetic, 1e-300), step);
        if (passes(diag, 1.0)) {
            res.state = x;
            res.diag = diag;
            res.converged = true;
            return res;
        }
        const double lam_scale =
            1.0 + std::max(std::abs(diag.lambda1), std::abs(diag.lambda2));
        if (diag.grad_norm < 0.1 * lam_scale * (p.b1 + p.b2) &&
            it >= last_polish + 25) {
            last_polish = it;
            if (try_newton(diag, &res)) return res;
        }

        const double shift =
            std::max({std::abs(tp.lambda1), std::abs(tp.lambda2), 1e-6});
        RadialField pu = precondition(tp.gu, shift);
        RadialField pv = precondition(tp.gv, shift);
        const double gPg = inner(tp.gu, pu) + inner(tp.gv, pv);
        double beta_cg = 0.0;
        if (have_prev && prev_gPg > 0) {
            const double num = inner(tp.gu, pu - prev_pu) + inner(tp.gv, pv - prev_pv);
            beta_cg = std::max(0.0, num / prev_gPg);
        }
        dir_u = pu + beta_cg * dir_u;
        dir_v = pv + beta_cg * dir_v;
        double slope = inner(tp.gu, dir_u) + inner(tp.gv, dir_v);
        if (!(slope > 0)) { // restart on a non-descent direction
            dir_u = pu;
            dir_v = pv;
            slope = gPg;
        }
        if (!(slope > 0)) {
            res.state = x;
            res.diag = diag;
            res.note = "degenerate descent direction";
            break;
        }
        prev_pu = pu;
        prev_pv = pv;
        prev_gPg = gPg;
        have_prev = true;

        double value = reduced_value(e);
        bool accepted = false;
        for (int ls = 0; ls < 60 && !accepted; ++ls) {
            StatePair trial = x;
            double tv = 0.0;
            bool usable = true;
            try {
                trial = retract(x, dir_u, dir_v, step, positive);
                const EnergyParts te = energy_parts(trial, p);
                usable = trial_reachable(te);
                if (usable) tv = reduced_value(te);
            } catch (const StructureError&) {
                usable = false;
            } catch (const DilationRangeError&) {
                usable = false;
            }
            if (usable && tv < value - 1e-14 * std::abs(value)) {
                x = trial;
                accepted = true;
                step = std::min(step * 1.6, 64.0);
            } else {
                step *= 0.5;
                have_prev = false; // shrinking steps invalidate the history
            }
        }
        if (!accepted) {
            if (try_newton(diag, &res)) return res;
            res.state = x;
            res.diag = diag;
            res.converged = passes(diag, 10.0);
            res.note = res.converged ? "line search stalled at solver precision"
                                     : "line search stalled";
            return res;
        }
    }
    if (res.note.empty()) res.note = "iteration budget exhausted";
    {
        const Diagnostics d = diagnostics(x, p);
        if (!passes(d, 1.0) && try_newton(d, &res)) return res;
    }
    const Diagnostics d = diagnostics(x, p);
    res.state = x;
    res.diag = d;
    res.converged = res.converged || passes(d, 1.0);
    return res;
}

} // namespace

StatePair initial_gaussian_state(const ProblemParams& p, const GridPtr& grid,
                                 std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> scale(1.0, 4.0);
    const double r = grid->r_max();
    const double base = 25.0 / (r * r); // keeps the boundary value below 1e-9
    const double w1 = base * scale(rng), w2 = base * scale(rng);
    const RadialField gu =
        RadialField::sample(grid, [=](double s) { return std::exp(-w1 * s * s); });
    const RadialField gv =
        RadialField::sample(grid, [=](double s) { return std::exp(-w2 * s * s); });
    return normalize_masses(gu, gv, p.b1, p.b2);
}

namespace {

// gaussian pair whose kinetic term lands near a target value; a gaussian
// e^{-w r^2} normalized to mass b^2 carries kinetic energy N w b^2
StatePair initial_state_with_kinetic(const ProblemParams& p, const GridPtr& grid,
                                     std::uint64_t seed, double kinetic_target) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> jitter(0.7, 1.4);
    const double msum = p.b1 * p.b1 + p.b2 * p.b2;
    const double base = kinetic_target / (double(p.N) * msum);
    const double floor_w = 25.0 / (grid->r_max() * grid->r_max());
    const double w1 = std::max(base * jitter(rng), floor_w);
    const double w2 = std::max(base * jitter(rng), floor_w);
    const RadialField gu =
        RadialField::sample(grid, [=](double s) { return std::exp(-w1 * s * s); });
    const RadialField gv =
        RadialField::sample(grid, [=](double s) { return std::exp(-w2 * s * s); });
    return normalize_masses(gu, gv, p.b1, p.b2);
}

} // namespace

SolveResult solve_global_min(const ProblemParams& p, const GridPtr& grid,
                             const SolveConfig& cfg) {
    p.validate();
    if (grid->dim() != p.N) throw UsageError("solver: grid dimension mismatch");
    const ThresholdReport rep = classify_regime(p, default_constants());
    if (rep.regime != Regime::coercive_1d && rep.regime != Regime::coercive_2d)
        throw RegimeError("global minimization needs a coercive regime (got " +
                          to_string(rep.regime) + ")");
    StatePair x0 = initial_gaussian_state(p, grid, cfg.seed);
    return descend(p, cfg, x0, DescentKind::plain, Branch::global, 0.0);
}

SolveResult solve_local_min(const ProblemParams& p, const GridPtr& grid,
                            const SolveConfig& cfg) {
    p.validate();
    if (grid->dim() != 3 || p.N != 3)
        throw UsageError("local minimization is the 3D ground-state branch");
    if (p.beta < 0) throw RegimeError("beta < 0 refused in 3D");
    const ThresholdReport rep = classify_regime(p, default_constants());
    if (rep.regime != Regime::two_solution_3d)
        throw RegimeError("local minimization needs the two-solution window (got " +
                          to_string(rep.regime) + ")");
    const double ball = cfg.ball_radius > 0 ? cfg.ball_radius : rep.R0.value();
    StatePair x0 = initial_gaussian_state(p, grid, cfg.seed);
    SolveResult res =
        descend(p, cfg, x0, DescentKind::fiber_min, Branch::ground_plus, ball);
    if (res.converged && !(p.beta * res.diag.cubic_coupling > 0)) {
        res.converged = false;
        res.note = "coupling integral lost positivity";
    }
    if (res.converged && res.diag.fiber_second <= 0) {
        res.converged = false;
        res.note = "second fiber derivative not positive";
    }
    return res;
}

SolveResult solve_mountain_pass(const ProblemParams& p, const GridPtr& grid,
                                const SolveConfig& cfg) {
    p.validate();
    if (grid->dim() != p.N) throw UsageError("solver: grid dimension mismatch");
    if (p.beta < 0 && p.N >= 3) throw RegimeError("beta < 0 refused in N >= 3");
    const ThresholdReport rep = classify_regime(p, default_constants());
    if (p.N == 3) {
        if (p.beta > 0 && rep.regime != Regime::two_solution_3d)
            throw RegimeError("mountain pass needs the two-solution window (got " +
                              to_string(rep.regime) + ")");
    } else if (p.N == 4) {
        if (rep.regime != Regime::critical_4d_ok)
            throw RegimeError("mountain pass needs the 4D window (got " +
                              to_string(rep.regime) + ")");
    } else {
        throw UsageError("mountain pass applies in N = 3 or 4");
    }
    // start near the pass scale so the first fiber projection stays resolvable
    double kin_target;
    if (p.N == 3) {
        const double tt = h_t_tilde(p, default_constants());
        kin_target = tt * tt;
    } else {
        const BubbleParams bp = bubble_params(p.mu1, p.mu2, p.rho);
        const double S = default_constants().sobolev_S;
        kin_target = 0.5 * (bp.k1 + bp.k2) * S * S;
    }
    StatePair x0 = initial_state_with_kinetic(p, grid, cfg.seed, kin_target);
    SolveResult res =
        descend(p, cfg, x0, DescentKind::fiber_max, Branch::excited_minus, 0.0);
    if (res.converged && res.diag.fiber_second >= 0) {
        res.converged = false;
        res.note = "second fiber derivative not negative";
    }
    return res;
}

double estimate_constant_A(const ProblemParams& p, const GridPtr& grid,
                           const SolveConfig& cfg) {
    p.validate();
    if (p.N != 2 || grid->dim() != 2)
        throw UsageError("the quotient constant is a 2D object");
    StatePair x = initial_gaussian_state(p, grid, cfg.seed);
    ProblemParams q = p;
    q.beta = 0.0;

    auto quotient = [&](const StatePair& s, EnergyParts* parts) {
        const EnergyParts e = energy_parts(s, q);
        if (parts) *parts = e;
        return e.kinetic / e.quartic;
    };

    double step = 0.5;
    EnergyParts e;
    double value = quotient(x, &e);
    int stagnant = 0;
    for (int it = 0; it < cfg.max_iters; ++it) {
        const RadialField lap_u = laplacian_variational(x.u);
        const RadialField lap_v = laplacian_variational(x.v);
        std::vector<double> gu(x.u.size()), gv(x.v.size());
        const double kin = e.kinetic, quart = e.quartic;
        for (std::size_t j = 0; j < gu.size(); ++j) {
            const double u = x.u[j], v = x.v[j];
            const double dq_u = 4.0 * (p.mu1 * u * u * u + p.rho * v * v * u);
            const double dq_v = 4.0 * (p.mu2 * v * v * v + p.rho * u * u * v);
            gu[j] = (-2.0 * lap_u[j] * quart - kin * dq_u) / (quart * quart);
            gv[j] = (-2.0 * lap_v[j] * quart - kin * dq_v) / (quart * quart);
        }
        const TangentProjection tp =
            project_tangent(x, {RadialField(x.grid_ptr(), std::move(gu)),
                                RadialField(x.grid_ptr(), std::move(gv))});
        if (tp.norm() < 1e-10 * std::max(value, 1.0)) break;
        RadialField du = precondition(tp.gu);
        RadialField dv = precondition(tp.gv);
        bool accepted = false;
        for (int ls = 0; ls < 40 && !accepted; ++ls) {
            const StatePair trial = retract(x, du, dv, step, true);
            const double tv = quotient(trial, nullptr);
            if (tv < value * (1.0 - 1e-13)) {
                stagnant = (value - tv < 1e-9 * value) ? stagnant + 1 : 0;
                x = trial;
                value = quotient(x, &e);
                accepted = true;
                step = std::min(step * 1.4, 4.0);
            } else {
                step *= 0.5;
            }
        }
        if (!accepted || stagnant > 50) break;
    }
    return value;
}

SolveResult solve(const ProblemParams& p, const GridPtr& grid, const SolveConfig& cfg) {
    switch (cfg.mode) {
        case SolveMode::global_min: return solve_global_min(p, grid, cfg);
        case SolveMode::local_min: return solve_local_min(p, grid, cfg);
        case SolveMode::mountain_pass: return solve_mountain_pass(p, grid, cfg);
        case SolveMode::rayleigh_quotient_A: {
            SolveResult r{initial_gaussian_state(p, grid, cfg.seed), Diagnostics{},
                          true, 0, Branch::quotient, "quotient value in diag.energy"};
            r.diag.energy = estimate_constant_A(p, grid, cfg);
            return r;
        }
    }
    throw UsageError("solver: unknown mode");
}

namespace {

// scalar counterpart of newton_polish: tridiagonal rows plus one multiplier
// border for -Delta v + lambda v = mu v^3 with the mass pinned
bool scalar_newton_polish(RadialField& v, double mu, double b, double& lambda,
                          int max_steps) {
    const auto& grid = v.grid();
    const auto& w = grid.weights();
    const auto& cface = grid.face_coeff();
    const std::size_t n = v.size();

    auto residual_norm = [&](const RadialField& f, double lam) {
        const RadialField lap = laplacian_variational(f);
        double acc = 0.0;
        for (std::size_t j = 0; j + 1 < n; ++j) {
            const double r = -lap[j] + lam * f[j] - mu * f[j] * f[j] * f[j];
            acc += w[j] * r * r;
        }
        return std::sqrt(acc);
    };

    double best = residual_norm(v, lambda);
    for (int step = 0; step < max_steps; ++step) {
        const RadialField lap = laplacian_variational(v);
        std::vector<double> dl(n, 0.0), d(n, 0.0), du(n, 0.0);
        std::vector<double> r0(n), bcol(n);
        for (std::size_t j = 0; j < n; ++j) {
            d[j] = w[j] * (lambda - 3.0 * mu * v[j] * v[j]);
            r0[j] = -w[j] * (-lap[j] + lambda * v[j] - mu * v[j] * v[j] * v[j]);
            bcol[j] = w[j] * v[j];
        }
        for (std::size_t k = 0; k + 1 < n; ++k) {
            d[k] += cface[k];
            d[k + 1] += cface[k];
            dl[k + 1] -= cface[k];
            du[k] -= cface[k];
        }
        d[n - 1] = 1.0;
        dl[n - 1] = 0.0;
        du[n - 2 + 1] = 0.0;
        r0[n - 1] = 0.0;
        bcol[n - 1] = 0.0;

        auto solve = [&](std::vector<double> rhs) {
            std::vector<double> dd = d, uu = du;
            for (std::size_t j = 1; j < n; ++j) {
                const double m = dl[j] / dd[j - 1];
                dd[j] -= m * uu[j - 1];
                rhs[j] -= m * rhs[j - 1];
            }
            std::vector<double> out(n);
            out[n - 1] = rhs[n - 1] / dd[n - 1];
            for (std::size_t j = n - 1; j-- > 0;)
                out[j] = (rhs[j] - uu[j] * out[j + 1]) / dd[j];
            return out;
        };
        const std::vector<double> z0 = solve(r0);
        const std::vector<double> z1 = solve(bcol);
        double a11 = 0, rr = 0;
        for (std::size_t j = 0; j < n; ++j) {
            a11 += bcol[j] * z1[j];
            rr += bcol[j] * z0[j];
        }
        if (!(std::abs(a11) > 1e-300)) return false;
        const double c1 = -0.5 * (mass_sq(v) - b * b);
        const double dlam = (rr - c1) / a11;

        RadialField trial = v;
        for (std::size_t j = 0; j < n; ++j)
            trial[j] = v[j] + (z0[j] - dlam * z1[j]);
        const double tl = lambda + dlam;
        const double cand = residual_norm(trial, tl);
        if (!(cand < best)) return step > 0;
        v = trial;
        lambda = tl;
        best = cand;
        if (best < 1e-12 * (1.0 + std::abs(lambda))) break;
    }
    return true;
}

} // namespace

ScalarMountainPass scalar_mountain_pass(double mu, double b, const GridPtr& grid,
                                        const SolveConfig& cfg) {
    if (grid->dim() != 3) throw UsageError("scalar mountain pass is a 3D helper");
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> scale(1.0, 3.0);
    const double w0 = 25.0 / (grid->r_max() * grid->r_max()) * scale(rng);
    RadialField v =
        RadialField::sample(grid, [=](double r) { return std::exp(-w0 * r * r); });
    v = std::sqrt(b * b / mass_sq(v)) * v;
    auto tol_at = [&](double lam) {
        return cfg.tol_grad > 0 ? cfg.tol_grad : 1e-4 * b * (1.0 + std::abs(lam));
    };

    auto tangential = [&](const RadialField& f, double* lambda) {
        const RadialField lap = laplacian_variational(f);
        std::vector<double> g(f.size());
        for (std::size_t j = 0; j < f.size(); ++j)
            g[j] = -lap[j] - mu * f[j] * f[j] * f[j];
        RadialField grad(f.grid_ptr(), std::move(g));
        const double l = -inner(grad, f) / (b * b);
        if (lambda) *lambda = l;
        return grad + l * f;
    };
    // fiber max of Psi(t) = e^{2t} kin / 2 - e^{3t} mu l4 / 4 sits at
    // e^t = 4 kin / (3 mu l4); staged so no resampling crosses an e-folding
    auto project = [&](RadialField f) {
        for (int stage = 0; stage < 60; ++stage) {
            const double kin = kinetic(f);
            const double ml4 = mu * lp_norm_p(f, 4);
            const double t = std::log(4.0 * kin / (3.0 * ml4));
            if (std::abs(t) < 1e-14) break;
            RadialField out = dilate(f, std::clamp(t, -1.0, 1.0), 1e-3);
            f = std::sqrt(b * b / mass_sq(out)) * out;
            if (std::abs(t) <= 1.0) break;
        }
        return f;
    };
    auto level_of = [&](const RadialField& f) {
        const double kin = kinetic(f);
        const double ml4 = mu * lp_norm_p(f, 4);
        const double X = 4.0 * kin / (3.0 * ml4);
        return 0.5 * X * X * kin - 0.25 * X * X * X * ml4;
    };

    ScalarMountainPass out{v, 0.0, 0.0, false};
    double step = 0.5;
    double value = level_of(v);
    int stagnant = 0;
    for (int it = 0; it < cfg.max_iters; ++it) {
        v = project(v);
        double lambda = 0.0;
        const RadialField grad = tangential(v, &lambda);
        const double gn = std::sqrt(mass_sq(grad));
        if (gn < 2.0 * (1.0 + std::abs(lambda)) * b) {
            RadialField cand = v;
            double lam = lambda;
            if (scalar_newton_polish(cand, mu, b, lam, 14) &&
                essentially_positive(cand)) {
                const double kin4 = kinetic(cand);
                const double ml4 = mu * lp_norm_p(cand, 4);
                const double tstar = std::log(4.0 * kin4 / (3.0 * ml4));
                if (std::abs(tstar) < 1.0) {
                    out.v = project(cand);
                    out.level = 0.5 * kinetic(out.v) - 0.25 * mu * lp_norm_p(out.v, 4);
                    double lam2 = 0.0;
                    tangential(out.v, &lam2);
                    out.lambda = lam2;
                    out.converged = true;
                    return out;
                }
            }
        }
        if (gn < tol_at(lambda)) {
            out.v = v;
            out.level = 0.5 * kinetic(v) - 0.25 * mu * lp_norm_p(v, 4);
            out.lambda = lambda;
            out.converged = true;
            return out;
        }
        const RadialField d = precondition(grad);
        bool accepted = false;
        for (int ls = 0; ls < 40 && !accepted; ++ls) {
            RadialField trial = abs_field(v - step * d);
            trial = std::sqrt(b * b / mass_sq(trial)) * trial;
            const double tv = level_of(trial);
            if (tv < value - 1e-14 * std::abs(value)) {
                stagnant = (value - tv < 1e-10 * std::abs(value)) ? stagnant + 1 : 0;
                v = trial;
                value = tv;
                accepted = true;
                step = std::min(step * 1.4, 2.0);
            } else {
                step *= 0.5;
            }
        }
        if (!accepted || stagnant > 100) break;
    }
    out.v = v;
    out.level = 0.5 * kinetic(v) - 0.25 * mu * lp_norm_p(v, 4);
    tangential(v, &out.lambda);
    return out;
}

ScalarMountainPass scalar_mountain_pass(double mu, double b, const SolveConfig& cfg) {
    const ScalarGroundState& q3 = scalar_ground_state(3, 3);
    const double lambda = std::pow(q3.l2_sq / (mu * b * b), 2);
    const double r_max = 22.0 / std::sqrt(lambda);
    auto grid = build_radial_grid(3, r_max, 2048, Spacing::uniform);
    return scalar_mountain_pass(mu, b, grid, cfg);
}

double scalar_mountain_pass_level_reference(double mu, double b) {
    // v = sqrt(lambda/mu) Q(sqrt(lambda) x) carries mass b^2 when
    // lambda = (||Q||^2 / (mu b^2))^2; at the solution the level is kin/6.
    const ScalarGroundState& q3 = scalar_ground_state(3, 3);
    const double lambda = std::pow(q3.l2_sq / (mu * b * b), 2);
    return std::sqrt(lambda) * q3.kinetic / (6.0 * mu);
}

} // namespace normsolve
