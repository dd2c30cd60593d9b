#include "normsolve/functional.hpp"
#include "normsolve/constants.hpp"

#include <cmath>

namespace normsolve {

EnergyParts energy_parts(const StatePair& s, const ProblemParams& p) {
    require_same_grid(s.u, s.v);
    const auto& w = s.grid().weights();
    EnergyParts e;
    e.kinetic = kinetic(s.u) + kinetic(s.v);
    double quart = 0.0, cubic = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) {
        const double uu = s.u[j] * s.u[j], vv = s.v[j] * s.v[j];
        quart += w[j] * (p.mu1 * uu * uu + p.mu2 * vv * vv + 2.0 * p.rho * uu * vv);
        cubic += w[j] * uu * s.v[j];
    }
    e.quartic = quart;
    e.cubic_coupling = cubic;
    return e;
}

double energy_from_parts(const EnergyParts& e, const ProblemParams& p) {
    return 0.5 * e.kinetic - 0.25 * e.quartic - 0.5 * p.beta * e.cubic_coupling;
}

double energy(const StatePair& s, const ProblemParams& p) {
    return energy_from_parts(energy_parts(s, p), p);
}

std::pair<RadialField, RadialField> gradient(const StatePair& s, const ProblemParams& p) {
    const RadialField lap_u = laplacian_variational(s.u);
    const RadialField lap_v = laplacian_variational(s.v);
    std::vector<double> gu(s.u.size()), gv(s.v.size());
    for (std::size_t j = 0; j < gu.size(); ++j) {
        const double u = s.u[j], v = s.v[j];
        gu[j] = -lap_u[j] - p.beta * u * v - p.mu1 * u * u * u - p.rho * v * v * u;
        gv[j] = -lap_v[j] - 0.5 * p.beta * u * u - p.mu2 * v * v * v - p.rho * u * u * v;
    }
    return {RadialField(s.grid_ptr(), std::move(gu)),
            RadialField(s.grid_ptr(), std::move(gv))};
}

double TangentProjection::norm() const {
    return std::sqrt(mass_sq(gu) + mass_sq(gv));
}

TangentProjection project_tangent(const StatePair& s,
                                  const std::pair<RadialField, RadialField>& g) {
    const double l1 = -inner(g.first, s.u) / (s.b1 * s.b1);
    const double l2 = -inner(g.second, s.v) / (s.b2 * s.b2);
    TangentProjection t{g.first + l1 * s.u, g.second + l2 * s.v, l1, l2};
    // the truncation node is a Dirichlet constraint, not a degree of freedom
    t.gu[t.gu.size() - 1] = 0.0;
    t.gv[t.gv.size() - 1] = 0.0;
    return t;
}

double pohozaev(const EnergyParts& e, const ProblemParams& p) {
    const double N = p.N;
    return e.kinetic - 0.25 * N * e.quartic - 0.25 * N * p.beta * e.cubic_coupling;
}

double pohozaev(const StatePair& s, const ProblemParams& p) {
    return pohozaev(energy_parts(s, p), p);
}

double multiplier_identity_residual(const EnergyParts& e, const ProblemParams& p,
                                    double l1, double l2) {
    double rhs;
    if (p.N == 3)
        rhs = 0.25 * e.quartic + 0.75 * p.beta * e.cubic_coupling;
    else if (p.N == 2)
        rhs = 0.5 * e.quartic + p.beta * e.cubic_coupling;
    else
        throw DomainError("multiplier identity: only N = 2, 3 supported");
    return std::abs(l1 * p.b1 * p.b1 + l2 * p.b2 * p.b2 - rhs);
}

double multiplier_identity_residual(const StatePair& s, const ProblemParams& p,
                                    double l1, double l2) {
    return multiplier_identity_residual(energy_parts(s, p), p, l1, l2);
}

double fiber_map(const EnergyParts& e, const ProblemParams& p, double t) {
    const double N = p.N;
    return 0.5 * std::exp(2.0 * t) * e.kinetic - 0.25 * std::exp(N * t) * e.quartic -
           0.5 * p.beta * std::exp(0.5 * N * t) * e.cubic_coupling;
}

double fiber_map(const StatePair& s, const ProblemParams& p, double t) {
    return fiber_map(energy_parts(s, p), p, t);
}

double fiber_deriv(const EnergyParts& e, const ProblemParams& p, double t) {
    const double N = p.N;
    return std::exp(2.0 * t) * e.kinetic - 0.25 * N * std::exp(N * t) * e.quartic -
           0.25 * N * p.beta * std::exp(0.5 * N * t) * e.cubic_coupling;
}

double fiber_second(const EnergyParts& e, const ProblemParams& p, double t) {
    const double N = p.N;
    return 2.0 * std::exp(2.0 * t) * e.kinetic -
           0.25 * N * N * std::exp(N * t) * e.quartic -
           0.125 * N * N * p.beta * std::exp(0.5 * N * t) * e.cubic_coupling;
}

namespace {

// Roots of c3 x^3 + c1 x + c0 on (0, inf). Bisection bracketed around the
// interior extremum, then Newton.
std::vector<double> positive_cubic_roots(double c3, double c1, double c0) {
    std::vector<double> roots;
    auto f = [&](double x) { return c3 * x * x * x + c1 * x + c0; };
    auto fp = [&](double x) { return 3.0 * c3 * x * x + c1; };
    auto polish = [&](double x) {
        for (int it = 0; it < 60; ++it) {
            const double step = f(x) / fp(x);
            if (!std::isfinite(step)) break;
            x -= step;
            if (std::abs(step) < 1e-15 * std::max(1.0, std::abs(x))) break;
        }
        return x;
    };
    auto bisect = [&](double lo, double hi) {
        const double flo = f(lo);
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            if ((f(mid) > 0) == (flo > 0)) lo = mid;
            else hi = mid;
            if (hi - lo < 1e-14 * hi) break;
        }
        return polish(0.5 * (lo + hi));
    };

    if (c3 == 0.0) {
        if (c1 != 0.0) {
            const double x = -c0 / c1;
            if (x > 0) roots.push_back(x);
        }
        return roots;
    }
    if (c3 > 0.0) {
        // increasing tail; one positive root when f starts nonpositive
        if (c0 < 0) {
            double hi = 1.0;
            while (f(hi) < 0) hi *= 2.0;
            roots.push_back(bisect(hi > 1.0 ? hi / 2.0 : 1e-300, hi));
        } else if (c0 == 0.0 && c1 < 0) {
            roots.push_back(std::sqrt(-c1 / c3));
        }
        return roots;
    }
    if (!(c1 > 0)) {
        // monotone decreasing on (0, inf)
        if (c0 > 0) {
            double hi = 1.0;
            while (f(hi) > 0) hi *= 2.0;
            roots.push_back(bisect(hi / 2.0, hi));
        }
        return roots;
    }
    const double xm = std::sqrt(-c1 / (3.0 * c3)); // interior maximum
    const double fm = f(xm);
    if (c0 >= 0) {
        // single root past the maximum
        double hi = 2.0 * xm;
        while (f(hi) > 0) hi *= 2.0;
        roots.push_back(bisect(xm, hi));
        return roots;
    }
    if (fm <= 0) return roots; // no positive roots
    roots.push_back(bisect(1e-300, xm));
    double hi = 2.0 * xm;
    while (f(hi) > 0) hi *= 2.0;
    roots.push_back(bisect(xm, hi));
    return roots;
}

} // namespace

FiberCriticalPoints fiber_critical_points(const EnergyParts& e, const ProblemParams& p) {
    FiberCriticalPoints out;
    const double bc = p.beta * e.cubic_coupling;

    if (p.N == 3) {
        // tau = e^{t/2}: Psi'(t) = tau^3 (kin tau - (3/4) q tau^3 - (3/4) beta c)
        auto crit = positive_cubic_roots(-0.75 * e.quartic, e.kinetic, -0.75 * bc);
        if (bc > 0) {
            if (e.quartic > 0 && crit.size() < 2)
                throw StructureError("fiber: no two-root structure at this state");
            if (!crit.empty()) out.s = 2.0 * std::log(crit.front());
            if (crit.size() >= 2) out.t = 2.0 * std::log(crit.back());
        } else {
            // beta <= 0 (or no coupling): the fiber has at most one maximum
            if (crit.empty())
                throw StructureError("fiber: no critical point at this state");
            out.t = 2.0 * std::log(crit.back());
        }
        auto zeros = positive_cubic_roots(-0.25 * e.quartic, 0.5 * e.kinetic, -0.5 * bc);
        if (bc > 0) {
            if (!zeros.empty()) out.zero_lo = 2.0 * std::log(zeros.front());
            if (zeros.size() >= 2) out.zero_hi = 2.0 * std::log(zeros.back());
        } else if (!zeros.empty()) {
            out.zero_hi = 2.0 * std::log(zeros.back());
        }
        return out;
    }
    if (p.N == 4) {
        const double head = e.kinetic - bc;
        if (!(head > 0) || !(e.quartic > 0))
            throw StructureError("fiber: 4D positivity condition fails");
        out.t = 0.5 * std::log(head / e.quartic);
        out.zero_hi = *out.t + 0.5 * std::log(2.0);
        return out;
    }
    if (p.N == 2) {
        const double head = e.kinetic - 0.5 * e.quartic;
        if (head > 0 && bc > 0) {
            out.s = std::log(0.5 * bc / head);
            return out;
        }
        if (head < 0 && bc < 0) {
            out.t = std::log(0.5 * bc / head);
            return out;
        }
        throw StructureError("fiber: no critical point in 2D for this state");
    }
    if (p.N == 1) {
        // tau = e^{t/2}: Psi'(t) = tau (kin tau^3 - (q/4) tau - beta c / 4)
        auto crit = positive_cubic_roots(e.kinetic, -0.25 * e.quartic, -0.25 * bc);
        if (crit.empty())
            throw StructureError("fiber: no critical point in 1D for this state");
        out.s = 2.0 * std::log(crit.front());
        return out;
    }
    throw DomainError("fiber: N must be 1..4");
}

FiberCriticalPoints fiber_critical_points(const StatePair& s, const ProblemParams& p) {
    return fiber_critical_points(energy_parts(s, p), p);
}

Diagnostics diagnostics(const StatePair& s, const ProblemParams& p) {
    const EnergyParts e = energy_parts(s, p);
    Diagnostics d;
    d.kinetic = e.kinetic;
    d.quartic = e.quartic;
    d.cubic_coupling = e.cubic_coupling;
    d.energy = energy_from_parts(e, p);
    d.pohozaev = pohozaev(e, p);
    d.fiber_second = fiber_second(e, p, 0.0);
    const TangentProjection t = project_tangent(s, gradient(s, p));
    d.lambda1 = t.lambda1;
    d.lambda2 = t.lambda2;
    d.grad_norm = t.norm();
    return d;
}

} // namespace normsolve
