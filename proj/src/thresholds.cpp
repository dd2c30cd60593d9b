#include "normsolve/thresholds.hpp"

#include <cmath>

namespace normsolve {

std::string to_string(Regime r) {
    switch (r) {
        case Regime::coercive_1d: return "coercive_1d";
        case Regime::coercive_2d: return "coercive_2d";
        case Regime::unbounded_2d: return "unbounded_2d";
        case Regime::indeterminate_2d: return "indeterminate_2d";
        case Regime::two_solution_3d: return "two_solution_3d";
        case Regime::outside_3d_window: return "outside_3d_window";
        case Regime::critical_4d_ok: return "critical_4d_ok";
        case Regime::outside_4d_window: return "outside_4d_window";
        case Regime::nonexistence_beta_negative: return "nonexistence_beta_negative";
    }
    return "unknown";
}

namespace {

struct Coeff3d {
    double cubic;   // (D1 + D2 + rho D3) = C34^4 (mu1 b1 + mu2 b2 + rho sqrt(b1 b2))
    double half_pow; // D4 = (2/3 b1^{3/2} + 1/3 b2^{3/2}) C33^3
};

Coeff3d coeff_3d(const ProblemParams& p, const ConstantsTable& c) {
    const double C34 = c.gn_at(3, 4), C33 = c.gn_at(3, 3);
    Coeff3d k;
    k.cubic = std::pow(C34, 4) *
              (p.mu1 * p.b1 + p.mu2 * p.b2 + p.rho * std::sqrt(p.b1 * p.b2));
    k.half_pow = (2.0 / 3.0 * std::pow(p.b1, 1.5) + 1.0 / 3.0 * std::pow(p.b2, 1.5)) *
                 std::pow(C33, 3);
    return k;
}

} // namespace

double h_eval(double t, const ProblemParams& p, const ConstantsTable& c) {
    if (p.N != 3) throw DomainError("h_eval: 3D envelope only");
    const Coeff3d k = coeff_3d(p, c);
    return 0.5 * t * t - 0.25 * k.cubic * t * t * t -
           0.5 * std::abs(p.beta) * k.half_pow * std::pow(t, 1.5);
}

double h_t_tilde(const ProblemParams& p, const ConstantsTable& c) {
    return 2.0 / (3.0 * coeff_3d(p, c).cubic);
}

double condition_3d_lhs(const ProblemParams& p, const ConstantsTable& c) {
    const double C34 = c.gn_at(3, 4), C33 = c.gn_at(3, 3);
    return p.beta * (2.0 * std::pow(p.b1, 1.5) + std::pow(p.b2, 1.5)) *
           std::pow(C33, 3) * C34 * C34 *
           std::sqrt(p.mu1 * p.b1 + p.mu2 * p.b2 + p.rho * std::sqrt(p.b1 * p.b2));
}

std::pair<double, double> solve_R0_R1(const ProblemParams& p, const ConstantsTable& c) {
    if (p.N != 3) throw DomainError("solve_R0_R1: 3D only");
    const Coeff3d k = coeff_3d(p, c);
    const double bar = 0.5 * std::abs(p.beta) * k.half_pow;
    // g(t) = sqrt(t)/2 - k.cubic t^{3/2}/4 - bar has the same positive zeros as h
    auto g = [&](double t) {
        return 0.5 * std::sqrt(t) - 0.25 * k.cubic * std::pow(t, 1.5) - bar;
    };
    const double tt = h_t_tilde(p, c);
    if (!(g(tt) > 0)) {
        const double lhs = condition_3d_lhs(p, c), rhs = 2.0 * std::sqrt(6.0) / 3.0;
        throw RegimeError("no positive window: condition value " + std::to_string(lhs) +
                          " vs bound " + std::to_string(rhs));
    }
    auto bisect = [&](double lo, double hi) {
        const bool rising = g(lo) < 0;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            const bool below = g(mid) < 0;
            if (below == rising) lo = mid;
            else hi = mid;
            if (hi - lo < 1e-15 * std::max(hi, 1e-30)) break;
        }
        return 0.5 * (lo + hi);
    };
    double lo = tt;
    while (g(lo) > 0) lo *= 0.5;
    const double R0 = bisect(lo, tt);
    double hi = 2.0 * tt;
    while (g(hi) > 0) hi *= 2.0;
    const double R1 = bisect(tt, hi);
    return {R0, R1};
}

std::pair<double, double> constant_A_bracket(const ProblemParams& p,
                                             const ConstantsTable& c) {
    const double q2 = c.q_mass_sq;
    const double lower =
        q2 / (2.0 * std::max((p.mu1 + p.rho) * p.b1 * p.b1,
                             (p.mu2 + p.rho) * p.b2 * p.b2));
    const double upper =
        0.5 * (p.b1 * p.b1 + p.b2 * p.b2) * q2 /
        (p.mu1 * std::pow(p.b1, 4) + p.mu2 * std::pow(p.b2, 4) +
         2.0 * p.rho * p.b1 * p.b1 * p.b2 * p.b2);
    return {lower, upper};
}

ThresholdReport classify_regime(const ProblemParams& p, const ConstantsTable& c) {
    p.validate();
    ThresholdReport rep;
    switch (p.N) {
        case 1: {
            rep.regime = Regime::coercive_1d;
            rep.condition_lhs = 0.0;
            rep.condition_rhs = 0.0;
            rep.notes = (p.beta > 0)
                            ? "energy bounded below on the mass spheres; global minimum negative"
                            : "coercive; minimizer theory stated for beta > 0";
            return rep;
        }
        case 2: {
            const double q2 = c.q_mass_sq;
            const double coercive_lhs = std::max((p.mu1 + p.rho) * p.b1 * p.b1,
                                                 (p.mu2 + p.rho) * p.b2 * p.b2);
            const double unbounded_lhs =
                (p.mu1 * std::pow(p.b1, 4) + p.mu2 * std::pow(p.b2, 4) +
                 2.0 * p.rho * p.b1 * p.b1 * p.b2 * p.b2) /
                (p.b1 * p.b1 + p.b2 * p.b2);
            rep.condition_rhs = q2;
            auto [lo, hi] = constant_A_bracket(p, c);
            rep.A_lower = lo;
            rep.A_upper = hi;
            if (coercive_lhs < q2) {
                rep.regime = Regime::coercive_2d;
                rep.condition_lhs = coercive_lhs;
                rep.notes = (p.beta < 0)
                                ? "coercive; no positive solutions for beta < 0"
                                : "coercive; global minimizer at negative level";
            } else if (unbounded_lhs > q2) {
                rep.regime = Regime::unbounded_2d;
                rep.condition_lhs = unbounded_lhs;
                rep.notes = "energy unbounded below on the mass spheres";
            } else {
                rep.regime = Regime::indeterminate_2d;
                rep.condition_lhs = coercive_lhs;
                rep.notes = "middle band: coercivity test " + std::to_string(coercive_lhs) +
                            ", unboundedness test " + std::to_string(unbounded_lhs) +
                            ", both against " + std::to_string(q2);
            }
            return rep;
        }
        case 3: {
            rep.condition_lhs = condition_3d_lhs(p, c);
            rep.condition_rhs = 2.0 * std::sqrt(6.0) / 3.0;
            if (p.beta > 0 && rep.condition_lhs < rep.condition_rhs) {
                rep.regime = Regime::two_solution_3d;
                auto [R0, R1] = solve_R0_R1(p, c);
                rep.R0 = R0;
                rep.R1 = R1;
                rep.notes = "ground state below zero inside the kinetic ball, excited state above";
            } else {
                rep.regime = Regime::outside_3d_window;
                rep.notes = (p.beta <= 0)
                                ? "two-solution window requires beta > 0"
                                : "smallness condition violated";
            }
            return rep;
        }
        case 4: {
            if (p.beta < 0) {
                rep.regime = Regime::nonexistence_beta_negative;
                rep.notes = "no positive solution for beta < 0 in dimension 4";
                return rep;
            }
            const double C43 = std::abs(c.gn_at(4, 3));
            const double lhs1 = 2.0 * p.beta * p.b1 * std::pow(C43, 3) / 3.0;
            const double lhs2 = p.beta * p.b2 * std::pow(C43, 3) / 3.0;
            rep.condition_lhs = std::max(lhs1, lhs2);
            rep.condition_rhs = 1.0;
            const double lo = std::min(p.mu1, p.mu2), hi = std::max(p.mu1, p.mu2);
            const bool rho_ok = (p.rho < lo) || (p.rho > hi);
            if (p.beta > 0 && rep.condition_lhs < 1.0 && rho_ok) {
                rep.regime = Regime::critical_4d_ok;
                rep.notes = "mass window and coupling range admit a ground state";
            } else {
                rep.regime = Regime::outside_4d_window;
                rep.notes = rho_ok ? "mass window violated"
                                   : "rho inside [min(mu), max(mu)] excluded";
            }
            return rep;
        }
    }
    throw DomainError("classify_regime: N out of range");
}

WindowPosition check_3d_window_membership(const StatePair& s, const ProblemParams& p,
                                          const ConstantsTable& c) {
    auto [R0, R1] = solve_R0_R1(p, c);
    const double t = std::sqrt(kinetic(s.u) + kinetic(s.v));
    if (t < R0) return WindowPosition::inside_ball;
    if (t <= R1) return WindowPosition::annulus;
    return WindowPosition::outside;
}

} // namespace normsolve
