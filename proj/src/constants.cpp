#include "normsolve/constants.hpp"
#include "normsolve/profiles.hpp"

#include <cmath>
#include <mutex>

namespace normsolve {

double gamma_p(int N, int p) {
    if (p <= 2) throw DomainError("gamma_p: need p > 2");
    return double(N) * (p - 2) / (2.0 * p);
}

namespace {

bool supercritical(int N, int p) {
    if (N <= 2) return false;
    // p = 2N/(N-2) is the critical exponent
    return double(p) * (N - 2) > 2.0 * N;
}

double sobolev_constant_4d() {
    // S^2 = int |grad U_1|^2 over R^4, evaluated on a grid plus the
    // closed-form tail of the bubble.
    auto grid = build_radial_grid(4, 40.0, 4096, Spacing::uniform);
    const double ksq =
        bubble_grad_sq_truncated(1.0, grid) + bubble_tail_grad_sq(1.0, grid->r_max());
    return std::sqrt(ksq);
}

} // namespace

double gn_constant(int N, int p) {
    if (p <= 2) throw DomainError("gn_constant: need p > 2");
    if (supercritical(N, p)) throw DomainError("gn_constant: supercritical (N, p)");
    if (N == 4 && p == 4) return 1.0 / std::sqrt(default_constants().sobolev_S);

    const ScalarGroundState& g = scalar_ground_state(N, p - 1);
    const double gp = gamma_p(N, p);
    double lp;
    if (p == 3) lp = g.l3;
    else if (p == 4) lp = g.l4;
    else if (p == g.p + 1) lp = g.lp1;
    else throw DomainError("gn_constant: unsupported p");
    const double norm_p = std::pow(lp, 1.0 / p);
    return norm_p / (std::pow(g.kinetic, 0.5 * gp) * std::pow(g.l2_sq, 0.5 * (1.0 - gp)));
}

double ConstantsTable::gn_at(int N, int p) const {
    auto it = gn.find({N, p});
    if (it == gn.end()) throw DomainError("constants: missing GN entry");
    return it->second;
}

const ConstantsTable& default_constants() {
    static ConstantsTable table;
    static std::once_flag once;
    std::call_once(once, [] {
        table.sobolev_S = sobolev_constant_4d();

        const ScalarGroundState& q2 = scalar_ground_state(2, 3); // planar Q
        const ScalarGroundState& w3 = scalar_ground_state(3, 2); // 3D quadratic w
        table.q_mass_sq = q2.l2_sq;
        table.w_mass_sq = w3.l2_sq;
        table.w_kinetic = w3.kinetic;

        const std::pair<int, int> pairs[] = {{2, 3}, {2, 4}, {3, 3}, {3, 4}, {4, 3}};
        for (auto [N, p] : pairs) {
            table.gn[{N, p}] = gn_constant(N, p);
            table.gamma[{N, p}] = gamma_p(N, p);
        }
        table.gn[{4, 4}] = 1.0 / std::sqrt(table.sobolev_S);
        table.gamma[{4, 4}] = gamma_p(4, 4);
    });
    return table;
}

} // namespace normsolve
