#include "normsolve/profiles.hpp"
#include "normsolve/constants.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

namespace normsolve {

namespace {

constexpr double kPi = std::numbers::pi;

struct OdeState {
    double u, du;
};

// u'' = u - u^p - (N-1)/r u'
OdeState rhs(int N, int p, double r, const OdeState& s) {
    double upow = (s.u >= 0) ? std::pow(s.u, p) : -std::pow(-s.u, p);
    double ddu = s.u - upow;
    if (r > 0) ddu -= double(N - 1) / r * s.du;
    else ddu /= double(N); // L'Hopital at the origin, u'(0) = 0
    return {s.du, ddu};
}

OdeState rk4_step(int N, int p, double r, const OdeState& s, double h) {
    auto k1 = rhs(N, p, r, s);
    auto k2 = rhs(N, p, r + h / 2, {s.u + h / 2 * k1.u, s.du + h / 2 * k1.du});
    auto k3 = rhs(N, p, r + h / 2, {s.u + h / 2 * k2.u, s.du + h / 2 * k2.du});
    auto k4 = rhs(N, p, r + h, {s.u + h * k3.u, s.du + h * k3.du});
    return {s.u + h / 6 * (k1.u + 2 * k2.u + 2 * k3.u + k4.u),
            s.du + h / 6 * (k1.du + 2 * k2.du + 2 * k3.du + k4.du)};
}

constexpr double kSpan = 60.0;
constexpr int kSteps = 120000;

} // namespace

int shoot_classify(int N, int p, double amplitude) {
    const double h = kSpan / kSteps;
    OdeState s{amplitude, 0.0};
    for (int i = 0; i < kSteps; ++i) {
        const double r = h * i;
        s = rk4_step(N, p, r, s, h);
        if (s.u <= 0) return +1;                       // overshoot: crossed zero
        if (s.u < 1.0 && s.du > 0) return -1;          // undershoot: turned back up
        if (s.u > 2 * amplitude) return -1;            // ran away upward
    }
    return (s.du > 0) ? -1 : +1;
}

double find_ground_amplitude(int N, int p, double a_lo, double a_hi) {
    if (shoot_classify(N, p, a_lo) >= 0 || shoot_classify(N, p, a_hi) <= 0)
        throw ProfileSolveError("shooting bracket does not straddle the ground state (N=" +
                                std::to_string(N) + ", p=" + std::to_string(p) + ")");
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (a_lo + a_hi);
        if (shoot_classify(N, p, mid) > 0) a_hi = mid;
        else a_lo = mid;
        if (a_hi - a_lo < 1e-12 * a_hi) break;
    }
    return 0.5 * (a_lo + a_hi);
}

ScalarGroundState solve_scalar_ground_state_ode(int N, int p) {
    if (N < 1 || N > 4 || p < 2)
        throw ProfileSolveError("scalar ground state: unsupported (N, p)");

    double a_lo = 1.0 + 1e-6, a_hi = 2.0;
    int guard = 0;
    while (shoot_classify(N, p, a_hi) <= 0) {
        a_hi *= 2.0;
        if (++guard > 30) throw ProfileSolveError("shooting bracket not found");
    }
    const double amp = find_ground_amplitude(N, p, a_lo, a_hi);

    ScalarGroundState g;
    g.N = N;
    g.p = p;
    g.amplitude = amp;
    g.h = kSpan / kSteps;

    g.r.reserve(kSteps + 1);
    g.u.reserve(kSteps + 1);
    g.du.reserve(kSteps + 1);
    OdeState s{amp, 0.0};
    g.r.push_back(0.0);
    g.u.push_back(s.u);
    g.du.push_back(0.0);
    const double floor_u = 1e-10 * amp;
    for (int i = 0; i < kSteps; ++i) {
        const double r = g.h * i;
        s = rk4_step(N, p, r, s, g.h);
        if (s.u < floor_u || s.du > 0) break;
        g.r.push_back(r + g.h);
        g.u.push_back(s.u);
        g.du.push_back(s.du);
    }
    g.r_stop = g.r.back();
    g.tail_coeff = g.u.back() * std::pow(g.r_stop, 0.5 * (N - 1)) * std::exp(g.r_stop);

    // composite Simpson of the stored samples against omega r^{N-1}
    const double omega = RadialGrid::sphere_area(N);
    auto accumulate = [&](const std::function<double(double, double)>& f) {
        double acc = 0.0;
        const std::size_t m = g.r.size();
        for (std::size_t i = 0; i + 2 < m; i += 2) {
            const double f0 = f(g.u[i], g.du[i]) * std::pow(g.r[i], N - 1);
            const double f1 = f(g.u[i + 1], g.du[i + 1]) * std::pow(g.r[i + 1], N - 1);
            const double f2 = f(g.u[i + 2], g.du[i + 2]) * std::pow(g.r[i + 2], N - 1);
            acc += g.h / 3.0 * (f0 + 4 * f1 + f2);
        }
        if ((m - 1) % 2 == 1) { // trailing trapezoid on the last interval
            const std::size_t i = m - 2;
            const double f0 = f(g.u[i], g.du[i]) * std::pow(g.r[i], N - 1);
            const double f1 = f(g.u[i + 1], g.du[i + 1]) * std::pow(g.r[i + 1], N - 1);
            acc += g.h / 2.0 * (f0 + f1);
        }
        return omega * acc;
    };
    g.l2_sq = accumulate([](double u, double) { return u * u; });
    g.kinetic = accumulate([](double, double du) { return du * du; });
    g.l3 = accumulate([](double u, double) { return std::abs(u * u * u); });
    g.l4 = accumulate([](double u, double) { return u * u * u * u; });
    g.lp1 = accumulate([p](double u, double) { return std::pow(u, p + 1); });
    return g;
}

double ScalarGroundState::eval(double radius) const {
    if (radius <= 0) return amplitude;
    if (radius >= r_stop)
        return tail_coeff * std::pow(radius, -0.5 * (N - 1)) * std::exp(-radius);
    const double t = radius / h;
    std::size_t k = std::size_t(t);
    std::size_t i0 = (k >= 1) ? k - 1 : 0;
    if (i0 + 3 >= r.size()) i0 = r.size() - 4;
    double out = 0.0;
    for (std::size_t j = i0; j < i0 + 4; ++j) {
        double lj = 1.0;
        for (std::size_t m = i0; m < i0 + 4; ++m)
            if (m != j) lj *= (radius - r[m]) / (r[j] - r[m]);
        out += u[j] * lj;
    }
    return out;
}

RadialField ScalarGroundState::sample(const GridPtr& grid) const {
    return RadialField::sample(grid, [this](double r) { return eval(r); });
}

const ScalarGroundState& scalar_ground_state(int N, int p) {
    static std::map<std::pair<int, int>, ScalarGroundState> cache;
    static std::mutex mx;
    std::lock_guard<std::mutex> lock(mx);
    auto key = std::make_pair(N, p);
    auto it = cache.find(key);
    if (it == cache.end())
        it = cache.emplace(key, solve_scalar_ground_state_ode(N, p)).first;
    return it->second;
}

double scalar_pde_residual(const RadialField& u, int p) {
    RadialField res = laplacian_apply(u);
    std::vector<double> v(u.size());
    for (std::size_t j = 0; j < u.size(); ++j)
        v[j] = -res[j] + u[j] - std::pow(std::abs(u[j]), p - 1) * u[j];
    v[u.size() - 1] = 0.0;
    return std::sqrt(mass_sq(RadialField(u.grid_ptr(), std::move(v))));
}

namespace {

// One defect-correction sweep: tridiagonal second-order Jacobian against the
// residual of the grid operator.
void polish_step(RadialField& u, int p) {
    const auto& x = u.grid().nodes();
    const std::size_t n = u.size();
    const int N = u.grid().dim();

    RadialField lap = laplacian_apply(u);
    std::vector<double> res(n);
    for (std::size_t j = 0; j < n; ++j)
        res[j] = -lap[j] + u[j] - std::pow(std::abs(u[j]), p - 1) * u[j];
    res[n - 1] = 0.0;

    std::vector<double> dl(n, 0.0), d(n, 0.0), du(n, 0.0);
    d[0] = 2.0 * N / (x[1] * x[1]) + 1.0 - p * std::pow(std::abs(u[0]), p - 1);
    du[0] = -2.0 * N / (x[1] * x[1]);
    for (std::size_t j = 1; j + 1 < n; ++j) {
        const double hm = x[j] - x[j - 1], hp = x[j + 1] - x[j];
        const double denom = hm * hp * (hm + hp);
        const double a = 2.0 * hp / denom - double(N - 1) / x[j] * hp * hp / denom;
        const double c = 2.0 * hm / denom + double(N - 1) / x[j] * hm * hm / denom;
        const double b = -2.0 * (hp + hm) / denom +
                         double(N - 1) / x[j] * (hp * hp - hm * hm) / denom;
        dl[j] = -a;
        d[j] = -b + 1.0 - p * std::pow(std::abs(u[j]), p - 1);
        du[j] = -c;
    }
    d[n - 1] = 1.0;

    // Thomas solve
    for (std::size_t j = 1; j < n; ++j) {
        const double m = dl[j] / d[j - 1];
        d[j] -= m * du[j - 1];
        res[j] -= m * res[j - 1];
    }
    std::vector<double> delta(n);
    delta[n - 1] = res[n - 1] / d[n - 1];
    for (std::size_t j = n - 1; j-- > 0;)
        delta[j] = (res[j] - du[j] * delta[j + 1]) / d[j];
    for (std::size_t j = 0; j < n; ++j) u[j] -= delta[j];
}

} // namespace

RadialField solve_scalar_ground_state(int N, int p, const GridPtr& grid) {
    if (grid->dim() != N) throw UsageError("profile: grid dimension mismatch");
    const ScalarGroundState& g = scalar_ground_state(N, p);
    RadialField u = g.sample(grid);
    double best = scalar_pde_residual(u, p);
    for (int it = 0; it < 8; ++it) {
        RadialField trial = u;
        polish_step(trial, p);
        const double r = scalar_pde_residual(trial, p);
        if (!(r < best)) break;
        u = trial;
        best = r;
        if (best < 1e-12 * std::sqrt(h1_norm_sq(u))) break;
    }
    return u;
}

RadialField aubin_talenti(double eps, const GridPtr& grid) {
    if (grid->dim() != 4) throw UsageError("aubin_talenti: needs an N = 4 grid");
    if (!(eps > 0)) throw UsageError("aubin_talenti: eps must be positive");
    const double c = 2.0 * std::sqrt(2.0) * eps;
    return RadialField::sample(grid, [=](double r) { return c / (eps * eps + r * r); });
}

double bubble_grad_sq_truncated(double eps, const GridPtr& grid) {
    if (grid->dim() != 4) throw UsageError("bubble integrals: needs an N = 4 grid");
    const double e2 = eps * eps;
    const RadialField g2 = RadialField::sample(grid, [=](double r) {
        const double d = e2 + r * r;
        return 32.0 * e2 * r * r / (d * d * d * d);
    });
    return integrate(g2);
}

double bubble_tail_grad_sq(double eps, double R) {
    const double T = R * R + eps * eps;
    const double e2 = eps * eps;
    return 32.0 * kPi * kPi * e2 *
           (1.0 / T - e2 / (T * T) + e2 * e2 / (3.0 * T * T * T));
}

double bubble_tail_l4(double eps, double R) {
    const double T = R * R + eps * eps;
    const double e2 = eps * eps;
    return 64.0 * kPi * kPi * e2 * e2 * (0.5 / (T * T) - e2 / (3.0 * T * T * T));
}

double bubble_tail_l3(double eps, double R) {
    const double T = R * R + eps * eps;
    const double e2 = eps * eps;
    return 16.0 * std::sqrt(2.0) * kPi * kPi * eps * eps * eps *
           (1.0 / T - e2 / (2.0 * T * T));
}

BubbleParams bubble_params(double mu1, double mu2, double rho) {
    const double lo = std::min(mu1, mu2), hi = std::max(mu1, mu2);
    if (!(rho > 0) || (rho >= lo && rho <= hi))
        throw RegimeError("bubble pair: rho must lie outside [min(mu), max(mu)]");
    BubbleParams bp;
    bp.k1 = (rho - mu2) / (rho * rho - mu1 * mu2);
    bp.k2 = (rho - mu1) / (rho * rho - mu1 * mu2);
    if (!(bp.k1 > 0) || !(bp.k2 > 0))
        throw RegimeError("bubble pair: amplitude factors not positive");
    bp.coupled_S = std::sqrt(bp.k1 + bp.k2) * default_constants().sobolev_S;

    // (sqrt(k1) U, sqrt(k2) U) must solve the critical system; with
    // -Delta U = U^3 this reduces to mu1 k1 + rho k2 = 1 and mu2 k2 + rho k1 = 1.
    const double r1 = std::abs(mu1 * bp.k1 + rho * bp.k2 - 1.0);
    const double r2 = std::abs(mu2 * bp.k2 + rho * bp.k1 - 1.0);
    if (r1 > 1e-12 || r2 > 1e-12)
        throw RegimeError("bubble pair: amplitude algebra failed");
    return bp;
}

} // namespace normsolve
