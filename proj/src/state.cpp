#include "normsolve/state.hpp"

#include <cmath>

namespace normsolve {

StatePair::StatePair(RadialField u_, RadialField v_, double b1_, double b2_)
    : u(std::move(u_)), v(std::move(v_)), b1(b1_), b2(b2_) {
    require_same_grid(u, v);
    if (!(b1 > 0) || !(b2 > 0)) throw UsageError("state: masses must be positive");
}

StatePair normalize_masses(const RadialField& u, const RadialField& v,
                           double b1, double b2) {
    const double mu = mass_sq(u), mv = mass_sq(v);
    if (!(mu > 0) || !(mv > 0)) throw UsageError("state: cannot normalize a zero field");
    return StatePair(std::sqrt(b1 * b1 / mu) * u, std::sqrt(b2 * b2 / mv) * v, b1, b2);
}

RadialField dilate(const RadialField& f, double t, double max_drift) {
    if (t == 0.0) return f;
    const int N = f.grid().dim();
    const double amp = std::exp(0.5 * N * t);
    const double scale = std::exp(t);
    std::vector<double> v(f.size());
    for (std::size_t j = 0; j < v.size(); ++j)
        v[j] = amp * f.eval(scale * f.grid().node(j));
    RadialField out(f.grid_ptr(), std::move(v));

    const double m0 = mass_sq(f);
    if (m0 > 0) {
        const double drift = std::abs(mass_sq(out) - m0) / m0;
        if (drift > max_drift)
            throw DilationRangeError("dilate: resampling mass drift " +
                                     std::to_string(drift));
    }
    return out;
}

StatePair dilate(const StatePair& s, double t, double max_drift) {
    return StatePair(dilate(s.u, t, max_drift), dilate(s.v, t, max_drift), s.b1, s.b2);
}

double h1_distance(const StatePair& a, const StatePair& b) {
    require_same_grid(a.u, b.u);
    const RadialField du = a.u - b.u, dv = a.v - b.v;
    return std::sqrt(h1_norm_sq(du) + h1_norm_sq(dv));
}

} // namespace normsolve
