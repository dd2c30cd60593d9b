#include "normsolve/grid.hpp"

#include <cmath>
#include <numbers>

namespace normsolve {

namespace {

constexpr double kPi = std::numbers::pi;

// Integral over [a, b] of the quadratic Lagrange polynomial through
// (x0, x1, x2) associated with node x_j, against r^{N-1} dr. Three-point
// Gauss-Legendre is exact for the degree <= 5 integrand and avoids the
// cancellation of monomial antiderivatives on far-out intervals.
void add_parabola_moments(double a, double b, const double x[3], int nm1,
                          double scale, double* w0, double* w1, double* w2) {
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    const double off = half * std::sqrt(0.6);
    const double gr[3] = {mid - off, mid, mid + off};
    const double gw[3] = {5.0 / 9.0 * half, 8.0 / 9.0 * half, 5.0 / 9.0 * half};
    double* out[3] = {w0, w1, w2};
    for (int j = 0; j < 3; ++j) {
        const double xa = x[(j + 1) % 3], xb = x[(j + 2) % 3];
        const double den = (x[j] - xa) * (x[j] - xb);
        double val = 0.0;
        for (int q = 0; q < 3; ++q)
            val += gw[q] * (gr[q] - xa) * (gr[q] - xb) * std::pow(gr[q], nm1);
        *out[j] += scale * val / den;
    }
}

} // namespace

double RadialGrid::sphere_area(int dim) {
    switch (dim) {
        case 1: return 2.0;             // even extension doubles the half line
        case 2: return 2.0 * kPi;
        case 3: return 4.0 * kPi;
        case 4: return 2.0 * kPi * kPi;
        default: throw ConfigError("grid: dimension must be 1..4");
    }
}

RadialGrid::RadialGrid(int dim, double r_max, std::vector<double> nodes)
    : dim_(dim), r_max_(r_max), nodes_(std::move(nodes)) {
    if (dim < 1 || dim > 4) throw ConfigError("grid: dimension must be 1..4");
    if (!(r_max > 0)) throw ConfigError("grid: r_max must be positive");
    if (nodes_.size() < 8) throw ConfigError("grid: too few nodes");
    for (std::size_t j = 1; j < nodes_.size(); ++j)
        if (!(nodes_[j] > nodes_[j - 1]))
            throw ConfigError("grid: nodes must be strictly increasing");

    const std::size_t n = nodes_.size();
    const double h0 = nodes_[1] - nodes_[0];
    uniform_ = true;
    for (std::size_t j = 1; j + 1 < n; ++j) {
        const double h = nodes_[j + 1] - nodes_[j];
        if (std::abs(h - h0) > 1e-12 * r_max_) { uniform_ = false; break; }
    }
    spacing_hint_ = h0;

    build_weights();

    const double omega = sphere_area(dim_);
    face_coeff_.resize(n - 1);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        const double h = nodes_[k + 1] - nodes_[k];
        const double mk =
            (std::pow(nodes_[k + 1], dim_) - std::pow(nodes_[k], dim_)) / dim_;
        face_coeff_[k] = omega * mk / (h * h);
    }
}

void RadialGrid::build_weights() {
    const std::size_t n = nodes_.size();
    const double omega = sphere_area(dim_);
    weights_.assign(n, 0.0);

    // Per interval, integrate interpolating parabolas exactly against the
    // r^{N-1} moments. Where the mesh is locally smooth the two overlapping
    // three-point parabolas are averaged (symmetric, fourth order); near the
    // origin, near the boundary, and across strong grading jumps only the
    // one-sided parabola is used, since the exterior lobe of the other one
    // would drive small node weights negative under the r^{N-1} measure.
    // Every choice is exact for global quadratics.
    for (std::size_t k = 0; k + 1 < n; ++k) {
        const double a = nodes_[k], b = nodes_[k + 1];
        bool averaged = (k >= 2) && (k + 2 < n);
        if (averaged) {
            const double hm = nodes_[k] - nodes_[k - 1];
            const double h0 = b - a;
            const double hp = nodes_[k + 2] - nodes_[k + 1];
            const double lo = std::min({hm, h0, hp}), hi = std::max({hm, h0, hp});
            if (hi > 1.05 * lo) averaged = false;
        }
        if (k + 2 < n) {
            const double x[3] = {nodes_[k], nodes_[k + 1], nodes_[k + 2]};
            add_parabola_moments(a, b, x, dim_ - 1, averaged ? 0.5 * omega : omega,
                                 &weights_[k], &weights_[k + 1], &weights_[k + 2]);
        }
        if (averaged || k + 2 >= n) {
            const double x[3] = {nodes_[k - 1], nodes_[k], nodes_[k + 1]};
            add_parabola_moments(a, b, x, dim_ - 1, averaged ? 0.5 * omega : omega,
                                 &weights_[k - 1], &weights_[k], &weights_[k + 1]);
        }
    }

    double vol = 0.0;
    for (double& w : weights_) {
        if (w < 0) {
            if (w < -1e-13 * ball_volume())
                throw ConfigError("grid: negative quadrature weight");
            w = 0.0; // rounding noise on a vanishing near-origin weight
        }
        vol += w;
    }
    const double exact = ball_volume();
    if (std::abs(vol - exact) > 1e-10 * exact)
        throw ConfigError("grid: quadrature does not reproduce ball volume");
}

double RadialGrid::ball_volume() const {
    return sphere_area(dim_) * std::pow(r_max_, dim_) / dim_;
}

bool RadialGrid::same_as(const RadialGrid& other) const {
    if (this == &other) return true;
    if (dim_ != other.dim_ || nodes_.size() != other.nodes_.size()) return false;
    for (std::size_t j = 0; j < nodes_.size(); ++j)
        if (nodes_[j] != other.nodes_[j]) return false;
    return true;
}

GridPtr build_radial_grid(int dim, double r_max, std::size_t n, Spacing spacing) {
    if (dim < 1 || dim > 4) throw ConfigError("grid: dimension must be 1..4");
    if (n < 64) throw ConfigError("grid: need at least 64 nodes");
    if (!(r_max > 0)) throw ConfigError("grid: r_max must be positive");

    std::vector<double> nodes(n);
    if (spacing == Spacing::uniform) {
        const double h = r_max / double(n - 1);
        for (std::size_t j = 0; j < n; ++j) nodes[j] = h * double(j);
        nodes.back() = r_max;
    } else {
        // cubic grading clusters nodes near the origin, where concentrating
        // profiles live
        for (std::size_t j = 0; j < n; ++j) {
            const double s = double(j) / double(n - 1);
            nodes[j] = r_max * s * s * s;
        }
        nodes.back() = r_max;
    }
    return std::make_shared<RadialGrid>(dim, r_max, std::move(nodes));
}

} // namespace normsolve
