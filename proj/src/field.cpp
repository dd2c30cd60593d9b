#include "normsolve/field.hpp"

#include <algorithm>
#include <cmath>

namespace normsolve {

RadialField::RadialField(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (!grid_) throw UsageError("field: null grid");
    if (values_.size() != grid_->size())
        throw UsageError("field: value/node length mismatch");
    for (double v : values_)
        if (!std::isfinite(v)) throw UsageError("field: non-finite sample");
}

RadialField RadialField::zero(GridPtr grid) {
    std::vector<double> v(grid->size(), 0.0);
    return RadialField(std::move(grid), std::move(v));
}

RadialField RadialField::sample(GridPtr grid, const std::function<double(double)>& f) {
    std::vector<double> v(grid->size());
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = f(grid->node(j));
    return RadialField(std::move(grid), std::move(v));
}

double RadialField::eval(double r) const {
    const auto& x = grid_->nodes();
    const std::size_t n = x.size();
    if (r < 0) r = -r; // radial symmetry
    if (r > grid_->r_max()) return 0.0;
    if (r >= x[n - 1]) return values_[n - 1];

    auto it = std::upper_bound(x.begin(), x.end(), r);
    const std::size_t k = std::size_t(it - x.begin()); // x[k-1] <= r < x[k]
    constexpr std::size_t stencil = 6;
    std::size_t i0 = (k >= stencil / 2 + 1) ? k - stencil / 2 - 1 : 0;
    if (i0 + stencil > n) i0 = n - stencil;

    double out = 0.0;
    for (std::size_t j = i0; j < i0 + stencil; ++j) {
        double lj = 1.0;
        for (std::size_t m = i0; m < i0 + stencil; ++m)
            if (m != j) lj *= (r - x[m]) / (x[j] - x[m]);
        out += values_[j] * lj;
    }
    return out;
}

double RadialField::max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

void require_same_grid(const RadialField& a, const RadialField& b) {
    if (!a.grid().same_as(b.grid())) throw UsageError("fields live on different grids");
}

double integrate(const RadialField& f) {
    const auto& w = f.grid().weights();
    double s = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) s += w[j] * f[j];
    return s;
}

double inner(const RadialField& f, const RadialField& g) {
    require_same_grid(f, g);
    const auto& w = f.grid().weights();
    double s = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) s += w[j] * f[j] * g[j];
    return s;
}

double mass_sq(const RadialField& f) { return inner(f, f); }

double lp_norm_p(const RadialField& f, int p) {
    const auto& w = f.grid().weights();
    double s = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j)
        s += w[j] * std::pow(std::abs(f[j]), p);
    return s;
}

double grad_inner(const RadialField& f, const RadialField& g) {
    require_same_grid(f, g);
    const auto& c = f.grid().face_coeff();
    double s = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k)
        s += c[k] * (f[k + 1] - f[k]) * (g[k + 1] - g[k]);
    return s;
}

double kinetic(const RadialField& f) { return grad_inner(f, f); }

double h1_norm_sq(const RadialField& f) { return kinetic(f) + mass_sq(f); }

RadialField laplacian_variational(const RadialField& f) {
    const auto& c = f.grid().face_coeff();
    const auto& w = f.grid().weights();
    const std::size_t n = f.size();
    std::vector<double> out(n, 0.0);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        const double flux = c[k] * (f[k + 1] - f[k]);
        out[k] += flux;
        out[k + 1] -= flux;
    }
    for (std::size_t j = 0; j < n; ++j) out[j] /= w[j];
    return RadialField(f.grid_ptr(), std::move(out));
}

namespace {

// 4th-order interior stencils on a uniform grid, even extension across r = 0,
// zero extension beyond r_max.
RadialField laplacian_uniform4(const RadialField& f) {
    const auto& x = f.grid().nodes();
    const std::size_t n = f.size();
    const double h = x[1] - x[0];
    const int N = f.grid().dim();
    std::vector<double> out(n, 0.0);

    auto get = [&](long j) -> double {
        if (j < 0) j = -j;                       // even extension
        if (j >= long(n)) return 0.0;            // decay beyond r_max
        return f[std::size_t(j)];
    };

    for (std::size_t j = 0; j < n; ++j) {
        if (j == 0) {
            // laplacian at the origin: N f''(0), with f'(0) = 0
            const double fpp =
                (-2.0 * get(2) + 32.0 * get(1) - 30.0 * get(0)) / (12.0 * h * h);
            out[0] = N * fpp;
            continue;
        }
        const double fm2 = get(long(j) - 2), fm1 = get(long(j) - 1);
        const double f0 = get(long(j)), fp1 = get(long(j) + 1), fp2 = get(long(j) + 2);
        const double fpp =
            (-fm2 + 16.0 * fm1 - 30.0 * f0 + 16.0 * fp1 - fp2) / (12.0 * h * h);
        const double fp = (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * h);
        out[j] = fpp + double(N - 1) / x[j] * fp;
    }
    out[n - 1] = 0.0; // Dirichlet clamp
    return RadialField(f.grid_ptr(), std::move(out));
}

RadialField laplacian_nonuniform2(const RadialField& f) {
    const auto& x = f.grid().nodes();
    const std::size_t n = f.size();
    const int N = f.grid().dim();
    std::vector<double> out(n, 0.0);

    out[0] = N * 2.0 * (f[1] - f[0]) / (x[1] * x[1]);
    for (std::size_t j = 1; j + 1 < n; ++j) {
        const double hm = x[j] - x[j - 1], hp = x[j + 1] - x[j];
        const double fpp =
            2.0 * (f[j - 1] * hp - f[j] * (hp + hm) + f[j + 1] * hm) /
            (hm * hp * (hm + hp));
        const double fp =
            (-hp * hp * f[j - 1] + (hp * hp - hm * hm) * f[j] + hm * hm * f[j + 1]) /
            (hm * hp * (hm + hp));
        out[j] = fpp + double(N - 1) / x[j] * fp;
    }
    out[n - 1] = 0.0;
    return RadialField(f.grid_ptr(), std::move(out));
}

} // namespace

RadialField laplacian_apply(const RadialField& f) {
    return f.grid().uniform() ? laplacian_uniform4(f) : laplacian_nonuniform2(f);
}

RadialField operator+(const RadialField& a, const RadialField& b) {
    require_same_grid(a, b);
    std::vector<double> v(a.size());
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = a[j] + b[j];
    return RadialField(a.grid_ptr(), std::move(v));
}

RadialField operator-(const RadialField& a, const RadialField& b) {
    require_same_grid(a, b);
    std::vector<double> v(a.size());
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = a[j] - b[j];
    return RadialField(a.grid_ptr(), std::move(v));
}

RadialField operator*(double c, const RadialField& a) {
    std::vector<double> v(a.size());
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = c * a[j];
    return RadialField(a.grid_ptr(), std::move(v));
}

RadialField pointwise(const RadialField& a, const std::function<double(double)>& f) {
    std::vector<double> v(a.size());
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = f(a[j]);
    return RadialField(a.grid_ptr(), std::move(v));
}

} // namespace normsolve
