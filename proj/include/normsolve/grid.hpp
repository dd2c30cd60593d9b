#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace normsolve {

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

enum class Spacing { uniform, graded };

/// Radial discretization of R^N (N = 1..4) on [0, r_max].
///
/// Quadrature weights integrate the piecewise-quadratic reconstruction of the
/// samples against the measure omega_N r^{N-1} dr exactly, so every polynomial
/// of degree <= 2 in r is integrated to machine accuracy. For N = 1 the grid
/// represents the full line through the even extension (omega_1 = 2).
class RadialGrid {
public:
    RadialGrid(int dim, double r_max, std::vector<double> nodes);

    int dim() const { return dim_; }
    double r_max() const { return r_max_; }
    std::size_t size() const { return nodes_.size(); }
    bool uniform() const { return uniform_; }
    double spacing_hint() const { return spacing_hint_; }

    const std::vector<double>& nodes() const { return nodes_; }
    const std::vector<double>& weights() const { return weights_; }
    /// Flux coefficient per interval: omega * int r^{N-1} dr / h_k^2.
    const std::vector<double>& face_coeff() const { return face_coeff_; }

    double node(std::size_t j) const { return nodes_[j]; }
    double weight(std::size_t j) const { return weights_[j]; }

    double ball_volume() const;
    static double sphere_area(int dim);

    bool same_as(const RadialGrid& other) const;

private:
    int dim_;
    double r_max_;
    bool uniform_;
    double spacing_hint_;
    std::vector<double> nodes_;
    std::vector<double> weights_;
    std::vector<double> face_coeff_;

    void build_weights();
};

using GridPtr = std::shared_ptr<const RadialGrid>;

GridPtr build_radial_grid(int dim, double r_max, std::size_t n, Spacing spacing);

} // namespace normsolve
