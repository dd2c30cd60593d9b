#pragma once

#include <stdexcept>
#include <string>

namespace normsolve {

struct RegimeError : std::runtime_error {
    explicit RegimeError(const std::string& what) : std::runtime_error(what) {}
};

/// Coefficients of the coupled system and the prescribed masses.
struct ProblemParams {
    int N = 3;
    double mu1 = 1.0;
    double mu2 = 1.0;
    double rho = 1.0;
    double beta = 0.0;
    double b1 = 1.0;
    double b2 = 1.0;

    void validate() const {
        if (N < 1 || N > 4) throw std::invalid_argument("params: N must be 1..4");
        if (!(mu1 > 0) || !(mu2 > 0) || !(rho > 0))
            throw std::invalid_argument("params: mu1, mu2, rho must be positive");
        if (!(b1 > 0) || !(b2 > 0))
            throw std::invalid_argument("params: masses must be positive");
    }
};

} // namespace normsolve
