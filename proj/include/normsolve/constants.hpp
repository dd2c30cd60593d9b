#pragma once

#include <map>
#include <stdexcept>
#include <utility>

namespace normsolve {

struct DomainError : std::runtime_error {
    explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

/// gamma_p = N (p - 2) / (2 p)
double gamma_p(int N, int p);

/// Best constant of || u ||_p <= C || grad u ||^gamma || u ||^{1-gamma},
/// evaluated at the scalar ground state of -Delta u + u = u^{p-1} (the
/// Weinstein maximizer). For (N, p) = (4, 4) this degenerates to the Sobolev
/// constant and 1/sqrt(S) is returned.
double gn_constant(int N, int p);

/// Numerically derived reference constants. Built once, then read-only.
struct ConstantsTable {
    std::map<std::pair<int, int>, double> gn;    // (N, p) -> C_{N,p}
    std::map<std::pair<int, int>, double> gamma; // (N, p) -> gamma_p
    double sobolev_S = 0.0;   // N = 4 Sobolev constant
    double q_mass_sq = 0.0;   // ||Q||_{L2(R2)}^2, Q the planar cubic ground state
    double w_mass_sq = 0.0;   // ||w||_{L2(R3)}^2, w the 3D quadratic ground state
    double w_kinetic = 0.0;   // ||grad w||_{L2(R3)}^2

    double gn_at(int N, int p) const;
};

const ConstantsTable& default_constants();

} // namespace normsolve
