#pragma once

// Executable self-checks shared by the CLI and the acceptance suite:
// Metropolis-vs-quadrature oracle equivalence on tiny lattices, and the
// exactly solvable gaussian model against dense linear algebra.

#include <cstdint>
#include <string>
#include <vector>

namespace rfo {

struct CheckCell {
    std::string label;
    double estimate = 0;
    double se = 0;
    double exact = 0;
    double sigmas = 0; // |estimate - exact| / se
    bool pass = false;
};

struct CheckReport {
    std::string name;
    std::vector<CheckCell> cells;
    std::size_t passed = 0;
    bool pass = false;
    std::string detail;
};

// 40 (observable x parameter x seed) cells on 2x2 and 2x3 lattices; the
// report passes when at least 38 cells agree within 3 standard errors
CheckReport oracle_equivalence_check(std::uint64_t master_seed = 7,
                                     long therm_sweeps = 2000, long meas_sweeps = 30000);

// sampled disorder-averaged covariance of the gaussian model vs the closed
// form, plus monotone growth of the central gradient variance in N
CheckReport gaussian_model_check(std::uint64_t master_seed = 7, int draws = 10000);

} // namespace rfo
