#pragma once

// CSV snapshots of spin configurations and disorder fields; values are
// printed with 17 significant digits so round-trips are bit exact.

#include <string>

#include "rfo/fields.hpp"
#include "rfo/lattice.hpp"

namespace rfo {

struct SpinSnapshot {
    int d = 0;
    int N = 0;
    int n = 0;
    SpinConfiguration sigma;
};

void save_spin_csv(const std::string& path, const LatticeGeometry& geom,
                   const SpinConfiguration& sigma);
SpinSnapshot load_spin_csv(const std::string& path);

struct DisorderSnapshot {
    int d = 0;
    int N = 0;
    int k = 0;
    DisorderField alpha;
};

void save_disorder_csv(const std::string& path, const LatticeGeometry& geom,
                       const DisorderField& alpha);
DisorderSnapshot load_disorder_csv(const std::string& path);

} // namespace rfo
