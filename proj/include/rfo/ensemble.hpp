#pragma once

// Disorder averaging: many (realization x chain) runs, two-level error bars
// (between realizations and within chains), parameter sweeps with common
// random numbers.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "rfo/fields.hpp"
#include "rfo/sampler.hpp"

namespace rfo {

struct ExperimentSpec {
    int N = 16;
    ModelParams params;
    ChainConfig chain;
    std::vector<std::string> observables{"M0_e1", "PM0_sq", "energy_density"};
    int realizations = 4;
    int chains_per_realization = 1;
    std::uint64_t master_seed = 1;
    int workers = 1;
    DisorderDist disorder = DisorderDist::StandardGaussian;
    double disorder_bound = 6.0;

    void validate() const;
};

struct RealizationRow {
    std::uint64_t realization = 0;
    bool failed = false;
    std::string failure;
    std::map<std::string, double> mean;      // per observable
    std::map<std::string, double> within_se; // blocked, chains pooled
};

struct ObservableStats {
    double mean = 0;
    double between_se = 0;  // from realization means only
    double within_se = 0;   // pooled thermal error of the disorder mean
    double combined_se = 0; // sqrt(between^2 + within^2)
    std::size_t realizations = 0;
};

struct EnsembleStats {
    std::map<std::string, ObservableStats> stats;
    std::vector<RealizationRow> table; // every realization, including failed
    std::size_t failed_count = 0;
};

// deterministic given (master seed); worker count changes scheduling only
EnsembleStats run_ensemble(const ExperimentSpec& spec);

// observables evaluated on a final configuration rather than along the chain
double bad_box_density(const LatticeGeometry& geom, const SpinConfiguration& sigma,
                       const DisorderField& alpha, const ModelParams& p);
double contour_count(const LatticeGeometry& geom, const SpinConfiguration& sigma,
                     const DisorderField& alpha, const ModelParams& p);

struct SweepPoint {
    double value = 0;
    EnsembleStats stats;
};

// parameter in {"beta", "eps", "N", "xi"}; same master seed at every value
std::vector<SweepPoint> sweep_parameter(const ExperimentSpec& spec,
                                        const std::string& parameter,
                                        const std::vector<double>& values);

} // namespace rfo
