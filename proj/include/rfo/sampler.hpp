#pragma once

// Finite-temperature Gibbs sampling (Metropolis + overrelaxation) targeting
// exp(-beta H), and a tensor-quadrature oracle for tiny systems.

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "rfo/blocking.hpp"
#include "rfo/energy.hpp"
#include "rfo/fields.hpp"
#include "rfo/lattice.hpp"

namespace rfo {

struct ChainConfig {
    long therm_sweeps = 1000;
    long meas_sweeps = 5000;
    long stride = 1;
    double proposal_width = 1.0; // max rotation angle, in (0, pi]
    bool autotune_width = true;  // tune toward acceptance ~ 0.5 during thermalization
    int overrelax_per_metropolis = 0;
    std::uint64_t rng_seed = 1;
    std::vector<std::string> observables{"sigma0_e1", "M0_e1", "PM0_sq", "energy_density"};
    std::vector<SiteIndex> frozen; // extra frozen sites beyond the boundary kind
};

// one lexicographic Metropolis sweep; returns the acceptance rate
double metropolis_sweep(const LatticeGeometry& geom, SpinConfiguration& sigma,
                        const DisorderField& alpha, const ModelParams& p,
                        double width, std::mt19937_64& rng,
                        const std::vector<char>& frozen);

// deterministic energy-preserving sweep: reflect each spin about its local field
void overrelaxation_sweep(const LatticeGeometry& geom, SpinConfiguration& sigma,
                          const DisorderField& alpha, const ModelParams& p,
                          const std::vector<char>& frozen);

double evaluate_observable(const std::string& name, const LatticeGeometry& geom,
                           const SpinConfiguration& sigma, const DisorderField& alpha,
                           const ModelParams& p);

struct ChainResult {
    std::map<std::string, std::vector<double>> series;
    std::map<std::string, BlockingResult> summary;
    double acceptance = 0;
    double final_width = 0;
    SpinConfiguration final_configuration;
};

ChainResult run_chain(const LatticeGeometry& geom, const DisorderField& alpha,
                      const ModelParams& p, const ChainConfig& chain,
                      const SpinConfiguration* init = nullptr);

// frozen-site mask implied by the boundary kind plus chain extras; also writes
// fixed boundary values into sigma
std::vector<char> frozen_mask(const LatticeGeometry& geom, const ModelParams& p,
                              const std::vector<SiteIndex>& extra, SpinConfiguration& sigma);

struct OracleResult {
    double log_partition = 0;
    std::map<std::string, double> obs;
};

// Exact (tensor-product trapezoid) expectations for n = 2 systems with at
// most 4 free sites. Frozen sites take their values from `base`.
OracleResult quadrature_oracle(const LatticeGeometry& geom, const DisorderField& alpha,
                               const ModelParams& p, int points,
                               const std::vector<std::string>& observables,
                               const SpinConfiguration& base,
                               const std::vector<SiteIndex>& frozen);

} // namespace rfo
