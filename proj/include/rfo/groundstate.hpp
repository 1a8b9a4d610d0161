#pragma once

// Zero-temperature analysis: the quadratic spin-wave optimum on a box and
// full nonlinear coordinate-descent relaxation of H.

#include <vector>

#include "rfo/energy.hpp"
#include "rfo/fields.hpp"
#include "rfo/lattice.hpp"

namespace rfo {

struct SpinWaveResult {
    std::vector<double> theta_hat; // deviation angles, aligned with box.sites
    double predicted_gain = 0;     // leading quadratic term of -H relative to theta == psi
    double first_order_term = 0;   // eps * sin(psi) * sum_z alpha_z, reported separately
};

// Quadratic optimizer around the fixed angle psi (n=2, k=1, free boundary on
// the box). The deviation field is eps*cos(psi)*g where g solves the exchange
// Hessian equation 2*(-Delta) g = alpha_hat; the predicted gain is
// (eps^2/2) cos^2(psi) * alpha_hat . g.
SpinWaveResult spin_wave_optimum(const LatticeGeometry& geom, const Box& box,
                                 const DisorderField& alpha, double psi, double eps,
                                 double tol = 1e-10);

// spins on the box from the spin-wave deviation: theta = psi + theta_hat
SpinConfiguration spin_wave_configuration(const LatticeGeometry& geom, const Box& box,
                                          const SpinWaveResult& sw, double psi,
                                          const SpinConfiguration& background);

struct RelaxationReport {
    SpinConfiguration configuration;
    std::vector<double> energy_trace; // total H after each sweep
    double final_gradient_norm = 0;   // sup over free sites
    long sweeps = 0;
    bool converged = false;
};

// coordinate-wise exact minimization, lexicographic sweeps with alternating
// direction; fixed sites are never touched
RelaxationReport relax(const LatticeGeometry& geom, const SpinConfiguration& init,
                       const DisorderField& alpha, const ModelParams& p,
                       const std::vector<SiteIndex>& fixed_sites = {},
                       double tol = 1e-8, long max_sweeps = 100000);

struct ProjectionProfile {
    std::vector<double> lengths; // |(I-P) sigma_x| per site
    double q05 = 0, median = 0, q95 = 0, mean = 0;
};

ProjectionProfile ordering_projection_profile(const SpinConfiguration& sigma, int k);

} // namespace rfo
