#pragma once

// Angular coordinates for n=2, the change of variables
// phi_x = theta_x - eps cos(theta_x) g'_x, and the renormalized energy K.
//
// Conventions matching the Hamiltonian normalization of the energy module:
//   - the exchange part of K counts both orientations of each edge,
//     2*[cos(phi_x - phi_y) - 1] per unordered pair, so that at eps = 0
//     K equals -H_R exactly via |sigma_x - sigma_y|^2 = 2 - 2 cos(theta_x - theta_y);
//   - g' solves [2(-Delta_R^D) + ell^-2] g' = alpha (exchange-Hessian scaling);
//   - the site mass is m2_x = eps^2 * sum_y (g'_y - g'_x)^2, i.e. the mass
//     field of the scaled profile eps*g' actually subtracted from theta.

#include <optional>
#include <vector>

#include "rfo/elliptic.hpp"
#include "rfo/fields.hpp"
#include "rfo/lattice.hpp"

namespace rfo {

struct AngleField {
    std::vector<double> theta; // one angle per lattice site, in (-pi, pi]
};

double canonical_angle(double a); // wrap into (-pi, pi]

AngleField to_angles(const SpinConfiguration& sigma);            // n = 2 only
SpinConfiguration from_angles(const AngleField& theta);

// phi on a region; boundary values come from a full-lattice angle field
struct RegionAngles {
    std::vector<double> v; // aligned with region.sites
};

// pointwise phi = theta - eps cos(theta) g'; throws if eps*sup|g'| >= 0.5
RegionAngles change_of_variables(const Region& region, const AngleField& theta,
                                 const ScalarLatticeField& gprime, double eps);

// invert phi -> theta by the contraction theta <- phi + eps cos(theta) g'
RegionAngles invert_change_of_variables(const Region& region, const RegionAngles& phi,
                                        const ScalarLatticeField& gprime, double eps,
                                        double tol = 1e-12, int max_iter = 200);

// K(phi | phi0) = 2 sum_edges [cos(phi_x - phi_y) - 1] + 1/2 sum_x m2_x cos^2(phi_x).
// Crossing edges use boundary angles; pass nullptr for free boundary.
double renormalized_energy(const LatticeGeometry& geom, const Region& region,
                           const RegionAngles& phi, const ScalarLatticeField& m2,
                           const AngleField* boundary);

// g' for a region at mass scale ell: [2(-Delta^D) + ell^-2]^-1 alpha, k = 1
ScalarLatticeField massive_green_field(const LatticeGeometry& geom, const Region& region,
                                       const DisorderField& alpha, int ell,
                                       double tol = 1e-10);

// |(-H_R(sigma|sigma0) - C) - K(phi|phi0)| with C fixed by evaluating both
// sides at theta == 0 on the region
double transformation_discrepancy(const LatticeGeometry& geom, const Region& region,
                                  const AngleField& theta, const DisorderField& alpha,
                                  double eps, int ell, double tol = 1e-10);

// coordinate-ascent maximizer of K; boundary == nullptr means free boundary
RegionAngles maximize_renormalized_energy(const LatticeGeometry& geom, const Region& region,
                                          const ScalarLatticeField& m2,
                                          const AngleField* boundary,
                                          RegionAngles init, double tol = 1e-10,
                                          long max_sweeps = 20000);

} // namespace rfo
