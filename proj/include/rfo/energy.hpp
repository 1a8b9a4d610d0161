#pragma once

// RFO(n;k) Hamiltonian. Sign convention, fixed once for the whole project:
//   H = exchange + field + boundary
//   exchange = sum over unordered nearest-neighbor pairs of |sigma_x - sigma_y|^2
//   field    = -eps * sum_x alpha_x . sigma_x   (alpha embedded in the last k coords)
//   boundary = -h * sum_{x in boundary} u . sigma_x   (FieldU boundary only)
// Gibbs weight is exp(-beta H), so -H is the quantity the model maximizes.

#include <vector>

#include "rfo/fields.hpp"
#include "rfo/lattice.hpp"

namespace rfo {

struct EnergyBreakdown {
    double exchange = 0;
    double field = 0;
    double boundary = 0;
    double total = 0;
};

// local field h_x = 2*sum_{y~x} sigma_y + eps*alpha~_x + [x in bdry] h*u,
// so the site-x part of H is -sigma_x . h_x
void local_field(const LatticeGeometry& geom, const SpinConfiguration& sigma,
                 const DisorderField& alpha, const ModelParams& p, SiteIndex x,
                 double* out);

EnergyBreakdown total_energy(const LatticeGeometry& geom, const SpinConfiguration& sigma,
                             const DisorderField& alpha, const ModelParams& p);

// H(sigma with site x replaced by `proposed`) - H(sigma), in O(d)
double local_energy_delta(const LatticeGeometry& geom, const SpinConfiguration& sigma,
                          const DisorderField& alpha, const ModelParams& p,
                          SiteIndex x, const double* proposed);

// one |sigma_x - sigma_y|^2 per unordered internal edge of the region
double dirichlet_energy(const SpinConfiguration& sigma, const Region& region);

// M_z = eps^d * sum over sites within Euclidean distance (2 eps)^-1 of z
std::vector<double> block_magnetization(const LatticeGeometry& geom,
                                        const SpinConfiguration& sigma,
                                        SiteIndex z, double eps);

// sites of the block-magnetization ball around z, clipped to the lattice
std::vector<SiteIndex> block_ball(const LatticeGeometry& geom, SiteIndex z, double eps);

double projected_block_norm_sq(const LatticeGeometry& geom, const SpinConfiguration& sigma,
                               SiteIndex z, double eps, int k);

// tangent gradient of H: per-site vector perpendicular to sigma_x
std::vector<double> energy_gradient(const LatticeGeometry& geom, const SpinConfiguration& sigma,
                                    const DisorderField& alpha, const ModelParams& p);

double gradient_sup_norm(const std::vector<double>& grad, int n);

} // namespace rfo
