#pragma once

// Discrete Laplacians on regions and the Green-field solves.
//
// Operator convention: (A f)_x = sum over lattice neighbors y of x of
// (f_x - f_y), where a neighbor outside the region contributes f_x under
// dirichlet and nothing under neumann-graph, plus mass2 * f_x. This is the
// standard (factor-1) graph Laplacian; callers that need the Hessian of the
// exchange energy (which is twice this) scale explicitly.

#include <vector>

#include <Eigen/Dense>

#include "rfo/fields.hpp"
#include "rfo/lattice.hpp"

namespace rfo {

enum class LaplacianBoundary { NeumannGraph, Dirichlet };

struct ScalarLatticeField {
    std::vector<double> v; // aligned with region.sites
};

struct LaplacianSpec {
    const LatticeGeometry* geom = nullptr;
    const Region* region = nullptr;
    LaplacianBoundary boundary = LaplacianBoundary::NeumannGraph;
    double mass2 = 0.0;
};

ScalarLatticeField apply_laplacian(const LaplacianSpec& spec, const ScalarLatticeField& f);

struct SolveOptions {
    double tol = 1e-10;
    long max_iterations = 0; // 0 -> 10 * region size
};

// Jacobi-preconditioned CG. For the singular neumann/mass-0 case the rhs must
// have zero mean on each connected component and the zero-mean representative
// is returned (iterates are re-projected every iteration).
ScalarLatticeField solve_green(const LaplacianSpec& spec, const ScalarLatticeField& rhs,
                               const SolveOptions& opts = {});

// E_Q(alpha) = sum over field components of alpha_hat . (-Delta)^-1 alpha_hat
// with the neumann-graph laplacian of the box subgraph; always >= 0
double disorder_energy(const LatticeGeometry& geom, const Box& box,
                       const DisorderField& alpha, double tol = 1e-10);

// m2_x = sum over lattice neighbors y of (g_y - g_x)^2; under the dirichlet
// convention a neighbor outside the region counts with g = 0
ScalarLatticeField mass_field(const LaplacianSpec& spec, const ScalarLatticeField& gprime);

// exact disorder-averaged two-point function of the random field gaussian
// model with our normalization: (2 beta)^-1 (-Delta)^-1 + (eps^2/4)(-Delta)^-2,
// dirichlet boundary on the whole lattice
Eigen::MatrixXd gaussian_model_covariance(const LatticeGeometry& geom, double eps, double beta);

// dense matrix of the operator, for oracles and the covariance routine
Eigen::MatrixXd dense_laplacian(const LaplacianSpec& spec);

} // namespace rfo
