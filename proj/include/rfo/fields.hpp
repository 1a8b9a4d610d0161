#pragma once

// Quenched disorder and spin-configuration storage.
//
// Orientation convention used everywhere in this project: the random field
// occupies the LAST k coordinates of R^n; the ordering subspace is the first
// n-k coordinates. For n=2, k=1 the field acts on the vertical (sin theta)
// component and the ordered phases sit near theta = 0 and theta = pi.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rfo/lattice.hpp"

namespace rfo {

enum class DisorderDist { StandardGaussian, SubGaussianBounded };

DisorderDist parse_disorder_dist(const std::string& tag);

struct DisorderField {
    int k = 1;
    std::uint64_t master_seed = 0;
    std::uint64_t realization = 0;
    DisorderDist dist = DisorderDist::StandardGaussian;
    double bound = 6.0;      // truncation for the sub-gaussian option
    std::vector<double> a;   // num_sites * k, component-major per site

    double component(SiteIndex s, int c) const { return a[static_cast<std::size_t>(s) * k + c]; }
};

DisorderField sample_disorder(const LatticeGeometry& geom, int k,
                              std::uint64_t master_seed, std::uint64_t realization,
                              DisorderDist dist = DisorderDist::StandardGaussian,
                              double bound = 6.0);

// alpha_hat = alpha - box mean, per component; returned box.sites-aligned
std::vector<double> center_disorder(const DisorderField& alpha, const Box& box);

struct SpinConfiguration {
    int n = 2;
    std::vector<double> s; // num_sites * n

    double* spin(SiteIndex x) { return s.data() + static_cast<std::size_t>(x) * n; }
    const double* spin(SiteIndex x) const { return s.data() + static_cast<std::size_t>(x) * n; }
    SiteIndex num_sites() const { return static_cast<SiteIndex>(s.size()) / n; }

    void normalize_site(SiteIndex x);
    double max_norm_error() const;
};

// all spins set to the unit vector e_axis
SpinConfiguration constant_configuration(const LatticeGeometry& geom, int n, int axis = 0);
SpinConfiguration random_configuration(const LatticeGeometry& geom, int n, std::uint64_t seed);

// negate the first n-k (ordering subspace) components on the listed sites
void reflect_spins(SpinConfiguration& sigma, const std::vector<SiteIndex>& sites, int k);

enum class BoundaryKind { FieldU, FixedConfiguration, Free };

struct ModelParams {
    int d = 2;
    int n = 2;
    int k = 1;
    double eps = 0.0;
    double beta = 1.0;
    std::vector<double> u;             // boundary field direction, size n
    double boundary_strength = 1.0;    // the "h" of the Gibbs state, default 1
    BoundaryKind bc = BoundaryKind::FieldU;
    std::optional<SpinConfiguration> sigma0; // boundary values for FixedConfiguration

    // scales
    double gamma = 0.25;         // in (0, 1/2)
    double xi = 0.3;             // block-angle cutoff
    double delta = 0.0;          // 0 -> xi/10 at finalize
    int ell = 0;                 // 0 -> default from eps
    int L = 0;                   // 0 -> default from eps, rounded to a multiple of ell
    double bad_box_factor = 1.0; // multiplies the 4*eps_d^2*|Q_ell| threshold

    bool ell_overridden = false;
    bool L_overridden = false;

    double eps_d() const;
    int default_ell() const;
    int default_L() const;

    // fill derived scales, validate invariants; N caps the scales
    void finalize(int N);
};

} // namespace rfo
