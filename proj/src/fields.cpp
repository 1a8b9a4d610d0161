#include "rfo/fields.hpp"

#include <algorithm>
#include <cmath>

#include "rfo/rng.hpp"

namespace rfo {

DisorderDist parse_disorder_dist(const std::string& tag) {
    if (tag == "standard-gaussian") return DisorderDist::StandardGaussian;
    if (tag == "sub-gaussian-bounded") return DisorderDist::SubGaussianBounded;
    throw std::invalid_argument("unknown distribution tag: " + tag);
}

DisorderField sample_disorder(const LatticeGeometry& geom, int k,
                              std::uint64_t master_seed, std::uint64_t realization,
                              DisorderDist dist, double bound) {
    if (k < 1) throw std::invalid_argument("sample_disorder: k must be >= 1");
    DisorderField f;
    f.k = k;
    f.master_seed = master_seed;
    f.realization = realization;
    f.dist = dist;
    f.bound = bound;
    f.a.resize(static_cast<std::size_t>(geom.num_sites) * k);
    for (SiteIndex s = 0; s < geom.num_sites; ++s)
        for (int c = 0; c < k; ++c) {
            const std::uint64_t key = derive_key(master_seed, realization,
                                                 static_cast<std::uint64_t>(s),
                                                 static_cast<std::uint64_t>(c));
            f.a[static_cast<std::size_t>(s) * k + c] =
                dist == DisorderDist::StandardGaussian ? counter_gaussian(key, 0)
                                                       : counter_truncated_gaussian(key, bound);
        }
    return f;
}

std::vector<double> center_disorder(const DisorderField& alpha, const Box& box) {
    if (box.sites.empty()) throw std::invalid_argument("center_disorder: empty box");
    const int k = alpha.k;
    std::vector<double> mean(static_cast<std::size_t>(k), 0.0);
    for (const SiteIndex s : box.sites)
        for (int c = 0; c < k; ++c) mean[static_cast<std::size_t>(c)] += alpha.component(s, c);
    for (int c = 0; c < k; ++c) mean[static_cast<std::size_t>(c)] /= static_cast<double>(box.sites.size());

    std::vector<double> hat(box.sites.size() * static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < box.sites.size(); ++i)
        for (int c = 0; c < k; ++c)
            hat[i * static_cast<std::size_t>(k) + static_cast<std::size_t>(c)] =
                alpha.component(box.sites[i], c) - mean[static_cast<std::size_t>(c)];
    return hat;
}

void SpinConfiguration::normalize_site(SiteIndex x) {
    double* p = spin(x);
    double nrm = 0;
    for (int c = 0; c < n; ++c) nrm += p[c] * p[c];
    nrm = std::sqrt(nrm);
    for (int c = 0; c < n; ++c) p[c] /= nrm;
}

double SpinConfiguration::max_norm_error() const {
    double worst = 0;
    for (SiteIndex x = 0; x < num_sites(); ++x) {
        double nrm = 0;
        const double* p = spin(x);
        for (int c = 0; c < n; ++c) nrm += p[c] * p[c];
        worst = std::max(worst, std::fabs(std::sqrt(nrm) - 1.0));
    }
    return worst;
}

SpinConfiguration constant_configuration(const LatticeGeometry& geom, int n, int axis) {
    SpinConfiguration sigma;
    sigma.n = n;
    sigma.s.assign(static_cast<std::size_t>(geom.num_sites) * n, 0.0);
    for (SiteIndex x = 0; x < geom.num_sites; ++x) sigma.spin(x)[axis] = 1.0;
    return sigma;
}

SpinConfiguration random_configuration(const LatticeGeometry& geom, int n, std::uint64_t seed) {
    SpinConfiguration sigma;
    sigma.n = n;
    sigma.s.resize(static_cast<std::size_t>(geom.num_sites) * n);
    for (SiteIndex x = 0; x < geom.num_sites; ++x) {
        const std::uint64_t key = derive_key(seed, 0x5349474d41ULL, static_cast<std::uint64_t>(x), 0);
        for (int c = 0; c < n; ++c)
            sigma.spin(x)[c] = counter_gaussian(key, static_cast<std::uint64_t>(c));
        sigma.normalize_site(x);
    }
    return sigma;
}

void reflect_spins(SpinConfiguration& sigma, const std::vector<SiteIndex>& sites, int k) {
    const int m = sigma.n - k;
    for (const SiteIndex x : sites) {
        double* p = sigma.spin(x);
        for (int c = 0; c < m; ++c) p[c] = -p[c];
    }
}

double ModelParams::eps_d() const {
    if (eps <= 0.0) return 0.0;
    return d == 2 ? eps * std::sqrt(std::fabs(std::log(eps))) : eps;
}

int ModelParams::default_ell() const {
    if (eps <= 0.0 || eps >= 1.0) return 2;
    const double le = std::fabs(std::log(eps));
    const int v = static_cast<int>(std::lround(std::pow(le, -0.5 - gamma) / eps));
    return std::max(2, v);
}

int ModelParams::default_L() const {
    if (eps <= 0.0 || eps >= 1.0) return 4;
    const double le = std::fabs(std::log(eps));
    double v = d == 2 ? std::pow(le, -0.5 + gamma) / eps : std::pow(le, 4.0) / eps;
    return std::max(4, static_cast<int>(std::lround(v)));
}

void ModelParams::finalize(int N) {
    if (n < 2) throw std::invalid_argument("ModelParams: n must be >= 2");
    if (n > 8) throw std::invalid_argument("ModelParams: n > 8 not supported");
    if (k < 1 || k >= n) throw std::invalid_argument("ModelParams: need 1 <= k < n");
    if (gamma <= 0.0 || gamma >= 0.5) throw std::invalid_argument("ModelParams: gamma must lie in (0, 1/2)");
    if (u.empty()) {
        u.assign(static_cast<std::size_t>(n), 0.0);
        u[0] = 1.0;
    }
    if (static_cast<int>(u.size()) != n) throw std::invalid_argument("ModelParams: u has wrong dimension");
    double un = 0;
    for (const double c : u) un += c * c;
    un = std::sqrt(un);
    if (un == 0.0) throw std::invalid_argument("ModelParams: u must be a unit vector");
    for (double& c : u) c /= un;

    if (ell == 0) ell = std::min(default_ell(), std::max(2, N / 2));
    if (L == 0) {
        L = std::min(default_L(), N);
        if (L % ell != 0) L += ell - L % ell; // contour tiling wants L | ell-grid alignment
        L = std::max(L, 2 * ell);
    }
    if ((ell_overridden || L_overridden) && eps > 0.0) {
        const double inv = 1.0 / eps_d();
        if (!(ell < inv && inv < L))
            throw std::invalid_argument("ModelParams: overridden scales must satisfy ell < 1/eps_d < L");
    }
    if (L % ell != 0) throw std::invalid_argument("ModelParams: L must be a multiple of ell");
    if (delta == 0.0) delta = xi / 10.0;
}

} // namespace rfo
