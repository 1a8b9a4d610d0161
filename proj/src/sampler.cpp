#include "rfo/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace rfo {

namespace {
constexpr double kTwoPi = 6.28318530717958647692529;
} // namespace

std::vector<char> frozen_mask(const LatticeGeometry& geom, const ModelParams& p,
                              const std::vector<SiteIndex>& extra, SpinConfiguration& sigma) {
    std::vector<char> frozen(static_cast<std::size_t>(geom.num_sites), 0);
    if (p.bc == BoundaryKind::FixedConfiguration) {
        if (!p.sigma0) throw std::invalid_argument("frozen_mask: FixedConfiguration needs sigma0");
        for (const SiteIndex s : geom.boundary_sites) {
            frozen[static_cast<std::size_t>(s)] = 1;
            for (int c = 0; c < sigma.n; ++c) sigma.spin(s)[c] = p.sigma0->spin(s)[c];
        }
    }
    for (const SiteIndex s : extra) frozen[static_cast<std::size_t>(s)] = 1;
    return frozen;
}

double metropolis_sweep(const LatticeGeometry& geom, SpinConfiguration& sigma,
                        const DisorderField& alpha, const ModelParams& p,
                        double width, std::mt19937_64& rng,
                        const std::vector<char>& frozen) {
    const int n = sigma.n;
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    long proposed = 0, accepted = 0;
    double cand[8], tang[8];
    for (SiteIndex x = 0; x < geom.num_sites; ++x) {
        if (frozen[static_cast<std::size_t>(x)]) continue;
        double* sx = sigma.spin(x);

        // geodesic step: random tangent direction, rotation angle uniform in (0, width]
        double dot = 0;
        for (int c = 0; c < n; ++c) {
            tang[c] = gauss(rng);
            dot += tang[c] * sx[c];
        }
        double tn = 0;
        for (int c = 0; c < n; ++c) {
            tang[c] -= dot * sx[c];
            tn += tang[c] * tang[c];
        }
        tn = std::sqrt(tn);
        if (tn == 0.0) continue;
        const double delta = width * unif(rng);
        const double cd = std::cos(delta), sd = std::sin(delta);
        double cn = 0;
        for (int c = 0; c < n; ++c) {
            cand[c] = cd * sx[c] + sd * tang[c] / tn;
            cn += cand[c] * cand[c];
        }
        cn = std::sqrt(cn);
        for (int c = 0; c < n; ++c) cand[c] /= cn;

        const double dE = local_energy_delta(geom, sigma, alpha, p, x, cand);
        ++proposed;
        if (dE <= 0.0 || unif(rng) < std::exp(-p.beta * dE)) {
            for (int c = 0; c < n; ++c) sx[c] = cand[c];
            ++accepted;
        }
    }
    return proposed > 0 ? static_cast<double>(accepted) / static_cast<double>(proposed) : 1.0;
}

void overrelaxation_sweep(const LatticeGeometry& geom, SpinConfiguration& sigma,
                          const DisorderField& alpha, const ModelParams& p,
                          const std::vector<char>& frozen) {
    const int n = sigma.n;
    double h[8];
    for (SiteIndex x = 0; x < geom.num_sites; ++x) {
        if (frozen[static_cast<std::size_t>(x)]) continue;
        local_field(geom, sigma, alpha, p, x, h);
        double hn = 0;
        for (int c = 0; c < n; ++c) hn += h[c] * h[c];
        if (hn < 1e-24) continue; // zero local field: reflection undefined, skip
        double* sx = sigma.spin(x);
        double dot = 0;
        for (int c = 0; c < n; ++c) dot += sx[c] * h[c];
        const double f = 2.0 * dot / hn;
        for (int c = 0; c < n; ++c) sx[c] = f * h[c] - sx[c];
        sigma.normalize_site(x);
    }
}

double evaluate_observable(const std::string& name, const LatticeGeometry& geom,
                           const SpinConfiguration& sigma, const DisorderField& alpha,
                           const ModelParams& p) {
    if (name == "sigma0_e1") return sigma.spin(geom.origin())[0];
    if (name == "M0_e1") return block_magnetization(geom, sigma, geom.origin(), p.eps > 0 ? p.eps : 0.5)[0];
    if (name == "PM0_sq")
        return projected_block_norm_sq(geom, sigma, geom.origin(), p.eps > 0 ? p.eps : 0.5, p.k);
    if (name == "energy_density")
        return total_energy(geom, sigma, alpha, p).total / static_cast<double>(geom.num_sites);
    throw std::invalid_argument("evaluate_observable: unknown observable " + name);
}

ChainResult run_chain(const LatticeGeometry& geom, const DisorderField& alpha,
                      const ModelParams& p, const ChainConfig& chain,
                      const SpinConfiguration* init) {
    if (chain.stride < 1) throw std::invalid_argument("run_chain: stride must be >= 1");
    if (chain.proposal_width <= 0 || chain.proposal_width > 3.15)
        throw std::invalid_argument("run_chain: proposal width must lie in (0, pi]");

    ChainResult result;
    SpinConfiguration sigma = init ? *init : constant_configuration(geom, p.n);
    if (!init && p.bc == BoundaryKind::FieldU)
        for (SiteIndex x = 0; x < geom.num_sites; ++x)
            for (int c = 0; c < p.n; ++c) sigma.spin(x)[c] = p.u[static_cast<std::size_t>(c)];
    const std::vector<char> frozen = frozen_mask(geom, p, chain.frozen, sigma);

    std::mt19937_64 rng(chain.rng_seed);
    double width = chain.proposal_width;

    // thermalization, with optional width auto-tuning (frozen afterwards so
    // the measurement chain satisfies detailed balance with a fixed kernel)
    double acc_win = 0;
    long win = 0;
    for (long s = 0; s < chain.therm_sweeps; ++s) {
        acc_win += metropolis_sweep(geom, sigma, alpha, p, width, rng, frozen);
        ++win;
        for (int o = 0; o < chain.overrelax_per_metropolis; ++o)
            overrelaxation_sweep(geom, sigma, alpha, p, frozen);
        if (chain.autotune_width && win == 25) {
            const double rate = acc_win / static_cast<double>(win);
            width = std::clamp(width * std::exp(rate - 0.5), 1e-3, 3.141592653589793);
            acc_win = 0;
            win = 0;
        }
    }

    double acc_sum = 0;
    long acc_n = 0;
    for (long s = 0; s < chain.meas_sweeps; ++s) {
        acc_sum += metropolis_sweep(geom, sigma, alpha, p, width, rng, frozen);
        ++acc_n;
        for (int o = 0; o < chain.overrelax_per_metropolis; ++o)
            overrelaxation_sweep(geom, sigma, alpha, p, frozen);
        if (s % chain.stride == 0)
            for (const auto& name : chain.observables)
                result.series[name].push_back(evaluate_observable(name, geom, sigma, alpha, p));
    }

    result.acceptance = acc_n > 0 ? acc_sum / static_cast<double>(acc_n) : 1.0;
    result.final_width = width;
    for (const auto& [name, series] : result.series)
        result.summary[name] = blocking_analysis(series);
    result.final_configuration = std::move(sigma);
    return result;
}

OracleResult quadrature_oracle(const LatticeGeometry& geom, const DisorderField& alpha,
                               const ModelParams& p, int points,
                               const std::vector<std::string>& observables,
                               const SpinConfiguration& base,
                               const std::vector<SiteIndex>& frozen) {
    if (p.n != 2) throw std::invalid_argument("quadrature_oracle: n = 2 only");
    if (points < 64) throw std::invalid_argument("quadrature_oracle: need >= 64 points per site");

    SpinConfiguration sigma = base;
    std::vector<char> is_frozen = frozen_mask(geom, p, frozen, sigma);
    std::vector<SiteIndex> free_sites;
    for (SiteIndex x = 0; x < geom.num_sites; ++x)
        if (!is_frozen[static_cast<std::size_t>(x)]) free_sites.push_back(x);
    if (free_sites.empty() || free_sites.size() > 4)
        throw std::invalid_argument("quadrature_oracle: need 1..4 free sites");

    // edges among fixed sites and fixed-site one-body terms: a constant
    double const_energy = 0;
    for (const auto& [x, y] : geom.edges) {
        if (!is_frozen[static_cast<std::size_t>(x)] || !is_frozen[static_cast<std::size_t>(y)]) continue;
        const double* sx = sigma.spin(x);
        const double* sy = sigma.spin(y);
        const double d0 = sx[0] - sy[0], d1 = sx[1] - sy[1];
        const_energy += d0 * d0 + d1 * d1;
    }
    for (SiteIndex x = 0; x < geom.num_sites; ++x) {
        if (!is_frozen[static_cast<std::size_t>(x)]) continue;
        const double* sx = sigma.spin(x);
        const_energy -= p.eps * alpha.component(x, 0) * sx[1];
        if (p.bc == BoundaryKind::FieldU && geom.on_boundary[static_cast<std::size_t>(x)])
            const_energy -= p.boundary_strength * (p.u[0] * sx[0] + p.u[1] * sx[1]);
    }

    // for free site i: edges to frozen sites and to free sites of smaller index
    const std::size_t m = free_sites.size();
    std::vector<std::int8_t> rank(static_cast<std::size_t>(geom.num_sites), -1);
    for (std::size_t i = 0; i < m; ++i) rank[static_cast<std::size_t>(free_sites[i])] = static_cast<std::int8_t>(i);

    // precompute per-observable site lists
    const SiteIndex z = geom.origin();
    const double eps_ball = p.eps > 0 ? p.eps : 0.5;
    const std::vector<SiteIndex> ball = block_ball(geom, z, eps_ball);
    const double ball_scale = std::pow(eps_ball, geom.d);

    std::vector<double> grid_cos(static_cast<std::size_t>(points)), grid_sin(static_cast<std::size_t>(points));
    for (int j = 0; j < points; ++j) {
        const double t = kTwoPi * j / points;
        grid_cos[static_cast<std::size_t>(j)] = std::cos(t);
        grid_sin[static_cast<std::size_t>(j)] = std::sin(t);
    }

    double Z = 0;
    std::vector<double> acc(observables.size(), 0.0);
    std::vector<int> idx(m, 0);
    std::vector<double> partial(m + 1, 0.0);
    partial[0] = const_energy;

    std::size_t depth = 0;
    while (true) {
        if (depth < m) {
            if (idx[depth] == points) {
                idx[depth] = 0;
                if (depth == 0) break;
                --depth;
                ++idx[depth];
                continue;
            }
            const SiteIndex x = free_sites[depth];
            double* sx = sigma.spin(x);
            sx[0] = grid_cos[static_cast<std::size_t>(idx[depth])];
            sx[1] = grid_sin[static_cast<std::size_t>(idx[depth])];
            // energy added by fixing site x
            double e = -p.eps * alpha.component(x, 0) * sx[1];
            if (p.bc == BoundaryKind::FieldU && geom.on_boundary[static_cast<std::size_t>(x)])
                e -= p.boundary_strength * (p.u[0] * sx[0] + p.u[1] * sx[1]);
            for (int j = 0; j < geom.degree; ++j) {
                const SiteIndex y = geom.neighbor(x, j);
                if (y < 0) continue;
                const auto ry = rank[static_cast<std::size_t>(y)];
                if (ry >= 0 && static_cast<std::size_t>(ry) >= depth) continue; // assigned later
                const double* sy = sigma.spin(y);
                const double d0 = sx[0] - sy[0], d1 = sx[1] - sy[1];
                e += d0 * d0 + d1 * d1;
            }
            partial[depth + 1] = partial[depth] + e;
            ++depth;
            continue;
        }

        // leaf: full configuration assigned
        const double w = std::exp(-p.beta * partial[m]);
        Z += w;
        for (std::size_t oi = 0; oi < observables.size(); ++oi) {
            const std::string& name = observables[oi];
            double val;
            if (name == "sigma0_e1") {
                val = sigma.spin(z)[0];
            } else if (name == "M0_e1" || name == "PM0_sq") {
                double mc = 0;
                const int comp = name == "M0_e1" ? 0 : 1;
                for (const SiteIndex y : ball) mc += sigma.spin(y)[comp];
                mc *= ball_scale;
                val = name == "M0_e1" ? mc : mc * mc;
            } else if (name == "energy_density") {
                val = partial[m] / static_cast<double>(geom.num_sites);
            } else {
                throw std::invalid_argument("quadrature_oracle: unknown observable " + name);
            }
            acc[oi] += w * val;
        }
        --depth;
        ++idx[depth];
    }

    OracleResult r;
    const double cell = std::pow(kTwoPi / points, static_cast<double>(m));
    r.log_partition = std::log(Z * cell);
    for (std::size_t oi = 0; oi < observables.size(); ++oi) r.obs[observables[oi]] = acc[oi] / Z;
    return r;
}

} // namespace rfo
