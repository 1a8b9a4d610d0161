#include "rfo/groundstate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rfo/elliptic.hpp"

namespace rfo {

SpinWaveResult spin_wave_optimum(const LatticeGeometry& geom, const Box& box,
                                 const DisorderField& alpha, double psi, double eps,
                                 double tol) {
    if (alpha.k != 1) throw std::invalid_argument("spin_wave_optimum: needs k = 1");
    if (eps >= 1.0) throw std::invalid_argument("spin_wave_optimum: needs eps < 1");

    const Region reg = box_region(geom, box);
    LaplacianSpec spec{&geom, &reg, LaplacianBoundary::NeumannGraph, 0.0};
    const auto hat = center_disorder(alpha, box);

    ScalarLatticeField rhs;
    rhs.v = hat;
    SolveOptions opts;
    opts.tol = tol;
    // exchange Hessian is twice the graph laplacian: g = (2 L)^+ alpha_hat
    ScalarLatticeField g = solve_green(spec, rhs, opts);
    for (double& v : g.v) v *= 0.5;

    SpinWaveResult r;
    const double c = std::cos(psi);
    r.theta_hat.resize(box.sites.size());
    double quad = 0, field_sum = 0;
    for (std::size_t i = 0; i < box.sites.size(); ++i) {
        r.theta_hat[i] = eps * c * g.v[i];
        quad += hat[i] * g.v[i];
        field_sum += alpha.component(box.sites[i], 0);
    }
    r.predicted_gain = 0.5 * eps * eps * c * c * quad;
    r.first_order_term = eps * std::sin(psi) * field_sum;
    return r;
}

SpinConfiguration spin_wave_configuration(const LatticeGeometry& geom, const Box& box,
                                          const SpinWaveResult& sw, double psi,
                                          const SpinConfiguration& background) {
    SpinConfiguration sigma = background;
    if (sigma.n != 2) throw std::invalid_argument("spin_wave_configuration: n = 2 only");
    for (std::size_t i = 0; i < box.sites.size(); ++i) {
        const double th = psi + sw.theta_hat[i];
        double* p = sigma.spin(box.sites[i]);
        p[0] = std::cos(th);
        p[1] = std::sin(th);
    }
    (void)geom;
    return sigma;
}

RelaxationReport relax(const LatticeGeometry& geom, const SpinConfiguration& init,
                       const DisorderField& alpha, const ModelParams& p,
                       const std::vector<SiteIndex>& fixed_sites,
                       double tol, long max_sweeps) {
    RelaxationReport rep;
    rep.configuration = init;
    SpinConfiguration& sigma = rep.configuration;
    const int n = sigma.n;

    std::vector<char> fixed(static_cast<std::size_t>(geom.num_sites), 0);
    for (const SiteIndex s : fixed_sites) fixed[static_cast<std::size_t>(s)] = 1;
    if (p.bc == BoundaryKind::FixedConfiguration) {
        if (!p.sigma0) throw std::invalid_argument("relax: FixedConfiguration needs sigma0");
        for (const SiteIndex s : geom.boundary_sites) {
            fixed[static_cast<std::size_t>(s)] = 1;
            for (int c = 0; c < n; ++c) sigma.spin(s)[c] = p.sigma0->spin(s)[c];
        }
    }
    std::size_t free_count = 0;
    for (SiteIndex s = 0; s < geom.num_sites; ++s)
        if (!fixed[static_cast<std::size_t>(s)]) ++free_count;
    if (free_count == 0) throw std::invalid_argument("relax: no free sites");

    double h[8];
    for (long sweep = 0; sweep < max_sweeps; ++sweep) {
        const bool forward = sweep % 2 == 0;
        for (SiteIndex i = 0; i < geom.num_sites; ++i) {
            const SiteIndex x = forward ? i : geom.num_sites - 1 - i;
            if (fixed[static_cast<std::size_t>(x)]) continue;
            local_field(geom, sigma, alpha, p, x, h);
            double nrm = 0;
            for (int c = 0; c < n; ++c) nrm += h[c] * h[c];
            nrm = std::sqrt(nrm);
            if (nrm == 0.0) continue; // degenerate site, leave as is
            double* px = sigma.spin(x);
            for (int c = 0; c < n; ++c) px[c] = h[c] / nrm;
        }
        rep.energy_trace.push_back(total_energy(geom, sigma, alpha, p).total);
        rep.sweeps = sweep + 1;

        const auto grad = energy_gradient(geom, sigma, alpha, p);
        double worst = 0;
        for (SiteIndex x = 0; x < geom.num_sites; ++x) {
            if (fixed[static_cast<std::size_t>(x)]) continue;
            double g2 = 0;
            for (int c = 0; c < n; ++c) {
                const double gc = grad[static_cast<std::size_t>(x) * n + c];
                g2 += gc * gc;
            }
            worst = std::max(worst, std::sqrt(g2));
        }
        rep.final_gradient_norm = worst;
        if (worst <= tol) {
            rep.converged = true;
            break;
        }
    }
    return rep;
}

ProjectionProfile ordering_projection_profile(const SpinConfiguration& sigma, int k) {
    ProjectionProfile prof;
    const int m = sigma.n - k;
    prof.lengths.resize(static_cast<std::size_t>(sigma.num_sites()));
    double acc = 0;
    for (SiteIndex x = 0; x < sigma.num_sites(); ++x) {
        const double* p = sigma.spin(x);
        double v = 0;
        for (int c = 0; c < m; ++c) v += p[c] * p[c];
        prof.lengths[static_cast<std::size_t>(x)] = std::sqrt(v);
        acc += prof.lengths[static_cast<std::size_t>(x)];
    }
    prof.mean = acc / static_cast<double>(prof.lengths.size());
    std::vector<double> sorted = prof.lengths;
    std::sort(sorted.begin(), sorted.end());
    const auto at = [&](double q) {
        return sorted[static_cast<std::size_t>(q * static_cast<double>(sorted.size() - 1))];
    };
    prof.q05 = at(0.05);
    prof.median = at(0.5);
    prof.q95 = at(0.95);
    return prof;
}

} // namespace rfo
