#include "rfo/energy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rfo {

void local_field(const LatticeGeometry& geom, const SpinConfiguration& sigma,
                 const DisorderField& alpha, const ModelParams& p, SiteIndex x,
                 double* out) {
    const int n = sigma.n;
    for (int c = 0; c < n; ++c) out[c] = 0.0;
    for (int j = 0; j < geom.degree; ++j) {
        const SiteIndex y = geom.neighbor(x, j);
        if (y < 0) continue;
        const double* sy = sigma.spin(y);
        for (int c = 0; c < n; ++c) out[c] += 2.0 * sy[c];
    }
    for (int c = 0; c < alpha.k; ++c)
        out[n - alpha.k + c] += p.eps * alpha.component(x, c);
    if (p.bc == BoundaryKind::FieldU && geom.on_boundary[static_cast<std::size_t>(x)])
        for (int c = 0; c < n; ++c) out[c] += p.boundary_strength * p.u[static_cast<std::size_t>(c)];
}

EnergyBreakdown total_energy(const LatticeGeometry& geom, const SpinConfiguration& sigma,
                             const DisorderField& alpha, const ModelParams& p) {
    if (sigma.n != p.n || alpha.k != p.k)
        throw std::invalid_argument("total_energy: dimension mismatch");
    const int n = sigma.n;
    EnergyBreakdown e;
    for (const auto& [x, y] : geom.edges) {
        const double* sx = sigma.spin(x);
        const double* sy = sigma.spin(y);
        double dd = 0;
        for (int c = 0; c < n; ++c) {
            const double dc = sx[c] - sy[c];
            dd += dc * dc;
        }
        e.exchange += dd;
    }
    for (SiteIndex x = 0; x < geom.num_sites; ++x) {
        const double* sx = sigma.spin(x);
        double as = 0;
        for (int c = 0; c < alpha.k; ++c) as += alpha.component(x, c) * sx[n - alpha.k + c];
        e.field -= p.eps * as;
    }
    if (p.bc == BoundaryKind::FieldU)
        for (const SiteIndex x : geom.boundary_sites) {
            const double* sx = sigma.spin(x);
            double us = 0;
            for (int c = 0; c < n; ++c) us += p.u[static_cast<std::size_t>(c)] * sx[c];
            e.boundary -= p.boundary_strength * us;
        }
    e.total = e.exchange + e.field + e.boundary;
    return e;
}

double local_energy_delta(const LatticeGeometry& geom, const SpinConfiguration& sigma,
                          const DisorderField& alpha, const ModelParams& p,
                          SiteIndex x, const double* proposed) {
    const int n = sigma.n;
    double h[8];
    local_field(geom, sigma, alpha, p, x, h);
    const double* sx = sigma.spin(x);
    double delta = 0;
    for (int c = 0; c < n; ++c) delta -= (proposed[c] - sx[c]) * h[c];
    return delta;
}

double dirichlet_energy(const SpinConfiguration& sigma, const Region& region) {
    const int n = sigma.n;
    double e = 0;
    for (const auto& [x, y] : region.internal_edges) {
        const double* sx = sigma.spin(x);
        const double* sy = sigma.spin(y);
        for (int c = 0; c < n; ++c) {
            const double dc = sx[c] - sy[c];
            e += dc * dc;
        }
    }
    return e;
}

std::vector<SiteIndex> block_ball(const LatticeGeometry& geom, SiteIndex z, double eps) {
    const double radius = 1.0 / (2.0 * eps);
    const int r = static_cast<int>(std::floor(radius));
    std::vector<int> c0(static_cast<std::size_t>(geom.d)), off(static_cast<std::size_t>(geom.d), -r);
    for (int j = 0; j < geom.d; ++j) c0[static_cast<std::size_t>(j)] = geom.coord(z, j);

    std::vector<SiteIndex> ball;
    while (true) {
        double rr = 0;
        bool inside = true;
        std::vector<int> c(static_cast<std::size_t>(geom.d));
        for (int j = 0; j < geom.d; ++j) {
            const int oj = off[static_cast<std::size_t>(j)];
            rr += static_cast<double>(oj) * oj;
            c[static_cast<std::size_t>(j)] = c0[static_cast<std::size_t>(j)] + oj;
            if (c[static_cast<std::size_t>(j)] < geom.axis_lo(j) || c[static_cast<std::size_t>(j)] > geom.axis_hi(j))
                inside = false;
        }
        if (inside && rr <= radius * radius) ball.push_back(geom.site_at(c));
        int j = 0;
        for (; j < geom.d; ++j) {
            if (++off[static_cast<std::size_t>(j)] <= r) break;
            off[static_cast<std::size_t>(j)] = -r;
        }
        if (j == geom.d) break;
    }
    std::sort(ball.begin(), ball.end());
    return ball;
}

std::vector<double> block_magnetization(const LatticeGeometry& geom,
                                        const SpinConfiguration& sigma,
                                        SiteIndex z, double eps) {
    const int n = sigma.n;
    std::vector<double> m(static_cast<std::size_t>(n), 0.0);
    for (const SiteIndex y : block_ball(geom, z, eps)) {
        const double* sy = sigma.spin(y);
        for (int c = 0; c < n; ++c) m[static_cast<std::size_t>(c)] += sy[c];
    }
    const double scale = std::pow(eps, geom.d);
    for (double& c : m) c *= scale;
    return m;
}

double projected_block_norm_sq(const LatticeGeometry& geom, const SpinConfiguration& sigma,
                               SiteIndex z, double eps, int k) {
    const auto m = block_magnetization(geom, sigma, z, eps);
    double v = 0;
    for (int c = sigma.n - k; c < sigma.n; ++c) v += m[static_cast<std::size_t>(c)] * m[static_cast<std::size_t>(c)];
    return v;
}

std::vector<double> energy_gradient(const LatticeGeometry& geom, const SpinConfiguration& sigma,
                                    const DisorderField& alpha, const ModelParams& p) {
    const int n = sigma.n;
    std::vector<double> grad(static_cast<std::size_t>(geom.num_sites) * n);
    double h[8];
    for (SiteIndex x = 0; x < geom.num_sites; ++x) {
        local_field(geom, sigma, alpha, p, x, h);
        const double* sx = sigma.spin(x);
        double hs = 0;
        for (int c = 0; c < n; ++c) hs += h[c] * sx[c];
        for (int c = 0; c < n; ++c)
            grad[static_cast<std::size_t>(x) * n + c] = -(h[c] - hs * sx[c]);
    }
    return grad;
}

double gradient_sup_norm(const std::vector<double>& grad, int n) {
    double worst = 0;
    for (std::size_t x = 0; x * n < grad.size(); ++x) {
        double nrm = 0;
        for (int c = 0; c < n; ++c) nrm += grad[x * n + c] * grad[x * n + c];
        worst = std::max(worst, std::sqrt(nrm));
    }
    return worst;
}

} // namespace rfo
