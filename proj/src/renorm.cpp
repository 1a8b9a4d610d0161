#include "rfo/renorm.hpp"

#include <cmath>
#include <stdexcept>

namespace rfo {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;
} // namespace

double canonical_angle(double a) {
    a = std::remainder(a, kTwoPi); // (-pi, pi] up to the edge case below
    if (a <= -kPi) a += kTwoPi;
    return a;
}

AngleField to_angles(const SpinConfiguration& sigma) {
    if (sigma.n != 2) throw std::invalid_argument("to_angles: n = 2 only");
    AngleField f;
    f.theta.resize(static_cast<std::size_t>(sigma.num_sites()));
    for (SiteIndex x = 0; x < sigma.num_sites(); ++x) {
        const double* p = sigma.spin(x);
        double a = std::atan2(p[1], p[0]); // in [-pi, pi]
        if (a <= -kPi) a = kPi;            // canonicalize -pi -> pi
        f.theta[static_cast<std::size_t>(x)] = a;
    }
    return f;
}

SpinConfiguration from_angles(const AngleField& theta) {
    SpinConfiguration sigma;
    sigma.n = 2;
    sigma.s.resize(theta.theta.size() * 2);
    for (std::size_t x = 0; x < theta.theta.size(); ++x) {
        sigma.s[2 * x] = std::cos(theta.theta[x]);
        sigma.s[2 * x + 1] = std::sin(theta.theta[x]);
    }
    return sigma;
}

RegionAngles change_of_variables(const Region& region, const AngleField& theta,
                                 const ScalarLatticeField& gprime, double eps) {
    if (gprime.v.size() != region.size())
        throw std::invalid_argument("change_of_variables: g'/region size mismatch");
    double sup = 0;
    for (const double v : gprime.v) sup = std::max(sup, std::fabs(v));
    if (eps * sup >= 0.5)
        throw std::invalid_argument("change_of_variables: injectivity guard eps*sup|g'| < 0.5 violated");

    RegionAngles phi;
    phi.v.resize(region.size());
    for (std::size_t i = 0; i < region.size(); ++i) {
        const double th = theta.theta[static_cast<std::size_t>(region.sites[i])];
        phi.v[i] = th - eps * std::cos(th) * gprime.v[i];
    }
    return phi;
}

RegionAngles invert_change_of_variables(const Region& region, const RegionAngles& phi,
                                        const ScalarLatticeField& gprime, double eps,
                                        double tol, int max_iter) {
    RegionAngles theta = phi;
    for (std::size_t i = 0; i < region.size(); ++i) {
        double t = phi.v[i];
        for (int it = 0; it < max_iter; ++it) {
            const double next = phi.v[i] + eps * std::cos(t) * gprime.v[i];
            if (std::fabs(next - t) <= tol) {
                t = next;
                break;
            }
            t = next;
        }
        theta.v[i] = t;
    }
    return theta;
}

double renormalized_energy(const LatticeGeometry& geom, const Region& region,
                           const RegionAngles& phi, const ScalarLatticeField& m2,
                           const AngleField* boundary) {
    if (phi.v.size() != region.size() || m2.v.size() != region.size())
        throw std::invalid_argument("renormalized_energy: size mismatch");
    double K = 0;
    for (std::size_t i = 0; i < region.size(); ++i) {
        const SiteIndex x = region.sites[i];
        for (int j = 0; j < geom.degree; ++j) {
            const SiteIndex y = geom.neighbor(x, j);
            if (y < 0) continue;
            double py;
            if (region.contains(y)) {
                if (y < x) continue; // count each internal pair once (then doubled)
                py = phi.v[static_cast<std::size_t>(region.local(y))];
            } else if (boundary) {
                py = boundary->theta[static_cast<std::size_t>(y)];
            } else {
                continue; // free boundary
            }
            K += 2.0 * (std::cos(phi.v[i] - py) - 1.0);
        }
        const double c = std::cos(phi.v[i]);
        K += 0.5 * m2.v[i] * c * c;
    }
    return K;
}

ScalarLatticeField massive_green_field(const LatticeGeometry& geom, const Region& region,
                                       const DisorderField& alpha, int ell, double tol) {
    if (alpha.k != 1) throw std::invalid_argument("massive_green_field: k = 1 only");
    // [2 L_D + ell^-2] g' = alpha  <=>  [L_D + ell^-2/2] g' = alpha/2
    LaplacianSpec spec{&geom, &region, LaplacianBoundary::Dirichlet,
                       0.5 / (static_cast<double>(ell) * ell)};
    ScalarLatticeField rhs;
    rhs.v.resize(region.size());
    for (std::size_t i = 0; i < region.size(); ++i)
        rhs.v[i] = 0.5 * alpha.component(region.sites[i], 0);
    SolveOptions opts;
    opts.tol = tol;
    return solve_green(spec, rhs, opts);
}

namespace {

// -H_R(theta | boundary) for n=2, k=1, free boundary at the lattice edge:
// exchange over internal + crossing edges, field over region sites
double minus_region_hamiltonian(const LatticeGeometry& geom, const Region& region,
                                const std::vector<double>& theta_region,
                                const AngleField& boundary,
                                const DisorderField& alpha, double eps) {
    double acc = 0;
    for (std::size_t i = 0; i < region.size(); ++i) {
        const SiteIndex x = region.sites[i];
        const double tx = theta_region[i];
        for (int j = 0; j < geom.degree; ++j) {
            const SiteIndex y = geom.neighbor(x, j);
            if (y < 0) continue;
            double ty;
            if (region.contains(y)) {
                if (y < x) continue;
                ty = theta_region[static_cast<std::size_t>(region.local(y))];
            } else {
                ty = boundary.theta[static_cast<std::size_t>(y)];
            }
            acc -= 2.0 * (1.0 - std::cos(tx - ty));
        }
        acc += eps * alpha.component(x, 0) * std::sin(tx);
    }
    return acc;
}

} // namespace

double transformation_discrepancy(const LatticeGeometry& geom, const Region& region,
                                  const AngleField& theta, const DisorderField& alpha,
                                  double eps, int ell, double tol) {
    const ScalarLatticeField gprime = massive_green_field(geom, region, alpha, ell, tol);

    LaplacianSpec mspec{&geom, &region, LaplacianBoundary::Dirichlet, 0.0};
    ScalarLatticeField scaled = gprime;
    for (double& v : scaled.v) v *= eps;
    const ScalarLatticeField m2 = mass_field(mspec, scaled);

    std::vector<double> theta_r(region.size());
    for (std::size_t i = 0; i < region.size(); ++i)
        theta_r[i] = theta.theta[static_cast<std::size_t>(region.sites[i])];

    const RegionAngles phi = change_of_variables(region, theta, gprime, eps);
    const double lhs = minus_region_hamiltonian(geom, region, theta_r, theta, alpha, eps);
    const double K = renormalized_energy(geom, region, phi, m2, &theta);

    // C from evaluating both sides at theta == 0 on the region
    std::vector<double> zero(region.size(), 0.0);
    RegionAngles phi0;
    phi0.v.resize(region.size());
    for (std::size_t i = 0; i < region.size(); ++i) phi0.v[i] = -eps * gprime.v[i];
    const double lhs0 = minus_region_hamiltonian(geom, region, zero, theta, alpha, eps);
    const double K0 = renormalized_energy(geom, region, phi0, m2, &theta);
    const double C = lhs0 - K0;

    return std::fabs((lhs - C) - K);
}

RegionAngles maximize_renormalized_energy(const LatticeGeometry& geom, const Region& region,
                                          const ScalarLatticeField& m2,
                                          const AngleField* boundary,
                                          RegionAngles init, double tol, long max_sweeps) {
    if (init.v.size() != region.size() || m2.v.size() != region.size())
        throw std::invalid_argument("maximize_renormalized_energy: size mismatch");
    RegionAngles phi = std::move(init);

    const int grid = 64;
    for (long sweep = 0; sweep < max_sweeps; ++sweep) {
        double max_move = 0;
        for (std::size_t i = 0; i < region.size(); ++i) {
            const SiteIndex x = region.sites[i];
            double A = 0, B = 0;
            for (int j = 0; j < geom.degree; ++j) {
                const SiteIndex y = geom.neighbor(x, j);
                if (y < 0) continue;
                double py;
                if (region.contains(y))
                    py = phi.v[static_cast<std::size_t>(region.local(y))];
                else if (boundary)
                    py = boundary->theta[static_cast<std::size_t>(y)];
                else
                    continue;
                A += std::cos(py);
                B += std::sin(py);
            }
            const double mx = m2.v[i];
            const auto f = [&](double t) {
                const double c = std::cos(t);
                return 2.0 * (A * c + B * std::sin(t)) + 0.5 * mx * c * c;
            };
            // basin from a coarse grid on the first sweep, then safeguarded
            // Newton on f' from the current angle
            double t = phi.v[i];
            if (sweep == 0) {
                double fbest = f(t);
                for (int gidx = 0; gidx < grid; ++gidx) {
                    const double tg = -kPi + kTwoPi * gidx / grid;
                    const double ft = f(tg);
                    if (ft > fbest) {
                        fbest = ft;
                        t = tg;
                    }
                }
            }
            bool ok = false;
            for (int it = 0; it < 50; ++it) {
                const double st = std::sin(t), ct = std::cos(t);
                const double d1 = -2.0 * A * st + 2.0 * B * ct - 0.5 * mx * std::sin(2.0 * t);
                const double d2 = -2.0 * A * ct - 2.0 * B * st - mx * std::cos(2.0 * t);
                if (d2 >= -1e-14) break; // not in a concave basin: fall back
                const double step = d1 / d2;
                t -= step;
                if (std::fabs(step) <= 1e-14) {
                    ok = true;
                    break;
                }
            }
            if (!ok) {
                // ternary fallback around the grid-best point
                int best = 0;
                double fbest = -1e300;
                for (int gidx = 0; gidx < grid; ++gidx) {
                    const double tg = -kPi + kTwoPi * gidx / grid;
                    const double ft = f(tg);
                    if (ft > fbest) {
                        fbest = ft;
                        best = gidx;
                    }
                }
                double lo = -kPi + kTwoPi * (best - 1) / grid;
                double hi = -kPi + kTwoPi * (best + 1) / grid;
                while (hi - lo > 1e-13) {
                    const double m1 = lo + (hi - lo) / 3.0;
                    const double m2p = hi - (hi - lo) / 3.0;
                    if (f(m1) < f(m2p))
                        lo = m1;
                    else
                        hi = m2p;
                }
                t = 0.5 * (lo + hi);
            }
            t = canonical_angle(t);
            max_move = std::max(max_move, std::fabs(std::remainder(t - phi.v[i], kTwoPi)));
            phi.v[i] = t;
        }
        if (max_move <= tol) break;
    }
    return phi;
}

} // namespace rfo
