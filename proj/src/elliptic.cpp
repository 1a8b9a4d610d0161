#include "rfo/elliptic.hpp"

#include <cmath>
#include <stdexcept>

namespace rfo {

namespace {

// per-site diagonal of the operator
std::vector<double> operator_diagonal(const LaplacianSpec& spec) {
    const auto& geom = *spec.geom;
    const auto& reg = *spec.region;
    std::vector<double> diag(reg.size(), spec.mass2);
    for (std::size_t i = 0; i < reg.size(); ++i) {
        const SiteIndex x = reg.sites[i];
        for (int j = 0; j < geom.degree; ++j) {
            const SiteIndex y = geom.neighbor(x, j);
            // a neighbor outside the region (or outside the lattice) is a
            // zero-valued site under dirichlet and absent under neumann-graph
            if (y >= 0 && reg.contains(y)) diag[i] += 1.0;
            else if (spec.boundary == LaplacianBoundary::Dirichlet) diag[i] += 1.0;
        }
    }
    return diag;
}

void apply_into(const LaplacianSpec& spec, const std::vector<double>& f, std::vector<double>& out) {
    const auto& geom = *spec.geom;
    const auto& reg = *spec.region;
    for (std::size_t i = 0; i < reg.size(); ++i) {
        const SiteIndex x = reg.sites[i];
        double acc = spec.mass2 * f[i];
        for (int j = 0; j < geom.degree; ++j) {
            const SiteIndex y = geom.neighbor(x, j);
            if (y >= 0 && reg.contains(y))
                acc += f[i] - f[static_cast<std::size_t>(reg.local(y))];
            else if (spec.boundary == LaplacianBoundary::Dirichlet)
                acc += f[i];
        }
        out[i] = acc;
    }
}

void project_zero_mean(std::vector<double>& f) {
    double m = 0;
    for (const double v : f) m += v;
    m /= static_cast<double>(f.size());
    for (double& v : f) v -= m;
}

} // namespace

ScalarLatticeField apply_laplacian(const LaplacianSpec& spec, const ScalarLatticeField& f) {
    if (f.v.size() != spec.region->size())
        throw std::invalid_argument("apply_laplacian: field/region size mismatch");
    ScalarLatticeField out;
    out.v.resize(f.v.size());
    apply_into(spec, f.v, out.v);
    return out;
}

ScalarLatticeField solve_green(const LaplacianSpec& spec, const ScalarLatticeField& rhs,
                               const SolveOptions& opts) {
    const std::size_t m = spec.region->size();
    if (rhs.v.size() != m) throw std::invalid_argument("solve_green: rhs/region size mismatch");

    const bool singular =
        spec.boundary == LaplacianBoundary::NeumannGraph && spec.mass2 == 0.0;
    if (singular) {
        if (!spec.region->connected)
            throw std::invalid_argument("solve_green: singular solve requires a connected region");
        double mean = 0;
        for (const double v : rhs.v) mean += v;
        mean /= static_cast<double>(m);
        double scale = 0;
        for (const double v : rhs.v) scale = std::max(scale, std::fabs(v));
        if (std::fabs(mean) > 1e-9 * std::max(1.0, scale))
            throw std::invalid_argument("solve_green: singular neumann solve needs zero-mean rhs");
    }

    std::vector<double> diag = operator_diagonal(spec);
    for (double& dv : diag)
        if (dv <= 0.0) dv = 1.0;

    const long maxit = opts.max_iterations > 0 ? opts.max_iterations
                                               : 10 * static_cast<long>(m) + 50;

    std::vector<double> x(m, 0.0), r = rhs.v, z(m), p(m), Ap(m);
    if (singular) project_zero_mean(r);

    double rhs_norm = 0;
    for (const double v : rhs.v) rhs_norm += v * v;
    rhs_norm = std::sqrt(rhs_norm);
    if (rhs_norm == 0.0) {
        ScalarLatticeField out;
        out.v = std::move(x);
        return out;
    }

    double r0 = 0;
    for (const double v : r) r0 += v * v;
    if (std::sqrt(r0) <= opts.tol * rhs_norm) {
        // e.g. a singular solve whose rhs lay entirely in the constant null space
        ScalarLatticeField out;
        out.v = std::move(x);
        return out;
    }

    for (std::size_t i = 0; i < m; ++i) z[i] = r[i] / diag[i];
    if (singular) project_zero_mean(z);
    p = z;
    double rz = 0;
    for (std::size_t i = 0; i < m; ++i) rz += r[i] * z[i];

    for (long it = 0; it < maxit; ++it) {
        apply_into(spec, p, Ap);
        double pAp = 0;
        for (std::size_t i = 0; i < m; ++i) pAp += p[i] * Ap[i];
        if (pAp <= 0.0) break;
        const double a = rz / pAp;
        double rn = 0;
        for (std::size_t i = 0; i < m; ++i) {
            x[i] += a * p[i];
            r[i] -= a * Ap[i];
            rn += r[i] * r[i];
        }
        if (singular) {
            project_zero_mean(x);
            project_zero_mean(r);
        }
        if (std::sqrt(rn) <= opts.tol * rhs_norm) {
            ScalarLatticeField out;
            out.v = std::move(x);
            return out;
        }
        for (std::size_t i = 0; i < m; ++i) z[i] = r[i] / diag[i];
        if (singular) project_zero_mean(z);
        double rz_new = 0;
        for (std::size_t i = 0; i < m; ++i) rz_new += r[i] * z[i];
        const double b = rz_new / rz;
        rz = rz_new;
        for (std::size_t i = 0; i < m; ++i) p[i] = z[i] + b * p[i];
    }
    throw std::runtime_error("solve_green: CG did not converge");
}

double disorder_energy(const LatticeGeometry& geom, const Box& box,
                       const DisorderField& alpha, double tol) {
    if (box.sites.empty()) throw std::invalid_argument("disorder_energy: empty box");
    const Region reg = box_region(geom, box);
    LaplacianSpec spec{&geom, &reg, LaplacianBoundary::NeumannGraph, 0.0};
    const auto hat = center_disorder(alpha, box);
    const int k = alpha.k;

    double energy = 0;
    for (int c = 0; c < k; ++c) {
        ScalarLatticeField rhs;
        rhs.v.resize(box.sites.size());
        for (std::size_t i = 0; i < box.sites.size(); ++i)
            rhs.v[i] = hat[i * static_cast<std::size_t>(k) + static_cast<std::size_t>(c)];
        SolveOptions opts;
        opts.tol = tol;
        const auto g = solve_green(spec, rhs, opts);
        for (std::size_t i = 0; i < box.sites.size(); ++i) energy += rhs.v[i] * g.v[i];
    }
    return energy;
}

ScalarLatticeField mass_field(const LaplacianSpec& spec, const ScalarLatticeField& gprime) {
    const auto& geom = *spec.geom;
    const auto& reg = *spec.region;
    if (gprime.v.size() != reg.size())
        throw std::invalid_argument("mass_field: field/region size mismatch");
    ScalarLatticeField m2;
    m2.v.assign(reg.size(), 0.0);
    for (std::size_t i = 0; i < reg.size(); ++i) {
        const SiteIndex x = reg.sites[i];
        for (int j = 0; j < geom.degree; ++j) {
            const SiteIndex y = geom.neighbor(x, j);
            if (y < 0) continue;
            double gy = 0.0;
            if (reg.contains(y))
                gy = gprime.v[static_cast<std::size_t>(reg.local(y))];
            else if (spec.boundary != LaplacianBoundary::Dirichlet)
                continue; // neumann: no crossing contribution
            const double dgj = gy - gprime.v[i];
            m2.v[i] += dgj * dgj;
        }
    }
    return m2;
}

Eigen::MatrixXd dense_laplacian(const LaplacianSpec& spec) {
    const auto& geom = *spec.geom;
    const auto& reg = *spec.region;
    const auto m = static_cast<Eigen::Index>(reg.size());
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const SiteIndex x = reg.sites[static_cast<std::size_t>(i)];
        A(i, i) += spec.mass2;
        for (int j = 0; j < geom.degree; ++j) {
            const SiteIndex y = geom.neighbor(x, j);
            if (y >= 0 && reg.contains(y)) {
                A(i, i) += 1.0;
                A(i, reg.local(y)) -= 1.0;
            } else if (spec.boundary == LaplacianBoundary::Dirichlet) {
                A(i, i) += 1.0;
            }
        }
    }
    return A;
}

Eigen::MatrixXd gaussian_model_covariance(const LatticeGeometry& geom, double eps, double beta) {
    if (geom.num_sites > 4096)
        throw std::invalid_argument("gaussian_model_covariance: lattice too large for dense algebra");
    std::vector<SiteIndex> all(static_cast<std::size_t>(geom.num_sites));
    for (SiteIndex s = 0; s < geom.num_sites; ++s) all[static_cast<std::size_t>(s)] = s;
    const Region reg = make_region(geom, all);
    LaplacianSpec spec{&geom, &reg, LaplacianBoundary::Dirichlet, 0.0};
    const Eigen::MatrixXd A = dense_laplacian(spec);
    const Eigen::MatrixXd Ainv = A.llt().solve(Eigen::MatrixXd::Identity(A.rows(), A.cols()));
    Eigen::MatrixXd C = Ainv / (2.0 * beta) + (eps * eps / 4.0) * Ainv * Ainv;
    C = 0.5 * (C + C.transpose()).eval();
    return C;
}

} // namespace rfo
