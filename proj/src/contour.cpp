#include "rfo/contour.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <stdexcept>

#include "rfo/renorm.hpp"

namespace rfo {

namespace {

constexpr double kPi = 3.14159265358979323846;

// L-infinity distance to a source set, via BFS on the king graph (all
// 3^d - 1 offsets); -1 where unreachable (cannot happen on a box)
std::vector<int> linf_distance_field(const LatticeGeometry& geom,
                                     const std::vector<char>& source) {
    std::vector<int> dist(static_cast<std::size_t>(geom.num_sites), -1);
    std::queue<SiteIndex> q;
    for (SiteIndex s = 0; s < geom.num_sites; ++s)
        if (source[static_cast<std::size_t>(s)]) {
            dist[static_cast<std::size_t>(s)] = 0;
            q.push(s);
        }
    // offsets in {-1,0,1}^d minus the origin
    const int d = geom.d;
    std::vector<std::vector<int>> offsets;
    std::vector<int> off(static_cast<std::size_t>(d), -1);
    while (true) {
        bool zero = true;
        for (const int o : off)
            if (o != 0) zero = false;
        if (!zero) offsets.push_back(off);
        int j = 0;
        for (; j < d; ++j) {
            if (++off[static_cast<std::size_t>(j)] <= 1) break;
            off[static_cast<std::size_t>(j)] = -1;
        }
        if (j == d) break;
    }
    std::vector<int> c(static_cast<std::size_t>(d)), nc(static_cast<std::size_t>(d));
    while (!q.empty()) {
        const SiteIndex s = q.front();
        q.pop();
        for (int j = 0; j < d; ++j) c[static_cast<std::size_t>(j)] = geom.coord(s, j);
        for (const auto& o : offsets) {
            bool ok = true;
            for (int j = 0; j < d; ++j) {
                nc[static_cast<std::size_t>(j)] = c[static_cast<std::size_t>(j)] + o[static_cast<std::size_t>(j)];
                if (nc[static_cast<std::size_t>(j)] < geom.axis_lo(j) || nc[static_cast<std::size_t>(j)] > geom.axis_hi(j)) ok = false;
            }
            if (!ok) continue;
            const SiteIndex t = geom.site_at(nc);
            if (dist[static_cast<std::size_t>(t)] < 0) {
                dist[static_cast<std::size_t>(t)] = dist[static_cast<std::size_t>(s)] + 1;
                q.push(t);
            }
        }
    }
    return dist;
}

// clipped coordinate range of a box along an axis
std::pair<int, int> box_range(const LatticeGeometry& geom, const Box& b, int axis) {
    return {std::max(geom.axis_lo(axis), b.anchor[static_cast<std::size_t>(axis)]),
            std::min(geom.axis_hi(axis), b.anchor[static_cast<std::size_t>(axis)] + b.side - 1)};
}

int box_linf_distance(const LatticeGeometry& geom, const Box& a, const Box& b) {
    int m = 0;
    for (int j = 0; j < geom.d; ++j) {
        const auto [a0, a1] = box_range(geom, a, j);
        const auto [b0, b1] = box_range(geom, b, j);
        int gap = 0;
        if (a1 < b0) gap = b0 - a1;
        else if (b1 < a0) gap = a0 - b1;
        m = std::max(m, gap);
    }
    return m;
}

int box_gap_sum(const LatticeGeometry& geom, const Box& a, const Box& b) {
    int s = 0;
    for (int j = 0; j < geom.d; ++j) {
        const auto [a0, a1] = box_range(geom, a, j);
        const auto [b0, b1] = box_range(geom, b, j);
        if (a1 < b0) s += b0 - a1;
        else if (b1 < a0) s += a0 - b1;
    }
    return s;
}

int sign_of(double v) { return v > 0 ? 1 : (v < 0 ? -1 : 0); }

} // namespace

std::vector<BadBoxReport> detect_bad_boxes(const LatticeGeometry& geom,
                                           const SpinConfiguration& sigma,
                                           const DisorderField& alpha,
                                           const ModelParams& p) {
    if (p.n != 2 || p.k != 1)
        throw std::invalid_argument("detect_bad_boxes: angle criterion needs n=2, k=1");
    (void)alpha;
    const auto boxes = tile_boxes(geom, p.ell);
    std::vector<BadBoxReport> bad;
    for (const auto& box : boxes) {
        BadBoxReport rep;
        rep.box = box;
        rep.threshold = p.bad_box_factor * 4.0 * p.eps_d() * p.eps_d() *
                        static_cast<double>(box.sites.size());

        // Dirichlet energy over internal edges, via coordinate bounds
        double dir = 0;
        for (const SiteIndex x : box.sites)
            for (int j = 0; j < geom.d; ++j) {
                const SiteIndex y = geom.neighbor(x, 2 * j); // +e_j
                if (y < 0) continue;
                const auto [r0, r1] = box_range(geom, box, j);
                if (geom.coord(y, j) > r1 || geom.coord(y, j) < r0) continue;
                const double* sx = sigma.spin(x);
                const double* sy = sigma.spin(y);
                const double d0 = sx[0] - sy[0], d1 = sx[1] - sy[1];
                dir += d0 * d0 + d1 * d1;
            }
        rep.dirichlet = dir;

        double m0 = 0, m1 = 0;
        for (const SiteIndex x : box.sites) {
            m0 += sigma.spin(x)[0];
            m1 += sigma.spin(x)[1];
        }
        m0 /= static_cast<double>(box.sites.size());
        m1 /= static_cast<double>(box.sites.size());
        const double norm = std::sqrt(m0 * m0 + m1 * m1);
        if (norm < 1e-9) {
            rep.psi_defined = false;
            rep.axis_distance = kPi / 2;
        } else {
            rep.psi = std::atan2(m1, m0);
            rep.axis_distance = std::min(std::fabs(rep.psi), kPi - std::fabs(rep.psi));
        }

        if (dir > rep.threshold) {
            rep.reason = BadBoxReason::DirichletExcess;
            bad.push_back(rep);
        } else if (!rep.psi_defined || rep.axis_distance > p.xi) {
            rep.reason = BadBoxReason::AngleDeviation;
            bad.push_back(rep);
        }
    }
    return bad;
}

ContourSet build_contours(const LatticeGeometry& geom, const std::vector<BadBoxReport>& bad,
                          const ModelParams& p) {
    if (p.L % p.ell != 0)
        throw std::invalid_argument("build_contours: L must be a multiple of ell");
    ContourSet cs;
    if (bad.empty()) return cs;

    const auto L_boxes = tile_boxes(geom, p.L);
    std::vector<std::size_t> flagged;
    for (std::size_t i = 0; i < L_boxes.size(); ++i)
        for (const auto& b : bad)
            if (2 * box_linf_distance(geom, L_boxes[i], b.box) <= 3 * p.L) {
                flagged.push_back(i);
                break;
            }
    for (const std::size_t i : flagged) cs.flagged_L_boxes.push_back(L_boxes[i]);

    // union-find over flagged boxes, face adjacency
    std::vector<std::size_t> parent(flagged.size());
    std::iota(parent.begin(), parent.end(), 0);
    const auto find = [&](std::size_t a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    };
    for (std::size_t i = 0; i < flagged.size(); ++i)
        for (std::size_t j = i + 1; j < flagged.size(); ++j)
            if (box_gap_sum(geom, L_boxes[flagged[i]], L_boxes[flagged[j]]) == 1) {
                const auto ri = find(i), rj = find(j);
                if (ri != rj) parent[ri] = rj;
            }

    std::vector<std::size_t> roots;
    for (std::size_t i = 0; i < flagged.size(); ++i)
        if (find(i) == i) roots.push_back(i);
    for (const std::size_t r : roots) {
        Contour c;
        for (std::size_t i = 0; i < flagged.size(); ++i)
            if (find(i) == r) {
                c.boxes.push_back(L_boxes[flagged[i]]);
                c.support.insert(c.support.end(), L_boxes[flagged[i]].sites.begin(),
                                 L_boxes[flagged[i]].sites.end());
            }
        std::sort(c.support.begin(), c.support.end());
        cs.contours.push_back(std::move(c));
    }
    return cs;
}

void find_layer(const LatticeGeometry& geom, const SpinConfiguration& sigma,
                const ModelParams& p, Contour& contour, int max_attempts) {
    contour.layer_found = false;
    contour.failure.clear();

    std::vector<char> in_gamma(static_cast<std::size_t>(geom.num_sites), 0);
    for (const SiteIndex s : contour.support) in_gamma[static_cast<std::size_t>(s)] = 1;
    const auto dist = linf_distance_field(geom, in_gamma);

    for (int attempt = 1; attempt <= max_attempts; ++attempt) {
        const int thickness = attempt * p.L;
        std::vector<SiteIndex> layer;
        std::vector<char> in_region(static_cast<std::size_t>(geom.num_sites), 0); // Gamma u L
        for (SiteIndex s = 0; s < geom.num_sites; ++s) {
            if (in_gamma[static_cast<std::size_t>(s)]) {
                in_region[static_cast<std::size_t>(s)] = 1;
            } else if (dist[static_cast<std::size_t>(s)] <= thickness) {
                layer.push_back(s);
                in_region[static_cast<std::size_t>(s)] = 1;
            }
        }

        std::vector<SiteIndex> complement;
        for (SiteIndex s = 0; s < geom.num_sites; ++s)
            if (!in_region[static_cast<std::size_t>(s)]) complement.push_back(s);
        if (complement.empty()) {
            contour.failure = "layer exhausted the lattice";
            return;
        }

        // boundary condition: |sigma . e1| > 1/2 on layer sites adjacent to the complement
        bool ok = true;
        for (const SiteIndex s : layer) {
            bool at_boundary = false;
            for (int j = 0; j < geom.degree && !at_boundary; ++j) {
                const SiteIndex t = geom.neighbor(s, j);
                if (t >= 0 && !in_region[static_cast<std::size_t>(t)]) at_boundary = true;
            }
            if (at_boundary && std::fabs(sigma.spin(s)[0]) <= 0.5) {
                ok = false;
                break;
            }
        }
        if (!ok) continue;

        // constant sign of sigma . e1 on each layer component
        const auto comps = connected_components(geom, layer);
        std::vector<int> comp_signs(comps.size(), 0);
        for (std::size_t ci = 0; ci < comps.size() && ok; ++ci) {
            int s0 = 0;
            for (const SiteIndex s : comps[ci].sites) {
                const int sg = sign_of(sigma.spin(s)[0]);
                if (sg == 0) {
                    ok = false;
                    break;
                }
                if (s0 == 0) s0 = sg;
                else if (sg != s0) {
                    ok = false;
                    break;
                }
            }
            comp_signs[ci] = s0;
        }
        if (!ok) continue;

        // the external complement component (touching the lattice boundary, or
        // the largest one) fixes the contour's sign via the adjacent layer component
        const auto ext_comps = connected_components(geom, complement);
        std::size_t ext = 0;
        bool found_ext = false;
        std::size_t largest = 0;
        for (std::size_t ci = 0; ci < ext_comps.size(); ++ci) {
            if (ext_comps[ci].size() > ext_comps[largest].size()) largest = ci;
            for (const SiteIndex s : ext_comps[ci].sites)
                if (geom.on_boundary[static_cast<std::size_t>(s)]) {
                    ext = ci;
                    found_ext = true;
                    break;
                }
            if (found_ext) break;
        }
        if (!found_ext) ext = largest;

        int label = 0;
        for (std::size_t ci = 0; ci < comps.size() && label == 0; ++ci)
            for (const SiteIndex s : comps[ci].sites) {
                bool touches = false;
                for (int j = 0; j < geom.degree && !touches; ++j) {
                    const SiteIndex t = geom.neighbor(s, j);
                    if (t >= 0 && ext_comps[ext].contains(t)) touches = true;
                }
                if (touches) {
                    label = comp_signs[ci];
                    break;
                }
            }
        if (label == 0) continue;

        contour.layer = std::move(layer);
        contour.layer_components.clear();
        contour.layer_component_signs = comp_signs;
        for (const auto& c : comps) contour.layer_components.push_back(c.sites);
        contour.sign = label;
        contour.layer_found = true;
        return;
    }
    contour.failure = "layer conditions not attained within attempt budget";
}

SurgeryResult surgery(const LatticeGeometry& geom, const SpinConfiguration& sigma,
                      const Contour& contour, const DisorderField& alpha,
                      const ModelParams& p) {
    if (p.n != 2 || p.k != 1)
        throw std::invalid_argument("surgery: n=2, k=1 only");
    if (contour.boxes.empty() && contour.support.empty()) {
        SurgeryResult out;
        out.sigma_tilde = sigma;
        out.record.energy_before = total_energy(geom, sigma, alpha, p).total;
        out.record.energy_after = out.record.energy_before;
        out.record.note = "empty contour";
        return out;
    }
    if (!contour.layer_found)
        throw std::invalid_argument("surgery: contour has no layer");

    SurgeryResult out;
    out.record.energy_before = total_energy(geom, sigma, alpha, p).total;

    // R = Gamma u L
    std::vector<SiteIndex> r_sites = contour.support;
    r_sites.insert(r_sites.end(), contour.layer.begin(), contour.layer.end());
    const Region R = make_region(geom, std::move(r_sites));
    out.record.optimization_region_size = R.size();

    const AngleField theta = to_angles(sigma);
    const ScalarLatticeField gprime = massive_green_field(geom, R, alpha, p.ell);
    ScalarLatticeField scaled = gprime;
    for (double& v : scaled.v) v *= p.eps;
    LaplacianSpec mspec{&geom, &R, LaplacianBoundary::Dirichlet, 0.0};
    const ScalarLatticeField m2_R = mass_field(mspec, scaled);

    // phi boundary values: transformed angles inside R, raw angles outside
    AngleField phi_bdy = theta;
    for (std::size_t i = 0; i < R.size(); ++i) {
        const double th = theta.theta[static_cast<std::size_t>(R.sites[i])];
        phi_bdy.theta[static_cast<std::size_t>(R.sites[i])] = th - p.eps * std::cos(th) * gprime.v[i];
    }

    const auto restrict_field = [&](const Region& sub, const ScalarLatticeField& f) {
        ScalarLatticeField g;
        g.v.resize(sub.size());
        for (std::size_t i = 0; i < sub.size(); ++i)
            g.v[i] = f.v[static_cast<std::size_t>(R.local(sub.sites[i]))];
        return g;
    };

    // step 2: optimize K per layer component with sigma boundary; sigma' spins
    SpinConfiguration sigma_prime = sigma;
    for (const auto& comp_sites : contour.layer_components) {
        const Region C = make_region(geom, comp_sites);
        const ScalarLatticeField gC = restrict_field(C, gprime);
        const ScalarLatticeField m2C = restrict_field(C, m2_R);
        RegionAngles init;
        init.v.resize(C.size());
        for (std::size_t i = 0; i < C.size(); ++i)
            init.v[i] = phi_bdy.theta[static_cast<std::size_t>(C.sites[i])];
        const RegionAngles opt =
            maximize_renormalized_energy(geom, C, m2C, &phi_bdy, init, 1e-8, 4000);
        const RegionAngles th_opt = invert_change_of_variables(C, opt, gC, p.eps);
        for (std::size_t i = 0; i < C.size(); ++i) {
            double* sp = sigma_prime.spin(C.sites[i]);
            sp[0] = std::cos(th_opt.v[i]);
            sp[1] = std::sin(th_opt.v[i]);
        }
    }

    // step 3: A = deep interior of R; free-boundary optimizer of K_A
    std::vector<char> not_R(static_cast<std::size_t>(geom.num_sites), 0);
    for (SiteIndex s = 0; s < geom.num_sites; ++s)
        if (!R.contains(s)) not_R[static_cast<std::size_t>(s)] = 1;
    const auto dist_to_outside = linf_distance_field(geom, not_R);
    std::vector<SiteIndex> a_sites;
    for (const SiteIndex s : R.sites)
        if (2 * dist_to_outside[static_cast<std::size_t>(s)] > p.L) a_sites.push_back(s);
    if (a_sites.empty()) {
        out.record.converged = false;
        out.record.note = "A region empty; layer too thin relative to L";
        out.sigma_tilde = sigma;
        out.record.energy_after = out.record.energy_before;
        return out;
    }
    const Region A = make_region(geom, a_sites);
    const ScalarLatticeField gA = restrict_field(A, gprime);
    const ScalarLatticeField m2A = restrict_field(A, m2_R);
    RegionAngles zero;
    zero.v.assign(A.size(), 0.0);
    const RegionAngles phiA = maximize_renormalized_energy(geom, A, m2A, nullptr, zero, 1e-8, 4000);
    RegionAngles etaA = invert_change_of_variables(A, phiA, gA, p.eps);

    const int target = contour.sign;
    if (target < 0)
        for (double& t : etaA.v) t = kPi - t; // reflect across the field axis
    SpinConfiguration sigma_tilde = sigma_prime;

    // step 4: align internal components of Lambda \ A by reflection
    std::vector<SiteIndex> outside_A;
    for (SiteIndex s = 0; s < geom.num_sites; ++s)
        if (!A.contains(s)) outside_A.push_back(s);
    const auto out_comps = connected_components(geom, outside_A);
    std::size_t ext = 0;
    bool found_ext = false;
    std::size_t largest = 0;
    for (std::size_t ci = 0; ci < out_comps.size(); ++ci) {
        if (out_comps[ci].size() > out_comps[largest].size()) largest = ci;
        for (const SiteIndex s : out_comps[ci].sites)
            if (geom.on_boundary[static_cast<std::size_t>(s)]) {
                ext = ci;
                found_ext = true;
                break;
            }
        if (found_ext) break;
    }
    if (!found_ext) ext = largest;

    for (std::size_t ci = 0; ci < out_comps.size(); ++ci) {
        if (ci == ext) continue; // external side keeps sigma as is
        // sign of the component's layer fringe after step 2
        double acc = 0;
        for (const SiteIndex s : out_comps[ci].sites)
            if (R.contains(s)) acc += sigma_prime.spin(s)[0];
        const int sg = sign_of(acc);
        if (sg != 0 && sg != target)
            reflect_spins(sigma_tilde, out_comps[ci].sites, p.k);
    }

    // step 5: paste the free optimizer on A
    double near_axis = 0;
    for (std::size_t i = 0; i < A.size(); ++i) {
        double* sp = sigma_tilde.spin(A.sites[i]);
        sp[0] = std::cos(etaA.v[i]);
        sp[1] = std::sin(etaA.v[i]);
        const double ax = std::min(std::fabs(canonical_angle(etaA.v[i])),
                                   kPi - std::fabs(canonical_angle(etaA.v[i])));
        if (ax <= p.delta) near_axis += 1.0;
    }
    out.record.near_axis_fraction = near_axis / static_cast<double>(A.size());

    out.sigma_tilde = std::move(sigma_tilde);
    out.record.energy_after = total_energy(geom, out.sigma_tilde, alpha, p).total;
    out.record.gap = out.record.energy_before - out.record.energy_after;
    return out;
}

} // namespace rfo
