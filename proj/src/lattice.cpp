#include "rfo/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <queue>
#include <stdexcept>

namespace rfo {

int LatticeGeometry::shifted_coord(SiteIndex s, int axis) const {
    SiteIndex v = s;
    for (int j = 0; j < axis; ++j) v /= dims[static_cast<std::size_t>(j)];
    return static_cast<int>(v % dims[static_cast<std::size_t>(axis)]);
}

int LatticeGeometry::coord(SiteIndex s, int axis) const {
    return shifted_coord(s, axis) - dims[static_cast<std::size_t>(axis)] / 2;
}

SiteIndex LatticeGeometry::site_at(const std::vector<int>& coords) const {
    SiteIndex s = 0;
    SiteIndex stride = 1;
    for (int j = 0; j < d; ++j) {
        const int nj = dims[static_cast<std::size_t>(j)];
        const int c = coords[static_cast<std::size_t>(j)] + nj / 2;
        if (c < 0 || c >= nj) throw std::out_of_range("site_at: coordinate outside lattice");
        s += stride * c;
        stride *= nj;
    }
    return s;
}

SiteIndex LatticeGeometry::origin() const {
    std::vector<int> z(static_cast<std::size_t>(d), 0);
    return site_at(z);
}

int LatticeGeometry::linf_distance(SiteIndex a, SiteIndex b) const {
    int m = 0;
    for (int j = 0; j < d; ++j) m = std::max(m, std::abs(coord(a, j) - coord(b, j)));
    return m;
}

double LatticeGeometry::euclid_distance(SiteIndex a, SiteIndex b) const {
    double s = 0;
    for (int j = 0; j < d; ++j) {
        const double dj = coord(a, j) - coord(b, j);
        s += dj * dj;
    }
    return std::sqrt(s);
}

LatticeGeometry build_lattice(int d, int N, bool periodic) {
    if (N < 2 || N % 2 != 0) throw std::invalid_argument("build_lattice: N must be even and >= 2");
    LatticeGeometry g = build_lattice_rect(std::vector<int>(static_cast<std::size_t>(d), N), periodic);
    g.N = N;
    return g;
}

LatticeGeometry build_lattice_rect(const std::vector<int>& dims, bool periodic) {
    const int d = static_cast<int>(dims.size());
    if (d < 2) throw std::invalid_argument("build_lattice: d must be >= 2");
    for (const int nj : dims)
        if (nj < 2) throw std::invalid_argument("build_lattice: every extent must be >= 2");

    LatticeGeometry g;
    g.d = d;
    g.N = 0;
    g.dims = dims;
    g.periodic = periodic;
    g.degree = 2 * d;
    g.num_sites = 1;
    for (int j = 0; j < d; ++j) g.num_sites *= dims[static_cast<std::size_t>(j)];

    g.neighbor_table.assign(static_cast<std::size_t>(g.num_sites) * g.degree, -1);
    g.on_boundary.assign(static_cast<std::size_t>(g.num_sites), 0);

    std::vector<SiteIndex> strides(static_cast<std::size_t>(d), 1);
    for (int j = 1; j < d; ++j)
        strides[static_cast<std::size_t>(j)] =
            strides[static_cast<std::size_t>(j - 1)] * dims[static_cast<std::size_t>(j - 1)];

    for (SiteIndex s = 0; s < g.num_sites; ++s) {
        bool bdry = false;
        for (int j = 0; j < d; ++j) {
            const int nj = dims[static_cast<std::size_t>(j)];
            const int c = g.shifted_coord(s, j);
            if (c == 0 || c == nj - 1) bdry = true;
            // direction 2j: +e_j, direction 2j+1: -e_j
            if (c + 1 < nj)
                g.neighbor_table[static_cast<std::size_t>(s) * g.degree + 2 * j] = s + strides[static_cast<std::size_t>(j)];
            else if (periodic)
                g.neighbor_table[static_cast<std::size_t>(s) * g.degree + 2 * j] = s - strides[static_cast<std::size_t>(j)] * (nj - 1);
            if (c - 1 >= 0)
                g.neighbor_table[static_cast<std::size_t>(s) * g.degree + 2 * j + 1] = s - strides[static_cast<std::size_t>(j)];
            else if (periodic)
                g.neighbor_table[static_cast<std::size_t>(s) * g.degree + 2 * j + 1] = s + strides[static_cast<std::size_t>(j)] * (nj - 1);
        }
        if (!periodic && bdry) {
            g.on_boundary[static_cast<std::size_t>(s)] = 1;
            g.boundary_sites.push_back(s);
        }
    }

    for (SiteIndex s = 0; s < g.num_sites; ++s)
        for (int j = 0; j < g.degree; ++j) {
            const SiteIndex t = g.neighbor(s, j);
            if (t > s) g.edges.emplace_back(s, t);
        }

    return g;
}

std::vector<Box> tile_boxes(const LatticeGeometry& geom, int side, const std::vector<int>& offset) {
    if (side < 1) throw std::invalid_argument("tile_boxes: side out of range");
    std::vector<int> off(static_cast<std::size_t>(geom.d), 0);
    for (std::size_t j = 0; j < offset.size() && j < off.size(); ++j) off[j] = offset[j];

    // anchors on corner + offset + side*Z^d whose box intersects the lattice
    std::vector<std::vector<int>> axis_anchors(static_cast<std::size_t>(geom.d));
    for (int j = 0; j < geom.d; ++j) {
        const int lo = geom.axis_lo(j), hi = geom.axis_hi(j);
        // smallest grid point a with a + side - 1 >= lo
        int a0 = lo + off[static_cast<std::size_t>(j)];
        while (a0 + side - 1 >= lo) a0 -= side;
        a0 += side;
        for (int a = a0; a <= hi; a += side) axis_anchors[static_cast<std::size_t>(j)].push_back(a);
    }

    std::vector<Box> boxes;
    std::vector<std::size_t> idx(static_cast<std::size_t>(geom.d), 0);
    while (true) {
        Box b;
        b.side = side;
        b.anchor.resize(static_cast<std::size_t>(geom.d));
        for (int j = 0; j < geom.d; ++j)
            b.anchor[static_cast<std::size_t>(j)] = axis_anchors[static_cast<std::size_t>(j)][idx[static_cast<std::size_t>(j)]];
        // enumerate clipped sites
        std::vector<int> c(static_cast<std::size_t>(geom.d));
        std::vector<int> c0(static_cast<std::size_t>(geom.d)), c1(static_cast<std::size_t>(geom.d));
        for (int j = 0; j < geom.d; ++j) {
            c0[static_cast<std::size_t>(j)] = std::max(geom.axis_lo(j), b.anchor[static_cast<std::size_t>(j)]);
            c1[static_cast<std::size_t>(j)] = std::min(geom.axis_hi(j), b.anchor[static_cast<std::size_t>(j)] + side - 1);
        }
        c = c0;
        while (true) {
            b.sites.push_back(geom.site_at(c));
            int j = 0;
            for (; j < geom.d; ++j) {
                if (++c[static_cast<std::size_t>(j)] <= c1[static_cast<std::size_t>(j)]) break;
                c[static_cast<std::size_t>(j)] = c0[static_cast<std::size_t>(j)];
            }
            if (j == geom.d) break;
        }
        std::sort(b.sites.begin(), b.sites.end());
        boxes.push_back(std::move(b));

        int j = 0;
        for (; j < geom.d; ++j) {
            if (++idx[static_cast<std::size_t>(j)] < axis_anchors[static_cast<std::size_t>(j)].size()) break;
            idx[static_cast<std::size_t>(j)] = 0;
        }
        if (j == geom.d) break;
    }
    return boxes;
}

Region make_region(const LatticeGeometry& geom, std::vector<SiteIndex> sites) {
    std::sort(sites.begin(), sites.end());
    sites.erase(std::unique(sites.begin(), sites.end()), sites.end());

    Region r;
    r.sites = std::move(sites);
    r.local_index.assign(static_cast<std::size_t>(geom.num_sites), -1);
    for (std::size_t i = 0; i < r.sites.size(); ++i)
        r.local_index[static_cast<std::size_t>(r.sites[i])] = static_cast<std::int32_t>(i);

    std::vector<char> ext(static_cast<std::size_t>(geom.num_sites), 0);
    for (const SiteIndex s : r.sites)
        for (int j = 0; j < geom.degree; ++j) {
            const SiteIndex t = geom.neighbor(s, j);
            if (t < 0) continue;
            if (r.contains(t)) {
                if (t > s) r.internal_edges.emplace_back(s, t);
            } else {
                ext[static_cast<std::size_t>(t)] = 1;
            }
        }
    for (SiteIndex s = 0; s < geom.num_sites; ++s)
        if (ext[static_cast<std::size_t>(s)]) r.external_boundary.push_back(s);

    // connectivity via BFS over internal edges
    r.connected = true;
    if (!r.sites.empty()) {
        std::vector<char> seen(r.sites.size(), 0);
        std::queue<SiteIndex> q;
        q.push(r.sites[0]);
        seen[0] = 1;
        std::size_t cnt = 1;
        while (!q.empty()) {
            const SiteIndex s = q.front();
            q.pop();
            for (int j = 0; j < geom.degree; ++j) {
                const SiteIndex t = geom.neighbor(s, j);
                if (t < 0 || !r.contains(t)) continue;
                const auto li = static_cast<std::size_t>(r.local(t));
                if (!seen[li]) {
                    seen[li] = 1;
                    ++cnt;
                    q.push(t);
                }
            }
        }
        r.connected = (cnt == r.sites.size());
    }
    return r;
}

Region box_region(const LatticeGeometry& geom, const Box& box) {
    return make_region(geom, box.sites);
}

std::vector<Region> connected_components(const LatticeGeometry& geom,
                                         const std::vector<SiteIndex>& sites) {
    std::vector<SiteIndex> sorted = sites;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

    std::vector<char> in(static_cast<std::size_t>(geom.num_sites), 0);
    for (const SiteIndex s : sorted) in[static_cast<std::size_t>(s)] = 1;
    std::vector<char> seen(static_cast<std::size_t>(geom.num_sites), 0);

    std::vector<Region> comps;
    for (const SiteIndex s0 : sorted) {
        if (seen[static_cast<std::size_t>(s0)]) continue;
        std::vector<SiteIndex> comp;
        std::queue<SiteIndex> q;
        q.push(s0);
        seen[static_cast<std::size_t>(s0)] = 1;
        while (!q.empty()) {
            const SiteIndex s = q.front();
            q.pop();
            comp.push_back(s);
            for (int j = 0; j < geom.degree; ++j) {
                const SiteIndex t = geom.neighbor(s, j);
                if (t < 0 || !in[static_cast<std::size_t>(t)] || seen[static_cast<std::size_t>(t)]) continue;
                seen[static_cast<std::size_t>(t)] = 1;
                q.push(t);
            }
        }
        comps.push_back(make_region(geom, std::move(comp)));
    }
    return comps;
}

} // namespace rfo
