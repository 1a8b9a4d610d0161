#pragma once

// Finite hypercubic lattice Lambda_N = {-N/2, ..., N/2-1}^d with free (open)
// boundary by default. Sites are indexed row-major over coordinates shifted
// to {0, ..., N-1}^d, axis 0 fastest.

#include <cstdint>
#include <utility>
#include <vector>

namespace rfo {

using SiteIndex = std::int64_t;

struct LatticeGeometry {
    int d = 0;
    int N = 0;             // side for cubic lattices; 0 for rectangular ones
    std::vector<int> dims; // per-axis extent
    bool periodic = false;
    SiteIndex num_sites = 0;
    int degree = 0; // 2*d slots per site in the neighbor table

    std::vector<SiteIndex> neighbor_table; // num_sites*degree, -1 where absent
    std::vector<std::pair<SiteIndex, SiteIndex>> edges; // each unordered pair once
    std::vector<SiteIndex> boundary_sites;
    std::vector<char> on_boundary;

    SiteIndex neighbor(SiteIndex s, int dir) const { return neighbor_table[s * degree + dir]; }
    int num_neighbors(SiteIndex s) const {
        int c = 0;
        for (int j = 0; j < degree; ++j)
            if (neighbor(s, j) >= 0) ++c;
        return c;
    }

    // per-axis coordinate bounds, {axis_lo, ..., axis_hi}
    int axis_lo(int axis) const { return -dims[static_cast<std::size_t>(axis)] / 2; }
    int axis_hi(int axis) const {
        return dims[static_cast<std::size_t>(axis)] - 1 - dims[static_cast<std::size_t>(axis)] / 2;
    }
    // coordinate in {axis_lo, ..., axis_hi} (= {-N/2, ..., N/2-1} when cubic)
    int coord(SiteIndex s, int axis) const;
    // shifted coordinate in {0, ..., dims[axis]-1}
    int shifted_coord(SiteIndex s, int axis) const;
    SiteIndex site_at(const std::vector<int>& coords) const; // lattice coords
    SiteIndex origin() const;                                // site with all coords 0

    int linf_distance(SiteIndex a, SiteIndex b) const;
    double euclid_distance(SiteIndex a, SiteIndex b) const;
};

LatticeGeometry build_lattice(int d, int N, bool periodic = false);
// rectangular box with the given per-axis extents (any sizes >= 2)
LatticeGeometry build_lattice_rect(const std::vector<int>& dims, bool periodic = false);

struct Box {
    std::vector<int> anchor; // lattice coords of the low corner (unclipped grid point)
    int side = 0;
    std::vector<SiteIndex> sites; // sorted, clipped to Lambda_N
};

// Boxes anchored on offset + side*Z^d, clipped to the lattice; a partition.
std::vector<Box> tile_boxes(const LatticeGeometry& geom, int side,
                            const std::vector<int>& offset = {});

struct Region {
    std::vector<SiteIndex> sites; // sorted
    bool connected = false;
    std::vector<std::pair<SiteIndex, SiteIndex>> internal_edges;
    std::vector<SiteIndex> external_boundary; // sites outside with a neighbor inside
    std::vector<std::int32_t> local_index;    // full-lattice lookup, -1 outside

    std::size_t size() const { return sites.size(); }
    bool contains(SiteIndex s) const { return local_index[static_cast<std::size_t>(s)] >= 0; }
    std::int32_t local(SiteIndex s) const { return local_index[static_cast<std::size_t>(s)]; }
};

Region make_region(const LatticeGeometry& geom, std::vector<SiteIndex> sites);
Region box_region(const LatticeGeometry& geom, const Box& box);

// maximal nearest-neighbor-connected pieces of an arbitrary site set
std::vector<Region> connected_components(const LatticeGeometry& geom,
                                         const std::vector<SiteIndex>& sites);

} // namespace rfo
