#pragma once

// Peierls machinery: bad boxes, contours built from L-boxes, the boundary
// layer, and the reflection surgery producing a comparison configuration.

#include <optional>
#include <string>
#include <vector>

#include "rfo/energy.hpp"
#include "rfo/fields.hpp"
#include "rfo/lattice.hpp"

namespace rfo {

enum class BadBoxReason { DirichletExcess, AngleDeviation };

struct BadBoxReport {
    Box box;
    BadBoxReason reason = BadBoxReason::DirichletExcess;
    double dirichlet = 0;
    double threshold = 0;
    double psi = 0;           // block angle, atan2 of the block-average spin
    bool psi_defined = true;  // false when the block average nearly vanishes
    double axis_distance = 0; // angular distance of psi to {0, pi}
};

// classify every ell-box of the tiling; entries are the bad ones
std::vector<BadBoxReport> detect_bad_boxes(const LatticeGeometry& geom,
                                           const SpinConfiguration& sigma,
                                           const DisorderField& alpha,
                                           const ModelParams& p);

struct Contour {
    std::vector<Box> boxes;            // flagged L-boxes, maximal connected union
    std::vector<SiteIndex> support;    // union of box sites (Gamma)
    int sign = 0;                      // +1 / -1 once the layer is found, else 0
    bool layer_found = false;
    std::string failure;               // nonempty if find_layer gave up
    std::vector<SiteIndex> layer;      // the layer L
    std::vector<std::vector<SiteIndex>> layer_components;
    std::vector<int> layer_component_signs;
};

struct ContourSet {
    std::vector<Contour> contours;
    std::vector<Box> flagged_L_boxes;
};

ContourSet build_contours(const LatticeGeometry& geom, const std::vector<BadBoxReport>& bad,
                          const ModelParams& p);

// expand-and-test layer search (thickness L, up to max_attempts outward steps);
// on success fills layer, component signs and the contour's +- label
void find_layer(const LatticeGeometry& geom, const SpinConfiguration& sigma,
                const ModelParams& p, Contour& contour, int max_attempts = 5);

struct SurgeryRecord {
    double energy_before = 0;
    double energy_after = 0;
    double gap = 0;                // before - after, the energy extracted
    double near_axis_fraction = 0; // fraction of A within delta of {0, pi}
    std::size_t optimization_region_size = 0;
    bool converged = true;
    std::string note;
};

struct SurgeryResult {
    SpinConfiguration sigma_tilde;
    SurgeryRecord record;
};

SurgeryResult surgery(const LatticeGeometry& geom, const SpinConfiguration& sigma,
                      const Contour& contour, const DisorderField& alpha,
                      const ModelParams& p);

} // namespace rfo
