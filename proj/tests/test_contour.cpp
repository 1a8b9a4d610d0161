#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "rfo/contour.hpp"
#include "rfo/energy.hpp"
#include "rfo/groundstate.hpp"
#include "rfo/lattice.hpp"

using namespace rfo;

namespace {

constexpr double kPi = 3.14159265358979323846;

ModelParams wall_params(double eps) {
    ModelParams p;
    p.d = 2;
    p.eps = eps;
    p.bc = BoundaryKind::FieldU;
    p.ell = 4;
    p.L = 8;
    return p;
}

// interval-to-interval sup-distance between two boxes given by anchors+side
int anchor_distance(const std::vector<int>& a1, int s1, const std::vector<int>& a2, int s2) {
    int m = 0;
    for (std::size_t j = 0; j < a1.size(); ++j) {
        const int lo1 = a1[j], hi1 = a1[j] + s1 - 1;
        const int lo2 = a2[j], hi2 = a2[j] + s2 - 1;
        const int gap = std::max({0, lo1 - hi2, lo2 - hi1});
        m = std::max(m, gap);
    }
    return m;
}

std::vector<SiteIndex> linf_ball(const LatticeGeometry& g, int radius) {
    std::vector<SiteIndex> out;
    for (SiteIndex x = 0; x < g.num_sites; ++x) {
        int m = 0;
        for (int j = 0; j < g.d; ++j) m = std::max(m, std::abs(g.coord(x, j)));
        if (m <= radius) out.push_back(x);
    }
    return out;
}

} // namespace

TEST_SUITE("contour") {

TEST_CASE("uniform e1 has no bad boxes and no contours") {
    const auto g = build_lattice(2, 16);
    ModelParams p = wall_params(0.2);
    p.finalize(16);
    const auto a = sample_disorder(g, 1, 41, 0);
    const auto s = constant_configuration(g, 2, 0);
    const auto bad = detect_bad_boxes(g, s, a, p);
    CHECK(bad.empty());
    const auto cs = build_contours(g, bad, p);
    CHECK(cs.contours.empty());
    CHECK(cs.flagged_L_boxes.empty());
}

TEST_CASE("uniform e2: every box is angle-deviant, layer search fails") {
    const auto g = build_lattice(2, 16);
    ModelParams p = wall_params(0.2);
    p.finalize(16);
    const auto a = sample_disorder(g, 1, 42, 0);
    const auto s = constant_configuration(g, 2, 1);
    const auto bad = detect_bad_boxes(g, s, a, p);
    CHECK(bad.size() == tile_boxes(g, p.ell).size());
    for (const auto& b : bad) {
        CHECK(b.reason == BadBoxReason::AngleDeviation);
        CHECK(b.psi == doctest::Approx(kPi / 2));
        CHECK(b.axis_distance == doctest::Approx(kPi / 2));
        CHECK(b.dirichlet == doctest::Approx(0.0));
    }
    auto cs = build_contours(g, bad, p);
    REQUIRE(cs.contours.size() == 1);
    find_layer(g, s, p, cs.contours[0]);
    CHECK(!cs.contours[0].layer_found);
    CHECK(!cs.contours[0].failure.empty());
    CHECK(cs.contours[0].sign == 0);
}

TEST_CASE("domain wall: bad boxes exactly along the strip") {
    const auto g = build_lattice(2, 16);
    ModelParams p = wall_params(0.2);
    p.finalize(16);
    const auto a = sample_disorder(g, 1, 43, 0);
    auto s = constant_configuration(g, 2, 0);
    for (SiteIndex x = 0; x < g.num_sites; ++x) {
        const int c = g.coord(x, 0);
        const double t = c < 0 ? 0.0 : (c == 0 ? kPi / 2 : kPi);
        s.spin(x)[0] = std::cos(t);
        s.spin(x)[1] = std::sin(t);
    }
    const auto bad = detect_bad_boxes(g, s, a, p);
    // the wall crosses the column of boxes anchored at x = 0; N=16, ell=4
    // gives 4 of them, all over the Dirichlet threshold
    REQUIRE(bad.size() == 4);
    for (const auto& b : bad) {
        CHECK(b.box.anchor[0] == 0);
        CHECK(b.reason == BadBoxReason::DirichletExcess);
        CHECK(b.dirichlet > b.threshold);
        CHECK(b.dirichlet == doctest::Approx(8.0)); // 4 rows x 2 per quarter-turn edge
    }
    // and it is deterministic
    const auto again = detect_bad_boxes(g, s, a, p);
    REQUIRE(again.size() == bad.size());
    for (std::size_t i = 0; i < bad.size(); ++i) {
        CHECK(again[i].box.anchor == bad[i].box.anchor);
        CHECK(again[i].dirichlet == bad[i].dirichlet);
    }
}

TEST_CASE("contour grouping follows the 3L/2 rule") {
    const auto g = build_lattice(2, 64);
    ModelParams p = wall_params(0.2);
    p.finalize(64);
    const auto a = sample_disorder(g, 1, 44, 0);

    auto spot = [&](SpinConfiguration& s, int cx, int cy) {
        const SiteIndex x = g.site_at({cx, cy});
        s.spin(x)[0] = 0.0;
        s.spin(x)[1] = 1.0;
    };

    SUBCASE("one bad box flags every L-box within 3L/2") {
        auto s = constant_configuration(g, 2, 0);
        spot(s, -22, -22);
        const auto bad = detect_bad_boxes(g, s, a, p);
        REQUIRE(bad.size() == 1);
        const auto cs = build_contours(g, bad, p);
        REQUIRE(cs.contours.size() == 1);
        // brute-force the flag rule over the full L-tiling
        std::vector<std::vector<int>> expected;
        for (const auto& B : tile_boxes(g, p.L))
            if (2 * anchor_distance(B.anchor, p.L, bad[0].box.anchor, p.ell) <= 3 * p.L)
                expected.push_back(B.anchor);
        REQUIRE(cs.flagged_L_boxes.size() == expected.size());
        for (const auto& B : cs.flagged_L_boxes)
            CHECK(std::find(expected.begin(), expected.end(), B.anchor) != expected.end());
        // support is the union of flagged box sites
        std::size_t site_count = 0;
        for (const auto& B : cs.flagged_L_boxes) site_count += B.sites.size();
        CHECK(cs.contours[0].support.size() == site_count);
    }
    SUBCASE("two far-apart bad boxes give two contours") {
        auto s = constant_configuration(g, 2, 0);
        spot(s, -22, -22);
        spot(s, 18, 18); // sup-distance 40 > 2*(3L/2) + L = 32
        const auto bad = detect_bad_boxes(g, s, a, p);
        REQUIRE(bad.size() == 2);
        const auto cs = build_contours(g, bad, p);
        CHECK(cs.contours.size() == 2);
    }
}

TEST_CASE("layer sign follows the ambient phase") {
    const auto g = build_lattice(2, 64);
    ModelParams p = wall_params(0.2);
    p.finalize(64);
    const auto a = sample_disorder(g, 1, 45, 0);

    for (const int phase : {+1, -1}) {
        CAPTURE(phase);
        auto s = constant_configuration(g, 2, 0);
        if (phase < 0)
            for (SiteIndex x = 0; x < g.num_sites; ++x) s.spin(x)[0] = -1.0;
        const SiteIndex spot = g.site_at({2, 2});
        s.spin(spot)[0] = 0.0;
        s.spin(spot)[1] = 1.0;
        const auto bad = detect_bad_boxes(g, s, a, p);
        REQUIRE(bad.size() == 1);
        auto cs = build_contours(g, bad, p);
        REQUIRE(cs.contours.size() == 1);
        find_layer(g, s, p, cs.contours[0]);
        REQUIRE(cs.contours[0].layer_found);
        CHECK(cs.contours[0].sign == phase);
        CHECK(!cs.contours[0].layer.empty());
        // layer is disjoint from the contour support
        for (const SiteIndex x : cs.contours[0].layer)
            CHECK(!std::binary_search(cs.contours[0].support.begin(),
                                      cs.contours[0].support.end(), x));
    }
}

TEST_CASE("surgery removes a reflected island") {
    const auto g = build_lattice(2, 96);
    ModelParams p = wall_params(0.1);
    p.beta = 4.0;
    p.finalize(96);
    const auto a = sample_disorder(g, 1, 46, 0);

    // near-ground-state in the + phase, then reflect an internal island
    const auto rep = relax(g, constant_configuration(g, 2, 0), a, p, {}, 1e-5, 2000);
    auto sigma = rep.configuration;
    const auto island = linf_ball(g, 20);
    reflect_spins(sigma, island, p.k);

    const auto bad = detect_bad_boxes(g, sigma, a, p);
    REQUIRE(!bad.empty());
    auto cs = build_contours(g, bad, p);
    REQUIRE(cs.contours.size() == 1);
    find_layer(g, sigma, p, cs.contours[0]);
    REQUIRE(cs.contours[0].layer_found);
    CHECK(cs.contours[0].sign == +1);

    const auto res = surgery(g, sigma, cs.contours[0], a, p);
    CHECK(res.record.converged);
    CHECK(res.record.gap > 0.0);
    CHECK(res.record.energy_before ==
          doctest::Approx(total_energy(g, sigma, a, p).total).epsilon(1e-9));
    CHECK(res.record.energy_after ==
          doctest::Approx(total_energy(g, res.sigma_tilde, a, p).total).epsilon(1e-9));
    CHECK(res.record.energy_before - res.record.energy_after == doctest::Approx(res.record.gap));
    CHECK(res.sigma_tilde.max_norm_error() < 1e-9);
    // reported diagnostic: most of A should end up in the + phase basin
    CHECK(res.record.near_axis_fraction >= 0.0);
    CHECK(res.record.near_axis_fraction <= 1.0);
    double plus = 0;
    for (const SiteIndex x : island)
        if (res.sigma_tilde.spin(x)[0] > 0.5) plus += 1.0;
    CHECK(plus / static_cast<double>(island.size()) > 0.9);

    // outside Gamma and the layer, sigma_tilde is sigma or its reflection
    std::vector<char> inside(static_cast<std::size_t>(g.num_sites), 0);
    for (const SiteIndex x : cs.contours[0].support) inside[static_cast<std::size_t>(x)] = 1;
    for (const SiteIndex x : cs.contours[0].layer) inside[static_cast<std::size_t>(x)] = 1;
    for (SiteIndex x = 0; x < g.num_sites; ++x) {
        if (inside[static_cast<std::size_t>(x)]) continue;
        const double* t = res.sigma_tilde.spin(x);
        const double* o = sigma.spin(x);
        const bool same = t[0] == o[0] && t[1] == o[1];
        const bool refl = t[0] == -o[0] && t[1] == o[1];
        CHECK((same || refl));
    }

    // deterministic: a second run is bit-identical
    const auto res2 = surgery(g, sigma, cs.contours[0], a, p);
    CHECK(res2.record.gap == res.record.gap);
    CHECK(res2.sigma_tilde.s == res.sigma_tilde.s);
}

TEST_CASE("surgery with an empty contour is the identity") {
    const auto g = build_lattice(2, 16);
    ModelParams p = wall_params(0.2);
    p.finalize(16);
    const auto a = sample_disorder(g, 1, 47, 0);
    const auto s = constant_configuration(g, 2, 0);
    Contour empty;
    const auto res = surgery(g, s, empty, a, p);
    CHECK(res.record.gap == doctest::Approx(0.0));
    CHECK(res.sigma_tilde.s == s.s);
}

} // TEST_SUITE
