#include <doctest.h>

#include <cmath>
#include <random>

#include "rfo/groundstate.hpp"
#include "rfo/lattice.hpp"
#include "rfo/renorm.hpp"

using namespace rfo;

namespace {

constexpr double kPi = 3.14159265358979323846;

Region full_region(const LatticeGeometry& g) {
    std::vector<SiteIndex> all(static_cast<std::size_t>(g.num_sites));
    for (SiteIndex s = 0; s < g.num_sites; ++s) all[static_cast<std::size_t>(s)] = s;
    return make_region(g, all);
}

} // namespace

TEST_SUITE("renorm") {

TEST_CASE("angle conversions") {
    const auto g = build_lattice(2, 4);
    SUBCASE("axis cases and canonicalization") {
        auto s = constant_configuration(g, 2, 0);
        CHECK(to_angles(s).theta[0] == doctest::Approx(0.0));
        for (SiteIndex x = 0; x < g.num_sites; ++x) s.spin(x)[0] = -1.0;
        CHECK(to_angles(s).theta[0] == doctest::Approx(kPi)); // pi, not -pi
        CHECK(canonical_angle(-kPi) == doctest::Approx(kPi));
        CHECK(canonical_angle(3 * kPi / 2) == doctest::Approx(-kPi / 2));
    }
    SUBCASE("round trip on random spins") {
        std::mt19937_64 rng(2);
        std::uniform_real_distribution<double> ang(-kPi, kPi);
        const auto g64 = build_lattice(2, 64);
        auto s = constant_configuration(g64, 2, 0);
        for (SiteIndex x = 0; x < g64.num_sites; ++x) {
            const double t = ang(rng);
            s.spin(x)[0] = std::cos(t);
            s.spin(x)[1] = std::sin(t);
        }
        const auto back = from_angles(to_angles(s));
        for (std::size_t i = 0; i < s.s.size(); ++i)
            CHECK(back.s[i] == doctest::Approx(s.s[i]).epsilon(1e-12));
    }
}

TEST_CASE("change of variables") {
    const auto g = build_lattice(2, 4);
    const Region r = full_region(g);
    ScalarLatticeField gp;
    gp.v.assign(r.size(), 0.0);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1, 1);
    for (double& v : gp.v) v = u(rng);

    AngleField theta;
    theta.theta.assign(static_cast<std::size_t>(g.num_sites), 0.0);
    for (double& t : theta.theta) t = u(rng) * kPi;

    SUBCASE("eps 0 is the identity") {
        const auto phi = change_of_variables(r, theta, gp, 0.0);
        for (std::size_t i = 0; i < r.size(); ++i)
            CHECK(phi.v[i] == theta.theta[static_cast<std::size_t>(r.sites[i])]);
    }
    SUBCASE("theta = pi/2 is a fixed point") {
        AngleField t2;
        t2.theta.assign(static_cast<std::size_t>(g.num_sites), kPi / 2);
        const auto phi = change_of_variables(r, t2, gp, 0.3);
        for (const double v : phi.v) CHECK(v == doctest::Approx(kPi / 2).epsilon(1e-14));
    }
    SUBCASE("injectivity guard") {
        ScalarLatticeField big;
        big.v.assign(r.size(), 10.0);
        CHECK_THROWS(change_of_variables(r, theta, big, 0.1));
    }
    SUBCASE("fixed point inversion recovers theta") {
        const auto phi = change_of_variables(r, theta, gp, 0.3);
        const auto back = invert_change_of_variables(r, phi, gp, 0.3, 1e-12, 50);
        for (std::size_t i = 0; i < r.size(); ++i)
            CHECK(back.v[i] ==
                  doctest::Approx(theta.theta[static_cast<std::size_t>(r.sites[i])]).epsilon(1e-10));
    }
}

TEST_CASE("renormalized energy") {
    const auto g = build_lattice(2, 4);
    const Region r = full_region(g);
    ScalarLatticeField m2;
    m2.v.assign(r.size(), 0.0);
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0, 1);
    for (double& v : m2.v) v = u(rng);
    double half_mass = 0;
    for (const double v : m2.v) half_mass += 0.5 * v;

    SUBCASE("phi = 0 maximizes: K = half mass sum") {
        RegionAngles phi;
        phi.v.assign(r.size(), 0.0);
        CHECK(renormalized_energy(g, r, phi, m2, nullptr) == doctest::Approx(half_mass));
    }
    SUBCASE("massless constant phi gives zero") {
        ScalarLatticeField zero;
        zero.v.assign(r.size(), 0.0);
        RegionAngles phi;
        phi.v.assign(r.size(), 1.234);
        CHECK(renormalized_energy(g, r, phi, zero, nullptr) == doctest::Approx(0.0));
    }
    SUBCASE("phi = pi/2 gives zero") {
        RegionAngles phi;
        phi.v.assign(r.size(), kPi / 2);
        CHECK(renormalized_energy(g, r, phi, m2, nullptr) == doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("global symmetries phi -> -phi and phi -> phi + pi") {
        RegionAngles phi;
        phi.v.assign(r.size(), 0.0);
        for (double& v : phi.v) v = u(rng) * 2 - 1;
        const double base = renormalized_energy(g, r, phi, m2, nullptr);
        RegionAngles neg = phi, shift = phi;
        for (double& v : neg.v) v = -v;
        for (double& v : shift.v) v += kPi;
        CHECK(renormalized_energy(g, r, neg, m2, nullptr) == doctest::Approx(base).epsilon(1e-12));
        CHECK(renormalized_energy(g, r, shift, m2, nullptr) == doctest::Approx(base).epsilon(1e-12));
        CHECK(base <= half_mass + 1e-12);
    }
    SUBCASE("boundary values required for crossing edges") {
        const auto boxes = tile_boxes(g, 2);
        const Region sub = box_region(g, boxes[0]);
        ScalarLatticeField m2s;
        m2s.v.assign(sub.size(), 0.0);
        RegionAngles phi;
        phi.v.assign(sub.size(), 0.5);
        AngleField bdy;
        bdy.theta.assign(static_cast<std::size_t>(g.num_sites), 0.5);
        // identical boundary angles: crossing edges contribute zero
        const double with_bdy = renormalized_energy(g, sub, phi, m2s, &bdy);
        CHECK(with_bdy == doctest::Approx(0.0).epsilon(1e-12));
        // free boundary also drops them
        CHECK(renormalized_energy(g, sub, phi, m2s, nullptr) == doctest::Approx(0.0).epsilon(1e-12));
    }
}

TEST_CASE("transformation discrepancy") {
    const auto g = build_lattice(2, 32);
    const auto boxes = tile_boxes(g, 8);
    // central 8x8 box (anchor at the origin corner)
    const Box* central = nullptr;
    for (const auto& b : boxes)
        if (b.anchor[0] == 0 && b.anchor[1] == 0) central = &b;
    REQUIRE(central != nullptr);
    const Region r = box_region(g, *central);
    const auto a = sample_disorder(g, 1, 21, 0);

    SUBCASE("eps 0 is exact") {
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> u(-kPi, kPi);
        AngleField theta;
        theta.theta.assign(static_cast<std::size_t>(g.num_sites), 0.0);
        for (double& t : theta.theta) t = u(rng);
        CHECK(transformation_discrepancy(g, r, theta, a, 0.0, 4) ==
              doctest::Approx(0.0).epsilon(1e-10));
    }
    SUBCASE("theta = 0 is zero by construction") {
        AngleField theta;
        theta.theta.assign(static_cast<std::size_t>(g.num_sites), 0.0);
        CHECK(transformation_discrepancy(g, r, theta, a, 0.2, 4) ==
              doctest::Approx(0.0).epsilon(1e-9));
    }
    SUBCASE("order >= 2.5 in eps for relaxed configurations") {
        ModelParams p;
        p.d = 2;
        p.bc = BoundaryKind::FieldU;
        const std::vector<double> epss{0.2, 0.1, 0.05};
        std::vector<double> errs;
        for (const double eps : epss) {
            p.eps = eps;
            p.ell = 0;
            p.L = 0;
            p.finalize(32);
            const int ell = static_cast<int>(std::lround(1.0 / eps));
            const auto rep = relax(g, constant_configuration(g, 2, 0), a, p);
            const auto theta = to_angles(rep.configuration);
            errs.push_back(transformation_discrepancy(g, r, theta, a, eps, ell) /
                           static_cast<double>(r.size()));
        }
        const double order1 = std::log(errs[0] / errs[1]) / std::log(2.0);
        const double order2 = std::log(errs[1] / errs[2]) / std::log(2.0);
        CHECK(order1 >= 2.5);
        CHECK(order2 >= 2.5);
    }
}

TEST_CASE("maximize_renormalized_energy reaches the mass bound") {
    const auto g = build_lattice(2, 4);
    const Region r = full_region(g);
    ScalarLatticeField m2;
    m2.v.assign(r.size(), 0.4);
    RegionAngles init;
    init.v.assign(r.size(), 0.3);
    const auto opt = maximize_renormalized_energy(g, r, m2, nullptr, init);
    double half_mass = 0;
    for (const double v : m2.v) half_mass += 0.5 * v;
    CHECK(renormalized_energy(g, r, opt, m2, nullptr) == doctest::Approx(half_mass).epsilon(1e-8));
}

} // TEST_SUITE
