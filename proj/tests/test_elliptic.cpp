#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "rfo/elliptic.hpp"
#include "rfo/lattice.hpp"

using namespace rfo;

namespace {

Region full_region(const LatticeGeometry& g) {
    std::vector<SiteIndex> all(static_cast<std::size_t>(g.num_sites));
    for (SiteIndex s = 0; s < g.num_sites; ++s) all[static_cast<std::size_t>(s)] = s;
    return make_region(g, all);
}

ScalarLatticeField random_field(std::size_t m, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    ScalarLatticeField f;
    f.v.resize(m);
    for (double& v : f.v) v = gauss(rng);
    return f;
}

} // namespace

TEST_SUITE("elliptic") {

TEST_CASE("apply_laplacian basics") {
    const auto g = build_lattice(2, 6);
    const Region r = full_region(g);

    SUBCASE("constant field, neumann, mass 0") {
        LaplacianSpec spec{&g, &r, LaplacianBoundary::NeumannGraph, 0.0};
        ScalarLatticeField f;
        f.v.assign(r.size(), 2.5);
        const auto out = apply_laplacian(spec, f);
        for (const double v : out.v) CHECK(v == doctest::Approx(0.0).epsilon(1e-14));
    }
    SUBCASE("interior spike") {
        LaplacianSpec spec{&g, &r, LaplacianBoundary::NeumannGraph, 0.0};
        ScalarLatticeField f;
        f.v.assign(r.size(), 0.0);
        const SiteIndex x = g.origin();
        f.v[static_cast<std::size_t>(r.local(x))] = 1.0;
        const auto out = apply_laplacian(spec, f);
        CHECK(out.v[static_cast<std::size_t>(r.local(x))] == doctest::Approx(4.0));
        for (int j = 0; j < g.degree; ++j)
            CHECK(out.v[static_cast<std::size_t>(r.local(g.neighbor(x, j)))] == doctest::Approx(-1.0));
    }
    SUBCASE("matches dense matrix") {
        const auto g4 = build_lattice(2, 4);
        const Region r4 = full_region(g4);
        for (const auto bc : {LaplacianBoundary::NeumannGraph, LaplacianBoundary::Dirichlet}) {
            LaplacianSpec spec{&g4, &r4, bc, 0.3};
            const auto f = random_field(r4.size(), 17);
            const auto out = apply_laplacian(spec, f);
            const Eigen::MatrixXd A = dense_laplacian(spec);
            Eigen::VectorXd fv(static_cast<Eigen::Index>(f.v.size()));
            for (std::size_t i = 0; i < f.v.size(); ++i) fv[static_cast<Eigen::Index>(i)] = f.v[i];
            const Eigen::VectorXd ov = A * fv;
            for (std::size_t i = 0; i < f.v.size(); ++i)
                CHECK(out.v[i] == doctest::Approx(ov[static_cast<Eigen::Index>(i)]).epsilon(1e-12));
        }
    }
}

TEST_CASE("solve_green") {
    SUBCASE("zero rhs") {
        const auto g = build_lattice(2, 4);
        const Region r = full_region(g);
        LaplacianSpec spec{&g, &r, LaplacianBoundary::NeumannGraph, 0.0};
        ScalarLatticeField rhs;
        rhs.v.assign(r.size(), 0.0);
        const auto sol = solve_green(spec, rhs);
        for (const double v : sol.v) CHECK(v == 0.0);
    }
    SUBCASE("3x3 neumann vs dense pseudo-inverse") {
        const auto g = build_lattice(2, 6);
        const auto boxes = tile_boxes(g, 3);
        const Region r = box_region(g, boxes[0]);
        LaplacianSpec spec{&g, &r, LaplacianBoundary::NeumannGraph, 0.0};

        auto rhs = random_field(r.size(), 23);
        double mean = 0;
        for (const double v : rhs.v) mean += v;
        mean /= static_cast<double>(rhs.v.size());
        for (double& v : rhs.v) v -= mean;

        const auto sol = solve_green(spec, rhs);

        const Eigen::MatrixXd A = dense_laplacian(spec);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
        Eigen::VectorXd inv = es.eigenvalues();
        for (Eigen::Index i = 0; i < inv.size(); ++i)
            inv[i] = std::fabs(inv[i]) > 1e-12 ? 1.0 / inv[i] : 0.0;
        const Eigen::MatrixXd Apinv =
            es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
        Eigen::VectorXd b(static_cast<Eigen::Index>(rhs.v.size()));
        for (std::size_t i = 0; i < rhs.v.size(); ++i) b[static_cast<Eigen::Index>(i)] = rhs.v[i];
        const Eigen::VectorXd want = Apinv * b;
        for (std::size_t i = 0; i < rhs.v.size(); ++i)
            CHECK(std::fabs(sol.v[i] - want[static_cast<Eigen::Index>(i)]) < 1e-8);
    }
    SUBCASE("residual tolerance") {
        const auto g = build_lattice(2, 8);
        const Region r = full_region(g);
        LaplacianSpec spec{&g, &r, LaplacianBoundary::Dirichlet, 0.0};
        const auto rhs = random_field(r.size(), 31);
        const auto sol = solve_green(spec, rhs);
        const auto back = apply_laplacian(spec, sol);
        double rn = 0, bn = 0;
        for (std::size_t i = 0; i < rhs.v.size(); ++i) {
            rn += (back.v[i] - rhs.v[i]) * (back.v[i] - rhs.v[i]);
            bn += rhs.v[i] * rhs.v[i];
        }
        CHECK(std::sqrt(rn) <= 1e-10 * std::sqrt(bn) * 1.01);
    }
    SUBCASE("maximum principle for the massive resolvent") {
        const auto g = build_lattice(2, 8);
        const Region r = full_region(g);
        LaplacianSpec spec{&g, &r, LaplacianBoundary::Dirichlet, 1.0 / 9.0};
        ScalarLatticeField rhs;
        rhs.v.assign(r.size(), 0.0);
        rhs.v[static_cast<std::size_t>(r.local(g.origin()))] = 1.0;
        const auto sol = solve_green(spec, rhs);
        for (const double v : sol.v) CHECK(v > 0.0);
    }
    SUBCASE("singular solve demands zero mean and connectivity") {
        const auto g = build_lattice(2, 4);
        const Region r = full_region(g);
        LaplacianSpec spec{&g, &r, LaplacianBoundary::NeumannGraph, 0.0};
        ScalarLatticeField rhs;
        rhs.v.assign(r.size(), 1.0);
        CHECK_THROWS(solve_green(spec, rhs));
        const Region two = make_region(g, {g.site_at({0, 0}), g.site_at({1, 1})});
        LaplacianSpec spec2{&g, &two, LaplacianBoundary::NeumannGraph, 0.0};
        ScalarLatticeField r2;
        r2.v = {1.0, -1.0};
        CHECK_THROWS(solve_green(spec2, r2));
    }
    SUBCASE("solve then apply is the identity") {
        const auto g = build_lattice(2, 6);
        const Region r = full_region(g);
        LaplacianSpec spec{&g, &r, LaplacianBoundary::Dirichlet, 0.25};
        const auto f = random_field(r.size(), 41);
        const auto sol = solve_green(spec, apply_laplacian(spec, f));
        for (std::size_t i = 0; i < f.v.size(); ++i)
            CHECK(sol.v[i] == doctest::Approx(f.v[i]).epsilon(1e-7));
    }
    SUBCASE("quadratic form symmetry") {
        const auto g = build_lattice(2, 6);
        const Region r = full_region(g);
        LaplacianSpec spec{&g, &r, LaplacianBoundary::Dirichlet, 0.0};
        const auto f1 = random_field(r.size(), 51);
        const auto f2 = random_field(r.size(), 52);
        const auto s1 = solve_green(spec, f1);
        const auto s2 = solve_green(spec, f2);
        double q12 = 0, q21 = 0;
        for (std::size_t i = 0; i < r.size(); ++i) {
            q12 += f1.v[i] * s2.v[i];
            q21 += f2.v[i] * s1.v[i];
        }
        CHECK(q12 == doctest::Approx(q21).epsilon(1e-8));
    }
}

TEST_CASE("disorder_energy") {
    const auto g = build_lattice(2, 8);

    SUBCASE("constant field gives zero") {
        DisorderField a;
        a.k = 1;
        a.a.assign(static_cast<std::size_t>(g.num_sites), 4.0);
        const auto boxes = tile_boxes(g, 4);
        CHECK(disorder_energy(g, boxes[0], a) == doctest::Approx(0.0).epsilon(1e-10));
    }
    SUBCASE("two-site box") {
        DisorderField a;
        a.k = 1;
        a.a.assign(static_cast<std::size_t>(g.num_sites), 0.0);
        Box b;
        b.anchor = {0, 0};
        b.side = 2;
        b.sites = {g.site_at({0, 0}), g.site_at({1, 0})};
        const double aval = 0.8;
        a.a[static_cast<std::size_t>(b.sites[0])] = aval;
        a.a[static_cast<std::size_t>(b.sites[1])] = -aval;
        CHECK(disorder_energy(g, b, a) == doctest::Approx(aval * aval).epsilon(1e-9));
    }
    SUBCASE("nonnegative, zero only for constants") {
        const auto boxes = tile_boxes(g, 4);
        for (std::uint64_t rep = 0; rep < 1000; ++rep) {
            const auto a = sample_disorder(g, 1, 3, rep);
            const double e = disorder_energy(g, boxes[0], a);
            CHECK(e >= 0.0);
            CHECK(e > 1e-12); // a gaussian field is almost surely non-constant
        }
    }
    SUBCASE("dense oracle over realizations") {
        const auto boxes = tile_boxes(g, 8);
        const Region r = box_region(g, boxes[0]);
        LaplacianSpec spec{&g, &r, LaplacianBoundary::NeumannGraph, 0.0};
        const Eigen::MatrixXd A = dense_laplacian(spec);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
        Eigen::VectorXd inv = es.eigenvalues();
        for (Eigen::Index i = 0; i < inv.size(); ++i)
            inv[i] = std::fabs(inv[i]) > 1e-10 ? 1.0 / inv[i] : 0.0;
        const Eigen::MatrixXd Apinv =
            es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();

        double mean_cg = 0, mean_dense = 0;
        for (std::uint64_t rep = 0; rep < 200; ++rep) {
            const auto a = sample_disorder(g, 1, 77, rep);
            mean_cg += disorder_energy(g, boxes[0], a);
            const auto hat = center_disorder(a, boxes[0]);
            Eigen::VectorXd b(static_cast<Eigen::Index>(hat.size()));
            for (std::size_t i = 0; i < hat.size(); ++i) b[static_cast<Eigen::Index>(i)] = hat[i];
            mean_dense += b.dot(Apinv * b);
        }
        CHECK(mean_cg == doctest::Approx(mean_dense).epsilon(0.1));
    }
}

TEST_CASE("mass_field") {
    const auto g = build_lattice(2, 2); // whole lattice is the 2x2 region
    const Region r = make_region(g, {0, 1, 2, 3});
    LaplacianSpec spec{&g, &r, LaplacianBoundary::NeumannGraph, 0.0};

    SUBCASE("constant g gives zero mass") {
        ScalarLatticeField f;
        f.v.assign(4, 1.7);
        const auto m2 = mass_field(spec, f);
        for (const double v : m2.v) CHECK(v == doctest::Approx(0.0));
    }
    SUBCASE("2x2 alternating profile") {
        ScalarLatticeField f;
        f.v = {0.0, 1.0, 1.0, 0.0}; // (0,1;1,0) row-major
        const auto m2 = mass_field(spec, f);
        for (const double v : m2.v) CHECK(v == doctest::Approx(2.0));
    }
    SUBCASE("median mass scales linearly in eps") {
        const auto g16 = build_lattice(2, 16);
        const Region r16 = make_region(g16, [&] {
            std::vector<SiteIndex> all(static_cast<std::size_t>(g16.num_sites));
            for (SiteIndex s = 0; s < g16.num_sites; ++s) all[static_cast<std::size_t>(s)] = s;
            return all;
        }());
        const auto a = sample_disorder(g16, 1, 7, 0);
        double medians[2];
        const double epss[2] = {0.1, 0.05};
        for (int i = 0; i < 2; ++i) {
            LaplacianSpec sp{&g16, &r16, LaplacianBoundary::Dirichlet, 0.0};
            ScalarLatticeField rhs;
            rhs.v.resize(r16.size());
            for (std::size_t q = 0; q < r16.size(); ++q)
                rhs.v[q] = a.component(r16.sites[q], 0);
            auto gp = solve_green(sp, rhs);
            for (double& v : gp.v) v *= epss[i];
            auto m2 = mass_field(sp, gp);
            std::vector<double> m(m2.v.size());
            for (std::size_t q = 0; q < m.size(); ++q) m[q] = std::sqrt(m2.v[q]);
            std::sort(m.begin(), m.end());
            medians[i] = m[m.size() / 2];
        }
        CHECK(medians[0] / medians[1] == doctest::Approx(2.0).epsilon(1e-6));
    }
}

TEST_CASE("gaussian model covariance") {
    const auto g = build_lattice(2, 4);
    SUBCASE("eps 0 reduces to thermal covariance") {
        const Eigen::MatrixXd C = gaussian_model_covariance(g, 0.0, 2.0);
        const Region r = full_region(g);
        LaplacianSpec spec{&g, &r, LaplacianBoundary::Dirichlet, 0.0};
        const Eigen::MatrixXd A = dense_laplacian(spec);
        const Eigen::MatrixXd want = A.inverse() / 4.0;
        CHECK((C - want).cwiseAbs().maxCoeff() < 1e-10);
    }
    SUBCASE("positive semidefinite") {
        const Eigen::MatrixXd C = gaussian_model_covariance(g, 0.4, 1.5);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(C);
        CHECK(es.eigenvalues().minCoeff() >= -1e-10);
    }
    SUBCASE("size guard") {
        const auto big = build_lattice(2, 96);
        CHECK_THROWS(gaussian_model_covariance(big, 0.1, 1.0));
    }
}

} // TEST_SUITE
