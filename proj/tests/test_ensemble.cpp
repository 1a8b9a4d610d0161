#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "rfo/contour.hpp"
#include "rfo/ensemble.hpp"
#include "rfo/lattice.hpp"

using namespace rfo;

namespace {

ExperimentSpec small_spec() {
    ExperimentSpec s;
    s.N = 4;
    s.params.d = 2;
    s.params.eps = 0.5;
    s.params.beta = 1.0;
    s.params.bc = BoundaryKind::FieldU;
    s.chain.therm_sweeps = 200;
    s.chain.meas_sweeps = 1000;
    s.realizations = 4;
    s.master_seed = 5;
    s.observables = {"M0_e1", "PM0_sq", "energy_density"};
    return s;
}

} // namespace

TEST_SUITE("ensemble") {

TEST_CASE("beta = 0 has zero disorder-averaged magnetization") {
    ExperimentSpec s = small_spec();
    s.params.beta = 0.0;
    s.params.bc = BoundaryKind::Free;
    s.chain.meas_sweeps = 4000;
    const auto r = run_ensemble(s);
    CHECK(r.failed_count == 0);
    const auto& st = r.stats.at("M0_e1");
    CHECK(st.realizations == 4);
    CHECK(std::fabs(st.mean) <= 4.0 * st.combined_se);
    CHECK(st.combined_se >= st.between_se);
}

TEST_CASE("eps = 0 realizations agree up to chain noise") {
    ExperimentSpec s = small_spec();
    s.params.eps = 0.0;
    s.params.beta = 2.0;
    s.chain.meas_sweeps = 4000;
    s.realizations = 6;
    const auto r = run_ensemble(s);
    CHECK(r.failed_count == 0);
    const auto& st = r.stats.at("M0_e1");
    for (const auto& row : r.table) {
        REQUIRE(!row.failed);
        const double dev = std::fabs(row.mean.at("M0_e1") - st.mean);
        CHECK(dev <= 5.0 * std::max(row.within_se.at("M0_e1"), 1e-6));
    }
}

TEST_CASE("deterministic and worker-count invariant") {
    ExperimentSpec s = small_spec();
    const auto r1 = run_ensemble(s);
    const auto r2 = run_ensemble(s);
    ExperimentSpec s3 = s;
    s3.workers = 3;
    const auto r3 = run_ensemble(s3);
    REQUIRE(r1.table.size() == r2.table.size());
    REQUIRE(r1.table.size() == r3.table.size());
    for (std::size_t i = 0; i < r1.table.size(); ++i) {
        for (const auto& [name, v] : r1.table[i].mean) {
            CHECK(r2.table[i].mean.at(name) == v);
            CHECK(r3.table[i].mean.at(name) == v);
        }
    }
    for (const auto& [name, st] : r1.stats) {
        CHECK(r3.stats.at(name).mean == st.mean);
        CHECK(r3.stats.at(name).combined_se == st.combined_se);
    }
    // different master seed changes the draw
    ExperimentSpec s4 = s;
    s4.master_seed = 6;
    const auto r4 = run_ensemble(s4);
    CHECK(r4.stats.at("energy_density").mean != r1.stats.at("energy_density").mean);
}

TEST_CASE("final-configuration observables") {
    const auto g = build_lattice(2, 16);
    ModelParams p;
    p.d = 2;
    p.eps = 0.2;
    p.bc = BoundaryKind::FieldU;
    p.ell = 4;
    p.L = 8;
    p.finalize(16);
    const auto a = sample_disorder(g, 1, 61, 0);
    const auto e1 = constant_configuration(g, 2, 0);
    const auto e2 = constant_configuration(g, 2, 1);
    CHECK(bad_box_density(g, e1, a, p) == doctest::Approx(0.0));
    CHECK(contour_count(g, e1, a, p) == doctest::Approx(0.0));
    CHECK(bad_box_density(g, e2, a, p) == doctest::Approx(1.0));
    CHECK(contour_count(g, e2, a, p) == doctest::Approx(1.0));

    // usable as ensemble observables
    ExperimentSpec s = small_spec();
    s.N = 8;
    s.params.ell = 2;
    s.params.L = 4;
    s.observables = {"bad_box_density", "contour_count"};
    const auto r = run_ensemble(s);
    CHECK(r.failed_count == 0);
    CHECK(r.stats.at("bad_box_density").mean >= 0.0);
    CHECK(r.stats.at("bad_box_density").mean <= 1.0);
    CHECK(r.stats.at("contour_count").mean >= 0.0);
}

TEST_CASE("beta sweep at eps = 0 is monotone within error") {
    ExperimentSpec s = small_spec();
    s.params.eps = 0.0;
    s.chain.meas_sweeps = 3000;
    s.observables = {"M0_e1"};
    const std::vector<double> betas{0.25, 1.0, 4.0};
    const auto pts = sweep_parameter(s, "beta", betas);
    REQUIRE(pts.size() == betas.size());
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const auto& lo = pts[i].stats.stats.at("M0_e1");
        const auto& hi = pts[i + 1].stats.stats.at("M0_e1");
        const double se = std::sqrt(lo.combined_se * lo.combined_se +
                                    hi.combined_se * hi.combined_se);
        CHECK(hi.mean >= lo.mean - 2.0 * se);
    }
    // strongly separated endpoints
    const auto& first = pts.front().stats.stats.at("M0_e1");
    const auto& last = pts.back().stats.stats.at("M0_e1");
    CHECK(last.mean > first.mean);
}

TEST_CASE("spec validation") {
    ExperimentSpec s = small_spec();
    s.realizations = 0;
    CHECK_THROWS(run_ensemble(s));
    s = small_spec();
    s.observables.clear();
    CHECK_THROWS(run_ensemble(s));
    s = small_spec();
    CHECK_THROWS(sweep_parameter(s, "nonsense", {1.0}));
}

} // TEST_SUITE
