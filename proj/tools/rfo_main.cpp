// rfo: reproducible experiments for random-field O(n) spin models.
// Subcommands: simulate | groundstate | contours | oracle-check | gaussian-check
// Exit codes: 0 ok, 1 runtime failure, 2 config error, 3 check failure.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rfo/checks.hpp"
#include "rfo/contour.hpp"
#include "rfo/ensemble.hpp"
#include "rfo/groundstate.hpp"
#include "rfo/snapshot.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "rfo 0.1.0";

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string fnv1a64_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    char buf[1 << 14];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        const std::streamsize got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001b3ULL;
        }
        if (!in) break;
    }
    char out[17];
    std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(h));
    return out;
}

std::string now_iso8601() {
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

json load_config(const std::string& path) {
    if (path.empty()) return json::object();
    std::ifstream in(path);
    if (!in) throw ConfigError("config file not found: " + path);
    try {
        return json::parse(in, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
}

template <typename T>
T require(const json& j, const std::string& field) {
    if (!j.contains(field)) throw ConfigError("missing required config field '" + field + "'");
    try {
        return j.at(field).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError("bad value for config field '" + field + "': " + e.what());
    }
}

template <typename T>
T get_or(const json& j, const std::string& field, T fallback) {
    if (!j.contains(field)) return fallback;
    try {
        return j.at(field).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError("bad value for config field '" + field + "': " + e.what());
    }
}

rfo::ModelParams params_from_config(const json& j) {
    rfo::ModelParams p;
    p.d = require<int>(j, "d");
    p.eps = require<double>(j, "eps");
    p.beta = require<double>(j, "beta");
    p.n = get_or(j, "n", 2);
    p.k = get_or(j, "k", 1);
    p.u = get_or(j, "u", std::vector<double>{});
    p.boundary_strength = get_or(j, "boundary_strength", 1.0);
    const std::string bc = get_or<std::string>(j, "boundary", "field-u");
    if (bc == "field-u") p.bc = rfo::BoundaryKind::FieldU;
    else if (bc == "free") p.bc = rfo::BoundaryKind::Free;
    else if (bc == "fixed") p.bc = rfo::BoundaryKind::FixedConfiguration;
    else throw ConfigError("bad value for config field 'boundary': " + bc);
    p.gamma = get_or(j, "gamma", p.gamma);
    p.xi = get_or(j, "xi", p.xi);
    p.delta = get_or(j, "delta", p.delta);
    if (j.contains("ell")) {
        p.ell = require<int>(j, "ell");
        p.ell_overridden = p.ell != 0;
    }
    if (j.contains("L")) {
        p.L = require<int>(j, "L");
        p.L_overridden = p.L != 0;
    }
    p.bad_box_factor = get_or(j, "bad_box_factor", p.bad_box_factor);
    return p;
}

rfo::ExperimentSpec spec_from_config(const json& j) {
    rfo::ExperimentSpec spec;
    spec.N = require<int>(j, "N");
    spec.params = params_from_config(j);
    spec.chain.therm_sweeps = get_or(j, "therm_sweeps", spec.chain.therm_sweeps);
    spec.chain.meas_sweeps = get_or(j, "meas_sweeps", spec.chain.meas_sweeps);
    spec.chain.stride = get_or(j, "stride", spec.chain.stride);
    spec.chain.overrelax_per_metropolis =
        get_or(j, "overrelax_per_metropolis", spec.chain.overrelax_per_metropolis);
    spec.chain.proposal_width = get_or(j, "proposal_width", spec.chain.proposal_width);
    spec.chain.autotune_width = get_or(j, "autotune_width", spec.chain.autotune_width);
    spec.observables = get_or(j, "observables", spec.observables);
    spec.realizations = get_or(j, "realizations", spec.realizations);
    spec.chains_per_realization =
        get_or(j, "chains_per_realization", spec.chains_per_realization);
    spec.master_seed = get_or<std::uint64_t>(j, "master_seed", spec.master_seed);
    spec.disorder = rfo::parse_disorder_dist(
        get_or<std::string>(j, "disorder", "standard-gaussian"));
    spec.disorder_bound = get_or(j, "disorder_bound", spec.disorder_bound);
    return spec;
}

json resolved_config(const rfo::ExperimentSpec& spec) {
    json j;
    j["N"] = spec.N;
    j["d"] = spec.params.d;
    j["n"] = spec.params.n;
    j["k"] = spec.params.k;
    j["eps"] = spec.params.eps;
    j["beta"] = spec.params.beta;
    j["u"] = spec.params.u;
    j["boundary"] = spec.params.bc == rfo::BoundaryKind::FieldU
                        ? "field-u"
                        : (spec.params.bc == rfo::BoundaryKind::Free ? "free" : "fixed");
    j["boundary_strength"] = spec.params.boundary_strength;
    j["gamma"] = spec.params.gamma;
    j["xi"] = spec.params.xi;
    j["delta"] = spec.params.delta;
    j["ell"] = spec.params.ell;
    j["L"] = spec.params.L;
    j["bad_box_factor"] = spec.params.bad_box_factor;
    j["therm_sweeps"] = spec.chain.therm_sweeps;
    j["meas_sweeps"] = spec.chain.meas_sweeps;
    j["stride"] = spec.chain.stride;
    j["overrelax_per_metropolis"] = spec.chain.overrelax_per_metropolis;
    j["proposal_width"] = spec.chain.proposal_width;
    j["autotune_width"] = spec.chain.autotune_width;
    j["observables"] = spec.observables;
    j["realizations"] = spec.realizations;
    j["chains_per_realization"] = spec.chains_per_realization;
    j["master_seed"] = spec.master_seed;
    j["disorder"] = spec.disorder == rfo::DisorderDist::StandardGaussian
                        ? "standard-gaussian"
                        : "sub-gaussian-bounded";
    j["disorder_bound"] = spec.disorder_bound;
    return j;
}

void write_manifest(const std::string& out_dir, const std::string& command,
                    const json& config, std::uint64_t seed, const std::string& started,
                    const std::vector<std::string>& files) {
    json m;
    m["command"] = command;
    m["config"] = config;
    m["master_seed"] = seed;
    m["version"] = kVersion;
    m["started"] = started;
    m["finished"] = now_iso8601();
    m["outputs"] = json::array();
    for (const auto& f : files) {
        json e;
        e["file"] = f;
        e["fnv1a64"] = fnv1a64_file(out_dir + "/" + f);
        m["outputs"].push_back(e);
    }
    std::ofstream(out_dir + "/manifest.json") << m.dump(2) << "\n";
}

struct CommonOpts {
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_given = false;
    int workers = 1;
};

void add_common(CLI::App* cmd, CommonOpts& o, const std::string& default_out) {
    cmd->add_option("--config", o.config_path, "JSON config file")->envname("RFO_CONFIG");
    cmd->add_option("--out", o.out_dir, "output directory")
        ->envname("RFO_OUT")
        ->default_val(default_out);
    cmd->add_option("--seed", o.seed, "master seed (overrides config)")
        ->envname("RFO_SEED");
    cmd->add_option("--workers", o.workers, "worker threads")->envname("RFO_WORKERS");
}

int cmd_simulate(const CommonOpts& o, bool seed_given) {
    const std::string started = now_iso8601();
    const json cfg = load_config(o.config_path);
    rfo::ExperimentSpec spec = spec_from_config(cfg);
    if (seed_given) spec.master_seed = o.seed;
    spec.workers = o.workers;
    spec.validate();

    const rfo::EnsembleStats stats = rfo::run_ensemble(spec);

    fs::create_directories(o.out_dir);
    const std::string csv_path = o.out_dir + "/realizations.csv";
    {
        FILE* f = std::fopen(csv_path.c_str(), "w");
        if (!f) throw std::runtime_error("cannot write " + csv_path);
        std::fprintf(f, "# seed=%llu,version=%s\n",
                     static_cast<unsigned long long>(spec.master_seed), kVersion);
        std::fprintf(f, "realization,failed");
        for (const auto& name : spec.observables)
            std::fprintf(f, ",%s_mean,%s_se", name.c_str(), name.c_str());
        std::fprintf(f, "\n");
        for (const auto& row : stats.table) {
            std::fprintf(f, "%llu,%d", static_cast<unsigned long long>(row.realization),
                         row.failed ? 1 : 0);
            for (const auto& name : spec.observables) {
                if (row.failed) {
                    std::fprintf(f, ",nan,nan");
                } else {
                    std::fprintf(f, ",%.17g,%.17g", row.mean.at(name), row.within_se.at(name));
                }
            }
            std::fprintf(f, "\n");
        }
        std::fclose(f);
    }

    json agg;
    agg["master_seed"] = spec.master_seed;
    agg["version"] = kVersion;
    agg["failed_realizations"] = stats.failed_count;
    for (const auto& [name, s] : stats.stats) {
        json e;
        e["mean"] = s.mean;
        e["between_se"] = s.between_se;
        e["within_se"] = s.within_se;
        e["combined_se"] = s.combined_se;
        e["realizations"] = s.realizations;
        agg["observables"][name] = e;
    }
    std::ofstream(o.out_dir + "/ensemble.json") << agg.dump(2) << "\n";

    write_manifest(o.out_dir, "simulate", resolved_config(spec), spec.master_seed, started,
                   {"realizations.csv", "ensemble.json"});
    return 0;
}

int cmd_groundstate(const CommonOpts& o, bool seed_given) {
    const std::string started = now_iso8601();
    const json cfg = load_config(o.config_path);
    const int N = require<int>(cfg, "N");
    rfo::ModelParams p = params_from_config(cfg);
    p.finalize(N);
    std::uint64_t seed = get_or<std::uint64_t>(cfg, "master_seed", 1);
    if (seed_given) seed = o.seed;
    const double tol = get_or(cfg, "relax_tol", 1e-8);
    const long max_sweeps = get_or<long>(cfg, "relax_max_sweeps", 100000);

    const rfo::LatticeGeometry geom = rfo::build_lattice(p.d, N);
    const rfo::DisorderField alpha = rfo::sample_disorder(geom, p.k, seed, 0);
    const rfo::SpinConfiguration init = rfo::constant_configuration(geom, p.n, 0);
    const rfo::RelaxationReport rep = rfo::relax(geom, init, alpha, p, {}, tol, max_sweeps);
    const rfo::ProjectionProfile prof = rfo::ordering_projection_profile(rep.configuration, p.k);

    fs::create_directories(o.out_dir);
    rfo::save_spin_csv(o.out_dir + "/groundstate.csv", geom, rep.configuration);
    json out;
    out["master_seed"] = seed;
    out["version"] = kVersion;
    out["converged"] = rep.converged;
    out["sweeps"] = rep.sweeps;
    out["final_gradient_norm"] = rep.final_gradient_norm;
    out["final_energy"] = rep.energy_trace.empty() ? 0.0 : rep.energy_trace.back();
    out["ordering_projection"] = {{"q05", prof.q05},
                                  {"median", prof.median},
                                  {"q95", prof.q95},
                                  {"mean", prof.mean}};
    std::ofstream(o.out_dir + "/groundstate.json") << out.dump(2) << "\n";
    write_manifest(o.out_dir, "groundstate", cfg, seed, started,
                   {"groundstate.csv", "groundstate.json"});
    return rep.converged ? 0 : 1;
}

int cmd_contours(const CommonOpts& o, bool seed_given, const std::string& snapshot_path,
                 const std::string& disorder_path) {
    const std::string started = now_iso8601();
    const json cfg = load_config(o.config_path);
    rfo::ModelParams p = params_from_config(cfg);

    const rfo::SpinSnapshot snap = rfo::load_spin_csv(snapshot_path);
    if (snap.N <= 0) throw ConfigError("contours requires a cubic-lattice snapshot");
    const rfo::LatticeGeometry geom = rfo::build_lattice(snap.d, snap.N);
    p.d = snap.d;
    p.finalize(snap.N);

    std::uint64_t seed = get_or<std::uint64_t>(cfg, "master_seed", 1);
    if (seed_given) seed = o.seed;
    rfo::DisorderField alpha;
    if (!disorder_path.empty()) {
        alpha = rfo::load_disorder_csv(disorder_path).alpha;
    } else {
        alpha = rfo::sample_disorder(geom, p.k, seed, 0);
    }

    const auto bad = rfo::detect_bad_boxes(geom, snap.sigma, alpha, p);
    rfo::ContourSet cs = rfo::build_contours(geom, bad, p);
    for (auto& c : cs.contours) rfo::find_layer(geom, snap.sigma, p, c);

    fs::create_directories(o.out_dir);
    json out;
    out["master_seed"] = seed;
    out["version"] = kVersion;
    out["ell"] = p.ell;
    out["L"] = p.L;
    out["total_ell_boxes"] = rfo::tile_boxes(geom, p.ell).size();
    out["bad_boxes"] = json::array();
    for (const auto& b : bad) {
        json e;
        e["anchor"] = b.box.anchor;
        e["reason"] = b.reason == rfo::BadBoxReason::DirichletExcess ? "dirichlet-excess"
                                                                     : "angle-deviation";
        e["dirichlet"] = b.dirichlet;
        e["threshold"] = b.threshold;
        if (b.psi_defined) e["psi"] = b.psi;
        out["bad_boxes"].push_back(e);
    }
    out["contours"] = json::array();
    for (const auto& c : cs.contours) {
        json e;
        e["boxes"] = c.boxes.size();
        e["support_sites"] = c.support.size();
        e["layer_found"] = c.layer_found;
        if (c.layer_found) {
            e["sign"] = c.sign;
            e["layer_sites"] = c.layer.size();
        } else {
            e["failure"] = c.failure;
        }
        out["contours"].push_back(e);
    }
    std::ofstream(o.out_dir + "/contours.json") << out.dump(2) << "\n";
    write_manifest(o.out_dir, "contours", cfg, seed, started, {"contours.json"});
    return 0;
}

int run_check(const CommonOpts& o, const rfo::CheckReport& report, const json& cfg,
              std::uint64_t seed, const std::string& started) {
    fs::create_directories(o.out_dir);
    json out;
    out["name"] = report.name;
    out["pass"] = report.pass;
    out["detail"] = report.detail;
    out["master_seed"] = seed;
    out["version"] = kVersion;
    out["cells"] = json::array();
    for (const auto& c : report.cells) {
        json e;
        e["label"] = c.label;
        e["estimate"] = c.estimate;
        e["se"] = c.se;
        e["exact"] = c.exact;
        e["sigmas"] = c.sigmas;
        e["pass"] = c.pass;
        out["cells"].push_back(e);
    }
    std::ofstream(o.out_dir + "/" + report.name + ".json") << out.dump(2) << "\n";
    write_manifest(o.out_dir, report.name, cfg, seed, started, {report.name + ".json"});
    std::cout << report.name << ": " << (report.pass ? "PASS" : "FAIL") << " (" << report.detail
              << ")\n";
    return report.pass ? 0 : 3;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"random-field O(n) spin model toolkit"};
    app.require_subcommand(1);

    CommonOpts sim_o, gs_o, ct_o, oc_o, gc_o;
    std::string snapshot_path, disorder_path;

    CLI::App* sim = app.add_subcommand("simulate", "disorder-averaged Monte Carlo experiment");
    add_common(sim, sim_o, "out-simulate");
    CLI::App* gs = app.add_subcommand("groundstate", "relax to a local energy minimum");
    add_common(gs, gs_o, "out-groundstate");
    CLI::App* ct = app.add_subcommand("contours", "bad boxes and contours of a snapshot");
    add_common(ct, ct_o, "out-contours");
    ct->add_option("--snapshot", snapshot_path, "spin configuration CSV")->required();
    ct->add_option("--disorder", disorder_path, "disorder field CSV (default: sampled)");
    CLI::App* oc = app.add_subcommand("oracle-check", "Metropolis vs quadrature oracle");
    add_common(oc, oc_o, "out-oracle-check");
    CLI::App* gc = app.add_subcommand("gaussian-check", "gaussian model vs dense algebra");
    add_common(gc, gc_o, "out-gaussian-check");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) return cmd_simulate(sim_o, sim->count("--seed") > 0);
        if (gs->parsed()) return cmd_groundstate(gs_o, gs->count("--seed") > 0);
        if (ct->parsed())
            return cmd_contours(ct_o, ct->count("--seed") > 0, snapshot_path, disorder_path);
        if (oc->parsed()) {
            const std::string started = now_iso8601();
            const std::uint64_t seed = oc->count("--seed") > 0 ? oc_o.seed : 7;
            return run_check(oc_o, rfo::oracle_equivalence_check(seed), json::object(), seed,
                             started);
        }
        if (gc->parsed()) {
            const std::string started = now_iso8601();
            const std::uint64_t seed = gc->count("--seed") > 0 ? gc_o.seed : 7;
            return run_check(gc_o, rfo::gaussian_model_check(seed), json::object(), seed,
                             started);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
