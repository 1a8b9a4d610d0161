#include "rfo/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "rfo/contour.hpp"
#include "rfo/rng.hpp"

namespace rfo {

namespace {

bool is_final_config_observable(const std::string& name) {
    return name == "bad_box_density" || name == "contour_count";
}

// non-thermalization flag: first vs second half of the energy series drift
// beyond 5 combined blocked error bars
bool energy_trend_failure(const std::vector<double>& e) {
    if (e.size() < 128) return false;
    const std::size_t h = e.size() / 2;
    const std::vector<double> a(e.begin(), e.begin() + static_cast<std::ptrdiff_t>(h));
    const std::vector<double> b(e.begin() + static_cast<std::ptrdiff_t>(h), e.end());
    const BlockingResult ra = blocking_analysis(a);
    const BlockingResult rb = blocking_analysis(b);
    const double se = std::sqrt(ra.stderr_blocked * ra.stderr_blocked +
                                rb.stderr_blocked * rb.stderr_blocked);
    if (se == 0) return false;
    return std::fabs(rb.mean - ra.mean) > 5.0 * se;
}

RealizationRow run_realization(const LatticeGeometry& geom, const ExperimentSpec& spec,
                               const ModelParams& params, std::uint64_t r) {
    RealizationRow row;
    row.realization = r;
    try {
        const DisorderField alpha =
            sample_disorder(geom, params.k, spec.master_seed, r, spec.disorder,
                            spec.disorder_bound);

        std::vector<std::string> chain_obs;
        std::vector<std::string> final_obs;
        for (const auto& name : spec.observables)
            (is_final_config_observable(name) ? final_obs : chain_obs).push_back(name);
        if (std::find(chain_obs.begin(), chain_obs.end(), std::string("energy_density")) ==
            chain_obs.end())
            chain_obs.push_back("energy_density"); // drives the thermalization check

        const int C = spec.chains_per_realization;
        std::map<std::string, std::vector<double>> chain_means;     // per obs, per chain
        std::map<std::string, std::vector<double>> chain_ses;
        for (int c = 0; c < C; ++c) {
            ChainConfig cfg = spec.chain;
            cfg.observables = chain_obs;
            cfg.rng_seed = derive_key(spec.master_seed, r, 0x636861696eULL,
                                      static_cast<std::uint64_t>(c));
            const ChainResult res = run_chain(geom, alpha, params, cfg);

            if (energy_trend_failure(res.series.at("energy_density")))
                throw std::runtime_error("energy trend test failed (chain not thermalized)");

            for (const auto& name : chain_obs) {
                const BlockingResult& s = res.summary.at(name);
                chain_means[name].push_back(s.mean);
                chain_ses[name].push_back(s.stderr_blocked);
            }
            for (const auto& name : final_obs) {
                const double v = name == "bad_box_density"
                                     ? bad_box_density(geom, res.final_configuration, alpha, params)
                                     : contour_count(geom, res.final_configuration, alpha, params);
                chain_means[name].push_back(v);
                chain_ses[name].push_back(0.0);
            }
        }

        for (const auto& name : spec.observables) {
            const auto& m = chain_means.at(name);
            double mean = 0;
            for (const double v : m) mean += v;
            mean /= static_cast<double>(m.size());
            double var = 0;
            for (const double se : chain_ses.at(name)) var += se * se;
            row.mean[name] = mean;
            row.within_se[name] = std::sqrt(var) / static_cast<double>(m.size());
        }
    } catch (const std::exception& e) {
        row.failed = true;
        row.failure = e.what();
    }
    return row;
}

} // namespace

void ExperimentSpec::validate() const {
    if (realizations < 1) throw std::invalid_argument("ExperimentSpec: realizations >= 1");
    if (chains_per_realization < 1)
        throw std::invalid_argument("ExperimentSpec: chains_per_realization >= 1");
    if (observables.empty()) throw std::invalid_argument("ExperimentSpec: observables empty");
    if (N < 2 || N % 2 != 0) throw std::invalid_argument("ExperimentSpec: N must be even, >= 2");
}

double bad_box_density(const LatticeGeometry& geom, const SpinConfiguration& sigma,
                       const DisorderField& alpha, const ModelParams& p) {
    const auto boxes = tile_boxes(geom, p.ell);
    const auto bad = detect_bad_boxes(geom, sigma, alpha, p);
    return static_cast<double>(bad.size()) / static_cast<double>(boxes.size());
}

double contour_count(const LatticeGeometry& geom, const SpinConfiguration& sigma,
                     const DisorderField& alpha, const ModelParams& p) {
    const auto bad = detect_bad_boxes(geom, sigma, alpha, p);
    return static_cast<double>(build_contours(geom, bad, p).contours.size());
}

EnsembleStats run_ensemble(const ExperimentSpec& spec) {
    spec.validate();
    const LatticeGeometry geom = build_lattice(spec.params.d, spec.N);
    ModelParams params = spec.params;
    params.finalize(spec.N);

    EnsembleStats out;
    out.table.resize(static_cast<std::size_t>(spec.realizations));

    const int workers = std::max(1, spec.workers);
    std::atomic<int> next{0};
    const auto worker = [&]() {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= spec.realizations) return;
            out.table[static_cast<std::size_t>(i)] =
                run_realization(geom, spec, params, static_cast<std::uint64_t>(i));
        }
    };
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    for (const auto& row : out.table)
        if (row.failed) ++out.failed_count;

    for (const auto& name : spec.observables) {
        ObservableStats s;
        std::vector<double> means;
        double within_var = 0;
        for (const auto& row : out.table) {
            if (row.failed) continue;
            means.push_back(row.mean.at(name));
            within_var += row.within_se.at(name) * row.within_se.at(name);
        }
        s.realizations = means.size();
        if (!means.empty()) {
            for (const double v : means) s.mean += v;
            s.mean /= static_cast<double>(means.size());
            if (means.size() > 1) {
                double var = 0;
                for (const double v : means) var += (v - s.mean) * (v - s.mean);
                var /= static_cast<double>(means.size() - 1);
                s.between_se = std::sqrt(var / static_cast<double>(means.size()));
            }
            s.within_se = std::sqrt(within_var) / static_cast<double>(means.size());
            s.combined_se = std::sqrt(s.between_se * s.between_se + s.within_se * s.within_se);
        }
        out.stats[name] = s;
    }
    return out;
}

std::vector<SweepPoint> sweep_parameter(const ExperimentSpec& spec,
                                        const std::string& parameter,
                                        const std::vector<double>& values) {
    std::vector<SweepPoint> out;
    for (const double v : values) {
        ExperimentSpec q = spec; // same master seed: common random numbers
        if (parameter == "beta") {
            q.params.beta = v;
        } else if (parameter == "eps") {
            q.params.eps = v;
        } else if (parameter == "N") {
            q.N = static_cast<int>(std::llround(v));
        } else if (parameter == "xi") {
            q.params.xi = v;
        } else {
            throw std::invalid_argument("sweep_parameter: unknown parameter " + parameter);
        }
        // derived scales must track the swept parameter unless pinned by hand
        if (!q.params.ell_overridden) q.params.ell = 0;
        if (!q.params.L_overridden) q.params.L = 0;
        SweepPoint pt;
        pt.value = v;
        pt.stats = run_ensemble(q);
        out.push_back(std::move(pt));
    }
    return out;
}

} // namespace rfo
