#include "rfo/snapshot.hpp"

#include <cinttypes>
#include <cstdio>
#include <stdexcept>
#include <vector>

namespace rfo {

namespace {

FILE* open_or_throw(const std::string& path, const char* mode) {
    FILE* f = std::fopen(path.c_str(), mode);
    if (!f) throw std::runtime_error("cannot open " + path);
    return f;
}

} // namespace

void save_spin_csv(const std::string& path, const LatticeGeometry& geom,
                   const SpinConfiguration& sigma) {
    FILE* f = open_or_throw(path, "w");
    std::fprintf(f, "# spin,%d,%d,%d\n", geom.d, geom.N, sigma.n);
    std::fprintf(f, "site");
    for (int c = 0; c < sigma.n; ++c) std::fprintf(f, ",s%d", c);
    std::fprintf(f, "\n");
    for (SiteIndex x = 0; x < geom.num_sites; ++x) {
        std::fprintf(f, "%" PRId64, x);
        for (int c = 0; c < sigma.n; ++c) std::fprintf(f, ",%.17g", sigma.spin(x)[c]);
        std::fprintf(f, "\n");
    }
    std::fclose(f);
}

SpinSnapshot load_spin_csv(const std::string& path) {
    FILE* f = open_or_throw(path, "r");
    SpinSnapshot snap;
    if (std::fscanf(f, "# spin,%d,%d,%d\n", &snap.d, &snap.N, &snap.n) != 3) {
        std::fclose(f);
        throw std::runtime_error(path + ": bad spin snapshot header");
    }
    char line[256];
    if (!std::fgets(line, sizeof line, f)) {
        std::fclose(f);
        throw std::runtime_error(path + ": truncated snapshot");
    }
    SiteIndex num = 1;
    for (int j = 0; j < snap.d; ++j) num *= snap.N;
    snap.sigma.n = snap.n;
    snap.sigma.s.assign(static_cast<std::size_t>(num) * snap.n, 0.0);
    for (SiteIndex x = 0; x < num; ++x) {
        std::int64_t site = 0;
        if (std::fscanf(f, "%" SCNd64, &site) != 1 || site != x) {
            std::fclose(f);
            throw std::runtime_error(path + ": bad site row");
        }
        for (int c = 0; c < snap.n; ++c)
            if (std::fscanf(f, ",%lg", &snap.sigma.spin(x)[c]) != 1) {
                std::fclose(f);
                throw std::runtime_error(path + ": bad spin value");
            }
    }
    std::fclose(f);
    return snap;
}

void save_disorder_csv(const std::string& path, const LatticeGeometry& geom,
                       const DisorderField& alpha) {
    FILE* f = open_or_throw(path, "w");
    std::fprintf(f, "# disorder,%d,%d,%d\n", geom.d, geom.N, alpha.k);
    std::fprintf(f, "site");
    for (int c = 0; c < alpha.k; ++c) std::fprintf(f, ",a%d", c);
    std::fprintf(f, "\n");
    for (SiteIndex x = 0; x < geom.num_sites; ++x) {
        std::fprintf(f, "%" PRId64, x);
        for (int c = 0; c < alpha.k; ++c) std::fprintf(f, ",%.17g", alpha.component(x, c));
        std::fprintf(f, "\n");
    }
    std::fclose(f);
}

DisorderSnapshot load_disorder_csv(const std::string& path) {
    FILE* f = open_or_throw(path, "r");
    DisorderSnapshot snap;
    if (std::fscanf(f, "# disorder,%d,%d,%d\n", &snap.d, &snap.N, &snap.k) != 3) {
        std::fclose(f);
        throw std::runtime_error(path + ": bad disorder snapshot header");
    }
    char line[256];
    if (!std::fgets(line, sizeof line, f)) {
        std::fclose(f);
        throw std::runtime_error(path + ": truncated snapshot");
    }
    SiteIndex num = 1;
    for (int j = 0; j < snap.d; ++j) num *= snap.N;
    snap.alpha.k = snap.k;
    snap.alpha.a.assign(static_cast<std::size_t>(num) * snap.k, 0.0);
    for (SiteIndex x = 0; x < num; ++x) {
        std::int64_t site = 0;
        if (std::fscanf(f, "%" SCNd64, &site) != 1 || site != x) {
            std::fclose(f);
            throw std::runtime_error(path + ": bad site row");
        }
        for (int c = 0; c < snap.k; ++c)
            if (std::fscanf(f, ",%lg", &snap.alpha.a[static_cast<std::size_t>(x) * snap.k + c]) != 1) {
                std::fclose(f);
                throw std::runtime_error(path + ": bad field value");
            }
    }
    std::fclose(f);
    return snap;
}

} // namespace rfo
