#pragma once

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <string>
#include <vector>

#include "agreement/build.hpp"
#include "agreement/generator.hpp"
#include "agreement/profile.hpp"

namespace agreement {

struct BenchmarkConfig {
    std::vector<std::size_t> taxa;
    std::size_t k = 8;
    std::uint64_t seed = 1;
    double coverage = 0.5;
    std::size_t max_children = 4;
    std::string backend = "hdt";
    int repeats = 1; // best-of
};

struct BenchmarkRow {
    std::size_t n = 0;
    std::size_t k = 0;
    std::string backend;
    double wall_ms = 0;
    std::uint64_t edges_deleted = 0;
    std::uint64_t while_iters = 0;
    std::uint64_t outer_iters = 0;
    std::uint32_t max_while_per_position = 0;
    std::size_t labels = 0;
    bool agreed = false;
};

struct BenchmarkReport {
    std::vector<BenchmarkRow> rows;
    double exponent = 0; // least-squares slope of log(wall_ms) against log(n)
};

inline double fit_exponent(const std::vector<double>& x, const std::vector<double>& y)
{
    const std::size_t m = x.size();
    if (m < 2) {
        return 0;
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t j = 0; j < m; ++j) {
        const double lx = std::log(x[j]);
        const double ly = std::log(y[j]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double den = m * sxx - sx * sx;
    return den == 0 ? 0 : (m * sxy - sx * sy) / den;
}

template <ConnectivityBackend Backend>
BenchmarkRow benchmark_one(const Profile& normalized, std::size_t n, std::size_t k, int repeats)
{
    BenchmarkRow row;
    row.n = n;
    row.k = k;
    row.backend = Backend::name;
    row.labels = normalized.label_universe().size();
    row.wall_ms = -1;
    for (int r = 0; r < std::max(repeats, 1); ++r) {
        const auto start = std::chrono::steady_clock::now();
        BuildOutcome out = build_agreement_tree<Backend>(normalized);
        const auto stop = std::chrono::steady_clock::now();
        const double ms = std::chrono::duration<double, std::milli>(stop - start).count();
        if (row.wall_ms < 0 || ms < row.wall_ms) {
            row.wall_ms = ms;
        }
        row.edges_deleted = out.stats.edges_deleted;
        row.while_iters = out.stats.while_iterations;
        row.outer_iters = out.stats.outer_iterations;
        row.max_while_per_position = out.stats.max_while_per_position;
        row.agreed = out.agrees();
    }
    return row;
}

/// Agreeing profiles along the taxa ladder at fixed k; times the build on the
/// normalized profile only.
inline BenchmarkReport run_benchmark(const BenchmarkConfig& cfg)
{
    if (cfg.backend != "hdt" && cfg.backend != "rescan") {
        throw Error(ErrorCode::BadConfig, "unknown backend '" + cfg.backend + "'");
    }
    BenchmarkReport report;
    std::vector<double> xs, ys;
    for (std::size_t j = 0; j < cfg.taxa.size(); ++j) {
        GeneratorConfig g;
        g.n = cfg.taxa[j];
        g.k = cfg.k;
        g.seed = cfg.seed + j;
        g.coverage = cfg.coverage;
        g.max_children = cfg.max_children;
        const Profile normalized = normalize_profile(generate_profile(g)).profile;
        BenchmarkRow row = cfg.backend == "hdt"
            ? benchmark_one<HdtConnectivity>(normalized, g.n, g.k, cfg.repeats)
            : benchmark_one<RescanConnectivity>(normalized, g.n, g.k, cfg.repeats);
        xs.push_back(static_cast<double>(row.n));
        ys.push_back(std::max(row.wall_ms, 1e-3));
        report.rows.push_back(std::move(row));
    }
    report.exponent = fit_exponent(xs, ys);
    return report;
}

inline std::string benchmark_csv(const BenchmarkReport& report)
{
    std::string out = "n,k,backend,wall_ms,edges_deleted,while_iters,outer_iters\n";
    for (const auto& r : report.rows) {
        char ms[32];
        std::snprintf(ms, sizeof ms, "%.3f", r.wall_ms);
        out += std::to_string(r.n) + "," + std::to_string(r.k) + "," + r.backend + "," + ms + ","
            + std::to_string(r.edges_deleted) + "," + std::to_string(r.while_iters) + "," + std::to_string(r.outer_iters)
            + "\n";
    }
    return out;
}

} // namespace agreement
