#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "naxon/audit.hpp"
#include "naxon/bench.hpp"
#include "naxon/config.hpp"
#include "naxon/errors.hpp"
#include "naxon/io.hpp"
#include "naxon/noise.hpp"
#include "naxon/ou.hpp"
#include "naxon/solver.hpp"

namespace naxon {

enum ExitCode : int { kExitOk = 0, kExitValidation = 2, kExitDivergence = 3, kExitAudit = 4 };

struct CliContext {
    std::filesystem::path out_dir = ".";
    unsigned threads = 1;
    std::ostream* out = &std::cout;
    std::ostream* err = &std::cerr;
};

namespace detail {

inline void write_text(const std::filesystem::path& p, const std::string& s) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw ConfigError("--out-dir", "cannot write '" + p.string() + "'");
    f << s;
}

inline void write_json(const std::filesystem::path& p, const nlohmann::json& j) { write_text(p, j.dump(2) + "\n"); }

inline void prepare_out_dir(const CliContext& ctx) {
    std::error_code ec;
    std::filesystem::create_directories(ctx.out_dir, ec);
    if (ec) throw ConfigError("--out-dir", "cannot create '" + ctx.out_dir.string() + "': " + ec.message());
}

// Runs the audit unless skipped; returns false (after reporting) when it fails.
inline bool audit_gate(const RunConfig& cfg, const ModelSpec& model, const CliContext& ctx) {
    if (cfg.skip_audit) return true;
    const auto rep = audit_assumptions(model, cfg.audit.u_lo, cfg.audit.u_hi, cfg.audit.samples);
    if (rep.pass()) return true;
    *ctx.err << "assumption audit failed for model '" << model.name << "':";
    for (const auto& f : rep.failures()) *ctx.err << " " << f;
    *ctx.err << " (set skip_audit to override)\n";
    return false;
}

/// Linear-interpolation quantile of sorted data.
inline double quantile_sorted(const std::vector<double>& v, double q) {
    if (v.empty()) return 0.0;
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace detail

/// Trajectory CSV/binary, monitor series and excursion summary per seed.
inline int cmd_simulate(const RunConfig& cfg, const CliContext& ctx) {
    const ModelSpec model = build_model(cfg);
    if (!detail::audit_gate(cfg, model, ctx)) return kExitAudit;
    detail::prepare_out_dir(ctx);
    const Grid1D grid(cfg.n);
    const InitialData init = build_initial(cfg);
    const GridFunction u0 = sample_initial_u(init.u0, grid);
    const GatingBlock x0 = sample_initial_x(init.x0, grid, model.d);

    std::vector<TrajectoryRecord> recs(cfg.seeds.size());
    std::vector<std::string> errors(cfg.seeds.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < recs.size(); i = next++) {
            SolverConfig sc = cfg.time;
            sc.seed = cfg.seeds[i];
            try {
                recs[i] = simulate(model, grid, sc, u0, x0, cfg.quad_points);
            } catch (const DivergenceError& e) {
                errors[i] = e.what();
            }
        }
    };
    const unsigned threads = std::max(1u, std::min<unsigned>(ctx.threads, static_cast<unsigned>(recs.size())));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    nlohmann::json runs = nlohmann::json::array();
    bool diverged = false;
    for (std::size_t i = 0; i < recs.size(); ++i) {
        const auto seed = cfg.seeds[i];
        const std::string tag = "seed" + std::to_string(seed);
        if (!errors[i].empty()) {
            diverged = true;
            *ctx.err << "seed " << seed << ": " << errors[i] << "\n";
            runs.push_back({{"seed", seed}, {"diverged", true}, {"message", errors[i]}});
            continue;
        }
        const auto& rec = recs[i];
        if (cfg.write_csv) {
            std::ofstream f(ctx.out_dir / ("trajectory_" + tag + ".csv"));
            write_trajectory_csv(f, rec);
        }
        if (cfg.write_binary) {
            std::ofstream f(ctx.out_dir / ("trajectory_" + tag + ".naxs"), std::ios::binary);
            write_trajectory_binary(f, rec);
        }
        {
            std::ofstream f(ctx.out_dir / ("monitors_" + tag + ".csv"));
            write_monitor_csv(f, rec);
        }
        runs.push_back({{"seed", seed},
                        {"diverged", false},
                        {"snapshots", rec.size()},
                        {"max_excursion", rec.max_excursion},
                        {"final_R", rec.final_monitors.R},
                        {"final_G", rec.final_monitors.G},
                        {"sup_u", rec.final_monitors.sup_u}});
    }
    detail::write_json(ctx.out_dir / "simulate_summary.json",
                       {{"version", 1}, {"config", to_json(cfg)}, {"runs", runs}});
    *ctx.out << "simulated " << recs.size() << " seed(s), model " << model.name << ", n=" << cfg.n << "\n";
    return diverged ? kExitDivergence : kExitOk;
}

/// Hierarchy run: report JSON + per-sample CSV; fitted slopes on stdout.
inline int cmd_converge(const RunConfig& cfg, const CliContext& ctx) {
    const ModelSpec model = build_model(cfg);
    if (!detail::audit_gate(cfg, model, ctx)) return kExitAudit;
    detail::prepare_out_dir(ctx);
    const auto t0 = std::chrono::steady_clock::now();
    const auto results = run_hierarchy(model, cfg.converge, build_initial(cfg), ctx.threads, cfg.quad_points);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    std::size_t failed = 0;
    for (const auto& r : results) failed += r.failed ? 1 : 0;
    const double frac = static_cast<double>(failed) / static_cast<double>(results.size());
    {
        std::ofstream f(ctx.out_dir / "convergence_samples.csv");
        write_samples_csv(f, results);
    }
    if (failed == results.size() || frac > 0.2) {
        *ctx.err << failed << " of " << results.size() << " seeds failed; aborting\n";
        return kExitDivergence;
    }
    auto rep = aggregate_report(results, cfg.converge.reference == Reference::Finest ? cfg.converge.n_ref() : 0);
    rep.wall_seconds = wall;
    detail::write_json(ctx.out_dir / "convergence_report.json", to_json(rep, to_json(cfg)));
    detail::write_json(ctx.out_dir / "converge_timing.json",
                       {{"version", 1},
                        {"wall_seconds", wall},
                        {"seconds_per_seed", wall / static_cast<double>(results.size())},
                        {"threads", ctx.threads}});
    for (const auto& st : rep.levels) {
        *ctx.out << "n=" << st.n << " mean_err=" << st.mean_err << " log_mean_werr=" << st.log_mean_werr << "\n";
    }
    if (rep.levels.size() >= 3) {
        *ctx.out << "slope_plain=" << rep.slope_plain.slope << " slope_weighted=" << rep.slope_weighted.slope << "\n";
    }
    return kExitOk;
}

/// Assumption audit as JSON; exit 4 lists the failing checks.
inline int cmd_audit(const RunConfig& cfg, const CliContext& ctx) {
    const ModelSpec model = build_model(cfg);
    detail::prepare_out_dir(ctx);
    const auto rep = audit_assumptions(model, cfg.audit.u_lo, cfg.audit.u_hi, cfg.audit.samples);
    auto j = to_json(rep);
    j["config"] = to_json(cfg);
    detail::write_json(ctx.out_dir / "audit_report.json", j);
    for (const auto& a : rep.assumptions) {
        *ctx.out << a.name << ": " << (!a.applicable ? "not declared" : (a.pass ? "pass" : "FAIL"));
        if (!a.note.empty()) *ctx.out << " (" << a.note << ")";
        *ctx.out << "\n";
    }
    if (!rep.pass()) {
        *ctx.err << "failed:";
        for (const auto& f : rep.failures()) *ctx.err << " " << f;
        *ctx.err << "\n";
        return kExitAudit;
    }
    return kExitOk;
}

struct OUStatsLevel {
    std::size_t n = 0;
    std::vector<double> xi;  // sorted
    std::vector<double> quantiles;
    double mean = 0.0;
};

/// xi^n over `paths` independent discrete OU paths for each n.
inline std::vector<OUStatsLevel> ou_statistics(const KernelSpec& kernel, const OUStatsSpec& spec, std::uint64_t seed,
                                               unsigned threads = 1) {
    const CovarianceKernel k = make_kernel(kernel);
    std::vector<OUStatsLevel> out;
    for (std::size_t n : spec.n_list) {
        const DiscreteCovariance cov = discretize_kernel(k, Grid1D(n));
        OUStatsLevel lvl;
        lvl.n = n;
        lvl.xi.assign(spec.paths, 0.0);
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (std::size_t p = next++; p < spec.paths; p = next++) {
                lvl.xi[p] = simulate_discrete_ou(cov, spec.dt, spec.T, derive_seed(seed, p), spec.nu).xi;
            }
        };
        const unsigned nt = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(spec.paths)));
        std::vector<std::thread> pool;
        for (unsigned t = 1; t < nt; ++t) pool.emplace_back(worker);
        worker();
        for (auto& t : pool) t.join();
        std::sort(lvl.xi.begin(), lvl.xi.end());
        for (double v : lvl.xi) lvl.mean += v;
        lvl.mean /= static_cast<double>(lvl.xi.size());
        for (double q : spec.quantiles) lvl.quantiles.push_back(detail::quantile_sorted(lvl.xi, q));
        out.push_back(std::move(lvl));
    }
    return out;
}

/// Relative spread (max - min) / min of the given quantile across levels; 0 when all are 0.
inline double quantile_spread(const std::vector<OUStatsLevel>& levels, double q) {
    double lo = INFINITY, hi = 0.0;
    for (const auto& l : levels) {
        const double v = detail::quantile_sorted(l.xi, q);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return hi == 0.0 ? 0.0 : (hi - lo) / lo;
}

inline int cmd_ou_stats(const RunConfig& cfg, const CliContext& ctx) {
    detail::prepare_out_dir(ctx);
    const auto levels = ou_statistics(cfg.noise.u_kernel, cfg.ou, cfg.seeds.front(), ctx.threads);
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& l : levels) {
        nlohmann::json qs = nlohmann::json::object();
        for (std::size_t i = 0; i < cfg.ou.quantiles.size(); ++i) {
            std::ostringstream key;
            key << cfg.ou.quantiles[i];
            qs[key.str()] = l.quantiles[i];
        }
        rows.push_back({{"n", l.n}, {"mean", l.mean}, {"quantiles", qs}});
        *ctx.out << "n=" << l.n << " mean_xi=" << l.mean;
        for (std::size_t i = 0; i < cfg.ou.quantiles.size(); ++i) {
            *ctx.out << " q" << cfg.ou.quantiles[i] << "=" << l.quantiles[i];
        }
        *ctx.out << "\n";
    }
    const double spread95 = quantile_spread(levels, 0.95);
    *ctx.out << "spread_q0.95=" << spread95 << "\n";
    detail::write_json(ctx.out_dir / "ou_stats.json", {{"version", 1},
                                                        {"config", to_json(cfg)},
                                                        {"levels", rows},
                                                        {"paths", cfg.ou.paths},
                                                        {"relative_spread_q95", spread95}});
    return kExitOk;
}

/**
 * Dispatches a subcommand and maps errors to exit codes: 2 for invalid
 * configuration, 3 for divergence, 4 for a failed assumption audit.
 */
inline int run_command(const std::string& sub, const RunConfig& cfg, const CliContext& ctx) {
    try {
        if (sub == "simulate") return cmd_simulate(cfg, ctx);
        if (sub == "converge") return cmd_converge(cfg, ctx);
        if (sub == "audit") return cmd_audit(cfg, ctx);
        if (sub == "ou-stats") return cmd_ou_stats(cfg, ctx);
        *ctx.err << "unknown subcommand '" << sub << "'\n";
        return kExitValidation;
    } catch (const DivergenceError& e) {
        *ctx.err << "error: " << e.what() << "\n";
        return kExitDivergence;
    } catch (const std::invalid_argument& e) {
        *ctx.err << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::domain_error& e) {
        *ctx.err << "error: " << e.what() << "\n";
        return kExitValidation;
    }
}

}  // namespace naxon
