#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <limits>
#include <set>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "carleson/curves2d.hpp"
#include "carleson/fit.hpp"
#include "carleson/io.hpp"
#include "carleson/kernel.hpp"
#include "carleson/multiplier.hpp"
#include "carleson/operators.hpp"
#include "carleson/random.hpp"

// Experiment runner behind the command-line tool.  Each subcommand resolves a
// config (defaults, then config file, then flags), runs one library operation,
// and emits a table plus a manifest that echoes the full resolved config; the
// manifest can be fed back as a config file to reproduce the table
// byte-for-byte.  Usage problems throw std::invalid_argument (exit 2 at the
// CLI); numeric failures surface as std::runtime_error and downgrade the run
// to a flagged partial result (exit 1).

namespace carleson {

// One flat bag of parameters; each subcommand reads its own slice and the
// manifest echoes the whole resolved bag.
#define CARLESON_CONFIG_FIELDS(X)                                                      \
    X(parity) X(eps_grid) X(eps) X(lambda) X(lambda_lo) X(lambda_hi) X(per_decade)     \
    X(tol) X(k_max) X(h) X(xi) X(j) X(j_list) X(h_grid) X(xi_grid) X(a_grid)           \
    X(threshold) X(samples) X(refine) X(theta1) X(theta2) X(base) X(n) X(trials)       \
    X(amp) X(depth) X(half_width) X(dx) X(n1) X(n2) X(umax) X(seed) X(workers)         \
    X(out) X(format)

struct ExperimentConfig {
    std::string subcommand;
    std::string parity = "odd";
    std::vector<double> eps_grid;  // multiplier-sweep exponent list
    double eps = 1.0;
    std::vector<double> lambda;  // explicit modulation frequencies
    double lambda_lo = 0.0, lambda_hi = 0.0;  // signed log grid, used when lambda empty
    int per_decade = 64;
    double tol = 0.0;  // 0 picks the subcommand default
    int k_max = 10;
    double h = 0.5;
    double xi = -1.0;
    int j = -4;
    std::vector<int> j_list;
    std::vector<double> h_grid, xi_grid, a_grid;
    double threshold = std::numeric_limits<double>::quiet_NaN();
    long samples = 200000;
    double refine = 1.0;
    double theta1 = 0.0, theta2 = 0.0;  // 0 keeps the library defaults
    double base = 2.0;
    int n = 8;
    std::uint64_t trials = 0;  // 0 picks the subcommand default
    double amp = 1.7;
    int depth = 6;
    double half_width = 8.0;
    double dx = 0.03125;
    std::uint64_t n1 = 32, n2 = 32;
    double umax = 2.0;
    std::uint64_t seed = 1;
    int workers = 1;
    std::string out;
    std::string format = "csv";
};

inline const std::vector<std::string>& subcommand_names() {
    static const std::vector<std::string> names{
        "multiplier-sweep", "blowup-probe", "kernel-decay", "badset",
        "badset-fit",       "uniform-kernel", "carleson-norm", "single-scale",
        "high-low-check",   "plancherel-2d"};
    return names;
}

// Per-subcommand defaults, so that a bare invocation runs a sensible,
// fast-ish experiment out of the box.
inline ExperimentConfig default_config(const std::string& subcommand) {
    ExperimentConfig c;
    c.subcommand = subcommand;
    if (subcommand == "multiplier-sweep") {
        c.parity = "odd";
        c.eps = 1.0;
    } else if (subcommand == "blowup-probe") {
        c.k_max = 10;
    } else if (subcommand == "kernel-decay") {
        c.eps = 2.0;
        c.h = 0.3;
        c.j_list = {-5, -4, -3, -2};
        c.refine = 2.0;
    } else if (subcommand == "badset") {
        c.eps = 2.0;
        c.h = 0.5;
        c.xi = -1.0;
        c.j = -4;
    } else if (subcommand == "badset-fit") {
        c.eps = 2.0;
        c.j_list = {-2, -4, -6, -8};
        c.h_grid = {0.3, 0.5, 0.7, 0.85, 0.95};
        c.xi_grid = {-1.5, -1.0, -0.8, 1.0};
    } else if (subcommand == "uniform-kernel") {
        c.n = 4;
        c.h = std::exp2(-3.0 / 4.0);
        c.j_list = {13, 14, 15, 16};
        c.refine = 2.0;
    } else if (subcommand == "carleson-norm") {
        c.parity = "even";
        c.eps = 1.0;
        c.per_decade = 48;
        c.trials = 50;
    } else if (subcommand == "single-scale") {
        c.parity = "odd";
        c.eps = 0.5;
        c.j = 0;
        c.trials = 20;
    } else if (subcommand == "high-low-check") {
        c.parity = "even";
        c.eps = 2.0;
        c.amp = 1.7;
        c.depth = 6;
    } else if (subcommand == "plancherel-2d") {
        c.eps = 1.0;
        c.trials = 10;
        c.dx = 0.25;
    } else {
        throw std::invalid_argument("unknown subcommand '" + subcommand + "'");
    }
    return c;
}

namespace detail {

template <class T>
inline void config_assign(T& dst, const nlohmann::json& v, const char* key) {
    if (v.is_null()) {
        if constexpr (std::is_same_v<T, double>) {
            dst = std::numeric_limits<double>::quiet_NaN();
            return;
        }
        throw std::invalid_argument(std::string("config: field '") + key + "' is null");
    }
    try {
        dst = v.get<T>();
    } catch (const nlohmann::json::exception&) {
        throw std::invalid_argument(std::string("config: field '") + key +
                                    "' has the wrong type");
    }
}

}

inline nlohmann::json config_json(const ExperimentConfig& c) {
    nlohmann::json j;
    j["subcommand"] = c.subcommand;
#define X(name) j[#name] = c.name;
    CARLESON_CONFIG_FIELDS(X)
#undef X
    return j;
}

// Merge a config file (or a manifest wrapping one) into c.  Keys named in
// `overridden` were set on the command line and win over the file.
inline void apply_config_json(ExperimentConfig& c, const nlohmann::json& file,
                              const std::set<std::string>& overridden) {
    const nlohmann::json& root =
        (file.is_object() && file.contains("config")) ? file.at("config") : file;
    if (!root.is_object()) throw std::invalid_argument("config: expected a JSON object");
    for (const auto& [key, val] : root.items()) {
        if (key == "subcommand") {
            const std::string want = val.get<std::string>();
            if (want != c.subcommand)
                throw std::invalid_argument("config: subcommand '" + want +
                                            "' does not match '" + c.subcommand + "'");
            continue;
        }
        if (overridden.count(key)) continue;
        if (false) {
        }
#define X(name)                                        \
    else if (key == #name) {                           \
        detail::config_assign(c.name, val, #name);     \
    }
        CARLESON_CONFIG_FIELDS(X)
#undef X
        else {
            throw std::invalid_argument("config: unknown field '" + key + "'");
        }
    }
}

enum class RunStatus { ok, partial, failed };

inline const char* status_name(RunStatus s) {
    switch (s) {
        case RunStatus::ok: return "ok";
        case RunStatus::partial: return "partial";
        default: return "failed";
    }
}

struct ExperimentResult {
    RunStatus status = RunStatus::ok;
    Table table;
    std::vector<std::pair<std::string, double>> summary;
    std::string message;
};

namespace detail {

inline Branch parse_parity(const std::string& s) {
    if (s == "odd") return Branch::odd;
    if (s == "even") return Branch::even;
    throw std::invalid_argument("parity must be 'odd' or 'even', got '" + s + "'");
}

// Index-stable parallel map; exceptions are replayed on the caller thread, so
// results are independent of the worker count.
template <class Fn>
inline void parallel_for(std::size_t count, int workers, Fn&& fn) {
    const int w = std::max(1, std::min(workers, static_cast<int>(count)));
    if (w == 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex err_mtx;
    std::vector<std::thread> pool;
    for (int t = 0; t < w; ++t)
        pool.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < count;) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> g(err_mtx);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

inline KernelParams resolved_kernel_params(const ExperimentConfig& c, int j, double h) {
    KernelParams p = make_kernel_params(c.eps, j, h, c.base);
    if (c.theta1 > 0.0) p.theta1 = c.theta1;
    if (c.theta2 > 0.0) p.theta2 = c.theta2;
    validate(p);
    return p;
}

inline ExperimentResult run_multiplier_sweep(const ExperimentConfig& c) {
    const Branch parity = parse_parity(c.parity);
    const std::vector<double> eps = c.eps_grid.empty() ? std::vector<double>{c.eps} : c.eps_grid;
    std::vector<double> lambdas = c.lambda;
    if (lambdas.empty()) {
        if (c.lambda_lo > 0.0)
            lambdas = signed_log_grid(c.lambda_lo, c.lambda_hi, c.per_decade);
        else
            lambdas = {0.0};
    }
    const double tol = c.tol > 0.0 ? c.tol : 1e-9;
    for (double e : eps) {
        if (parity == Branch::even && e == 1.0)
            throw std::invalid_argument("eps: even parity at 1 is unbounded; use blowup-probe");
        if (parity == Branch::odd && e == 0.0)
            throw std::invalid_argument("eps: odd parity at 0 is divergent");
    }

    struct Cell {
        double e, l, re, im, err;
        bool ok;
    };
    std::vector<Cell> cells(eps.size() * lambdas.size());
    parallel_for(cells.size(), c.workers, [&](std::size_t i) {
        const double e = eps[i / lambdas.size()];
        const double l = lambdas[i % lambdas.size()];
        const MultiplierValue r = multiplier_result({parity, e, l, 1.0, tol});
        cells[i] = {e, l, r.value.real(), r.value.imag(), r.error, r.converged};
    });

    ExperimentResult res;
    res.table.columns = {"parity", "epsilon", "lambda", "re", "im", "err"};
    double sup = 0.0, arge = 0.0, argl = 0.0;
    bool all_ok = true;
    for (const Cell& cl : cells) {
        res.table.rows.push_back(
            {c.parity, g17(cl.e), g17(cl.l), g17(cl.re), g17(cl.im), g17(cl.err)});
        const double a = std::hypot(cl.re, cl.im);
        if (a > sup) {
            sup = a;
            arge = cl.e;
            argl = cl.l;
        }
        all_ok = all_ok && cl.ok;
    }
    res.summary = {{"sup_abs", sup}, {"argmax_epsilon", arge}, {"argmax_lambda", argl}};
    if (!all_ok) {
        res.status = RunStatus::partial;
        res.message = "some quadratures did not converge to the requested tolerance";
    }
    return res;
}

inline ExperimentResult run_blowup_probe(const ExperimentConfig& c) {
    const double tol = c.tol > 0.0 ? c.tol : 1e-8;
    const std::vector<BlowupRow> rows = blowup_probe_even_at_one(c.k_max, tol);
    ExperimentResult res;
    res.table.columns = {"parity", "epsilon", "lambda", "re", "im", "err"};
    double sup = 0.0, max_gap = 0.0;
    for (const BlowupRow& r : rows) {
        res.table.rows.push_back(
            {"even", g17(1.0), g17(r.lambda), g17(r.re), g17(r.im), g17(r.err)});
        sup = std::max(sup, std::hypot(r.re, r.im));
        const double ref = std::log(std::exp2(r.k + 1) - 1.0);
        max_gap = std::max(max_gap, std::fabs(r.re - ref) / ref);
    }
    ExperimentResult& out = res;
    out.summary = {{"sup_abs", sup}, {"max_rel_gap_to_log", max_gap}};
    return out;
}

inline ExperimentResult run_kernel_decay(const ExperimentConfig& c) {
    if (c.j_list.size() < 4)
        throw std::invalid_argument("j: kernel decay needs at least 4 scale indices");
    const KernelParams tmpl = resolved_kernel_params(c, c.j_list.front(), c.h);
    const double tol = c.tol > 0.0 ? c.tol : 1e-8;
    const KernelDecay d = decay_fit(tmpl, c.j_list, c.xi_grid, tol, c.refine);

    ExperimentResult res;
    res.table.columns = {"j", "h", "xi", "re", "im", "abs"};
    for (std::size_t i = 0; i < d.js.size(); ++i)
        res.table.rows.push_back({g17(d.js[i]), g17(c.h), g17(d.peaks[i].xi),
                                  g17(d.peaks[i].value.real()), g17(d.peaks[i].value.imag()),
                                  g17(d.sups[i])});
    res.summary = {{"slope", d.fit.slope}, {"intercept", d.fit.intercept}, {"r2", d.fit.r2}};
    if (d.fit.degenerate) {
        res.status = RunStatus::partial;
        res.message = "decay fit degenerate: suprema vanish on the probe grid";
    }
    return res;
}

inline ExperimentResult run_badset(const ExperimentConfig& c) {
    const KernelParams p = resolved_kernel_params(c, c.j, c.h);
    const double m = bad_set_measure(p, c.xi, c.samples, c.threshold);
    ExperimentResult res;
    res.table.columns = {"j", "h", "xi", "measure"};
    res.table.rows.push_back({g17(c.j), g17(c.h), g17(c.xi), g17(m)});
    res.summary = {{"measure", m}};
    return res;
}

inline ExperimentResult run_badset_fit(const ExperimentConfig& c) {
    if (c.j_list.size() < 4)
        throw std::invalid_argument("j: bad-set fit needs at least 4 scale indices");
    if (c.h_grid.empty() || c.xi_grid.empty())
        throw std::invalid_argument("h/xi: bad-set fit needs nonempty h and xi grids");
    const KernelParams tmpl = resolved_kernel_params(c, c.j_list.front(), 0.5);
    const BadSetDecay b = badset_exponent_check(tmpl, c.j_list, c.h_grid, c.xi_grid, c.samples);

    ExperimentResult res;
    res.table.columns = {"j", "h", "xi", "measure"};
    for (std::size_t i = 0; i < b.js.size(); ++i)
        res.table.rows.push_back(
            {g17(b.js[i]), g17(b.arg_h[i]), g17(b.arg_xi[i]), g17(b.measures[i])});
    res.summary = {{"slope", b.fit.slope},
                   {"r2", b.fit.r2},
                   {"required", b.required},
                   {"passed", b.passed ? 1.0 : 0.0}};
    if (b.fit.degenerate) {
        res.status = RunStatus::partial;
        res.message = "bad-set fit degenerate: measures vanish across the grid";
    }
    return res;
}

inline ExperimentResult run_uniform_kernel(const ExperimentConfig& c) {
    if (c.j_list.size() < 4)
        throw std::invalid_argument("j: uniform kernel check needs at least 4 scale indices");
    const double tol = c.tol > 0.0 ? c.tol : 1e-7;
    const UniformKernelResult u =
        uniform_kernel_check(c.n, c.j_list, c.h, tol, c.xi_grid, c.refine);

    ExperimentResult res;
    res.table.columns = {"j", "h", "xi", "re", "im", "abs"};
    for (std::size_t i = 0; i < u.js.size(); ++i) {
        const KernelRow& in = u.inside_peaks[i];
        const KernelRow& outp = u.outside_peaks[i];
        res.table.rows.push_back({g17(u.js[i]), g17(c.h), g17(in.xi), g17(in.value.real()),
                                  g17(in.value.imag()), g17(u.inside_sups[i])});
        res.table.rows.push_back({g17(u.js[i]), g17(c.h), g17(outp.xi), g17(outp.value.real()),
                                  g17(outp.value.imag()), g17(u.outside_sups[i])});
    }
    res.summary = {{"outside_exponent", u.outside_exponent},
                   {"outside_r2", u.outside_fit.r2},
                   {"inside_sup", u.inside_sup},
                   {"inside_constant", u.inside_constant}};
    if (u.outside_fit.degenerate) {
        res.status = RunStatus::partial;
        res.message = "outside fit degenerate: kernel support never leaves the band";
    }
    return res;
}

inline ExperimentResult ratio_table(const RatioSweep& r) {
    ExperimentResult res;
    res.table.columns = {"trial", "ratio"};
    for (std::size_t i = 0; i < r.ratios.size(); ++i)
        res.table.rows.push_back({g17(static_cast<int>(i)), g17(r.ratios[i])});
    res.summary = {{"max_ratio", r.max_ratio}};
    return res;
}

inline ExperimentResult run_carleson_norm(const ExperimentConfig& c) {
    const Branch parity = parse_parity(c.parity);
    const std::vector<double> grid =
        c.a_grid.empty() ? default_modulation_grid(c.per_decade) : c.a_grid;
    const std::uint64_t trials = c.trials ? c.trials : 50;
    return ratio_table(norm_estimate(c.eps, parity, grid, trials, c.seed));
}

inline ExperimentResult run_single_scale(const ExperimentConfig& c) {
    const Branch parity = parse_parity(c.parity);
    const std::uint64_t trials = c.trials ? c.trials : 20;
    return ratio_table(single_scale_norm(c.eps, parity, c.j, trials, c.seed));
}

inline ExperimentResult run_high_low_check(const ExperimentConfig& c) {
    const Branch parity = parse_parity(c.parity);
    if (!(c.half_width > 0.0) || !(c.dx > 0.0))
        throw std::invalid_argument("half_width/dx must be positive");
    const std::size_t nf =
        static_cast<std::size_t>(std::lround(2.0 * c.half_width / c.dx));
    if (nf < 4 || nf > (1u << 22))
        throw std::invalid_argument("half_width/dx give an unusable grid size");
    SampledSignal1D f = make_signal(-c.half_width, c.dx, nf);
    Rng rng(c.seed);
    f = testfn::draw(f, rng, 0);

    const ModulationField field = constant_field(c.amp, f.size());
    const HighLowSplit split = high_low_split(f, field, c.eps, parity, c.depth);
    const SampledSignal1D full = modulated_transform(f, c.amp, parity, c.eps);

    ExperimentResult res;
    res.table.columns = {"x", "value"};
    double worst = 0.0, l2 = 0.0;
    for (std::size_t i = 0; i < full.size(); ++i) {
        const double v =
            std::abs(split.high.samples[i] + split.low.samples[i] - full.samples[i]);
        res.table.rows.push_back({g17(full.x(i)), g17(v)});
        worst = std::max(worst, v);
        l2 += v * v;
    }
    res.summary = {{"worst_residual", worst}, {"residual_l2", std::sqrt(full.spacing * l2)}};
    return res;
}

inline ExperimentResult run_plancherel_2d(const ExperimentConfig& c) {
    if (c.n1 < 2 || c.n2 < 2 || c.n1 > 512 || c.n2 > 512)
        throw std::invalid_argument("n1/n2 must lie in [2, 512]");
    if (!(c.dx > 0.0)) throw std::invalid_argument("dx must be positive");
    const std::uint64_t trials = c.trials ? c.trials : 10;

    std::vector<double> ratios(trials, 0.0);
    parallel_for(trials, c.workers, [&](std::size_t t) {
        Rng rng(c.seed * 1000003ULL + t);
        SampledSignal2D f = make_signal2d(-0.5 * c.dx * static_cast<double>(c.n1),
                                          -0.5 * c.dx * static_cast<double>(c.n2), c.dx,
                                          c.dx, c.n1, c.n2);
        for (auto& v : f.samples) v = rng.cnormal();
        CurveField u;
        u.values.resize(c.n1);
        for (auto& v : u.values) v = rng.uniform(-c.umax, c.umax);
        const auto [phys, fib] = plancherel_check(f, u, c.eps);
        ratios[t] = phys / fib;
    });

    ExperimentResult res;
    res.table.columns = {"trial", "ratio"};
    double gap = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
        res.table.rows.push_back({g17(static_cast<int>(t)), g17(ratios[t])});
        gap = std::max(gap, std::fabs(1.0 - ratios[t]));
    }
    res.summary = {{"max_abs_gap", gap}};
    return res;
}

}

inline ExperimentResult run(const ExperimentConfig& c) {
    if (c.format != "csv" && c.format != "json")
        throw std::invalid_argument("format must be 'csv' or 'json', got '" + c.format + "'");
    if (c.workers < 1) throw std::invalid_argument("workers must be at least 1");
    if (c.subcommand == "multiplier-sweep") return detail::run_multiplier_sweep(c);
    if (c.subcommand == "blowup-probe") return detail::run_blowup_probe(c);
    if (c.subcommand == "kernel-decay") return detail::run_kernel_decay(c);
    if (c.subcommand == "badset") return detail::run_badset(c);
    if (c.subcommand == "badset-fit") return detail::run_badset_fit(c);
    if (c.subcommand == "uniform-kernel") return detail::run_uniform_kernel(c);
    if (c.subcommand == "carleson-norm") return detail::run_carleson_norm(c);
    if (c.subcommand == "single-scale") return detail::run_single_scale(c);
    if (c.subcommand == "high-low-check") return detail::run_high_low_check(c);
    if (c.subcommand == "plancherel-2d") return detail::run_plancherel_2d(c);
    throw std::invalid_argument("unknown subcommand '" + c.subcommand + "'");
}

struct RunPaths {
    std::filesystem::path table;
    std::filesystem::path manifest;
};

// Output stem: --out wins; otherwise the default output directory (the
// CARLESON_OUTPUT_DIR environment variable, falling back to the working
// directory) plus the subcommand name.
inline RunPaths resolve_paths(const ExperimentConfig& c) {
    std::filesystem::path stem;
    if (!c.out.empty()) {
        stem = c.out;
        const std::string ext = stem.extension().string();
        if (ext == ".csv" || ext == ".json") stem.replace_extension();
    } else {
        const char* dir = std::getenv("CARLESON_OUTPUT_DIR");
        stem = std::filesystem::path(dir && *dir ? dir : ".") / c.subcommand;
    }
    RunPaths p;
    p.table = stem.string() + (c.format == "json" ? ".json" : ".csv");
    p.manifest = stem.string() + ".manifest.json";
    return p;
}

// Run one experiment and write its artifacts.  Returns the process exit code:
// 0 clean, 1 numeric trouble (partial table still written).  Configuration
// errors propagate as std::invalid_argument before any file is touched.
inline int execute(const ExperimentConfig& c, std::string* report = nullptr) {
    const auto t0 = std::chrono::steady_clock::now();
    ExperimentResult res;
    try {
        res = run(c);
    } catch (const std::invalid_argument&) {
        throw;
    } catch (const std::exception& e) {
        res.status = RunStatus::failed;
        res.message = e.what();
    }
    const double dur =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const RunPaths paths = resolve_paths(c);
    if (c.format == "json")
        atomic_write(paths.table, table_json(res.table).dump(2) + "\n");
    else
        atomic_write(paths.table, to_csv(res.table));

    nlohmann::json man;
    man["tool"] = kToolName;
    man["version"] = kToolVersion;
    man["subcommand"] = c.subcommand;
    man["status"] = status_name(res.status);
    man["config"] = config_json(c);
    man["table_file"] = paths.table.filename().string();
    man["duration_seconds"] = dur;
    nlohmann::json sum = nlohmann::json::object();
    for (const auto& [k, v] : res.summary) sum[k] = v;
    man["summary"] = std::move(sum);
    if (!res.message.empty()) man["error"] = res.message;
    atomic_write(paths.manifest, man.dump(2) + "\n");

    if (report) {
        std::ostringstream os;
        os << c.subcommand << ": " << status_name(res.status) << " (" << res.table.rows.size()
           << " rows, " << g17(dur) << " s)\n";
        for (const auto& [k, v] : res.summary) os << "  " << k << " = " << g17(v) << "\n";
        if (!res.message.empty()) os << "  note: " << res.message << "\n";
        os << "  table: " << paths.table.string() << "\n  manifest: " << paths.manifest.string()
           << "\n";
        *report = os.str();
    }
    return res.status == RunStatus::ok ? 0 : 1;
}

}
