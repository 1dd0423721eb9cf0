#include <cstdio>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "carleson/experiments.hpp"
#include "carleson/io.hpp"

// Command-line experiment runner.  Each subcommand resolves its parameters in
// three layers (built-in defaults, then --config file, then flags), runs one
// library operation, and writes a table plus a manifest.  Feeding a manifest
// back through --config reproduces the table byte-for-byte.

namespace {

struct SubState {
    CLI::App* sub = nullptr;
    carleson::ExperimentConfig cfg;
    std::string config_path;
    std::vector<std::pair<CLI::Option*, std::string>> tracked;

    template <class T>
    CLI::Option* opt(const std::string& flag, T& ref, const std::string& key,
                     const std::string& desc) {
        CLI::Option* o = sub->add_option(flag, ref, desc)->capture_default_str();
        tracked.push_back({o, key});
        return o;
    }
};

void add_shared(SubState& s) {
    s.opt("--out", s.cfg.out, "out",
          "output stem; default $CARLESON_OUTPUT_DIR/<subcommand>");
    s.opt("--format", s.cfg.format, "format", "table format: csv or json");
    s.opt("--workers", s.cfg.workers, "workers", "parallelism bound (results unaffected)");
    s.sub->add_option("--config", s.config_path,
                      "JSON config file or a previous run manifest; flags override");
}

}

int main(int argc, char** argv) {
    CLI::App app{"numerical experiments for fractional monomial Carleson operators"};
    app.require_subcommand(1);
    app.set_help_flag("--help", "print this help");  // keep -h free for --h

    std::vector<std::unique_ptr<SubState>> states;
    auto make = [&](const std::string& name, const std::string& desc) -> SubState& {
        auto st = std::make_unique<SubState>();
        st->cfg = carleson::default_config(name);
        st->sub = app.add_subcommand(name, desc);
        st->sub->set_help_flag("--help", "print this help");
        states.push_back(std::move(st));
        return *states.back();
    };

    {
        SubState& s = make("multiplier-sweep", "multiplier values over (eps, lambda) grids");
        s.opt("--parity", s.cfg.parity, "parity", "phase parity: odd or even");
        s.opt("--eps", s.cfg.eps_grid, "eps_grid", "exponent values (repeatable)");
        s.opt("--lambda", s.cfg.lambda, "lambda", "modulation frequencies (repeatable)");
        s.opt("--lambda-lo", s.cfg.lambda_lo, "lambda_lo", "signed log grid lower magnitude");
        s.opt("--lambda-hi", s.cfg.lambda_hi, "lambda_hi", "signed log grid upper magnitude");
        s.opt("--per-decade", s.cfg.per_decade, "per_decade", "log grid density");
        s.opt("--tol", s.cfg.tol, "tol", "quadrature tolerance (0 = default)");
        add_shared(s);
    }
    {
        SubState& s = make("blowup-probe", "even-parity eps=1 growth along lambda -> 1");
        s.opt("--k-max", s.cfg.k_max, "k_max", "largest dyadic index (lambda = 1 - 2^-k)");
        s.opt("--tol", s.cfg.tol, "tol", "quadrature tolerance (0 = default)");
        add_shared(s);
    }
    {
        SubState& s = make("kernel-decay", "outside-band kernel suprema across scales");
        s.opt("--eps", s.cfg.eps, "eps", "monomial exponent (> 0, != 1)");
        s.opt("--h", s.cfg.h, "h", "amplitude ratio in (0, 1]");
        s.opt("--j", s.cfg.j_list, "j_list", "scale indices (repeatable, at least 4)");
        s.opt("--xi", s.cfg.xi_grid, "xi_grid", "probe frequencies (default: covering grid)");
        s.opt("--refine", s.cfg.refine, "refine", "covering grid refinement factor");
        s.opt("--tol", s.cfg.tol, "tol", "quadrature tolerance (0 = default)");
        s.opt("--theta1", s.cfg.theta1, "theta1", "band exponent override (0 = default)");
        s.opt("--theta2", s.cfg.theta2, "theta2", "threshold exponent override (0 = default)");
        s.opt("--base", s.cfg.base, "base", "bump dilation base");
        add_shared(s);
    }
    {
        SubState& s = make("badset", "stationary-set measure at one parameter point");
        s.opt("--eps", s.cfg.eps, "eps", "monomial exponent (> 0, != 1)");
        s.opt("--h", s.cfg.h, "h", "amplitude ratio in (0, 1]");
        s.opt("--xi", s.cfg.xi, "xi", "rescaled frequency");
        s.opt("--j", s.cfg.j, "j", "scale index (<= 0)");
        s.opt("--threshold", s.cfg.threshold, "threshold",
              "stationarity threshold (default 2^(theta2 j))");
        s.opt("--samples", s.cfg.samples, "samples", "midpoint lattice size");
        s.opt("--theta1", s.cfg.theta1, "theta1", "band exponent override (0 = default)");
        s.opt("--theta2", s.cfg.theta2, "theta2", "threshold exponent override (0 = default)");
        s.opt("--base", s.cfg.base, "base", "bump dilation base");
        add_shared(s);
    }
    {
        SubState& s = make("badset-fit", "worst-case stationary-set decay across scales");
        s.opt("--eps", s.cfg.eps, "eps", "monomial exponent (> 0, != 1)");
        s.opt("--j", s.cfg.j_list, "j_list", "scale indices (repeatable, at least 4)");
        s.opt("--h", s.cfg.h_grid, "h_grid", "amplitude ratios (repeatable)");
        s.opt("--xi", s.cfg.xi_grid, "xi_grid", "rescaled frequencies (repeatable)");
        s.opt("--samples", s.cfg.samples, "samples", "midpoint lattice size");
        s.opt("--theta1", s.cfg.theta1, "theta1", "band exponent override (0 = default)");
        s.opt("--theta2", s.cfg.theta2, "theta2", "threshold exponent override (0 = default)");
        s.opt("--base", s.cfg.base, "base", "bump dilation base");
        add_shared(s);
    }
    {
        SubState& s = make("uniform-kernel", "refined-base kernel: 1/n band bound and decay");
        s.opt("--n", s.cfg.n, "n", "base refinement order (>= 4)");
        s.opt("--j", s.cfg.j_list, "j_list", "scale indices (repeatable, >= 0, at least 4)");
        s.opt("--h", s.cfg.h, "h", "amplitude ratio in (0, 1]");
        s.opt("--xi", s.cfg.xi_grid, "xi_grid", "probe frequencies (default: covering grid)");
        s.opt("--refine", s.cfg.refine, "refine", "covering grid refinement factor");
        s.opt("--tol", s.cfg.tol, "tol", "quadrature tolerance (0 = default)");
        add_shared(s);
    }
    {
        SubState& s = make("carleson-norm", "maximally modulated transform norm estimate");
        s.opt("--parity", s.cfg.parity, "parity", "phase parity: odd or even");
        s.opt("--eps", s.cfg.eps, "eps", "monomial exponent (nonzero)");
        s.opt("--A", s.cfg.a_grid, "a_grid", "modulation coefficients (default: log grid)");
        s.opt("--per-decade", s.cfg.per_decade, "per_decade", "default grid density");
        s.opt("--trials", s.cfg.trials, "trials", "test signals (0 = default)");
        s.opt("--seed", s.cfg.seed, "seed", "random seed");
        add_shared(s);
    }
    {
        SubState& s = make("single-scale", "single-scale operator norm across test signals");
        s.opt("--parity", s.cfg.parity, "parity", "phase parity: odd or even");
        s.opt("--eps", s.cfg.eps, "eps", "monomial exponent (nonzero)");
        s.opt("--j", s.cfg.j, "j", "scale index in [-14, 4]");
        s.opt("--trials", s.cfg.trials, "trials", "test signals (0 = default)");
        s.opt("--seed", s.cfg.seed, "seed", "random seed");
        add_shared(s);
    }
    {
        SubState& s = make("high-low-check", "high+low split telescopes to the full transform");
        s.opt("--parity", s.cfg.parity, "parity", "phase parity: odd or even");
        s.opt("--eps", s.cfg.eps, "eps", "monomial exponent (nonzero)");
        s.opt("--A", s.cfg.amp, "amp", "modulation coefficient (> 0)");
        s.opt("--depth", s.cfg.depth, "depth", "low-part scale depth J (>= 1)");
        s.opt("--half-width", s.cfg.half_width, "half_width", "grid half width");
        s.opt("--dx", s.cfg.dx, "dx", "grid spacing");
        s.opt("--seed", s.cfg.seed, "seed", "random seed");
        add_shared(s);
    }
    {
        SubState& s = make("plancherel-2d", "curve transform norm: direct vs fiberwise");
        s.opt("--eps", s.cfg.eps, "eps", "curve exponent (nonzero)");
        s.opt("--n1", s.cfg.n1, "n1", "grid size along x1");
        s.opt("--n2", s.cfg.n2, "n2", "grid size along x2");
        s.opt("--dx", s.cfg.dx, "dx", "grid spacing (both axes)");
        s.opt("--umax", s.cfg.umax, "umax", "curve field amplitude bound");
        s.opt("--trials", s.cfg.trials, "trials", "random fields (0 = default)");
        s.opt("--seed", s.cfg.seed, "seed", "random seed");
        add_shared(s);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return 2;
    }

    SubState* chosen = nullptr;
    for (auto& st : states)
        if (st->sub->parsed()) chosen = st.get();
    if (!chosen) {
        std::fprintf(stderr, "usage error: no subcommand given\n");
        return 2;
    }

    try {
        if (!chosen->config_path.empty()) {
            std::set<std::string> overridden;
            for (const auto& [o, key] : chosen->tracked)
                if (o->count() > 0) overridden.insert(key);
            const nlohmann::json file =
                nlohmann::json::parse(carleson::read_file(chosen->config_path));
            carleson::apply_config_json(chosen->cfg, file, overridden);
        }
        std::string report;
        const int rc = carleson::execute(chosen->cfg, &report);
        std::fputs(report.c_str(), stdout);
        return rc;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
