#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "carleson/oscquad.hpp"

namespace carleson {

// One evaluation request for m(lambda) = PV int e^{i A branch(t)|t|^eps}
// e^{-i lambda t} dt/t.
struct MultiplierQuery {
    Branch parity = Branch::odd;
    double epsilon = 1.0;
    double lambda = 0.0;
    double coefficient = 1.0;
    double tol = 1e-9;
};

struct MultiplierValue {
    complexd value{0.0, 0.0};
    double error = 0.0;
    bool converged = false;
    std::string what;
};

inline MultiplierValue multiplier_result(const MultiplierQuery& q) {
    if (!(q.coefficient > 0.0))
        throw std::invalid_argument("multiplier: coefficient must be positive");
    if (!(q.tol >= 1e-12))
        throw std::invalid_argument("multiplier: tol must be >= 1e-12");

    PhaseSpec phase;
    phase.terms.push_back({q.coefficient, q.epsilon, 1.0, 0.0, q.parity});
    if (q.lambda != 0.0)
        phase.terms.push_back({-q.lambda, 1.0, 1.0, 0.0, Branch::odd});

    OscIntegrand ig;
    ig.phase = phase;
    ig.amplitude = reciprocal_amplitude();

    QuadOptions opt;
    opt.tol = q.tol;
    auto r = principal_value_symmetric(ig, opt);

    MultiplierValue out;
    out.value = r.value;
    out.error = r.error;
    out.converged = r.converged;
    if (r.what) out.what = r.what;
    return out;
}

inline complexd multiplier(const MultiplierQuery& q) {
    auto r = multiplier_result(q);
    if (!r.converged)
        throw std::runtime_error("multiplier did not converge: " + r.what);
    return r.value;
}

// The rescaling t -> A^{-1/eps} t fixes dt/t and maps coefficient A to 1,
// lambda to A^{-1/eps} lambda.  Returns both sides for the caller to compare.
inline std::pair<complexd, complexd> scaling_check(Branch parity, double eps,
                                                   double A, double lambda,
                                                   double tol = 1e-9) {
    if (eps == 0.0)
        throw std::invalid_argument("scaling_check: epsilon must be nonzero");
    MultiplierQuery lhs{parity, eps, lambda, A, tol};
    MultiplierQuery rhs{parity, eps, std::pow(A, -1.0 / eps) * lambda, 1.0, tol};
    return {multiplier(lhs), multiplier(rhs)};
}

struct SweepRow {
    double epsilon = 0.0;
    double lambda = 0.0;
    double re = 0.0;
    double im = 0.0;
    double err = 0.0;
};

struct SweepResult {
    Branch parity = Branch::odd;
    double tol = 1e-9;
    std::vector<SweepRow> rows;
    double sup_abs = 0.0;
    double argmax_epsilon = 0.0;
    double argmax_lambda = 0.0;
    bool all_converged = true;
};

// Signed log-spaced grid: +/- geometric points from lo to hi, ascending.
inline std::vector<double> signed_log_grid(double lo, double hi,
                                           int per_decade = 64) {
    if (!(lo > 0.0) || !(hi > lo) || per_decade < 1)
        throw std::invalid_argument("signed_log_grid: need 0 < lo < hi");
    const double decades = std::log10(hi / lo);
    const int n = static_cast<int>(std::ceil(per_decade * decades)) + 1;
    std::vector<double> pos(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        pos[static_cast<std::size_t>(i)] =
            lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
    std::vector<double> grid;
    grid.reserve(2 * pos.size());
    for (auto it = pos.rbegin(); it != pos.rend(); ++it) grid.push_back(-*it);
    for (double v : pos) grid.push_back(v);
    return grid;
}

// Grid sweep at coefficient 1.  The unbounded parameters (even eps = 1,
// odd eps = 0) are rejected: they belong to the blow-up probe only.
inline SweepResult sweep(Branch parity, const std::vector<double>& eps_grid,
                         const std::vector<double>& lambda_grid,
                         double tol = 1e-9) {
    for (double e : eps_grid) {
        if (parity == Branch::even && e == 1.0)
            throw std::invalid_argument("sweep: even eps=1 is unbounded; use the blow-up probe");
        if (parity == Branch::odd && e == 0.0)
            throw std::invalid_argument("sweep: odd eps=0 is divergent");
    }
    SweepResult res;
    res.parity = parity;
    res.tol = tol;
    for (double e : eps_grid) {
        for (double l : lambda_grid) {
            MultiplierQuery q{parity, e, l, 1.0, tol};
            auto r = multiplier_result(q);
            res.all_converged = res.all_converged && r.converged;
            res.rows.push_back({e, l, r.value.real(), r.value.imag(), r.error});
            const double a = std::abs(r.value);
            if (a > res.sup_abs) {
                res.sup_abs = a;
                res.argmax_epsilon = e;
                res.argmax_lambda = l;
            }
        }
    }
    return res;
}

struct BlowupRow {
    int k = 0;
    double lambda = 0.0;
    double re = 0.0;
    double im = 0.0;
    double err = 0.0;
};

// Even-parity eps=1 probe along lambda = 1 - 2^{-k}: the real part follows
// ln(2^{k+1} - 1), growing without bound.
inline std::vector<BlowupRow> blowup_probe_even_at_one(int k_max,
                                                       double tol = 1e-8) {
    if (k_max < 4)
        throw std::invalid_argument("blowup_probe_even_at_one: k_max must be >= 4");
    std::vector<BlowupRow> rows;
    for (int k = 4; k <= k_max; ++k) {
        const double lambda = 1.0 - std::ldexp(1.0, -k);
        MultiplierQuery q{Branch::even, 1.0, lambda, 1.0, tol};
        auto r = multiplier_result(q);
        rows.push_back({k, lambda, r.value.real(), r.value.imag(), r.error});
    }
    return rows;
}

}
