#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "carleson/bump.hpp"
#include "carleson/fit.hpp"
#include "carleson/oscquad.hpp"

namespace carleson {

// Single-scale self-correlation kernel family
//
//   K_j(xi) = int e^{i c_j (|eta|^p - |xi - h eta|^p)}
//             (psi0(eta)/eta) (psi0(xi - h eta)/(xi - h eta)) d eta,
//
// with c_j = 2^{-j p} on the dyadic scales j <= 0 and c_j = 2^j on the
// refined-base scales j >= 0.  h in (0,1] is the ratio of the two modulation
// amplitudes after normalizing the larger one away.  theta2 sets the bad-set
// threshold 2^{theta2 j}; theta1 = theta2/4 sets the central band 2^{theta1 j}
// inside which no kernel decay is expected.
struct KernelParams {
    double epsilon = 2.0;   // monomial exponent, != 1
    int j = -4;             // scale index, <= 0
    double h = 0.5;         // amplitude ratio in (0, 1]
    double base = 2.0;      // bump dilation base
    double theta1 = 0.125;
    double theta2 = 0.5;
};

inline void validate(const KernelParams& p) {
    if (!(p.epsilon > 0.0) || p.epsilon == 1.0)
        throw std::invalid_argument("kernel exponent must be positive and != 1");
    if (p.j > 0) throw std::invalid_argument("kernel scale index must be <= 0");
    if (!(p.h > 0.0) || p.h > 1.0) throw std::invalid_argument("kernel h must lie in (0, 1]");
    if (!(p.base > 1.0)) throw std::invalid_argument("kernel bump base must exceed 1");
    if (!(p.theta2 > 0.0) || !(p.theta2 < p.epsilon))
        throw std::invalid_argument("theta2 must lie in (0, epsilon)");
    if (!(p.theta1 > 0.0)) throw std::invalid_argument("theta1 must be positive");
}

inline KernelParams make_kernel_params(double epsilon, int j, double h, double base = 2.0) {
    KernelParams p;
    p.epsilon = epsilon;
    p.j = j;
    p.h = h;
    p.base = base;
    p.theta2 = 0.5 * std::min(epsilon, 1.0);
    p.theta1 = 0.25 * p.theta2;
    validate(p);
    return p;
}

namespace detail {

// Shared quadrature body for both scale conventions.  The bump system must
// outlive the call; the amplitude's two poles (eta = 0 and eta = xi/h) sit
// outside the bump supports, so no principal value is needed.
inline QuadResult kernel_quad(double coeff, double expo, double h, double xi,
                              const BumpSystem& sys, double tol) {
    OscIntegrand ig;
    ig.phase.terms.push_back({coeff, expo, 1.0, 0.0, Branch::even});
    ig.phase.terms.push_back({-coeff, expo, -h, xi, Branch::even});
    ig.amplitude.factors = {{AmpFactor::bump, 1.0, 0.0, &sys, 0},
                            {AmpFactor::reciprocal, 1.0, 0.0, nullptr, 0},
                            {AmpFactor::bump, -h, xi, &sys, 0},
                            {AmpFactor::reciprocal, -h, xi, nullptr, 0}};
    QuadOptions opt;
    opt.tol = tol;
    opt.max_panels = 600000;
    return integrate_oscillatory(ig, opt);
}

}

inline QuadResult tt_kernel_result(const KernelParams& p, double xi_tilde, double tol = 1e-8) {
    validate(p);
    const BumpSystem sys = make_bump_system(p.base);
    const double c = std::exp2(-static_cast<double>(p.j) * p.epsilon);
    return detail::kernel_quad(c, p.epsilon, p.h, xi_tilde, sys, tol);
}

inline complexd tt_kernel(const KernelParams& p, double xi_tilde, double tol = 1e-8) {
    return tt_kernel_result(p, xi_tilde, tol).require().value;
}

struct KernelRow {
    double xi = 0.0;
    complexd value{0.0, 0.0};
};

struct KernelProfile {
    std::vector<KernelRow> rows;
    double band = 0.0;        // central band half-width 2^{theta1 j}
    double inside_sup = 0.0;  // sup |K| over |xi| <= band
    double outside_sup = 0.0; // sup |K| over band < |xi| <= grid span
    double max_error = 0.0;
    KernelRow inside_peak;    // rows attaining the two suprema
    KernelRow outside_peak;
};

// Uniform grid over [-span, span] fine enough for a band of the given
// half-width; refine > 1 tightens the spacing for stability checks.
inline std::vector<double> profile_grid(double band, double refine = 1.0, double span = 3.0) {
    if (!(band > 0.0) || !(refine > 0.0)) throw std::invalid_argument("bad profile grid request");
    const double spacing = 0.125 * std::min(band, 1.0) / refine;
    const int n = static_cast<int>(std::ceil(2.0 * span / spacing));
    std::vector<double> g(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i)
        g[static_cast<std::size_t>(i)] = -span + 2.0 * span * i / n;
    return g;
}

inline KernelProfile kernel_profile(const KernelParams& p, const std::vector<double>& xi_grid,
                                    double tol = 1e-8) {
    validate(p);
    if (xi_grid.empty()) throw std::invalid_argument("kernel profile needs a nonempty xi grid");
    const double band = std::exp2(p.theta1 * p.j);
    std::vector<double> g = xi_grid;
    std::sort(g.begin(), g.end());
    if (g.front() > -3.0 + 1e-12 || g.back() < 3.0 - 1e-12)
        throw std::invalid_argument("xi grid must cover [-3, 3]");
    const double limit = 0.125 * band * (1.0 + 1e-9);
    for (std::size_t i = 0; i + 1 < g.size(); ++i)
        if (g[i + 1] - g[i] > limit)
            throw std::invalid_argument("xi grid spacing exceeds an eighth of the central band");

    KernelProfile prof;
    prof.band = band;
    const BumpSystem sys = make_bump_system(p.base);
    const double c = std::exp2(-static_cast<double>(p.j) * p.epsilon);
    for (double xi : g) {
        const QuadResult r = detail::kernel_quad(c, p.epsilon, p.h, xi, sys, tol).require();
        prof.rows.push_back({xi, r.value});
        prof.max_error = std::max(prof.max_error, r.error);
        const double a = std::abs(r.value);
        if (std::fabs(xi) <= band) {
            if (a > prof.inside_sup) {
                prof.inside_sup = a;
                prof.inside_peak = prof.rows.back();
            }
        } else if (a > prof.outside_sup) {
            prof.outside_sup = a;
            prof.outside_peak = prof.rows.back();
        }
    }
    return prof;
}

struct KernelDecay {
    std::vector<int> js;
    std::vector<double> sups;  // outside-band sup per scale
    std::vector<KernelRow> peaks;  // probe point attaining each sup
    DecayFit fit;              // log2(sup) vs j; slope > 0 means decay as j -> -inf
};

// Fit the outside-band suprema across scales.  An empty xi grid requests a
// covering per-scale grid from profile_grid; an explicit grid is reused for
// every scale as a sparse probe set, and points falling inside a scale's
// band are excluded from that scale's supremum.
inline KernelDecay decay_fit(const KernelParams& tmpl, const std::vector<int>& j_range,
                             const std::vector<double>& xi_grid = {}, double tol = 1e-8,
                             double grid_refine = 1.0) {
    if (j_range.size() < 4) throw std::invalid_argument("decay fit needs at least 4 scales");
    for (int j : j_range)
        if (j < -8 || j > -2)
            throw std::invalid_argument("decay fit scales must lie in [-8, -2]");
    KernelDecay out;
    std::vector<double> xs, ys;
    const BumpSystem sys = make_bump_system(tmpl.base);
    for (int j : j_range) {
        KernelParams p = tmpl;
        p.j = j;
        validate(p);
        const double band = std::exp2(p.theta1 * p.j);
        double sup = 0.0;
        KernelRow peak;
        if (xi_grid.empty()) {
            const KernelProfile prof = kernel_profile(p, profile_grid(band, grid_refine), tol);
            sup = prof.outside_sup;
            peak = prof.outside_peak;
        } else {
            const double c = std::exp2(-static_cast<double>(p.j) * p.epsilon);
            for (double xi : xi_grid) {
                if (std::fabs(xi) <= band) continue;
                const QuadResult r = detail::kernel_quad(c, p.epsilon, p.h, xi, sys, tol).require();
                if (std::abs(r.value) >= sup) {
                    sup = std::abs(r.value);
                    peak = {xi, r.value};
                }
            }
        }
        out.js.push_back(j);
        out.sups.push_back(sup);
        out.peaks.push_back(peak);
        xs.push_back(j);
        ys.push_back(sup);
    }
    out.fit = fit_log2(xs, ys);
    return out;
}

// Lebesgue measure of the stationary-trouble set
//   E = {eta in (1/2, 5/2): h eta - xi in (1/2, 5/2),
//        |eta^{p-1} - h (h eta - xi)^{p-1}| <= threshold},
// estimated on a midpoint lattice (deterministic; boundary error O(1/samples)
// since E is a finite union of intervals).  The threshold defaults to
// 2^{theta2 j}.
inline double bad_set_measure(const KernelParams& p, double xi_tilde, long samples = 200000,
                              double threshold = std::numeric_limits<double>::quiet_NaN()) {
    validate(p);
    if (samples < 100000)
        throw std::invalid_argument("bad set measure needs at least 1e5 samples");
    const double thr = std::isnan(threshold) ? std::exp2(p.theta2 * p.j) : threshold;
    const double q = p.epsilon - 1.0;
    const double w = 2.0 / static_cast<double>(samples);
    long hits = 0;
    for (long i = 0; i < samples; ++i) {
        const double eta = 0.5 + (static_cast<double>(i) + 0.5) * w;
        const double u = p.h * eta - xi_tilde;
        if (u <= 0.5 || u >= 2.5) continue;
        if (std::fabs(detail::fpow(eta, q) - p.h * detail::fpow(u, q)) <= thr) ++hits;
    }
    return static_cast<double>(hits) * w;
}

struct BadSetDecay {
    std::vector<int> js;
    std::vector<double> measures; // max over (h, xi) per scale
    std::vector<double> arg_h;    // (h, xi) attaining each max
    std::vector<double> arg_xi;
    DecayFit fit;
    double required = 0.0; // theta2/2 - 0.05
    bool passed = false;
};

// Fit the worst-case bad-set measure across scales; xi grid points inside the
// central band 2^{theta1 j} are skipped scale by scale.
inline BadSetDecay badset_exponent_check(const KernelParams& tmpl, const std::vector<int>& j_range,
                                         const std::vector<double>& h_grid,
                                         const std::vector<double>& xi_grid,
                                         long samples = 200000) {
    if (j_range.size() < 4) throw std::invalid_argument("bad set fit needs at least 4 scales");
    if (h_grid.empty() || xi_grid.empty())
        throw std::invalid_argument("bad set fit needs nonempty h and xi grids");
    BadSetDecay out;
    std::vector<double> xs;
    for (int j : j_range) {
        const double band = std::exp2(tmpl.theta1 * j);
        double m = 0.0;
        double ah = h_grid.front(), axi = 0.0;
        for (double h : h_grid) {
            KernelParams p = tmpl;
            p.j = j;
            p.h = h;
            for (double xi : xi_grid) {
                if (std::fabs(xi) < band) continue;
                const double v = bad_set_measure(p, xi, samples);
                if (v >= m) {
                    m = v;
                    ah = h;
                    axi = xi;
                }
            }
        }
        out.js.push_back(j);
        out.measures.push_back(m);
        out.arg_h.push_back(ah);
        out.arg_xi.push_back(axi);
        xs.push_back(j);
    }
    out.fit = fit_log2(xs, out.measures);
    out.required = 0.5 * tmpl.theta2 - 0.05;
    out.passed = !out.fit.degenerate && out.fit.slope >= out.required;
    return out;
}

// For p > 1 a nonempty bad set forces h < 1 - 2^{theta2 j / 2}.  Below that
// threshold the constraint is inactive; at or above it the set must be empty,
// which we assert at the given h and along the way up to h = 1.
inline bool h_threshold_check(const KernelParams& p, double xi_tilde, long samples = 200000) {
    validate(p);
    if (!(p.epsilon > 1.0))
        throw std::invalid_argument("h threshold check applies to exponents > 1 only");
    if (std::fabs(xi_tilde) < std::exp2(p.theta1 * p.j))
        throw std::invalid_argument("h threshold check needs |xi| at or beyond the central band");
    const double hmin = 1.0 - std::exp2(0.5 * p.theta2 * p.j);
    if (p.h < hmin) return true;
    for (double f : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        KernelParams q = p;
        q.h = p.h + f * (1.0 - p.h);
        if (bad_set_measure(q, xi_tilde, samples) > 0.0) return false;
    }
    return true;
}

inline QuadResult uniform_kernel_result(int n, int j, double h, double xi, double tol = 1e-7) {
    if (n < 4) throw std::invalid_argument("uniform kernel needs n >= 4");
    if (j < 0) throw std::invalid_argument("uniform kernel scales must be >= 0");
    if (!(h > 0.0) || h > 1.0)
        throw std::invalid_argument("uniform kernel h must lie in (0, 1]");
    const BumpSystem sys = make_bump_system(std::exp2(1.0 / static_cast<double>(n)));
    return detail::kernel_quad(std::exp2(j), static_cast<double>(n), h, xi, sys, tol);
}

struct UniformKernelResult {
    int n = 0;
    double h = 0.0;
    std::vector<int> js;
    std::vector<double> inside_sups;  // sup |K| over |xi| <= n 2^{-j/4}
    std::vector<double> outside_sups; // sup |K| over the rest of [-3, 3]
    std::vector<KernelRow> inside_peaks;
    std::vector<KernelRow> outside_peaks;
    DecayFit outside_fit;             // log2(outside sup) vs j, vacuous rows dropped
    double outside_exponent = 0.0;    // -slope; expected near 1/4
    double inside_sup = 0.0;          // band sup at the largest scale index
    double inside_constant = 0.0;     // n * inside_sup, the n-normalized prefactor
};

// Refined-base variant: base 2^{1/n}, phase 2^j (|eta|^n - |xi - h eta|^n),
// scales j >= 0.  Outside the band n 2^{-j/4} the kernel should decay like
// 2^{-j/4}; inside it should stay below a constant multiple of 1/n.  The
// inside sup is read off at the largest j so the 2^{-j/4} contribution sits
// below the 1/n floor (the j-range must reach j > 4 log2 n).
inline UniformKernelResult uniform_kernel_check(int n, const std::vector<int>& j_range,
                                                double h = 0.95, double tol = 1e-7,
                                                const std::vector<double>& xi_grid = {},
                                                double grid_refine = 1.0) {
    if (n < 4) throw std::invalid_argument("uniform kernel check needs n >= 4");
    if (j_range.size() < 4)
        throw std::invalid_argument("uniform kernel check needs at least 4 scales");
    for (int j : j_range)
        if (j < 0) throw std::invalid_argument("uniform kernel scales must be >= 0");
    if (!(h > 0.0) || h > 1.0)
        throw std::invalid_argument("uniform kernel h must lie in (0, 1]");

    std::vector<int> js = j_range;
    std::sort(js.begin(), js.end());

    UniformKernelResult out;
    out.n = n;
    out.h = h;
    std::vector<double> xs, ys;
    for (int j : js) {
        const double band = static_cast<double>(n) * std::exp2(-0.25 * j);
        const std::vector<double> grid =
            xi_grid.empty() ? profile_grid(band, grid_refine) : xi_grid;
        double ins = 0.0, outs = 0.0;
        KernelRow inpk, outpk;
        for (double xi : grid) {
            const complexd v = uniform_kernel_result(n, j, h, xi, tol).require().value;
            const double a = std::abs(v);
            if (std::fabs(xi) <= band) {
                if (a >= ins) {
                    ins = a;
                    inpk = {xi, v};
                }
            } else if (a >= outs) {
                outs = a;
                outpk = {xi, v};
            }
        }
        out.js.push_back(j);
        out.inside_sups.push_back(ins);
        out.outside_sups.push_back(outs);
        out.inside_peaks.push_back(inpk);
        out.outside_peaks.push_back(outpk);
        // Small scale indices can put the whole kernel support inside the
        // band; such rows carry no outside information and stay out of the fit.
        if (outs > 1e-12) {
            xs.push_back(j);
            ys.push_back(outs);
        }
    }
    out.outside_fit = fit_log2(xs, ys);
    if (!out.outside_fit.degenerate) out.outside_exponent = -out.outside_fit.slope;
    out.inside_sup = out.inside_sups.back();
    out.inside_constant = static_cast<double>(n) * out.inside_sup;
    return out;
}

}
