#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "carleson/bump.hpp"
#include "carleson/phase.hpp"

namespace carleson {

using complexd = std::complex<double>;

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    bool finite() const { return std::isfinite(lo) && std::isfinite(hi); }
};

// Amplitudes are products of 1/(a t + b) factors and dyadic bump factors
// psi_j(a t + b); an optional scalar carries reflection signs.
struct AmpFactor {
    enum Kind { reciprocal, bump } kind = reciprocal;
    double alpha = 1.0;
    double beta = 0.0;
    const BumpSystem* sys = nullptr;
    int j = 0;
};

struct Amplitude {
    std::vector<AmpFactor> factors;   // empty product = 1
    double scale = 1.0;

    double eval(double t) const {
        double v = scale;
        for (const auto& f : factors) {
            const double u = f.alpha * t + f.beta;
            if (f.kind == AmpFactor::reciprocal) v /= u;
            else v *= eval_psi(*f.sys, f.j, u);
        }
        return v;
    }

    Amplitude reflected() const {
        Amplitude out = *this;
        for (auto& f : out.factors) f.alpha = -f.alpha;
        return out;
    }

    bool has_bump() const {
        for (const auto& f : factors)
            if (f.kind == AmpFactor::bump) return true;
        return false;
    }

    std::vector<double> poles() const {
        std::vector<double> ps;
        for (const auto& f : factors)
            if (f.kind == AmpFactor::reciprocal && f.alpha != 0.0)
                ps.push_back(-f.beta / f.alpha);
        return ps;
    }

    // Intersect [lo,hi] with the support of every bump factor.
    std::vector<Interval> support_components(Interval domain) const {
        std::vector<Interval> comps{domain};
        for (const auto& f : factors) {
            if (f.kind != AmpFactor::bump || f.alpha == 0.0) continue;
            auto [slo, shi] = psi_support(*f.sys, f.j);
            // |alpha t + beta| in [slo, shi]  <=>  t in two affine images
            double u1lo = (-shi - f.beta) / f.alpha, u1hi = (-slo - f.beta) / f.alpha;
            double u2lo = (slo - f.beta) / f.alpha, u2hi = (shi - f.beta) / f.alpha;
            if (u1lo > u1hi) std::swap(u1lo, u1hi);
            if (u2lo > u2hi) std::swap(u2lo, u2hi);
            std::vector<Interval> next;
            for (const auto& c : comps) {
                for (auto [alo, ahi] : {std::pair{u1lo, u1hi}, std::pair{u2lo, u2hi}}) {
                    const double lo = std::max(c.lo, alo), hi = std::min(c.hi, ahi);
                    if (lo < hi) next.push_back({lo, hi});
                }
            }
            comps = std::move(next);
        }
        std::sort(comps.begin(), comps.end(),
                  [](const Interval& x, const Interval& y) { return x.lo < y.lo; });
        return comps;
    }
};

inline Amplitude reciprocal_amplitude(double alpha = 1.0, double beta = 0.0) {
    Amplitude a;
    a.factors.push_back({AmpFactor::reciprocal, alpha, beta, nullptr, 0});
    return a;
}

struct OscIntegrand {
    PhaseSpec phase;
    Amplitude amplitude;
    Interval domain{-std::numeric_limits<double>::infinity(),
                    std::numeric_limits<double>::infinity()};
};

struct QuadOptions {
    double tol = 1e-9;
    std::size_t max_panels = 200000;
};

struct QuadResult {
    complexd value{0.0, 0.0};
    double error = 0.0;
    std::uint64_t evals = 0;
    std::size_t panels = 0;
    bool converged = true;
    const char* what = nullptr;   // failure reason when !converged

    QuadResult& operator+=(const QuadResult& o) {
        value += o.value;
        error += o.error;
        evals += o.evals;
        panels += o.panels;
        converged = converged && o.converged;
        if (!o.converged && !what) what = o.what;
        return *this;
    }
    const QuadResult& require() const {
        if (!converged)
            throw std::runtime_error(std::string("oscillatory quadrature failed: ") +
                                     (what ? what : "unknown"));
        return *this;
    }
};

namespace detail {

// 15-point Kronrod extension of 7-point Gauss.
inline constexpr double gk_x[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};
inline constexpr double gk_wk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};
inline constexpr double gk_wg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct Panel {
    double a = 0.0, b = 0.0;
    complexd val{0.0, 0.0};
    double err = 0.0;
    bool operator<(const Panel& o) const { return err < o.err; }
};

template <class F>
Panel gk15(F&& f, double a, double b, std::uint64_t& evals) {
    const double h = 0.5 * (b - a), c = 0.5 * (a + b);
    complexd k{0.0, 0.0}, g{0.0, 0.0};
    for (int i = 0; i < 8; ++i) {
        const double d = h * gk_x[i];
        complexd v = f(c - d);
        if (i != 7) v += f(c + d);
        k += gk_wk[i] * v;
        if (i % 2 == 1) g += gk_wg[i / 2] * v;
    }
    evals += 15;
    Panel p;
    p.a = a;
    p.b = b;
    p.val = k * h;
    p.err = std::abs((k - g) * h);
    return p;
}

// Adaptive refinement over an initial panel partition.
template <class F>
QuadResult adapt(F&& f, std::vector<double> bounds, const QuadOptions& opt,
                 std::size_t& panel_budget) {
    QuadResult res;
    std::sort(bounds.begin(), bounds.end());
    bounds.erase(std::unique(bounds.begin(), bounds.end()), bounds.end());
    if (bounds.size() < 2) return res;

    std::vector<Panel> heap;
    heap.reserve(bounds.size() + 64);
    for (std::size_t i = 0; i + 1 < bounds.size(); ++i) {
        if (panel_budget == 0) { res.converged = false; res.what = "panel budget exceeded"; break; }
        --panel_budget;
        heap.push_back(gk15(f, bounds[i], bounds[i + 1], res.evals));
    }
    std::make_heap(heap.begin(), heap.end());

    auto totals = [&heap]() {
        complexd v{0.0, 0.0};
        double e = 0.0;
        for (const auto& p : heap) { v += p.val; e += p.err; }
        return std::pair{v, e};
    };

    auto [val, err] = totals();
    const double width_floor = 1e-15;
    while (err > opt.tol && panel_budget >= 2) {
        std::pop_heap(heap.begin(), heap.end());
        Panel worst = heap.back();
        heap.pop_back();
        const double rel = std::max({std::fabs(worst.a), std::fabs(worst.b), 1.0});
        if (worst.b - worst.a < width_floor * rel || worst.err <= 0.0) {
            heap.push_back(worst);   // cannot improve further
            std::push_heap(heap.begin(), heap.end());
            break;
        }
        const double m = 0.5 * (worst.a + worst.b);
        panel_budget -= 2;
        Panel l = gk15(f, worst.a, m, res.evals);
        Panel r = gk15(f, m, worst.b, res.evals);
        val += l.val + r.val - worst.val;
        err += l.err + r.err - worst.err;
        heap.push_back(l);
        std::push_heap(heap.begin(), heap.end());
        heap.push_back(r);
        std::push_heap(heap.begin(), heap.end());
        if ((heap.size() & 1023u) == 0) std::tie(val, err) = totals();
    }
    std::tie(val, err) = totals();
    res.value = val;
    res.error = err;
    res.panels = heap.size();
    if (err > opt.tol && panel_budget < 2) { res.converged = false; res.what = "panel budget exceeded"; }
    return res;
}

inline double phase_or_zero(const PhaseSpec& ph, double t) {
    return ph.empty() ? 0.0 : ph.eval(t);
}

// Solve phi(t) = target on [lo, hi] where phi is monotone; Newton with a
// bisection safeguard.
inline double solve_phase_level(const PhaseSpec& ph, double lo, double hi, double target) {
    double flo = ph.eval(lo) - target;
    double fhi = ph.eval(hi) - target;
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0.0) == (fhi > 0.0)) return (flo > 0.0) == (flo > fhi) ? hi : lo;
    double t = lo + (hi - lo) * (-flo) / (fhi - flo);
    for (int it = 0; it < 80; ++it) {
        const double ft = ph.eval(t) - target;
        if (ft == 0.0) break;
        if ((ft > 0.0) == (fhi > 0.0)) { hi = t; fhi = ft; }
        else { lo = t; flo = ft; }
        const double dp = ph.deriv(t);
        double next = (dp != 0.0) ? t - ft / dp : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::fabs(next - t) <= 1e-14 * std::max(1.0, std::fabs(t))) { t = next; break; }
        t = next;
    }
    return t;
}

inline double solve_deriv_zero(const PhaseSpec& ph, double lo, double hi) {
    double flo = ph.deriv(lo), fhi = ph.deriv(hi);
    for (int it = 0; it < 200; ++it) {
        const double m = 0.5 * (lo + hi);
        const double fm = ph.deriv(m);
        if (fm == 0.0) return m;
        if ((fm > 0.0) == (flo > 0.0)) { lo = m; flo = fm; }
        else { hi = m; fhi = fm; }
        if (hi - lo <= 1e-14 * std::max(1.0, std::fabs(m))) break;
    }
    return 0.5 * (lo + hi);
}

}

// Zeros of phi' and the non-smooth points of phi inside an interval.
struct CriticalPoints {
    std::vector<double> stationary;
    std::vector<double> kinks;
};

inline CriticalPoints critical_points(const PhaseSpec& phase_in, Interval iv) {
    CriticalPoints out;
    const PhaseSpec ph = phase_in.simplified();
    if (ph.empty()) return out;

    for (double k : ph.kink_points())
        if (k > iv.lo && k < iv.hi) out.kinks.push_back(k);
    std::sort(out.kinks.begin(), out.kinks.end());
    out.kinks.erase(std::unique(out.kinks.begin(), out.kinks.end()), out.kinks.end());

    const double B = ph.dominance_radius();
    const double lo = std::max(iv.lo, -B), hi = std::min(iv.hi, B);
    if (!(lo < hi)) return out;

    // Piece boundaries: kinks plus 0 (power phases are one-signed pieces).
    std::vector<double> cuts{lo, hi};
    for (double k : out.kinks)
        if (k > lo && k < hi) cuts.push_back(k);
    if (0.0 > lo && 0.0 < hi) cuts.push_back(0.0);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    bool centered2 = ph.terms.size() <= 2;
    for (const auto& q : ph.terms)
        if (q.beta != 0.0) centered2 = false;

    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double a = cuts[i], b = cuts[i + 1];
        if (centered2) {
            // c1|t|^q1 + c2|t|^q2 sign pattern: at most one root per side.
            if (ph.terms.size() < 2) continue;
            const double mid = 0.5 * (a + b);
            const double s = detail::sgn(mid);
            if (s == 0.0) continue;
            double c[2], q[2];
            for (int k = 0; k < 2; ++k) {
                const auto& tm = ph.terms[k];
                double d = tm.coeff * tm.exponent * tm.alpha *
                           detail::fpow(std::fabs(tm.alpha), tm.exponent - 1.0);
                // derivative of term at |t| = r on this side:
                // even: d * sgn(u) * r^(p-1), odd: d * r^(p-1); u = alpha*t
                if (tm.branch == Branch::even) d *= detail::sgn(tm.alpha * s);
                c[k] = d;
                q[k] = tm.exponent - 1.0;
            }
            if (q[0] == q[1] || c[0] == 0.0 || c[1] == 0.0) continue;
            if ((c[0] > 0.0) == (c[1] > 0.0)) continue;
            const double r = std::pow(-c[1] / c[0], 1.0 / (q[0] - q[1]));
            const double t = s * r;
            if (std::isfinite(t) && t > a && t < b)
                out.stationary.push_back(detail::solve_deriv_zero(
                    ph, std::max(a, t * 0.5 - 1.0), std::min(b, t * 1.5 + 1.0)));
        } else {
            // geometric scan away from zero, ratio 1.01
            const double eps = 1e-12 * std::max(1.0, B);
            std::vector<double> grid;
            auto ladder = [&](double from, double to) {
                // from, to > 0, scan [from, to] multiplicatively
                for (double r = from; r < to; r *= 1.01) grid.push_back(r);
            };
            if (a >= 0.0) {
                grid.push_back(a == 0.0 ? eps : a);
                ladder(std::max(a, eps), b);
            } else if (b <= 0.0) {
                ladder(std::max(-b, eps), -a);
                for (auto& g : grid) g = -g;
                std::reverse(grid.begin(), grid.end());
            } else {
                ladder(eps, -a);
                for (auto& g : grid) g = -g;
                std::reverse(grid.begin(), grid.end());
                const std::size_t n0 = grid.size();
                ladder(eps, b);
                std::inplace_merge(grid.begin(), grid.begin() + n0, grid.end());
            }
            grid.push_back(b);
            double prev = grid.empty() ? a : grid.front();
            double fprev = ph.deriv(prev);
            for (std::size_t g = 1; g < grid.size(); ++g) {
                const double cur = grid[g];
                const double fcur = ph.deriv(cur);
                if (fprev == 0.0 && prev > a)
                    out.stationary.push_back(prev);
                else if (fprev * fcur < 0.0)
                    out.stationary.push_back(detail::solve_deriv_zero(ph, prev, cur));
                prev = cur;
                fprev = fcur;
            }
        }
    }
    std::sort(out.stationary.begin(), out.stationary.end());
    out.stationary.erase(std::unique(out.stationary.begin(), out.stationary.end(),
                                     [](double x, double y) {
                                         return std::fabs(x - y) <=
                                                1e-10 * std::max(1.0, std::fabs(x));
                                     }),
                         out.stationary.end());
    return out;
}

inline std::vector<double> stationary_points(const PhaseSpec& phase, Interval iv) {
    return critical_points(phase, iv).stationary;
}

namespace detail {

// Seed boundaries around a stationary point t0: |phi - phi(t0)| = 1 and
// |phi'| = 1 solved outward by safeguarded bisection.
inline void anchor_seeds(const PhaseSpec& ph, double t0, double lo, double hi,
                         std::vector<double>& seeds) {
    const double p0 = ph.eval(t0);
    for (int dir = 0; dir < 2; ++dir) {
        const double end = dir == 0 ? lo : hi;
        if (std::fabs(end - t0) < 1e-13) continue;
        if (std::fabs(ph.eval(end) - p0) > 1.0) {
            double a = t0, b = end;
            for (int it = 0; it < 60; ++it) {
                const double m = 0.5 * (a + b);
                if (std::fabs(ph.eval(m) - p0) > 1.0) b = m; else a = m;
            }
            seeds.push_back(0.5 * (a + b));
        }
        if (std::fabs(ph.deriv(end)) > 1.0) {
            double a = t0, b = end;
            for (int it = 0; it < 60; ++it) {
                const double m = 0.5 * (a + b);
                if (std::fabs(ph.deriv(m)) > 1.0) b = m; else a = m;
            }
            seeds.push_back(0.5 * (a + b));
        }
    }
}

// Equipartition [a,b] by increments of |phi| (phi monotone there), capped.
inline void equipartition(const PhaseSpec& ph, double a, double b, double dphi,
                          std::size_t cap, std::vector<double>& bounds) {
    if (ph.empty()) return;
    const double pa = ph.eval(a), pb = ph.eval(b);
    const double range = std::fabs(pb - pa);
    if (range <= dphi) return;
    std::size_t n = static_cast<std::size_t>(range / dphi);
    n = std::min(n, cap);
    const double step = (pb - pa) / static_cast<double>(n + 1);
    double cur = a;
    for (std::size_t k = 1; k <= n; ++k) {
        cur = solve_phase_level(ph, cur, b, pa + step * static_cast<double>(k));
        bounds.push_back(cur);
    }
}

// Cohen-Rodriguez Villegas-Zagier acceleration of sum_k (-1)^k a_k.
inline complexd cvz(const std::vector<complexd>& a) {
    const int n = static_cast<int>(a.size());
    double d = std::pow(3.0 + std::sqrt(8.0), n);
    d = 0.5 * (d + 1.0 / d);
    double b = -1.0, c = -d;
    complexd s{0.0, 0.0};
    for (int k = 0; k < n; ++k) {
        c = b - c;
        s += c * a[static_cast<std::size_t>(k)];
        b *= static_cast<double>((k + n)) * static_cast<double>((k - n)) /
             ((k + 0.5) * (k + 1.0));
    }
    return s / d;
}

// Chunked tail int_T^inf e^{i phi} amp dt for |phi| -> inf with phi' of
// constant sign beyond T.  Chunks of phase length pi are summed as an
// accelerated alternating series.
inline QuadResult chunk_tail(const PhaseSpec& ph, const Amplitude& amp, double T,
                             const QuadOptions& opt, double tol_budget) {
    QuadResult res;
    (void)opt;
    const bool rising = ph.eval(2.0 * T + 1.0) > ph.eval(T);
    std::vector<complexd> terms;
    double chunk_err = 0.0;

    double t_cur = T;
    double p_cur = ph.eval(T);
    const double pi = 3.14159265358979323846;
    auto f = [&](double t) { return std::polar(1.0, ph.eval(t)) * amp.eval(t); };

    auto add_chunks = [&](int upto) {
        while (static_cast<int>(terms.size()) < upto) {
            const double target = p_cur + (rising ? pi : -pi);
            double hi = t_cur;
            double width = std::max(1.0, std::fabs(t_cur)) * 0.5;
            for (int it = 0; it < 900; ++it) {
                hi = t_cur + width;
                if (rising ? ph.eval(hi) >= target : ph.eval(hi) <= target) break;
                width *= 2.0;
            }
            const double t_next = solve_phase_level(ph, t_cur, hi, target);
            QuadOptions copt;
            copt.tol = std::max(tol_budget / 640.0, 1e-16);
            copt.max_panels = 256;
            std::size_t cbudget = 256;
            QuadResult chunk =
                adapt(f, std::vector<double>{t_cur, t_next}, copt, cbudget);
            res.evals += chunk.evals;
            chunk_err += chunk.error;
            const bool odd = terms.size() & 1u;
            terms.push_back(odd ? -chunk.value : chunk.value);
            t_cur = t_next;
            p_cur = target;
            res.panels += chunk.panels;
        }
    };

    int n = 40;
    complexd best{0.0, 0.0};
    double settle = std::numeric_limits<double>::infinity();
    for (int round = 0; round < 3; ++round) {
        add_chunks(n);
        best = cvz(terms);
        std::vector<complexd> fewer(terms.begin(), terms.end() - 8);
        settle = std::abs(best - cvz(fewer));
        if (settle + chunk_err <= tol_budget) break;
        n *= 2;
    }
    res.value = best;
    res.error = settle + chunk_err;
    if (res.error > tol_budget) {
        res.converged = false;
        res.what = "oscillatory tail did not settle";
    }
    return res;
}

// Gauss rules for the complex descent paths: weight e^{-x} on [0, inf)
// (Laguerre) and e^{-x^2} on the line (Hermite).  Nodes are the roots of the
// orthonormal polynomials, found by scan plus bisection; weights are the
// reciprocal Christoffel sums.
struct GaussRule {
    std::vector<double> x, w;
};

inline GaussRule make_gauss_rule(int n, bool hermite) {
    auto ortho = [&](double x, double* ksum) {
        double pm1 = 0.0;
        double pk = hermite ? 0.75112554446494248286 : 1.0;  // pi^{-1/4} or 1
        double s = 0.0;
        for (int k = 0; k < n; ++k) {
            s += pk * pk;
            double pk1;
            if (hermite)
                pk1 = x * std::sqrt(2.0 / (k + 1.0)) * pk -
                      std::sqrt(k / (k + 1.0)) * pm1;
            else
                pk1 = ((2.0 * k + 1.0 - x) * pk - k * pm1) / (k + 1.0);
            pm1 = pk;
            pk = pk1;
        }
        if (ksum) *ksum = s;
        return pk;
    };

    const double lo = hermite ? 1e-9 : 1e-9;
    const double hi = hermite ? std::sqrt(2.0 * n + 1.0) + 1.0 : 4.0 * n + 12.0;
    const int steps = hermite ? 60 * n : 120 * n;
    const double dx = (hi - lo) / steps;

    GaussRule rule;
    auto add_root = [&](double a, double b) {
        double fa = ortho(a, nullptr);
        for (int it = 0; it < 80; ++it) {
            const double m = 0.5 * (a + b);
            const double fm = ortho(m, nullptr);
            if ((fa < 0.0) == (fm < 0.0)) {
                a = m;
                fa = fm;
            } else {
                b = m;
            }
        }
        const double r = 0.5 * (a + b);
        double ksum = 0.0;
        ortho(r, &ksum);
        rule.x.push_back(r);
        rule.w.push_back(1.0 / ksum);
        if (hermite) {
            rule.x.push_back(-r);
            rule.w.push_back(1.0 / ksum);
        }
    };

    double prev = lo;
    double fprev = ortho(prev, nullptr);
    for (int i = 1; i <= steps; ++i) {
        const double cur = lo + dx * i;
        const double fcur = ortho(cur, nullptr);
        if ((fprev < 0.0) != (fcur < 0.0)) add_root(prev, cur);
        prev = cur;
        fprev = fcur;
    }
    if (static_cast<int>(rule.x.size()) != n)
        throw std::logic_error("gauss rule generation failed");

    std::vector<std::size_t> order(rule.x.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return rule.x[a] < rule.x[b]; });
    GaussRule sorted;
    for (std::size_t i : order) {
        sorted.x.push_back(rule.x[i]);
        sorted.w.push_back(rule.w[i]);
    }
    return sorted;
}

inline const GaussRule& gauss_rule(int n, bool hermite) {
    static const GaussRule gl24 = make_gauss_rule(24, false);
    static const GaussRule gl48 = make_gauss_rule(48, false);
    static const GaussRule gl96 = make_gauss_rule(96, false);
    static const GaussRule gh24 = make_gauss_rule(24, true);
    static const GaussRule gh48 = make_gauss_rule(48, true);
    static const GaussRule gh96 = make_gauss_rule(96, true);
    if (hermite) return n <= 24 ? gh24 : (n <= 48 ? gh48 : gh96);
    return n <= 24 ? gl24 : (n <= 48 ? gl48 : gl96);
}

// Analytic continuation of a kink-free phase off a real region, each term's
// branch sign frozen at a reference point of that region.
struct PhaseCont {
    struct CTerm {
        double c, p, a, b, s;
    };
    std::vector<CTerm> terms;

    complexd eval(complexd z) const {
        complexd v{0.0, 0.0};
        for (const auto& t : terms)
            v += t.c * std::pow(t.s * (t.a * z + t.b), t.p);
        return v;
    }
    complexd deriv(complexd z) const {
        complexd v{0.0, 0.0};
        for (const auto& t : terms)
            v += t.c * t.p * (t.s * t.a) * std::pow(t.s * (t.a * z + t.b), t.p - 1.0);
        return v;
    }
    complexd deriv2(complexd z) const {
        complexd v{0.0, 0.0};
        for (const auto& t : terms)
            v += t.c * t.p * (t.p - 1.0) * (t.s * t.a) * (t.s * t.a) *
                 std::pow(t.s * (t.a * z + t.b), t.p - 2.0);
        return v;
    }
};

inline PhaseCont continue_phase(const PhaseSpec& ph, double t_ref) {
    PhaseCont pc;
    for (const auto& q : ph.terms) {
        const double s = (q.alpha * t_ref + q.beta) >= 0.0 ? 1.0 : -1.0;
        const double sb = q.branch == Branch::odd ? s : 1.0;
        pc.terms.push_back({q.coeff * sb, q.exponent, q.alpha, q.beta, s});
    }
    return pc;
}

inline complexd amp_on_path(const Amplitude& amp, complexd z) {
    complexd v{amp.scale, 0.0};
    for (const auto& f : amp.factors) {
        if (f.kind != AmpFactor::reciprocal)
            throw std::logic_error("descent path needs a meromorphic amplitude");
        v /= f.alpha * z + f.beta;
    }
    return v;
}

inline complexd log1pc(complexd z) {
    if (std::abs(z) > 0.25) return std::log(complexd{1.0, 0.0} + z);
    complexd term = z, acc = z;
    for (int k = 2; k <= 60; ++k) {
        term *= -z;
        acc += term / static_cast<double>(k);
        if (std::abs(term) < 1e-18 * (std::abs(acc) + 1e-300)) break;
    }
    return acc;
}

inline complexd expm1c(complexd z) {
    if (std::abs(z) > 0.25) return std::exp(z) - 1.0;
    complexd term{1.0, 0.0}, acc{0.0, 0.0};
    for (int k = 1; k <= 40; ++k) {
        term *= z / static_cast<double>(k);
        acc += term;
        if (std::abs(term) < 1e-18 * (std::abs(acc) + 1e-300)) break;
    }
    return acc;
}

// (1+z)^p - 1 - p z without cancellation for small z.
inline complexd pow1p_rem(double p, complexd z) {
    if (std::abs(z) > 0.25) return expm1c(p * log1pc(z)) - p * z;
    double b = 0.5 * p * (p - 1.0);
    complexd zk = z * z;
    complexd acc = b * zk;
    for (int k = 2; k <= 80; ++k) {
        b *= (p - k) / (k + 1.0);
        zk *= z;
        const complexd term = b * zk;
        acc += term;
        if (std::abs(term) < 1e-18 * (std::abs(acc) + 1e-300)) break;
    }
    return acc;
}

// Phase increments measured from a real anchor t0, arranged so the leading
// cancellations near a saddle happen analytically rather than in floating
// point: delta(w) = phi'(t0) w + sum_j c_j B_j^p [(1+z_j)^p - 1 - p z_j]
// with z_j proportional to w.
struct LocalPhase {
    struct LTerm {
        double cBp;  // c * B^p, B the (positive) folded base at the anchor
        double p;
        double r;  // (s alpha) / B, so z = r w
    };
    std::vector<LTerm> terms;
    double d1 = 0.0;
    double t0 = 0.0;

    complexd delta(complexd w) const {
        complexd v = d1 * w;
        for (const auto& t : terms) v += t.cBp * pow1p_rem(t.p, t.r * w);
        return v;
    }
    complexd deriv(complexd w) const {
        complexd v{d1, 0.0};
        for (const auto& t : terms)
            v += t.cBp * t.p * t.r * expm1c((t.p - 1.0) * log1pc(t.r * w));
        return v;
    }
};

inline LocalPhase localize(const PhaseCont& pc, double t0) {
    LocalPhase lp;
    lp.t0 = t0;
    for (const auto& t : pc.terms) {
        const double B = t.s * (t.a * t0 + t.b);
        const double cBp = t.c * std::pow(B, t.p);
        lp.terms.push_back({cBp, t.p, t.s * t.a / B});
        lp.d1 += t.c * t.p * (t.s * t.a) * std::pow(B, t.p - 1.0);
    }
    return lp;
}

inline bool local_newton(const LocalPhase& lp, complexd target, complexd& w) {
    for (int it = 0; it < 80; ++it) {
        const complexd r = lp.delta(w) - target;
        if (std::abs(r) <= 1e-12 * (1.0 + std::abs(target))) return true;
        const complexd d = lp.deriv(w);
        const double dn = std::abs(d);
        if (!(dn > 0.0) || !std::isfinite(dn)) return false;
        complexd step = r / d;
        const double cap = 0.25 * (std::fabs(lp.t0) + std::abs(w) + 1.0);
        if (std::abs(step) > cap) step *= cap / std::abs(step);
        w -= step;
    }
    return std::abs(lp.delta(w) - target) <= 1e-9 * (1.0 + std::abs(target));
}

inline bool local_continue(const LocalPhase& lp, complexd from, complexd to,
                           complexd& w, int depth = 0) {
    complexd trial = w;
    if (local_newton(lp, to, trial)) {
        w = trial;
        return true;
    }
    if (depth >= 14) return false;
    const complexd mid = 0.5 * (from + to);
    return local_continue(lp, from, mid, w, depth + 1) &&
           local_continue(lp, mid, to, w, depth + 1);
}

// Descent path from a real anchor T: phi(h(p)) = phi(T) + i p, p in [0, inf).
inline std::optional<complexd> endpoint_path(const PhaseCont& pc, const Amplitude& amp,
                                             double T, const GaussRule& g,
                                             std::uint64_t& evals) {
    const complexd i1{0.0, 1.0};
    const LocalPhase lp = localize(pc, T);
    complexd w{0.0, 0.0};
    complexd prev{0.0, 0.0};
    complexd acc{0.0, 0.0};
    for (std::size_t i = 0; i < g.x.size(); ++i) {
        const complexd target = i1 * g.x[i];
        if (!local_continue(lp, prev, target, w)) return std::nullopt;
        prev = target;
        acc += g.w[i] * amp_on_path(amp, T + w) * (i1 / lp.deriv(w));
        evals += 1;
    }
    return std::exp(i1 * pc.eval(complexd{T, 0.0})) * acc;
}

// Through-saddle path phi(h(q)) = phi(s) + i q^2, oriented so q > 0 exits
// toward larger real t.
inline std::optional<complexd> saddle_path(const PhaseCont& pc, const Amplitude& amp,
                                           double s, const GaussRule& g,
                                           std::uint64_t& evals) {
    const complexd i1{0.0, 1.0};
    const LocalPhase lp = localize(pc, s);
    const complexd d2 = pc.deriv2(complexd{s, 0.0});
    if (!(std::abs(d2) > 0.0) || !std::isfinite(std::abs(d2))) return std::nullopt;
    complexd dir = std::sqrt(2.0 * i1 / d2);
    if (dir.real() < 0.0) dir = -dir;

    complexd acc{0.0, 0.0};
    for (int side = 0; side < 2; ++side) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < g.x.size(); ++i)
            if (side == 0 ? g.x[i] > 0.0 : g.x[i] < 0.0) idx.push_back(i);
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            return std::fabs(g.x[a]) < std::fabs(g.x[b]);
        });
        complexd w = g.x[idx.front()] * dir;
        complexd prev{0.0, 0.0};
        for (std::size_t i : idx) {
            const double q = g.x[i];
            const complexd target = i1 * (q * q);
            if (!local_continue(lp, prev, target, w)) return std::nullopt;
            prev = target;
            acc += g.w[i] * amp_on_path(amp, s + w) * (2.0 * i1 * q / lp.deriv(w));
            evals += 1;
        }
    }
    return std::exp(i1 * pc.eval(complexd{s, 0.0})) * acc;
}

// One-sided tail int_T^inf e^{i phi} amp dt with |phi| -> inf.  Without
// interior saddles the pi-chunk series applies directly.  Saddles of modest
// phase swing bound monotone pieces integrated directly, with the chunk
// series beyond the last one; a single distant saddle with an astronomical
// swing is crossed on complex descent paths instead (the real segment is
// homotopic to the anchor path plus the through-saddle path, and the far
// endpoint path vanishes).
inline QuadResult tail_oscillatory(const PhaseSpec& ph, const Amplitude& amp, double T,
                                   const QuadOptions& opt, double tol_budget) {
    const double inf = std::numeric_limits<double>::infinity();
    const double pi = 3.14159265358979323846;

    std::vector<double> saddles;
    for (double s : critical_points(ph, {T, inf}).stationary)
        if (s > T * (1.0 + 1e-12) + 1e-300) saddles.push_back(s);

    if (saddles.empty()) return chunk_tail(ph, amp, T, opt, tol_budget);

    double span = 0.0;
    double prev = T;
    for (double s : saddles) {
        span += std::fabs(ph.eval(s) - ph.eval(prev));
        prev = s;
    }

    if (span <= 600.0 * pi) {
        QuadResult res;
        auto f = [&](double t) { return std::polar(1.0, ph.eval(t)) * amp.eval(t); };
        const double share = 0.5 * tol_budget / static_cast<double>(saddles.size());
        double a = T;
        std::size_t budget = opt.max_panels;
        for (double s : saddles) {
            std::vector<double> bounds{a, s};
            detail::equipartition(ph, a, s, 6.0, opt.max_panels, bounds);
            std::sort(bounds.begin(), bounds.end());
            QuadOptions local = opt;
            local.tol = share;
            res += adapt(f, std::move(bounds), local, budget);
            a = s;
        }
        res += chunk_tail(ph, amp, a, opt, 0.5 * tol_budget);
        return res;
    }

    QuadResult res;
    if (saddles.size() > 1) {
        res.converged = false;
        res.what = "tail has several distant saddles";
        return res;
    }

    const double s = saddles.front();

    // The Laguerre path needs the amplitude poles to be phase-distant from
    // the anchor; step the anchor toward the saddle until they are, and
    // integrate the short piece left behind directly.
    double Td = T;
    {
        auto pole_dist = [&](double td) {
            double d = inf;
            const double pt = ph.eval(td);
            for (double pp : amp.poles()) {
                const double pv = ph.eval(pp);
                if (std::isfinite(pv)) d = std::min(d, std::fabs(pt - pv));
            }
            return d;
        };
        const double dir_sign = ph.eval(s) > ph.eval(T) ? 1.0 : -1.0;
        int steps = 0;
        while (pole_dist(Td) < 150.0 && steps < 8 &&
               std::fabs(ph.eval(Td) - ph.eval(s)) > 1200.0 * pi) {
            Td = solve_phase_level(ph, Td, s, ph.eval(Td) + dir_sign * 80.0);
            ++steps;
        }
    }
    if (Td > T) {
        auto f = [&](double t) { return std::polar(1.0, ph.eval(t)) * amp.eval(t); };
        std::vector<double> bounds{T, Td};
        equipartition(ph, T, Td, 6.0, opt.max_panels, bounds);
        std::sort(bounds.begin(), bounds.end());
        QuadOptions local = opt;
        local.tol = 0.25 * tol_budget;
        std::size_t budget = opt.max_panels;
        res += adapt(f, std::move(bounds), local, budget);
    }

    const PhaseCont pc = continue_phase(ph, Td + 0.25 * (s - Td));

    auto e48 = endpoint_path(pc, amp, Td, gauss_rule(48, false), res.evals);
    auto e24 = endpoint_path(pc, amp, Td, gauss_rule(24, false), res.evals);
    if (!e48 || !e24) {
        res.converged = false;
        res.what = "descent path tracking failed";
        return res;
    }
    complexd ev = *e48;
    double eerr = std::abs(*e48 - *e24);
    if (eerr > 0.25 * tol_budget) {
        auto e96 = endpoint_path(pc, amp, Td, gauss_rule(96, false), res.evals);
        if (e96) {
            eerr = std::abs(*e96 - *e48);
            ev = *e96;
        }
    }

    complexd sv{0.0, 0.0};
    double serr = 0.0;
    const double dd = std::fabs(ph.deriv2(s));
    const double sbound =
        dd > 0.0 ? 4.0 * std::sqrt(2.0 * pi / dd) * std::abs(amp.eval(s)) : inf;
    if (sbound < 0.02 * tol_budget) {
        serr = sbound;  // skip a negligible crossing, keep its bound as error
    } else {
        auto s48 = saddle_path(pc, amp, s, gauss_rule(48, true), res.evals);
        auto s24 = saddle_path(pc, amp, s, gauss_rule(24, true), res.evals);
        if (!s48 || !s24) {
            res.converged = false;
            res.what = "saddle path tracking failed";
            return res;
        }
        sv = *s48;
        serr = std::abs(*s48 - *s24);
        if (serr > 0.25 * tol_budget) {
            auto s96 = saddle_path(pc, amp, s, gauss_rule(96, true), res.evals);
            if (s96) {
                serr = std::abs(*s96 - *s48);
                sv = *s96;
            }
        }
        // huge phases carry an irreducible evaluation error in e^{i phi(s)}
        serr += std::abs(sv) * std::fabs(ph.eval(s)) * 5e-15;
    }

    res.value += ev + sv;
    res.error += eerr + serr;
    if (res.error > tol_budget) {
        res.converged = false;
        res.what = "descent tail error above budget";
    }
    return res;
}

}

// General oscillatory integral of e^{i phi(t)} * amp(t) over an interval.
// Finite pieces use stationary/kink/anchor seeding plus phase-equipartition
// and adaptive Gauss-Kronrod; infinite ends require |phi| -> infinity and
// are summed as accelerated pi-chunk series.
inline QuadResult integrate_oscillatory(const OscIntegrand& ig, QuadOptions opt = {}) {
    QuadResult total;
    const PhaseSpec ph = ig.phase.simplified();
    std::size_t budget = opt.max_panels;

    auto comps = ig.amplitude.support_components(ig.domain);
    if (comps.empty()) return total;

    for (double p : ig.amplitude.poles())
        for (const auto& c : comps)
            if (p > c.lo && p < c.hi)
                throw std::invalid_argument(
                    "amplitude pole inside domain; use the principal value form");

    const double inf = std::numeric_limits<double>::infinity();
    for (auto& c : comps) {
        // Negative-axis tail: reflect to the positive axis.
        if (c.lo == -inf) {
            OscIntegrand r;
            r.phase = ph.reflected();
            r.amplitude = ig.amplitude.reflected();
            r.domain = {std::isfinite(c.hi) ? -c.hi : -inf, inf};
            if (std::isfinite(c.hi)) {
                QuadResult part = integrate_oscillatory(r, opt);
                total += part;
                continue;
            } else {
                // split at 0 first
                OscIntegrand l = ig;
                l.domain = {-inf, 0.0};
                OscIntegrand g = ig;
                g.domain = {0.0, inf};
                total += integrate_oscillatory(l, opt);
                total += integrate_oscillatory(g, opt);
                return total;
            }
        }

        double a = c.lo;
        double b = c.hi;
        double tail_T = inf;
        const double tol_here = opt.tol / static_cast<double>(comps.size());

        if (b == inf) {
            if (ph.empty() || ph.max_exponent() <= 0.0) {
                total.converged = false;
                total.what = "divergent tail";
                continue;
            }
            // Only kinks must stay inside the seeded finite part; saddles
            // beyond it belong to the tail machinery.
            CriticalPoints cp_all = critical_points(ph, {a, inf});
            double last_kink = a;
            if (!cp_all.kinks.empty()) last_kink = std::max(last_kink, cp_all.kinks.back());
            tail_T = std::max(1.5 * last_kink + 1.0, a + 1.0);
            b = tail_T;
        }

        // finite part [a, b]
        std::vector<double> seeds{a, b};
        CriticalPoints cp = critical_points(ph, {a, b});
        for (double k : cp.kinks) seeds.push_back(k);
        for (double s : cp.stationary) seeds.push_back(s);
        for (double s : cp.stationary) detail::anchor_seeds(ph, s, a, b, seeds);
        std::sort(seeds.begin(), seeds.end());
        seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());

        std::vector<double> bounds = seeds;
        const std::size_t cap = opt.max_panels;
        for (std::size_t i = 0; i + 1 < seeds.size(); ++i)
            detail::equipartition(ph, seeds[i], seeds[i + 1], 6.0, cap, bounds);

        auto f = [&](double t) {
            return std::polar(1.0, detail::phase_or_zero(ph, t)) * ig.amplitude.eval(t);
        };
        QuadOptions local = opt;
        local.tol = 0.5 * tol_here;
        total += detail::adapt(f, std::move(bounds), local, budget);

        if (std::isfinite(tail_T))
            total += detail::tail_oscillatory(ph, ig.amplitude, tail_T, opt,
                                              0.5 * tol_here);
    }
    return total;
}

// PV integral of e^{i phi(t)} / t over a symmetric window or the whole line.
// The 1/t singularity is cancelled by folding t <-> -t wherever the odd part
// of the phase vanishes at the fold end; wildly oscillating ends (negative
// exponents at 0, bounded phases at infinity) are handled by inversion or by
// the folded absolutely-convergent tail.
inline QuadResult principal_value_symmetric(const OscIntegrand& ig, QuadOptions opt = {}) {
    const double inf = std::numeric_limits<double>::infinity();
    const bool whole_line = !ig.domain.finite();
    if (!whole_line && std::fabs(ig.domain.lo + ig.domain.hi) >
                           1e-12 * std::max(1.0, std::fabs(ig.domain.hi)))
        throw std::invalid_argument("principal value window must be symmetric");
    if (ig.amplitude.factors.size() != 1 ||
        ig.amplitude.factors[0].kind != AmpFactor::reciprocal ||
        ig.amplitude.factors[0].alpha != 1.0 || ig.amplitude.factors[0].beta != 0.0)
        throw std::invalid_argument("principal value form requires amplitude 1/t");

    const PhaseSpec ph = ig.phase.simplified();
    const double sgn_amp = ig.amplitude.scale;
    QuadResult total;

    // Pure-even phase: the integrand is odd and the PV vanishes identically.
    if (!ph.has_odd_part()) return total;

    const double L = whole_line ? inf : ig.domain.hi;
    const double split = std::min(1.0, L);
    const double p_min = ph.min_exponent();
    const double p_omin = ph.min_odd_exponent();

    auto fold_value = [&](double t) {
        // e^{i phi(t)}/t + e^{i phi(-t)}/(-t), written through the odd part
        // so even-phase cancellation is exact.
        const double d = ph.odd_diff(t);
        const double pm = ph.eval(-t);
        const complexd emin1{-2.0 * std::sin(0.5 * d) * std::sin(0.5 * d), std::sin(d)};
        return std::polar(1.0, pm) * emin1 * (sgn_amp / t);
    };

    std::size_t budget = opt.max_panels;

    // --- (0, split] ---
    if (p_min >= 0.0) {
        if (p_omin <= 0.0) {
            total.converged = false;
            total.what = "divergent at the origin";
            return total;
        }
        // fold; the paired integrand behaves like t^(p_omin - 1) at 0.
        double r_cut = split;
        {
            // closed-form bound on the dropped mass near 0
            const double target = 0.1 * opt.tol;
            auto near_zero_mass = [&](double r) {
                double bound = 0.0;
                for (const auto& q : ph.terms)
                    if (q.branch == Branch::odd && q.coeff != 0.0)
                        bound += 2.0 * std::fabs(q.coeff) *
                                 detail::fpow(std::fabs(q.alpha) * r, q.exponent) /
                                 q.exponent;
                return bound;
            };
            for (int it = 0; it < 1200 && near_zero_mass(r_cut) > target && r_cut > 1e-280; ++it)
                r_cut *= 0.5;
            total.error += near_zero_mass(r_cut);
        }
        std::vector<double> bounds;
        for (double r = r_cut; r < split; r *= 2.0) bounds.push_back(r);
        bounds.push_back(split);
        // oscillation seeds from both branch phases
        const PhaseSpec phr = ph.reflected();
        std::vector<double> seeds = bounds;
        for (const PhaseSpec* pp : {&ph, &phr}) {
            CriticalPoints cp = critical_points(*pp, {r_cut, split});
            for (double s : cp.stationary) seeds.push_back(s);
            std::sort(seeds.begin(), seeds.end());
            seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());
            std::vector<double> extra;
            for (std::size_t i = 0; i + 1 < seeds.size(); ++i)
                detail::equipartition(*pp, seeds[i], seeds[i + 1], 3.0, opt.max_panels, extra);
            seeds.insert(seeds.end(), extra.begin(), extra.end());
            std::sort(seeds.begin(), seeds.end());
            seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());
        }
        QuadOptions local = opt;
        local.tol = 0.3 * opt.tol;
        total += detail::adapt(fold_value, std::move(seeds), local, budget);
    } else {
        // Oscillatory blow-up at 0: integrate each side via t = 1/s.
        for (int side = 0; side < 2; ++side) {
            const PhaseSpec base = side == 0 ? ph : ph.reflected();
            OscIntegrand m;
            m.phase = base.inverted_positive();
            m.amplitude = reciprocal_amplitude();
            m.amplitude.scale = (side == 0 ? 1.0 : -1.0) * sgn_amp;
            m.domain = {1.0 / split, inf};
            QuadOptions local = opt;
            local.tol = 0.15 * opt.tol;
            total += integrate_oscillatory(m, local);
        }
    }

    // --- [split, L) ---
    if (split < L) {
        const double p_max = ph.max_exponent();
        const bool one_sided_ok = std::isfinite(L) || p_max > 0.0;
        if (one_sided_ok) {
            for (int side = 0; side < 2; ++side) {
                OscIntegrand m;
                m.phase = side == 0 ? ph : ph.reflected();
                m.amplitude = reciprocal_amplitude();
                m.amplitude.scale = (side == 0 ? 1.0 : -1.0) * sgn_amp;
                m.domain = {split, L};
                QuadOptions local = opt;
                local.tol = 0.15 * opt.tol;
                total += integrate_oscillatory(m, local);
            }
        } else {
            // phases bounded at infinity: only the folded tail converges
            const double max_odd = [&] {
                double m = -1e300;
                for (const auto& q : ph.terms)
                    if (q.coeff != 0.0 && q.branch == Branch::odd)
                        m = std::max(m, q.exponent);
                return m;
            }();
            if (max_odd >= 0.0) {
                total.converged = false;
                total.what = "divergent tail";
                return total;
            }
            // |fold| <= sum 2|c| |alpha t|^p / t, integrable; dyadic panels
            // with a closed-form remainder.
            auto remainder = [&](double T) {
                double bnd = 0.0;
                for (const auto& q : ph.terms)
                    if (q.branch == Branch::odd && q.coeff != 0.0)
                        bnd += 2.0 * std::fabs(q.coeff) *
                               detail::fpow(std::fabs(q.alpha) * T, q.exponent) /
                               (-q.exponent);
                return bnd;
            };
            double T = split;
            QuadOptions local = opt;
            local.tol = 0.05 * opt.tol;
            std::vector<double> bounds{T};
            while (remainder(T) > 0.1 * opt.tol && T < 1e290) {
                T *= 2.0;
                bounds.push_back(T);
            }
            total.error += remainder(T);
            total += detail::adapt(fold_value, std::move(bounds), local, budget);
        }
    }
    return total;
}

}
