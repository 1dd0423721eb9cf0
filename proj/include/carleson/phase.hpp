#pragma once

#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <vector>

namespace carleson {

// Phase functions are finite sums of fractional monomials in an affine
// argument:  phi(t) = sum_i c_i * branch(a_i t + b_i) * |a_i t + b_i|^p_i,
// where branch is |.|^p (even) or sgn(.)|.|^p (odd).  This family is closed
// under reflection t -> -t and, when all b_i = 0, under inversion t -> 1/t,
// which is all the quadrature engine needs.

enum class Branch { even, odd };

namespace detail {

inline double sgn(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

// |x|^p with fast paths for the exponents that dominate the workload.
inline double fpow(double a, double p) {
    if (p == 2.0) return a * a;
    if (p == 1.0) return a;
    if (p == 0.5) return std::sqrt(a);
    if (p == 0.0) return 1.0;
    if (p == 3.0) return a * a * a;
    if (p == -1.0) return 1.0 / a;
    if (p == 1.5) return a * std::sqrt(a);
    if (p == -0.5) return 1.0 / std::sqrt(a);
    if (p == 4.0) { const double s = a * a; return s * s; }
    return std::pow(a, p);
}

inline bool is_even_integer(double p) {
    return p == std::floor(p) && std::fabs(p) < 64.0 && (static_cast<long>(p) % 2 == 0);
}
inline bool is_odd_integer(double p) {
    return p == std::floor(p) && std::fabs(p) < 64.0 && (std::labs(static_cast<long>(p)) % 2 == 1);
}

}

struct PhaseTerm {
    double coeff = 0.0;
    double exponent = 1.0;
    double alpha = 1.0;   // argument u = alpha*t + beta
    double beta = 0.0;
    Branch branch = Branch::even;

    double eval(double t) const {
        const double u = alpha * t + beta;
        const double pw = detail::fpow(std::fabs(u), exponent);
        return branch == Branch::even ? coeff * pw : coeff * detail::sgn(u) * pw;
    }
    double deriv(double t) const {
        const double u = alpha * t + beta;
        const double pw = detail::fpow(std::fabs(u), exponent - 1.0);
        const double d = coeff * exponent * alpha * pw;
        return branch == Branch::even ? d * detail::sgn(u) : d;
    }
    double deriv2(double t) const {
        const double u = alpha * t + beta;
        const double pw = detail::fpow(std::fabs(u), exponent - 2.0);
        const double d = coeff * exponent * (exponent - 1.0) * alpha * alpha * pw;
        return branch == Branch::even ? d : d * detail::sgn(u);
    }

    // True when branch(u)|u|^p is C^2 across u = 0.
    bool smooth_at_zero() const {
        if (branch == Branch::even)
            return detail::is_even_integer(exponent) && (exponent >= 2.0 || exponent == 0.0);
        return detail::is_odd_integer(exponent) && exponent >= 3.0;
    }
    // Linear terms are C^inf too but their kink point is harmless;
    // keep them out of the kink list.
    bool kink_free() const {
        if (smooth_at_zero()) return true;
        if (branch == Branch::odd && exponent == 1.0) return true;
        return false;
    }
};

struct PhaseSpec {
    std::vector<PhaseTerm> terms;

    double eval(double t) const {
        double s = 0.0;
        for (const auto& q : terms) s += q.eval(t);
        return s;
    }
    double deriv(double t) const {
        double s = 0.0;
        for (const auto& q : terms) s += q.deriv(t);
        return s;
    }
    double deriv2(double t) const {
        double s = 0.0;
        for (const auto& q : terms) s += q.deriv2(t);
        return s;
    }

    bool empty() const { return terms.empty(); }

    // phi(t) - phi(-t), computed term-wise so that structural cancellation
    // (even terms with beta = 0) is exact rather than a float subtraction.
    double odd_diff(double t) const {
        double s = 0.0;
        for (const auto& q : terms) {
            if (q.beta == 0.0) {
                if (q.branch == Branch::odd)
                    s += 2.0 * q.coeff * detail::sgn(q.alpha * t) *
                         detail::fpow(std::fabs(q.alpha * t), q.exponent);
            } else {
                s += q.eval(t) - q.eval(-t);
            }
        }
        return s;
    }

    // Merge terms sharing (exponent, branch, alpha, beta) after orienting
    // arguments to alpha > 0 (an exact symmetry of both branches), so that
    // mirrored terms cancel structurally; drop zero coeffs.
    PhaseSpec simplified() const {
        PhaseSpec out;
        for (const auto& q : terms) {
            if (q.coeff == 0.0) continue;
            PhaseTerm c = q;
            if (c.alpha < 0.0) {
                c.alpha = -c.alpha;
                c.beta = -c.beta;
                if (c.branch == Branch::odd) c.coeff = -c.coeff;
            }
            bool merged = false;
            for (auto& r : out.terms) {
                if (r.exponent == c.exponent && r.branch == c.branch &&
                    r.alpha == c.alpha && r.beta == c.beta) {
                    r.coeff += c.coeff;
                    merged = true;
                    break;
                }
            }
            if (!merged) out.terms.push_back(c);
        }
        std::erase_if(out.terms, [](const PhaseTerm& r) { return r.coeff == 0.0; });
        return out;
    }

    PhaseSpec reflected() const {
        PhaseSpec out = *this;
        for (auto& q : out.terms) q.alpha = -q.alpha;
        return out;
    }

    // Substitute t = 1/s; valid on s > 0 and requires centered arguments.
    PhaseSpec inverted_positive() const {
        PhaseSpec out;
        for (const auto& q : terms) {
            if (q.beta != 0.0)
                throw std::invalid_argument("phase inversion requires centered arguments");
            PhaseTerm r;
            r.exponent = -q.exponent;
            r.alpha = 1.0;
            r.beta = 0.0;
            r.branch = Branch::even;
            const double mag = detail::fpow(std::fabs(q.alpha), q.exponent);
            r.coeff = q.coeff * mag;
            if (q.branch == Branch::odd) r.coeff *= detail::sgn(q.alpha);
            out.terms.push_back(r);
        }
        return out;
    }

    // Zeros of affine arguments for terms that are not C^2 there.
    std::vector<double> kink_points() const {
        std::vector<double> ks;
        for (const auto& q : terms) {
            if (q.coeff == 0.0 || q.kink_free() || q.alpha == 0.0) continue;
            ks.push_back(-q.beta / q.alpha);
        }
        return ks;
    }

    double min_exponent() const {
        double m = 1e300;
        for (const auto& q : terms)
            if (q.coeff != 0.0 && q.exponent < m) m = q.exponent;
        return m;
    }
    double max_exponent() const {
        double m = -1e300;
        for (const auto& q : terms)
            if (q.coeff != 0.0 && q.exponent > m) m = q.exponent;
        return m;
    }
    double min_odd_exponent() const {
        double m = 1e300;
        for (const auto& q : terms)
            if (q.coeff != 0.0 && q.branch == Branch::odd && q.exponent < m) m = q.exponent;
        return m;
    }
    bool has_odd_part() const {
        for (const auto& q : terms)
            if (q.coeff != 0.0 && q.branch == Branch::odd) return true;
        return false;
    }

    // Radius beyond which the largest-exponent derivative term dominates the
    // rest, so phi' cannot vanish.  Conservative; used to bound root scans.
    double dominance_radius() const {
        double bound = 1.0;
        double shift = 0.0;
        for (const auto& a : terms) {
            if (a.coeff == 0.0 || a.alpha == 0.0) continue;
            shift = std::max(shift, std::fabs(a.beta / a.alpha));
            for (const auto& b : terms) {
                if (b.coeff == 0.0 || b.alpha == 0.0) continue;
                if (a.exponent <= b.exponent) continue;
                const double ca = std::fabs(a.coeff * a.exponent) *
                                  detail::fpow(std::fabs(a.alpha), a.exponent);
                const double cb = std::fabs(b.coeff * b.exponent) *
                                  detail::fpow(std::fabs(b.alpha), b.exponent);
                if (ca == 0.0 || cb == 0.0) continue;
                const double n = static_cast<double>(terms.size());
                const double cross =
                    std::pow(n * cb / ca, 1.0 / (a.exponent - b.exponent));
                if (std::isfinite(cross)) bound = std::max(bound, cross);
            }
        }
        return 4.0 * bound + 2.0 * shift;
    }
};

}
