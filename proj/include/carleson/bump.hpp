#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>

namespace carleson {

// Littlewood-Paley bump family built from a smooth monotone step.
//
// eta is even, identically 1 on |y| <= 1, identically 0 on |y| >= base,
// and C^infinity in between (exp(-1/x) glue).  The single-scale bump is
// psi(y) = eta(y) - eta(base*y), so the dilates psi_j(y) = psi(base^j y)
// telescope to a partition of unity on y != 0.
struct BumpSystem {
    double base = 2.0;          // dilation step b > 1
    double sharpness = 1.0;     // steepness of the transition glue

    // C^inf step: 0 at x<=0, 1 at x>=1, strictly increasing between.
    double step(double x) const {
        if (x <= 0.0) return 0.0;
        if (x >= 1.0) return 1.0;
        const double a = std::exp(-sharpness / x);
        const double b = std::exp(-sharpness / (1.0 - x));
        return a / (a + b);
    }

    // eta(y): 1 on |y|<=1, 0 on |y|>=base, smooth monotone in between.
    double eta(double y) const {
        const double a = std::fabs(y);
        if (a <= 1.0) return 1.0;
        if (a >= base) return 0.0;
        return 1.0 - step((a - 1.0) / (base - 1.0));
    }

    double psi(double y) const { return eta(y) - eta(base * y); }
};

inline BumpSystem make_bump_system(double base, double sharpness = 1.0) {
    if (!(base > 1.0)) throw std::invalid_argument("bump base must exceed 1");
    if (!(sharpness > 0.0)) throw std::invalid_argument("bump sharpness must be positive");
    return BumpSystem{base, sharpness};
}

// psi_j(y) = psi(base^j * y)
inline double eval_psi(const BumpSystem& sys, int j, double y) {
    return sys.psi(std::pow(sys.base, j) * y);
}

// phi0(y) = sum_{j>=1} psi_j(y) = eta(base*y), defined for y != 0 only:
// at y = 0 every psi_j vanishes and the series cannot sum to 1.
inline double eval_phi0(const BumpSystem& sys, double y) {
    if (y == 0.0) throw std::domain_error("phi0 is undefined at y = 0");
    return sys.eta(sys.base * y);
}

// closure of {y > 0 : psi_j(y) != 0} = [base^(-j-1), base^(-j+1)]
inline std::pair<double, double> psi_support(const BumpSystem& sys, int j) {
    const double s = std::pow(sys.base, -j);
    return {s / sys.base, s * sys.base};
}

}
