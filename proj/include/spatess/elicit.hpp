#pragma once
// Elicitation helpers: dichotomous-outcome rho, sd-ratio and credible-interval
// conversions, and density-averaged effective sample size.
#include "spatess/approx.hpp"

namespace spatess {

// Inverse standard-normal CDF (rational approximation + one Halley step).
double normal_quantile(double p);

// rho = (pCond - pMarginal) / (pMarginal (1 - pMarginal)); pCond taken at the
// nugget. rho > 1 is rejected unless allow_gt1 (it is outside the correlation
// scale); rho < 0 is always rejected.
double rho_dichotomous(double p_marginal, double p_cond, bool allow_gt1 = false);

// rho = 1 - ratio^2 for ratio = sd(close pair) / sd(population), ratio in [0, 1].
double rho_from_sd_ratio(double ratio);

// sd = (hi - lo) / (2 z_{(1+b)/2}) for a central normal interval of mass b.
double sd_from_interval(double lo, double hi, double b);

enum class DensityKind { PointMass, Uniform, Triangular };

struct ElicitedDensity {
    DensityKind kind = DensityKind::PointMass;
    double lo = 0.0;
    double hi = 0.0;
    double mode = 0.0;

    static ElicitedDensity point(double value);
    static ElicitedDensity uniform(double lo, double hi);
    static ElicitedDensity triangular(double lo, double mode, double hi);

    double support_lo() const { return lo; }
    double support_hi() const { return hi; }
    // Checks shape invariants and that the support lies in [dom_lo, dom_hi].
    void validate(const char* what, double dom_lo, double dom_hi) const;
};

struct AveragingDesign {
    double R = 1.0;  // cluster radius entering the ratio q
    int J = 1;
    int n = 1;  // sampled per cluster
};

// Integral of ess_approx(J, n, rho, s_tilde(q(r))) against h_r x h_rho by
// Gauss-Legendre quadrature (`nodes` points per axis; triangular densities
// split at the mode). Deterministic compensated summation.
double averaged_ess(const AveragingDesign& design, const ElicitedDensity& h_r,
                    const ElicitedDensity& h_rho, const ApproxSpec& spec, int nodes = 64);

} // namespace spatess
