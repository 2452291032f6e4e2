// Elicitation conversions and density-averaged ESS.
#include "spatess/elicit.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "spatess/errors.hpp"
#include "spatess/ess.hpp"

namespace spatess {

namespace {

// Rational approximation for the inverse normal CDF (relative error < 1.15e-9)
// refined with one Halley step on Phi(x) - p via erfc.
double inv_norm_raw(double p) {
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double p_low = 0.02425;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p <= 1.0 - p_low) {
        const double q = p - 0.5;
        const double r = q * q;
        return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
               (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    }
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
}

constexpr double kSqrt2Pi = 2.5066282746310002;

// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration on P_n.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0;
            double p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[n - 1 - i] = w[i];
    }
}

struct WeightedNode {
    double x = 0.0;
    double w = 0.0;  // quadrature weight times density value
};

// Evaluation nodes with weights absorbing the density; sum of weights ~= 1.
std::vector<WeightedNode> density_nodes(const ElicitedDensity& h, int nodes) {
    std::vector<WeightedNode> out;
    if (h.kind == DensityKind::PointMass) {
        out.push_back({h.lo, 1.0});
        return out;
    }
    std::vector<double> gx, gw;
    gauss_legendre(nodes, gx, gw);
    auto add_piece = [&](double a, double b, auto pdf) {
        if (!(b > a)) return;
        const double half = 0.5 * (b - a);
        const double mid = 0.5 * (a + b);
        for (int i = 0; i < nodes; ++i) {
            const double t = mid + half * gx[i];
            out.push_back({t, gw[i] * half * pdf(t)});
        }
    };
    if (h.kind == DensityKind::Uniform) {
        const double inv = 1.0 / (h.hi - h.lo);
        add_piece(h.lo, h.hi, [inv](double) { return inv; });
    } else {
        const double span = h.hi - h.lo;
        add_piece(h.lo, h.mode, [&](double t) { return 2.0 * (t - h.lo) / (span * (h.mode - h.lo)); });
        add_piece(h.mode, h.hi, [&](double t) { return 2.0 * (h.hi - t) / (span * (h.hi - h.mode)); });
    }
    return out;
}

} // namespace

double normal_quantile(double p) {
    if (!(p > 0.0) || !(p < 1.0)) throw ConfigError("normal_quantile: p must be in (0, 1)");
    double x = inv_norm_raw(p);
    const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
    const double u = e * kSqrt2Pi * std::exp(0.5 * x * x);
    x -= u / (1.0 + 0.5 * x * u);
    return x;
}

double rho_dichotomous(double p_marginal, double p_cond, bool allow_gt1) {
    if (!(p_marginal > 0.0) || !(p_marginal < 1.0))
        throw ConfigError("rho_dichotomous: marginal probability must be in (0, 1)");
    if (p_cond < 0.0 || p_cond > 1.0)
        throw ConfigError("rho_dichotomous: conditional probability must be in [0, 1]");
    const double rho = (p_cond - p_marginal) / (p_marginal * (1.0 - p_marginal));
    if (rho < 0.0)
        throw ConfigError("rho_dichotomous: conditional below marginal implies negative "
                          "association; rho < 0 is not supported");
    if (rho > 1.0 && !allow_gt1)
        throw ConfigError("rho_dichotomous: rho = " + std::to_string(rho) +
                          " exceeds 1 (not usable as a correlation scale); "
                          "pass the override to report it anyway");
    return rho;
}

double rho_from_sd_ratio(double ratio) {
    if (!(ratio >= 0.0) || ratio > 1.0)
        throw ConfigError("rho_from_sd_ratio: ratio must be in [0, 1]");
    return 1.0 - ratio * ratio;
}

double sd_from_interval(double lo, double hi, double b) {
    if (!(hi > lo)) throw ConfigError("sd_from_interval: interval must have hi > lo");
    if (!(b > 0.0) || !(b < 1.0)) throw ConfigError("sd_from_interval: b must be in (0, 1)");
    return (hi - lo) / (2.0 * normal_quantile(0.5 * (1.0 + b)));
}

ElicitedDensity ElicitedDensity::point(double value) {
    ElicitedDensity d;
    d.kind = DensityKind::PointMass;
    d.lo = d.hi = d.mode = value;
    return d;
}

ElicitedDensity ElicitedDensity::uniform(double lo, double hi) {
    ElicitedDensity d;
    d.kind = DensityKind::Uniform;
    d.lo = lo;
    d.hi = hi;
    d.mode = 0.5 * (lo + hi);
    return d;
}

ElicitedDensity ElicitedDensity::triangular(double lo, double mode, double hi) {
    ElicitedDensity d;
    d.kind = DensityKind::Triangular;
    d.lo = lo;
    d.hi = hi;
    d.mode = mode;
    return d;
}

void ElicitedDensity::validate(const char* what, double dom_lo, double dom_hi) const {
    const std::string name(what);
    if (!std::isfinite(lo) || !std::isfinite(hi) || !std::isfinite(mode))
        throw ConfigError(name + ": density parameters must be finite");
    if (kind != DensityKind::PointMass) {
        if (!(hi > lo)) throw ConfigError(name + ": density needs hi > lo");
        if (kind == DensityKind::Triangular && (mode < lo || mode > hi))
            throw ConfigError(name + ": triangular mode must lie in [lo, hi]");
    }
    if (lo < dom_lo || hi > dom_hi)
        throw ConfigError(name + ": density support outside the parameter domain");
}

double averaged_ess(const AveragingDesign& design, const ElicitedDensity& h_r,
                    const ElicitedDensity& h_rho, const ApproxSpec& spec, int nodes) {
    if (design.J < 1 || design.n < 1 || !(design.R > 0.0))
        throw ConfigError("averaged_ess: need J >= 1, n >= 1, R > 0");
    if (nodes < 2 || nodes > 4096) throw ConfigError("averaged_ess: nodes must be in [2, 4096]");
    constexpr double inf = std::numeric_limits<double>::infinity();
    h_r.validate("averaged_ess r density", std::numeric_limits<double>::min(), inf);
    h_rho.validate("averaged_ess rho density", 0.0, 1.0);

    const auto rn = density_nodes(h_r, nodes);
    const auto pn = density_nodes(h_rho, nodes);

    double sum = 0.0;
    double comp = 0.0;  // Kahan compensation
    for (const auto& nr : rn) {
        const double q = ratio_q(spec.sampling, nr.x, design.R, design.n);
        const double st = s_tilde(spec, q);
        for (const auto& np : pn) {
            const double val = ess_approx(design.J, design.n, np.x, st) * nr.w * np.w;
            const double y = val - comp;
            const double t = sum + y;
            comp = (t - sum) - y;
            sum = t;
        }
    }
    return sum;
}

} // namespace spatess
