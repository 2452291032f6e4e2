#include "spatess/correlation.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace spatess {

Family parse_family(const std::string& name) {
    std::string s;
    s.reserve(name.size());
    for (char c : name) s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (s == "gaussian") return Family::Gaussian;
    if (s == "exponential") return Family::Exponential;
    if (s == "kbessel") return Family::KBessel;
    throw ConfigError("unknown correlation family '" + name + "' (expected gaussian|exponential|kbessel)");
}

const char* family_name(Family f) {
    switch (f) {
        case Family::Gaussian: return "gaussian";
        case Family::Exponential: return "exponential";
        default: return "kbessel";
    }
}

// ---- modified Bessel K1 ----

namespace {

// I1 by ascending series, used inside the small-x K1 series.
double bessel_i1_series(double x) {
    double t = 0.25 * x * x;
    double term = 0.5 * x;  // k = 0 term of (x/2) * sum t^k / (k! (k+1)!)
    double sum = term;
    for (int k = 1; k < 40; ++k) {
        term *= t / (static_cast<double>(k) * (k + 1));
        sum += term;
        if (term < sum * 1e-17) break;
    }
    return sum;
}

// K1(x) = ln(x/2) I1(x) + 1/x - (x/4) sum_k [psi(k+1)+psi(k+2)] t^k / (k!(k+1)!)
double k1_small(double x) {
    constexpr double euler_gamma = 0.57721566490153286;
    double t = 0.25 * x * x;
    double psi_a = -euler_gamma;        // psi(1)
    double psi_b = 1.0 - euler_gamma;   // psi(2)
    double fac = 1.0;                   // t^k / (k! (k+1)!)
    double sum = psi_a + psi_b;
    for (int k = 1; k < 40; ++k) {
        fac *= t / (static_cast<double>(k) * (k + 1));
        psi_a += 1.0 / k;
        psi_b += 1.0 / (k + 1);
        double term = (psi_a + psi_b) * fac;
        sum += term;
        if (std::abs(term) < std::abs(sum) * 1e-17) break;
    }
    return std::log(0.5 * x) * bessel_i1_series(x) + 1.0 / x - 0.25 * x * sum;
}

// sqrt(x) e^x K1(x) polynomial in 2/x for x >= 2 (classical coefficients).
double k1_large(double x) {
    double t = 2.0 / x;
    double p = 1.25331414 +
               t * (0.23498619 +
               t * (-0.03655620 +
               t * (0.01504268 +
               t * (-0.00780353 +
               t * (0.00325614 +
               t * (-0.00068245))))));
    return p * std::exp(-x) / std::sqrt(x);
}

} // namespace

double bessel_k1(double x) {
    if (!(x > 0.0)) throw ComputeError("bessel_k1 requires x > 0");
    if (x > 740.0) return 0.0;  // exp(-x) underflows; decay is overflow-safe
    return x < 2.0 ? k1_small(x) : k1_large(x);
}

double correlation(Family family, double d, double r) {
    if (!(d >= 0.0) || !std::isfinite(d)) throw ComputeError("correlation requires finite d >= 0");
    if (!(r > 0.0) || !std::isfinite(r)) throw ComputeError("correlation requires finite r > 0");
    if (d == 0.0) return 1.0;
    double x = d / r;
    switch (family) {
        case Family::Gaussian: return std::exp(-x * x);
        case Family::Exponential: return std::exp(-x);
        default:
            if (x < 1e-8) return 1.0;  // x*K1(x) -> 1, avoids cancellation
            return x * bessel_k1(x);
    }
}

// ---- variogram params ----

double rho_from_sills(double c0, double c1) {
    if (!(c1 > 0.0)) throw ConfigError("sill C1 must be > 0");
    if (c0 < 0.0 || c0 > c1) throw ConfigError("nugget C0 must satisfy 0 <= C0 <= C1");
    return (c1 - c0) / c1;
}

VariogramParams VariogramParams::from_sills(double c0, double c1, double r) {
    VariogramParams p;
    p.nugget = c0;
    p.sill = c1;
    p.range = r;
    p.rho = rho_from_sills(c0, c1);
    p.validate();
    return p;
}

void VariogramParams::validate() const {
    if (!(range > 0.0)) throw ConfigError("variogram range must be > 0");
    if (!(sill > 0.0)) throw ConfigError("sill C1 must be > 0");
    if (nugget < 0.0 || nugget > sill) throw ConfigError("nugget C0 must satisfy 0 <= C0 <= C1");
    if (rho < 0.0 || rho > 1.0) throw ConfigError("rho must lie in [0,1]");
    double recomputed = (sill - nugget) / sill;
    if (std::abs(recomputed - rho) > 1e-12)
        throw ConfigError("rho inconsistent with (C0, C1)");
}

} // namespace spatess
