#pragma once
// Correlation families f(d, r): Gaussian exp(-d^2/r^2), exponential exp(-d/r),
// K-Bessel (d/r)*K1(d/r); plus the variogram parameter bundle.
#include <string>

#include "spatess/errors.hpp"

namespace spatess {

enum class Family { Gaussian, Exponential, KBessel };

Family parse_family(const std::string& name);
const char* family_name(Family f);

// Modified Bessel function of the second kind, order 1.
// Ascending series with log term for x < 2, polynomial approximation for
// x >= 2; absolute error well under 1e-7 on (0, 50].
double bessel_k1(double x);

// f(d, r) per family; f(0, r) == 1 exactly (K-Bessel removable singularity
// handled explicitly).
double correlation(Family family, double d, double r);

struct VariogramParams {
    double nugget = 0.0;   // C0
    double sill = 1.0;     // C1
    double range = 1.0;    // r
    double rho = 1.0;      // (C1 - C0) / C1

    static VariogramParams from_sills(double c0, double c1, double r);
    void validate() const;
};

struct CorrelationModel {
    Family family = Family::Exponential;
    VariogramParams params;
};

double rho_from_sills(double c0, double c1);

} // namespace spatess
