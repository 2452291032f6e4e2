// Exhaustive integer design search under a budget.
#include "spatess/optimize.hpp"

#include <cmath>
#include <string>

#include "spatess/errors.hpp"
#include "spatess/ess.hpp"

namespace spatess {

namespace {

// Largest m so that sampling one unit per cluster still fits the budget.
int budget_m_cap(const DesignProblem& pr, int J) {
    if (pr.scope == BudgetScope::SurveyOnly) return -1;  // budget never caps m
    if (pr.cost.cm <= 0.0) return -1;
    const double left = pr.cost.C - static_cast<double>(J) * pr.cost.cn;
    if (left < 0.0) return 0;
    const double cap = left / (static_cast<double>(J) * pr.cost.cm);
    if (cap >= 1e9) return -1;
    return static_cast<int>(std::floor(cap + 1e-9));
}

} // namespace

void CostModel::validate() const {
    if (cm < 0.0 || cn < 0.0) throw ConfigError("cost model: cm and cn must be >= 0");
    if (!(C > 0.0)) throw ConfigError("cost model: budget C must be > 0");
    if (j_min < 1 || j_max < j_min)
        throw ConfigError("cost model: need 1 <= j_min <= j_max");
}

void DensityModel::validate() const {
    if (!(r0 > 0.0)) throw ConfigError("density model: r0 must be > 0");
}

BudgetScope parse_budget_scope(const std::string& name) {
    if (name == "total") return BudgetScope::Total;
    if (name == "survey-only" || name == "survey_only" || name == "surveyonly")
        return BudgetScope::SurveyOnly;
    throw ConfigError("unknown budget scope '" + name + "' (total | survey-only)");
}

const char* budget_scope_name(BudgetScope s) {
    return s == BudgetScope::Total ? "total" : "survey-only";
}

double objective_ess(int J, int m, double p, Family family, Sampling sampling,
                     double r, double rho, double r0) {
    if (J < 1 || m < 1) throw ConfigError("objective_ess: need J >= 1, m >= 1");
    if (!(p > 0.0) || p > 1.0) throw ConfigError("objective_ess: p must be in (0, 1]");
    const double n = m * p;
    if (n < 1.0) throw ConfigError("objective_ess: m p < 1 leaves clusters empty");
    const double R = r0 * std::sqrt(static_cast<double>(m));
    const Preset& preset = find_preset(family, sampling, Shape::Disc);
    // n = m p is fractional in general, so q2 is formed directly here rather
    // than through the integer-n ratio_q helper.
    const double q = sampling == Sampling::Simple ? r / R : r / (std::sqrt(R) + R / n);
    const double st = s_tilde(preset.spec, q);
    return ess_approx(J, n, rho, st);
}

DesignSolution optimize_design(const DesignProblem& pr) {
    pr.cost.validate();
    pr.density.validate();
    if (!(pr.rho >= 0.0) || pr.rho > 1.0)
        throw ConfigError("optimize: rho must be in [0, 1]");
    if (!(pr.r > 0.0)) throw ConfigError("optimize: r must be > 0");
    if (pr.m_max < 0) throw ConfigError("optimize: m_max must be >= 0");

    const Preset& preset = find_preset(pr.family, pr.sampling, Shape::Disc);
    const double cm = pr.cost.cm;
    const double cn = pr.cost.cn;
    const double C = pr.cost.C;

    DesignSolution best;
    bool found = false;

    for (int J = pr.cost.j_min; J <= pr.cost.j_max; ++J) {
        int m_hi = budget_m_cap(pr, J);
        if (m_hi == 0) continue;  // enumeration alone busts the budget at this J
        if (m_hi < 0) {
            if (pr.m_max == 0)
                throw ConfigError("optimize: the budget does not bound m under this scope; "
                                  "set m_max");
            m_hi = pr.m_max;
        } else if (pr.m_max > 0 && pr.m_max < m_hi) {
            m_hi = pr.m_max;
        }
        if (m_hi > 200000)
            throw ConfigError("optimize: search box too large (m cap " + std::to_string(m_hi) +
                              "); set a smaller m_max");
        for (int m = 1; m <= m_hi; ++m) {
            const double Jm = static_cast<double>(J) * m;
            const double enum_cost = Jm * cm;
            if (pr.scope == BudgetScope::Total && enum_cost + static_cast<double>(J) * cn > C)
                break;  // even n = 1 per cluster is over budget; larger m only worse
            const double R = pr.density.r0 * std::sqrt(static_cast<double>(m));
            // Simple random sampling: q does not depend on n, hoist s_tilde.
            double st_fixed = 0.0;
            if (pr.sampling == Sampling::Simple)
                st_fixed = s_tilde(preset.spec, pr.r / R);
            const int k_lo = (kPGrid + m - 1) / m;  // smallest k with m p >= 1
            for (int k = k_lo; k <= kPGrid; ++k) {
                const double p = static_cast<double>(k) / kPGrid;
                const double n = m * p;
                const long long N = std::llround(Jm * p);
                if (N < 1) continue;
                const double survey_cost = static_cast<double>(N) * cn;
                const double spend =
                    pr.scope == BudgetScope::Total ? enum_cost + survey_cost : survey_cost;
                if (spend > C) break;  // N is nondecreasing in k
                const double st =
                    pr.sampling == Sampling::Simple
                        ? st_fixed
                        : s_tilde(preset.spec, pr.r / (std::sqrt(R) + R / n));
                const double ess = ess_approx(J, n, pr.rho, st);
                if (!found || ess > best.ess ||
                    (ess == best.ess && spend < best.cost)) {
                    best.J = J;
                    best.m = m;
                    best.p = p;
                    best.N = N;
                    best.ess = ess;
                    best.cost = spend;
                    best.cost_total = enum_cost + survey_cost;
                    best.feasible = true;
                    found = true;
                }
            }
        }
    }
    if (!found)
        throw InfeasibleError("optimize: no (J, m, p) design fits the budget "
                              "(even one survey per cluster at m = 1 is over C)");
    return best;
}

} // namespace spatess
