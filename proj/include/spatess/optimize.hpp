#pragma once
// Budget-constrained design search: maximize the approximate ESS over
// (J clusters, m enumerated per cluster, sampled proportion p).
#include "spatess/approx.hpp"

namespace spatess {

struct CostModel {
    double cm = 0.0;  // cost per enumerated location
    double cn = 0.0;  // cost per survey
    double C = 0.0;   // budget
    int j_min = 1;
    int j_max = 1;

    void validate() const;
};

struct DensityModel {
    double r0 = 1.0;  // cluster radius R(m) = r0 sqrt(m)

    void validate() const;
};

enum class BudgetScope { Total, SurveyOnly };

BudgetScope parse_budget_scope(const std::string& name);
const char* budget_scope_name(BudgetScope s);

struct DesignProblem {
    Family family = Family::Exponential;
    Sampling sampling = Sampling::Simple;
    double r = 1.0;
    double rho = 0.5;
    DensityModel density;
    CostModel cost;
    BudgetScope scope = BudgetScope::Total;
    int m_max = 0;  // 0 = derive from budget; required when the budget cannot cap m
};

struct DesignSolution {
    int J = 0;
    int m = 0;
    double p = 0.0;
    long long N = 0;       // round(J m p), the surveyed count
    double ess = 0.0;
    double cost = 0.0;     // spend under the active budget scope
    double cost_total = 0.0;  // J m cm + N cn regardless of scope
    bool feasible = false;
};

// Approximate design ESS at (J, m, p): R = r0 sqrt(m), n = m p, q per scheme,
// disc presets. Throws when n < 1.
double objective_ess(int J, int m, double p, Family family, Sampling sampling,
                     double r, double rho, double r0);

// Exhaustive scan over J in [j_min, j_max], m in [1, m_max], and p on the
// fixed grid {k/10000}; budget uses N = round(J m p). Ties broken by smaller
// cost, then smaller J. Throws InfeasibleError when nothing fits the budget.
DesignSolution optimize_design(const DesignProblem& problem);

// The p grid resolution used by optimize_design (and its documented oracle).
inline constexpr int kPGrid = 10000;

} // namespace spatess
