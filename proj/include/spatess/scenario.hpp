#pragma once
// Cluster-count sweeps: exact design ESS by simulation next to the closed-form
// approximation, plus the fixed-(m, p) strategy comparison.
#include <cstdint>
#include <string>
#include <vector>

#include "spatess/approx.hpp"

namespace spatess {

enum class ScenarioKind {
    FixedMP,  // m and p fixed by the target; J varies
    FixedM    // m fixed; p = n/m varies with J
};

ScenarioKind parse_scenario_kind(const std::string& name);
const char* scenario_kind_name(ScenarioKind k);

struct ScenarioConfig {
    ScenarioKind kind = ScenarioKind::FixedMP;
    int N = 200;                // total surveyed target; n = N/J per cluster
    std::vector<int> j_values;  // empty = kind-specific default
    double rho = 0.5;
    double r = 0.5;
    Family family = Family::Exponential;
    Sampling scheme = Sampling::Simple;
    double density = 100.0;  // enumerated points per unit disc; R = sqrt(m/density)
    int m_fixed = 20;        // FixedM: enumerated per cluster
    double p_fixed = 1.0;    // FixedMP: sampled proportion
    int replicates = 500;
    std::uint64_t seed = 1;

    void validate() const;
    std::vector<int> effective_j_values() const;
};

struct ScenarioRow {
    int J = 0;
    int m = 0;
    double p = 0.0;
    double mean_ess_exact = 0.0;
    double sd_ess_exact = 0.0;
    double ess_approx = 0.0;
};

struct ScenarioResult {
    ScenarioConfig config;
    std::vector<ScenarioRow> rows;
};

ScenarioResult run_scenario(const ScenarioConfig& config);

// Long-format CSV: scenario,family,scheme,rho,r,J,mean_ess_exact,sd_ess_exact,
// ess_approx; leading comment line carries the resolved-config hash.
std::string scenario_csv(const ScenarioResult& result, const std::string& config_hash);

// ---- fixed-(m, p) strategy comparison over a common J grid ----

struct CompareSpec {
    Family family = Family::Exponential;
    Sampling sampling = Sampling::Simple;
    double rho = 0.5;
    double r = 1.0;
    double r0 = 1.0;  // R(m) = r0 sqrt(m)
    int m_base = 1;
    double p_base = 1.0;
    int m_alt = 1;
    double p_alt = 1.0;
    int j_max = 30;  // J sweeps 1..j_max
};

struct CompareRow {
    std::string strategy;  // "base" | "alt"
    int J = 0;
    int m = 0;
    double p = 0.0;
    double n = 0.0;  // m p per cluster
    long long N = 0;
    double ess = 0.0;
};

struct CompareResult {
    std::vector<CompareRow> rows;
    int peak_j_base = 0;
    double peak_ess_base = 0.0;
    double peak_p_base = 0.0;
    int peak_j_alt = 0;
    double peak_ess_alt = 0.0;
    double base_n = 0.0;          // m_base p_base
    double required_n_alt = 0.0;  // alt per-cluster n matching the base peak (NaN if unreachable)
    double n_drop = 0.0;          // (base_n - required_n_alt) / base_n
};

// Pre: m_base p_base == m_alt p_alt (same surveyed count at every J).
CompareResult compare_strategies(const CompareSpec& spec);

std::string compare_csv(const CompareResult& result, const std::string& config_hash);

} // namespace spatess
