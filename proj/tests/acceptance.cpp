// Acceptance gate: nine behavioral criteria, each printed as one PASS/FAIL
// line; exits 0 only when every criterion holds.
// Invocation: acceptance <path-to-cli>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "spatess/approx.hpp"
#include "spatess/elicit.hpp"
#include "spatess/ess.hpp"
#include "spatess/fit.hpp"
#include "spatess/geometry.hpp"
#include "spatess/optimize.hpp"
#include "spatess/rng.hpp"
#include "spatess/scenario.hpp"

using namespace spatess;
using Clock = std::chrono::steady_clock;

namespace {

std::string g_cli;

// ---- small check helpers -------------------------------------------------

struct Checker {
    bool ok = true;
    std::string why;

    void expect(bool cond, const std::string& msg) {
        if (!cond) {
            ok = false;
            if (!why.empty()) why += "; ";
            why += msg;
        }
    }
    void near(double got, double want, double tol, const std::string& what) {
        if (!(std::fabs(got - want) <= tol)) {
            char buf[160];
            std::snprintf(buf, sizeof(buf), "%s: got %.10g, want %.10g +/- %.3g", what.c_str(),
                          got, want, tol);
            expect(false, buf);
        }
    }
};

int run_cli_stdout(const std::string& args, std::string& out) {
    out.clear();
    const std::string cmd = "\"" + g_cli + "\" " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (pipe == nullptr) return -1;
    char buf[4096];
    size_t got = 0;
    while ((got = fread(buf, 1, sizeof(buf), pipe)) > 0) out.append(buf, got);
    const int status = pclose(pipe);
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

double round4(double v) { return std::round(v * 1e4) / 1e4; }

// state carried from c4/c8 into the reproducibility rerun (c9)
std::string g_regen_json;
std::string g_scenario_csv;

// ---- criteria --------------------------------------------------------------

// Worked mean-correlation values through the CLI: unit disc, spatial ratio,
// gaussian family, n = 20 and n = 10.
bool c1_cli_stilde(Checker& c) {
    std::string out;
    int code = run_cli_stdout(
        "stilde --family gaussian --sampling spatial --shape disc --r 0.5 --R 1 --n 20", out);
    c.expect(code == 0, "n=20 run exited " + std::to_string(code));
    c.near(std::strtod(out.c_str(), nullptr), 0.150, 0.0005, "s_tilde(n=20)");
    code = run_cli_stdout(
        "stilde --family gaussian --sampling spatial --shape disc --r 0.5 --R 1 --n 10", out);
    c.expect(code == 0, "n=10 run exited " + std::to_string(code));
    c.near(std::strtod(out.c_str(), nullptr), 0.138, 0.0005, "s_tilde(n=10)");
    return c.ok;
}

// The same worked values pushed through the closed-form ESS.
bool c2_worked_ess(Checker& c) {
    c.near(ess_approx(1, 20.0, 0.3, 0.150), 10.78, 0.02, "ess(J=1, n=20)");
    c.near(ess_approx(2, 10.0, 0.3, 0.138), 14.57, 0.02, "ess(J=2, n=10)");
    return c.ok;
}

// Exact per-cluster ESS must agree with the raw-matrix definition, and
// design ESS must add over independent clusters.
bool c3_matrix_agreement(Checker& c) {
    auto make_cluster = [](std::uint64_t seed) {
        Rng rng(mix_seed(seed, 77));
        ClusterConfig cl;
        cl.family = static_cast<Family>(seed % 3);
        cl.r = 0.05 + 1.95 * rng.uniform();
        cl.rho = rng.uniform() * 0.999;
        const int n = static_cast<int>(rng.uniform_int(1, 30));
        const double R = 0.3 + 1.7 * rng.uniform();
        cl.points = gen_uniform(Region::disc(R), n, mix_seed(seed, 3));
        return cl;
    };
    double worst = 0.0;
    for (std::uint64_t i = 0; i < 1000; ++i) {
        const ClusterConfig cl = make_cluster(i);
        const double direct = cluster_ess(cl).n_star;
        const double matrix = ess_exact(cluster_sigma(cl), cl.points.size());
        worst = std::max(worst, std::fabs(direct - matrix));
    }
    c.expect(worst <= 1e-10, "cluster vs matrix ESS diverged by " + std::to_string(worst));

    double worst_design = 0.0;
    for (std::uint64_t d = 0; d < 25; ++d) {
        std::vector<ClusterConfig> clusters;
        double total = 0.0;
        for (std::uint64_t k = 0; k < 5; ++k) {
            clusters.push_back(make_cluster(1000 + 5 * d + k));
            total += cluster_ess(clusters.back()).n_star;
        }
        worst_design = std::max(worst_design, std::fabs(design_ess(clusters) - total));
    }
    c.expect(worst_design <= 1e-10,
             "design ESS vs block sum diverged by " + std::to_string(worst_design));
    return c.ok;
}

// Regenerating the coefficient table by simulation + fitting must land near
// the shipped disc presets and pick the same functional forms.
bool c4_regeneration(Checker& c) {
    const std::vector<CellFit> cells = regenerate_table1(20260816ULL, 2000);
    g_regen_json = cellfits_to_json(cells, "acceptance");
    c.expect(cells.size() == 12, "expected 12 cells");

    auto find_cell = [&](Family f, Sampling s) -> const CellFit& {
        for (const auto& cell : cells)
            if (cell.family == f && cell.sampling == s && cell.shape == Shape::Disc) return cell;
        std::abort();
    };
    auto form_fit = [](const CellFit& cell, Form form) -> const FitOutcome& {
        for (const auto& f : cell.forms)
            if (f.form == form) return f;
        std::abort();
    };
    auto attains_min_4dp = [&](const CellFit& cell, Form form) {
        const double target = round4(form_fit(cell, form).mse);
        for (const auto& f : cell.forms)
            if (round4(f.mse) < target) return false;
        return true;
    };

    struct Pin {
        Family family;
        Sampling sampling;
        Form form;
        std::vector<double> printed;
        const char* name;
    };
    const std::vector<Pin> pins = {
        {Family::Gaussian, Sampling::Simple, Form::Algebraic, {0.915, 2.071}, "gaussian/simple"},
        {Family::Exponential, Sampling::Simple, Form::Algebraic, {0.764, 1.366},
         "exponential/simple"},
        {Family::KBessel, Sampling::Simple, Form::Algebraic, {1.871, 1.603}, "kbessel/simple"},
        {Family::Gaussian, Sampling::Spatial, Form::Algebraic, {0.876, 2.160},
         "gaussian/spatial"},
        {Family::Exponential, Sampling::Spatial, Form::Tanh, {0.655, 0.795, 1.270},
         "exponential/spatial"},
        {Family::KBessel, Sampling::Spatial, Form::Algebraic, {1.829, 1.645},
         "kbessel/spatial"},
    };
    for (const auto& pin : pins) {
        const CellFit& cell = find_cell(pin.family, pin.sampling);
        std::vector<double> got = form_fit(cell, pin.form).coeffs;
        if (pin.form == Form::Tanh && got.size() == 3 && got[0] < 0) {
            got[0] = -got[0];
            got[1] = -got[1];
        }
        c.expect(got.size() == pin.printed.size(), std::string(pin.name) + ": coeff count");
        for (size_t i = 0; i < got.size() && i < pin.printed.size(); ++i) {
            const double rel = std::fabs(got[i] - pin.printed[i]) / std::fabs(pin.printed[i]);
            if (rel > 0.15) {
                char buf[160];
                std::snprintf(buf, sizeof(buf), "%s coeff %zu: refit %.4f vs %.3f (%.0f%% off)",
                              pin.name, i, got[i], pin.printed[i], rel * 100);
                c.expect(false, buf);
            }
        }
        c.expect(attains_min_4dp(cell, pin.form),
                 std::string(pin.name) + ": " + form_name(pin.form) +
                     " does not attain the 4dp-rounded minimum MSE");
    }
    for (const auto& cell : cells)
        c.expect(cell.best().mse < 0.01, "a cell fit has MSE >= 0.01");
    return c.ok;
}

// Dichotomous-outcome conversion: worked value and exact endpoints.
bool c5_dichotomous(Checker& c) {
    c.near(rho_dichotomous(0.4, 0.6), 0.833333333333333, 1e-9, "rho(0.4, 0.6)");
    c.expect(rho_dichotomous(0.5, 0.5) == 0.0, "rho at p_cond == p_marginal must be exactly 0");
    c.expect(rho_dichotomous(0.5, 1.0, true) == 2.0,
             "rho at p_cond == 1 must hit 1/p exactly (dyadic case)");
    return c.ok;
}

// The optimizer must match an independently coded exhaustive scan and land
// within 5% of the documented optimum ESS of about 215.
bool c6_optimizer(Checker& c) {
    DesignProblem pr;
    pr.family = Family::Exponential;
    pr.sampling = Sampling::Simple;
    pr.r = 10.0;
    pr.rho = 0.5;
    pr.density.r0 = 15.0;
    pr.cost = {30.0, 50.0, 25000.0, 1, 20};
    const DesignSolution sol = optimize_design(pr);

    const Preset& preset = find_preset(pr.family, pr.sampling, Shape::Disc);
    int best_J = 0, best_m = 0, best_k = 0;
    long long best_N = 0;
    double best_ess = -1.0, best_spend = 0.0;
    for (int J = pr.cost.j_min; J <= pr.cost.j_max; ++J) {
        for (int m = 1;; ++m) {
            if (J * m * pr.cost.cm + J * pr.cost.cn > pr.cost.C) break;
            const double st = s_tilde(preset.spec, pr.r / (pr.density.r0 * std::sqrt(m)));
            for (int k = (kPGrid + m - 1) / m; k <= kPGrid; ++k) {
                const double p = static_cast<double>(k) / kPGrid;
                const long long N = std::llround(static_cast<double>(J) * m * p);
                const double spend = J * m * pr.cost.cm + static_cast<double>(N) * pr.cost.cn;
                if (spend > pr.cost.C) break;
                const double n = m * p;
                const double ess = J * n / (1.0 + pr.rho * st * (n - 1.0));
                if (ess > best_ess) {
                    best_ess = ess;
                    best_J = J;
                    best_m = m;
                    best_k = k;
                    best_N = N;
                    best_spend = spend;
                }
            }
        }
    }
    (void)best_k;
    c.expect(sol.feasible, "solution not marked feasible");
    c.expect(sol.J == best_J && sol.m == best_m && sol.N == best_N,
             "argmax mismatch vs independent scan");
    c.expect(std::fabs(sol.ess - best_ess) <= 1e-6 * best_ess,
             "optimum ESS differs from independent scan");
    c.near(sol.cost, best_spend, 1e-9, "spend");
    c.expect(std::fabs(sol.ess - 215.0) / 215.0 < 0.05, "optimum ESS not within 5% of 215");
    return c.ok;
}

// Enumerate-15-survey-all versus enumerate-30-survey-half: the sweep must
// peak at the largest cluster count with the documented peak ESS.
bool c7_strategy_comparison(Checker& c) {
    CompareSpec spec;
    spec.family = Family::Exponential;
    spec.sampling = Sampling::Simple;
    spec.rho = 0.8333333333333333;
    spec.r = 10.0;
    spec.r0 = 15.0;
    spec.m_base = 15;
    spec.p_base = 1.0;
    spec.m_alt = 30;
    spec.p_alt = 0.5;
    spec.j_max = 30;
    const CompareResult res = compare_strategies(spec);
    c.expect(res.peak_j_base == 30, "base strategy should peak at J = 30");
    c.near(res.peak_ess_base, 260.0, 5.0, "base peak ESS");
    c.expect(res.peak_ess_alt > res.peak_ess_base,
             "subsampled strategy should dominate at the peak");
    return c.ok;
}

// Simulation study: exact-ESS means rise with cluster count, spatial sampling
// never loses to simple sampling, and near-independent settings approach N.
bool c8_simulation_study(Checker& c) {
    ScenarioConfig base;
    base.kind = ScenarioKind::FixedMP;
    base.N = 200;
    base.rho = 0.5;
    base.r = 0.5;
    base.family = Family::Exponential;
    base.scheme = Sampling::Simple;
    base.replicates = 500;
    base.seed = 20260816ULL;

    const ScenarioResult simple = run_scenario(base);
    g_scenario_csv = scenario_csv(simple, "acceptance");
    for (size_t i = 1; i < simple.rows.size(); ++i)
        c.expect(simple.rows[i].mean_ess_exact > simple.rows[i - 1].mean_ess_exact,
                 "mean exact ESS not increasing at J=" + std::to_string(simple.rows[i].J));

    ScenarioConfig sp = base;
    sp.scheme = Sampling::Spatial;
    const ScenarioResult spatial = run_scenario(sp);
    for (size_t i = 0; i < simple.rows.size(); ++i) {
        const double se = (simple.rows[i].sd_ess_exact + spatial.rows[i].sd_ess_exact) /
                          std::sqrt(static_cast<double>(base.replicates));
        c.expect(spatial.rows[i].mean_ess_exact >=
                     simple.rows[i].mean_ess_exact - 2.0 * se,
                 "spatial sampling below simple at J=" + std::to_string(simple.rows[i].J));
    }

    for (Family f : {Family::Gaussian, Family::Exponential, Family::KBessel})
        for (Sampling s : {Sampling::Simple, Sampling::Spatial}) {
            ScenarioConfig weak = base;
            weak.rho = 0.01;
            weak.r = 0.1;
            weak.family = f;
            weak.scheme = s;
            weak.j_values = {5, 25};
            const ScenarioResult res = run_scenario(weak);
            for (const auto& row : res.rows)
                c.expect(row.mean_ess_exact > 0.95 * weak.N,
                         "weak-correlation ESS below 0.95 N at J=" + std::to_string(row.J));
        }
    return c.ok;
}

// Same seeds, same bytes: the regeneration JSON and the scenario CSV must be
// bitwise stable across reruns.
bool c9_reproducibility(Checker& c) {
    const std::vector<CellFit> cells = regenerate_table1(20260816ULL, 2000);
    c.expect(cellfits_to_json(cells, "acceptance") == g_regen_json,
             "regeneration JSON differs between identical runs");

    ScenarioConfig base;
    base.kind = ScenarioKind::FixedMP;
    base.N = 200;
    base.rho = 0.5;
    base.r = 0.5;
    base.family = Family::Exponential;
    base.scheme = Sampling::Simple;
    base.replicates = 500;
    base.seed = 20260816ULL;
    c.expect(scenario_csv(run_scenario(base), "acceptance") == g_scenario_csv,
             "scenario CSV differs between identical runs");
    return c.ok;
}

} // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: acceptance <cli-binary>\n");
        return 1;
    }
    g_cli = argv[1];

    struct Criterion {
        const char* name;
        std::function<bool(Checker&)> run;
    };
    const std::vector<Criterion> criteria = {
        {"c1 CLI mean-correlation lookup", c1_cli_stilde},
        {"c2 closed-form ESS worked values", c2_worked_ess},
        {"c3 matrix vs closed-form ESS agreement", c3_matrix_agreement},
        {"c4 coefficient table regeneration", c4_regeneration},
        {"c5 dichotomous elicitation", c5_dichotomous},
        {"c6 optimizer equals exhaustive scan", c6_optimizer},
        {"c7 strategy comparison peak", c7_strategy_comparison},
        {"c8 simulation study behavior", c8_simulation_study},
        {"c9 bitwise reproducibility", c9_reproducibility},
    };

    int failures = 0;
    for (const auto& crit : criteria) {
        Checker checker;
        const auto t0 = Clock::now();
        bool ok = false;
        try {
            ok = crit.run(checker);
        } catch (const std::exception& e) {
            checker.expect(false, std::string("exception: ") + e.what());
            ok = false;
        }
        const double dt = std::chrono::duration<double>(Clock::now() - t0).count();
        if (ok) {
            std::printf("PASS  %-42s (%.2fs)\n", crit.name, dt);
        } else {
            std::printf("FAIL  %-42s (%.2fs)  %s\n", crit.name, dt, checker.why.c_str());
            ++failures;
        }
        std::fflush(stdout);
    }
    if (failures == 0) {
        std::printf("all 9 criteria passed\n");
        return 0;
    }
    std::printf("%d criteria failed\n", failures);
    return 1;
}
