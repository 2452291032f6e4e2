// Command-line front door: subcommands over the library modules with
// config-file + flag input (flags win), hashed resolved-config echoes, and
// atomic CSV/JSON artifacts. Exit codes: 0 ok, 2 config, 3 compute, 4 infeasible.
#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "spatess/approx.hpp"
#include "spatess/config.hpp"
#include "spatess/correlation.hpp"
#include "spatess/elicit.hpp"
#include "spatess/errors.hpp"
#include "spatess/ess.hpp"
#include "spatess/fit.hpp"
#include "spatess/geometry.hpp"
#include "spatess/optimize.hpp"
#include "spatess/scenario.hpp"

namespace {

using nlohmann::ordered_json;
using namespace spatess;

const std::vector<SchemaSection> kSchema = {
    {"run", {"seed", "replicates", "out", "format"}},
    {"ess", {"points", "family", "r", "rho"}},
    {"stilde", {"family", "sampling", "shape", "r", "R", "n"}},
    {"fit", {"family", "sampling", "shape"}},
    {"simulate",
     {"scenario", "n_total", "j_values", "rho", "r", "family", "scheme", "density", "m", "p"}},
    {"compare",
     {"family", "sampling", "rho", "r", "r0", "m_base", "p_base", "m_alt", "p_alt", "j_max"}},
    {"optimize",
     {"family", "sampling", "r", "rho", "r0", "cm", "cn", "budget", "j_min", "j_max", "m_max",
      "budget_scope"}},
    {"elicit",
     {"p_marginal", "p_cond", "allow_gt1", "sd_ratio", "interval_lo", "interval_hi", "interval_b",
      "avg_j", "avg_n", "avg_R", "avg_family", "avg_sampling", "rho_density", "r_density",
      "nodes"}},
};

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt_sig6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

// Resolves each input as flag > config file > default and records the final
// value so every run can echo and hash its complete configuration.
struct Ctx {
    IniDoc doc;
    std::vector<std::pair<std::string, std::string>> resolved;

    void record(const std::string& path, const std::string& value) {
        for (auto& kv : resolved)
            if (kv.first == path) {
                kv.second = value;
                return;
            }
        resolved.emplace_back(path, value);
    }

    static void split(const std::string& path, std::string& sec, std::string& key) {
        const auto dot = path.find('.');
        sec = path.substr(0, dot);
        key = path.substr(dot + 1);
    }

    double num(const CLI::Option* opt, double flagval, const std::string& path, double def) {
        std::string sec, key;
        split(path, sec, key);
        const double v = (opt && opt->count()) ? flagval : ini_double(doc, sec, key, def);
        record(path, fmt_double(v));
        return v;
    }

    int num_i(const CLI::Option* opt, int flagval, const std::string& path, int def) {
        std::string sec, key;
        split(path, sec, key);
        const int v = (opt && opt->count()) ? flagval : ini_int(doc, sec, key, def);
        record(path, std::to_string(v));
        return v;
    }

    std::uint64_t num_u64(const CLI::Option* opt, std::uint64_t flagval, const std::string& path,
                          std::uint64_t def) {
        std::string sec, key;
        split(path, sec, key);
        const std::uint64_t v = (opt && opt->count()) ? flagval : ini_u64(doc, sec, key, def);
        record(path, std::to_string(v));
        return v;
    }

    std::string str(const CLI::Option* opt, const std::string& flagval, const std::string& path,
                    const std::string& def) {
        std::string sec, key;
        split(path, sec, key);
        const std::string v = (opt && opt->count()) ? flagval : ini_string(doc, sec, key, def);
        record(path, v);
        return v;
    }

    std::vector<int> ints(const CLI::Option* opt, const std::string& flagval,
                          const std::string& path, const std::vector<int>& def) {
        std::string sec, key;
        split(path, sec, key);
        std::vector<int> v;
        if (opt && opt->count())
            v = parse_int_list(flagval, path);
        else
            v = ini_int_list(doc, sec, key, def);
        std::string joined;
        for (int x : v) joined += (joined.empty() ? "" : ",") + std::to_string(x);
        record(path, joined);
        return v;
    }

    bool flag(const CLI::Option* opt, const std::string& path, bool def) {
        std::string sec, key;
        split(path, sec, key);
        bool v = def;
        if (opt && opt->count()) {
            v = true;
        } else {
            const std::string s = ini_string(doc, sec, key, def ? "true" : "false");
            if (s == "true" || s == "1" || s == "yes")
                v = true;
            else if (s == "false" || s == "0" || s == "no")
                v = false;
            else
                throw ConfigError(path + ": expected a boolean, got '" + s + "'");
        }
        record(path, v ? "true" : "false");
        return v;
    }

    // Sorted canonical dump -> FNV-1a hash; echoed on stderr.
    std::string finish(const std::string& subcommand) {
        std::sort(resolved.begin(), resolved.end());
        std::string dump = "subcommand=" + subcommand + "\n";
        for (const auto& kv : resolved) dump += kv.first + "=" + kv.second + "\n";
        const std::string hash = hash_hex(fnv1a64(dump));
        std::cerr << "# resolved config (hash " << hash << ")\n";
        std::cerr << "#   subcommand=" << subcommand << "\n";
        for (const auto& kv : resolved)
            std::cerr << "#   " << kv.first << "=" << kv.second << "\n";
        return hash;
    }

    ordered_json config_json() const {
        ordered_json j = ordered_json::object();
        auto sorted = resolved;
        std::sort(sorted.begin(), sorted.end());
        for (const auto& kv : sorted) j[kv.first] = kv.second;
        return j;
    }
};

struct GlobalOpts {
    std::uint64_t seed = 1;
    int replicates = 500;
    std::string out;
    std::string format;
    std::string config_path;
    CLI::Option* seed_opt = nullptr;
    CLI::Option* reps_opt = nullptr;
    CLI::Option* out_opt = nullptr;
    CLI::Option* format_opt = nullptr;

    std::uint64_t seed_v(Ctx& ctx) const { return ctx.num_u64(seed_opt, seed, "run.seed", 1); }
    int reps_v(Ctx& ctx) const { return ctx.num_i(reps_opt, replicates, "run.replicates", 500); }
    std::string out_v(Ctx& ctx) const { return ctx.str(out_opt, out, "run.out", ""); }
    std::string format_v(Ctx& ctx, const std::string& def) const {
        const std::string f = ctx.str(format_opt, format, "run.format", def);
        if (f != "csv" && f != "json" && f != "both")
            throw ConfigError("run.format: expected csv, json or both, got '" + f + "'");
        return f;
    }
};

Ctx make_ctx(const GlobalOpts& g) {
    Ctx ctx;
    if (!g.config_path.empty()) {
        ctx.doc = parse_ini_file(g.config_path);
        check_schema(ctx.doc, kSchema);
    }
    return ctx;
}

// Writes or prints one artifact; CSV payloads carry the hash as a comment
// line, JSON payloads as a config_hash field (already embedded by callers).
void deliver(const std::string& out, const std::string& content) {
    if (out.empty())
        std::cout << content;
    else
        write_text_atomic(out, content);
}

ElicitedDensity parse_density(const std::string& text, const std::string& what) {
    const auto colon = text.find(':');
    if (colon == std::string::npos)
        throw ConfigError(what + ": expected kind:params, got '" + text + "'");
    const std::string kind = text.substr(0, colon);
    std::vector<double> ps;
    std::string item;
    std::istringstream in(text.substr(colon + 1));
    while (std::getline(in, item, ',')) ps.push_back(parse_double(item, what));
    if (kind == "point" && ps.size() == 1) return ElicitedDensity::point(ps[0]);
    if (kind == "uniform" && ps.size() == 2) return ElicitedDensity::uniform(ps[0], ps[1]);
    if (kind == "triangular" && ps.size() == 3)
        return ElicitedDensity::triangular(ps[0], ps[1], ps[2]);
    throw ConfigError(what + ": expected point:v | uniform:lo,hi | triangular:lo,mode,hi, got '" +
                      text + "'");
}

// ---- subcommand handlers ----

int run_ess(const GlobalOpts& g, const CLI::App* cmd, const std::vector<std::string>& points_flag,
            double r_flag, double rho_flag, const std::string& family_flag) {
    Ctx ctx = make_ctx(g);
    std::vector<std::string> paths = points_flag;
    if (paths.empty()) {
        const std::string from_file = ctx.doc.get("ess", "points").value_or("");
        if (!from_file.empty()) paths.push_back(from_file);
    }
    if (paths.empty()) throw ConfigError("ess.points: at least one points CSV is required");
    std::string joined;
    for (const auto& p : paths) joined += (joined.empty() ? "" : ",") + p;
    ctx.record("ess.points", joined);
    const Family family = parse_family(
        ctx.str(cmd->get_option("--family"), family_flag, "ess.family", "exponential"));
    const double r = ctx.num(cmd->get_option("--r"), r_flag, "ess.r", 1.0);
    const double rho = ctx.num(cmd->get_option("--rho"), rho_flag, "ess.rho", 0.5);
    const std::string out = g.out_v(ctx);
    const std::string hash = ctx.finish("ess");

    std::vector<ClusterConfig> clusters;
    for (const auto& p : paths) clusters.push_back({read_points_csv(p), family, r, rho});
    ordered_json j;
    j["config_hash"] = hash;
    j["config"] = ctx.config_json();
    j["clusters"] = ordered_json::array();
    double total = 0.0;
    for (const auto& c : clusters) {
        const EssResult res = cluster_ess(c);
        total += res.n_star;
        j["clusters"].push_back({{"n_star", res.n_star},
                                 {"n", res.n},
                                 {"s_bar", res.s_bar},
                                 {"icc_sp", res.icc_sp}});
    }
    j["design_ess"] = total;
    deliver(out, j.dump(2) + "\n");
    return 0;
}

int run_stilde(const GlobalOpts& g, const CLI::App* cmd, const std::string& family_flag,
               const std::string& sampling_flag, const std::string& shape_flag, double r_flag,
               double scale_flag, int n_flag) {
    Ctx ctx = make_ctx(g);
    const Family family = parse_family(
        ctx.str(cmd->get_option("--family"), family_flag, "stilde.family", "exponential"));
    const Sampling sampling = parse_sampling(
        ctx.str(cmd->get_option("--sampling"), sampling_flag, "stilde.sampling", "simple"));
    const Shape shape =
        parse_shape(ctx.str(cmd->get_option("--shape"), shape_flag, "stilde.shape", "disc"));
    const double r = ctx.num(cmd->get_option("--r"), r_flag, "stilde.r", 0.5);
    const double scale = ctx.num(cmd->get_option("--R"), scale_flag, "stilde.R", 1.0);
    const int n = ctx.num_i(cmd->get_option("--n"), n_flag, "stilde.n", 20);
    const std::string out = g.out_v(ctx);
    const std::string hash = ctx.finish("stilde");

    const Preset& preset = find_preset(family, sampling, shape);
    const double q = ratio_q(sampling, r, scale, n);
    const double st = s_tilde(preset.spec, q);
    std::cout << fmt_sig6(st) << "\n";
    if (!out.empty()) {
        ordered_json j;
        j["config_hash"] = hash;
        j["config"] = ctx.config_json();
        j["q"] = q;
        j["s_tilde"] = st;
        j["form"] = form_name(preset.spec.form);
        j["coeffs"] = preset.spec.coeffs;
        deliver(out, j.dump(2) + "\n");
    }
    return 0;
}

int run_fit(const GlobalOpts& g, const CLI::App* cmd, const std::string& family_flag,
            const std::string& sampling_flag, const std::string& shape_flag,
            const std::string& draws_out) {
    Ctx ctx = make_ctx(g);
    const Family family = parse_family(
        ctx.str(cmd->get_option("--family"), family_flag, "fit.family", "exponential"));
    const Sampling sampling = parse_sampling(
        ctx.str(cmd->get_option("--sampling"), sampling_flag, "fit.sampling", "simple"));
    const Shape shape =
        parse_shape(ctx.str(cmd->get_option("--shape"), shape_flag, "fit.shape", "disc"));
    const std::uint64_t seed = g.seed_v(ctx);
    const int replicates = g.reps_v(ctx);
    const std::string out = g.out_v(ctx);
    const std::string hash = ctx.finish("fit");

    const auto draws = simulate_cell(family, sampling, shape, replicates, seed);
    if (!draws_out.empty()) write_text_atomic(draws_out, draws_to_csv(draws));
    std::vector<std::pair<double, double>> data;
    data.reserve(draws.size());
    for (const auto& d : draws) data.emplace_back(d.q, d.s);
    const auto fits =
        fit_approximation(data, {Form::Algebraic, Form::Tanh, Form::Logistic, Form::Cubic});
    ordered_json j;
    j["config_hash"] = hash;
    j["config"] = ctx.config_json();
    j["family"] = family_name(family);
    j["sampling"] = sampling_name(sampling);
    j["shape"] = shape_name(shape);
    j["fits"] = ordered_json::array();
    for (const auto& f : fits)
        j["fits"].push_back({{"form", form_name(f.form)},
                             {"coeffs", f.coeffs},
                             {"mse", f.mse},
                             {"converged", f.converged}});
    deliver(out, j.dump(2) + "\n");
    return 0;
}

int run_regen(const GlobalOpts& g) {
    Ctx ctx = make_ctx(g);
    const std::uint64_t seed = g.seed_v(ctx);
    const int replicates = g.reps_v(ctx);
    const std::string out = g.out_v(ctx);
    const std::string format = g.format_v(ctx, "json");
    if (format != "json") throw ConfigError("run.format: regen-table1 emits JSON only");
    const std::string hash = ctx.finish("regen-table1");
    const auto cells = regenerate_table1(seed, replicates);
    deliver(out, cellfits_to_json(cells, hash));
    return 0;
}

int run_simulate(const GlobalOpts& g, const CLI::App* cmd, const std::string& scenario_flag,
                 int n_total_flag, const std::string& j_values_flag, double rho_flag,
                 double r_flag, const std::string& family_flag, const std::string& scheme_flag,
                 double density_flag, int m_flag, double p_flag) {
    Ctx ctx = make_ctx(g);
    ScenarioConfig cfg;
    cfg.kind = parse_scenario_kind(
        ctx.str(cmd->get_option("--scenario"), scenario_flag, "simulate.scenario", "fixed_mp"));
    cfg.N = ctx.num_i(cmd->get_option("--n-total"), n_total_flag, "simulate.n_total", 200);
    cfg.j_values = ctx.ints(cmd->get_option("--j-values"), j_values_flag, "simulate.j_values",
                            cfg.effective_j_values());
    cfg.rho = ctx.num(cmd->get_option("--rho"), rho_flag, "simulate.rho", 0.5);
    cfg.r = ctx.num(cmd->get_option("--r"), r_flag, "simulate.r", 0.5);
    cfg.family = parse_family(
        ctx.str(cmd->get_option("--family"), family_flag, "simulate.family", "exponential"));
    cfg.scheme = parse_sampling(
        ctx.str(cmd->get_option("--scheme"), scheme_flag, "simulate.scheme", "simple"));
    cfg.density = ctx.num(cmd->get_option("--density"), density_flag, "simulate.density", 100.0);
    cfg.m_fixed = ctx.num_i(cmd->get_option("--m"), m_flag, "simulate.m", 20);
    cfg.p_fixed = ctx.num(cmd->get_option("--p"), p_flag, "simulate.p", 1.0);
    cfg.replicates = g.reps_v(ctx);
    cfg.seed = g.seed_v(ctx);
    const std::string out = g.out_v(ctx);
    const std::string format = g.format_v(ctx, "csv");
    const std::string hash = ctx.finish("simulate");

    const ScenarioResult result = run_scenario(cfg);
    const std::string csv = scenario_csv(result, hash);
    ordered_json j;
    j["config_hash"] = hash;
    j["config"] = ctx.config_json();
    j["rows"] = ordered_json::array();
    for (const auto& row : result.rows)
        j["rows"].push_back({{"J", row.J},
                             {"m", row.m},
                             {"p", row.p},
                             {"mean_ess_exact", row.mean_ess_exact},
                             {"sd_ess_exact", row.sd_ess_exact},
                             {"ess_approx", row.ess_approx}});
    if (format == "csv") deliver(out, csv);
    if (format == "json") deliver(out, j.dump(2) + "\n");
    if (format == "both") {
        if (out.empty()) throw ConfigError("run.out: --format both needs --out as a path prefix");
        write_text_atomic(out + ".csv", csv);
        write_text_atomic(out + ".json", j.dump(2) + "\n");
    }
    return 0;
}

int run_compare(const GlobalOpts& g, const CLI::App* cmd, const std::string& family_flag,
                const std::string& sampling_flag, double rho_flag, double r_flag, double r0_flag,
                int m_base_flag, double p_base_flag, int m_alt_flag, double p_alt_flag,
                int j_max_flag) {
    Ctx ctx = make_ctx(g);
    CompareSpec spec;
    spec.family = parse_family(
        ctx.str(cmd->get_option("--family"), family_flag, "compare.family", "exponential"));
    spec.sampling = parse_sampling(
        ctx.str(cmd->get_option("--sampling"), sampling_flag, "compare.sampling", "simple"));
    spec.rho = ctx.num(cmd->get_option("--rho"), rho_flag, "compare.rho", 0.5);
    spec.r = ctx.num(cmd->get_option("--r"), r_flag, "compare.r", 1.0);
    spec.r0 = ctx.num(cmd->get_option("--r0"), r0_flag, "compare.r0", 1.0);
    spec.m_base = ctx.num_i(cmd->get_option("--m-base"), m_base_flag, "compare.m_base", 1);
    spec.p_base = ctx.num(cmd->get_option("--p-base"), p_base_flag, "compare.p_base", 1.0);
    spec.m_alt = ctx.num_i(cmd->get_option("--m-alt"), m_alt_flag, "compare.m_alt", 1);
    spec.p_alt = ctx.num(cmd->get_option("--p-alt"), p_alt_flag, "compare.p_alt", 1.0);
    spec.j_max = ctx.num_i(cmd->get_option("--j-max"), j_max_flag, "compare.j_max", 30);
    const std::string out = g.out_v(ctx);
    const std::string format = g.format_v(ctx, "csv");
    const std::string hash = ctx.finish("compare");

    const CompareResult result = compare_strategies(spec);
    std::string csv = compare_csv(result, hash);
    char buf[512];
    std::snprintf(buf, sizeof(buf),
                  "# base_peak_j=%d base_peak_ess=%.10g base_peak_p=%.10g\n"
                  "# alt_peak_j=%d alt_peak_ess=%.10g\n"
                  "# base_n=%.10g required_n_alt=%.10g n_drop=%.10g\n",
                  result.peak_j_base, result.peak_ess_base, result.peak_p_base, result.peak_j_alt,
                  result.peak_ess_alt, result.base_n, result.required_n_alt, result.n_drop);
    csv += buf;
    ordered_json j;
    j["config_hash"] = hash;
    j["config"] = ctx.config_json();
    j["base_peak_j"] = result.peak_j_base;
    j["base_peak_ess"] = result.peak_ess_base;
    j["base_peak_p"] = result.peak_p_base;
    j["alt_peak_j"] = result.peak_j_alt;
    j["alt_peak_ess"] = result.peak_ess_alt;
    j["base_n"] = result.base_n;
    j["required_n_alt"] = result.required_n_alt;
    j["n_drop"] = result.n_drop;
    j["rows"] = ordered_json::array();
    for (const auto& row : result.rows)
        j["rows"].push_back({{"strategy", row.strategy},
                             {"J", row.J},
                             {"m", row.m},
                             {"p", row.p},
                             {"n", row.n},
                             {"N", row.N},
                             {"ess_approx", row.ess}});
    if (format == "csv") deliver(out, csv);
    if (format == "json") deliver(out, j.dump(2) + "\n");
    if (format == "both") {
        if (out.empty()) throw ConfigError("run.out: --format both needs --out as a path prefix");
        write_text_atomic(out + ".csv", csv);
        write_text_atomic(out + ".json", j.dump(2) + "\n");
    }
    return 0;
}

int run_optimize(const GlobalOpts& g, const CLI::App* cmd, const std::string& family_flag,
                 const std::string& sampling_flag, double r_flag, double rho_flag, double r0_flag,
                 double cm_flag, double cn_flag, double budget_flag, int j_min_flag,
                 int j_max_flag, int m_max_flag, const std::string& scope_flag) {
    Ctx ctx = make_ctx(g);
    DesignProblem pr;
    pr.family = parse_family(
        ctx.str(cmd->get_option("--family"), family_flag, "optimize.family", "exponential"));
    pr.sampling = parse_sampling(
        ctx.str(cmd->get_option("--sampling"), sampling_flag, "optimize.sampling", "simple"));
    pr.r = ctx.num(cmd->get_option("--r"), r_flag, "optimize.r", 1.0);
    pr.rho = ctx.num(cmd->get_option("--rho"), rho_flag, "optimize.rho", 0.5);
    pr.density.r0 = ctx.num(cmd->get_option("--r0"), r0_flag, "optimize.r0", 1.0);
    pr.cost.cm = ctx.num(cmd->get_option("--cm"), cm_flag, "optimize.cm", 1.0);
    pr.cost.cn = ctx.num(cmd->get_option("--cn"), cn_flag, "optimize.cn", 1.0);
    pr.cost.C = ctx.num(cmd->get_option("--budget"), budget_flag, "optimize.budget", 1000.0);
    pr.cost.j_min = ctx.num_i(cmd->get_option("--j-min"), j_min_flag, "optimize.j_min", 1);
    pr.cost.j_max = ctx.num_i(cmd->get_option("--j-max"), j_max_flag, "optimize.j_max", 20);
    pr.m_max = ctx.num_i(cmd->get_option("--m-max"), m_max_flag, "optimize.m_max", 0);
    pr.scope = parse_budget_scope(ctx.str(cmd->get_option("--budget-scope"), scope_flag,
                                          "optimize.budget_scope", "total"));
    const std::string out = g.out_v(ctx);
    const std::string format = g.format_v(ctx, "json");
    if (format != "json") throw ConfigError("run.format: optimize emits JSON only");
    const std::string hash = ctx.finish("optimize");

    const DesignSolution sol = optimize_design(pr);
    char line[256];
    std::snprintf(line, sizeof(line), "%6s %6s %8s %8s %12s %12s\n", "J", "m", "p", "N", "ess",
                  "cost");
    std::string table = line;
    std::snprintf(line, sizeof(line), "%6d %6d %8.4f %8lld %12.4f %12.2f\n", sol.J, sol.m, sol.p,
                  sol.N, sol.ess, sol.cost);
    table += line;
    std::cout << table;
    ordered_json j;
    j["config_hash"] = hash;
    j["config"] = ctx.config_json();
    j["J"] = sol.J;
    j["m"] = sol.m;
    j["p"] = sol.p;
    j["N"] = sol.N;
    j["ess"] = sol.ess;
    j["cost"] = sol.cost;
    j["cost_total"] = sol.cost_total;
    j["budget_scope"] = budget_scope_name(pr.scope);
    j["feasible"] = sol.feasible;
    if (out.empty())
        std::cout << j.dump(2) << "\n";
    else
        write_text_atomic(out, j.dump(2) + "\n");
    return 0;
}

int run_rho_dichot(const GlobalOpts& g, const CLI::App* cmd, double p_flag, double p_cond_flag) {
    Ctx ctx = make_ctx(g);
    const double pm = ctx.num(cmd->get_option("--p"), p_flag, "elicit.p_marginal", 0.5);
    const double pc = ctx.num(cmd->get_option("--p-cond"), p_cond_flag, "elicit.p_cond", 0.5);
    const bool allow = ctx.flag(cmd->get_option("--allow-gt1"), "elicit.allow_gt1", false);
    const std::string out = g.out_v(ctx);
    const std::string hash = ctx.finish("rho-dichot");
    const double rho = rho_dichotomous(pm, pc, allow);
    std::cout << fmt_sig6(rho) << "\n";
    if (!out.empty()) {
        ordered_json j;
        j["config_hash"] = hash;
        j["config"] = ctx.config_json();
        j["rho"] = rho;
        deliver(out, j.dump(2) + "\n");
    }
    return 0;
}

int run_elicit(const GlobalOpts& g, const CLI::App* cmd, double pm_flag, double pc_flag,
               double ratio_flag, double ilo_flag, double ihi_flag,
               double ib_flag, int avg_j_flag, int avg_n_flag, double avg_R_flag,
               const std::string& avg_family_flag, const std::string& avg_sampling_flag,
               const std::string& rho_density_flag, const std::string& r_density_flag,
               int nodes_flag) {
    Ctx ctx = make_ctx(g);
    ordered_json j;
    j["conversions"] = ordered_json::array();
    std::string lines;

    const bool has_dichot = cmd->get_option("--p-marginal")->count() || ctx.doc.has("elicit", "p_marginal");
    if (has_dichot) {
        const double pm = ctx.num(cmd->get_option("--p-marginal"), pm_flag, "elicit.p_marginal", 0.5);
        const double pc = ctx.num(cmd->get_option("--p-cond"), pc_flag, "elicit.p_cond", pm);
        const bool allow = ctx.flag(cmd->get_option("--allow-gt1"), "elicit.allow_gt1", false);
        const double rho = rho_dichotomous(pm, pc, allow);
        j["conversions"].push_back({{"source", "dichotomous"},
                                    {"p_marginal", pm},
                                    {"p_cond", pc},
                                    {"rho", rho}});
        lines += "rho = " + fmt_sig6(rho) + "  (dichotomous: p_marginal " + fmt_sig6(pm) +
                 ", p_cond " + fmt_sig6(pc) + ")\n";
    }
    const bool has_ratio = cmd->get_option("--sd-ratio")->count() || ctx.doc.has("elicit", "sd_ratio");
    if (has_ratio) {
        const double ratio = ctx.num(cmd->get_option("--sd-ratio"), ratio_flag, "elicit.sd_ratio", 1.0);
        const double rho = rho_from_sd_ratio(ratio);
        j["conversions"].push_back({{"source", "sd_ratio"}, {"ratio", ratio}, {"rho", rho}});
        lines += "rho = " + fmt_sig6(rho) + "  (sd ratio " + fmt_sig6(ratio) + ")\n";
    }
    const bool has_interval = cmd->get_option("--interval-lo")->count() || ctx.doc.has("elicit", "interval_lo");
    if (has_interval) {
        const double lo = ctx.num(cmd->get_option("--interval-lo"), ilo_flag, "elicit.interval_lo", 0.0);
        const double hi = ctx.num(cmd->get_option("--interval-hi"), ihi_flag, "elicit.interval_hi", 1.0);
        const double b = ctx.num(cmd->get_option("--interval-b"), ib_flag, "elicit.interval_b", 0.95);
        const double sd = sd_from_interval(lo, hi, b);
        j["conversions"].push_back(
            {{"source", "interval"}, {"lo", lo}, {"hi", hi}, {"b", b}, {"sd", sd}});
        lines += "sd = " + fmt_sig6(sd) + "  (interval [" + fmt_sig6(lo) + ", " + fmt_sig6(hi) +
                 "] at mass " + fmt_sig6(b) + ")\n";
    }
    const bool has_avg = cmd->get_option("--rho-density")->count() || ctx.doc.has("elicit", "rho_density");
    if (has_avg) {
        AveragingDesign design;
        design.J = ctx.num_i(cmd->get_option("--avg-j"), avg_j_flag, "elicit.avg_j", 1);
        design.n = ctx.num_i(cmd->get_option("--avg-n"), avg_n_flag, "elicit.avg_n", 20);
        design.R = ctx.num(cmd->get_option("--avg-R"), avg_R_flag, "elicit.avg_R", 1.0);
        const Family family = parse_family(ctx.str(cmd->get_option("--avg-family"),
                                                   avg_family_flag, "elicit.avg_family",
                                                   "exponential"));
        const Sampling sampling = parse_sampling(ctx.str(cmd->get_option("--avg-sampling"),
                                                         avg_sampling_flag,
                                                         "elicit.avg_sampling", "simple"));
        const std::string rd = ctx.str(cmd->get_option("--rho-density"), rho_density_flag,
                                       "elicit.rho_density", "point:0.5");
        const std::string rr = ctx.str(cmd->get_option("--r-density"), r_density_flag,
                                       "elicit.r_density", "point:1.0");
        const int nodes = ctx.num_i(cmd->get_option("--nodes"), nodes_flag, "elicit.nodes", 64);
        const ElicitedDensity h_rho = parse_density(rd, "elicit.rho_density");
        const ElicitedDensity h_r = parse_density(rr, "elicit.r_density");
        const Preset& preset = find_preset(family, sampling, Shape::Disc);
        const double avg = averaged_ess(design, h_r, h_rho, preset.spec, nodes);
        j["averaged_ess"] = avg;
        lines += "averaged ess = " + fmt_sig6(avg) + "  (J " + std::to_string(design.J) + ", n " +
                 std::to_string(design.n) + ", R " + fmt_sig6(design.R) + ")\n";
    }
    if (lines.empty())
        throw ConfigError("elicit: nothing to do (provide dichotomous, sd-ratio, interval or "
                          "density inputs)");
    const std::string out = g.out_v(ctx);
    const std::string hash = ctx.finish("elicit");
    j["config_hash"] = hash;
    j["config"] = ctx.config_json();
    std::cout << lines;
    if (!out.empty()) deliver(out, j.dump(2) + "\n");
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"spatess: effective sample size and survey design under spatial correlation"};
    app.require_subcommand(1);
    GlobalOpts g;
    g.seed_opt = app.add_option("--seed", g.seed, "RNG seed (default 1)");
    g.reps_opt = app.add_option("--replicates", g.replicates, "simulation replicates (default 500)");
    g.out_opt = app.add_option("--out", g.out, "output file path (default: stdout)");
    g.format_opt = app.add_option("--format", g.format, "output format: csv | json | both");
    app.add_option("--config", g.config_path, "INI config file");

    // ess
    auto* ess_cmd = app.add_subcommand("ess", "exact effective sample size from points CSVs")->fallthrough();
    std::vector<std::string> ess_points;
    double ess_r = 1.0, ess_rho = 0.5;
    std::string ess_family = "exponential";
    ess_cmd->add_option("--points", ess_points, "points CSV (repeatable; one cluster each)");
    ess_cmd->add_option("--family", ess_family, "gaussian | exponential | kbessel");
    ess_cmd->add_option("--r", ess_r, "correlation range");
    ess_cmd->add_option("--rho", ess_rho, "spatially structured variance share");

    // stilde
    auto* st_cmd = app.add_subcommand("stilde", "closed-form mean-correlation approximation")->fallthrough();
    std::string st_family = "exponential", st_sampling = "simple", st_shape = "disc";
    double st_r = 0.5, st_scale = 1.0;
    int st_n = 20;
    st_cmd->add_option("--family", st_family, "gaussian | exponential | kbessel");
    st_cmd->add_option("--sampling", st_sampling, "simple | spatial");
    st_cmd->add_option("--shape", st_shape, "disc | rect");
    st_cmd->add_option("--r", st_r, "correlation range");
    st_cmd->add_option("--R", st_scale, "region scale (disc radius or sqrt(area))");
    st_cmd->add_option("--n", st_n, "sampled locations (spatial ratio only)");

    // fit
    auto* fit_cmd = app.add_subcommand("fit", "simulate one cell and fit all candidate forms")->fallthrough();
    std::string fit_family = "exponential", fit_sampling = "simple", fit_shape = "disc";
    std::string fit_draws_out;
    fit_cmd->add_option("--family", fit_family, "gaussian | exponential | kbessel");
    fit_cmd->add_option("--sampling", fit_sampling, "simple | spatial");
    fit_cmd->add_option("--shape", fit_shape, "disc | rect");
    fit_cmd->add_option("--dump-draws", fit_draws_out, "also write the (q, s) draws CSV here");

    // regen-table1
    app.add_subcommand("regen-table1", "regenerate every family/sampling/shape preset cell")->fallthrough();

    // simulate
    auto* sim_cmd = app.add_subcommand("simulate", "cluster-count sweep: exact ESS vs approximation")->fallthrough();
    std::string sim_scenario = "fixed_mp", sim_j_values, sim_family = "exponential",
                sim_scheme = "simple";
    int sim_n_total = 200, sim_m = 20;
    double sim_rho = 0.5, sim_r = 0.5, sim_density = 100.0, sim_p = 1.0;
    sim_cmd->add_option("--scenario", sim_scenario, "fixed_mp | fixed_m");
    sim_cmd->add_option("--n-total", sim_n_total, "total surveyed target N");
    sim_cmd->add_option("--j-values", sim_j_values, "comma-separated cluster counts");
    sim_cmd->add_option("--rho", sim_rho, "spatially structured variance share");
    sim_cmd->add_option("--r", sim_r, "correlation range");
    sim_cmd->add_option("--family", sim_family, "gaussian | exponential | kbessel");
    sim_cmd->add_option("--scheme", sim_scheme, "simple | spatial");
    sim_cmd->add_option("--density", sim_density, "enumerated points per unit disc");
    sim_cmd->add_option("--m", sim_m, "enumerated per cluster (fixed_m)");
    sim_cmd->add_option("--p", sim_p, "sampled proportion (fixed_mp)");

    // compare
    auto* cmp_cmd = app.add_subcommand("compare", "two fixed-(m, p) strategies over a J sweep")->fallthrough();
    std::string cmp_family = "exponential", cmp_sampling = "simple";
    double cmp_rho = 0.5, cmp_r = 1.0, cmp_r0 = 1.0, cmp_p_base = 1.0, cmp_p_alt = 1.0;
    int cmp_m_base = 1, cmp_m_alt = 1, cmp_j_max = 30;
    cmp_cmd->add_option("--family", cmp_family, "gaussian | exponential | kbessel");
    cmp_cmd->add_option("--sampling", cmp_sampling, "simple | spatial");
    cmp_cmd->add_option("--rho", cmp_rho, "spatially structured variance share");
    cmp_cmd->add_option("--r", cmp_r, "correlation range");
    cmp_cmd->add_option("--r0", cmp_r0, "radius scale: R(m) = r0 sqrt(m)");
    cmp_cmd->add_option("--m-base", cmp_m_base, "base strategy enumerated per cluster");
    cmp_cmd->add_option("--p-base", cmp_p_base, "base strategy sampled proportion");
    cmp_cmd->add_option("--m-alt", cmp_m_alt, "alt strategy enumerated per cluster");
    cmp_cmd->add_option("--p-alt", cmp_p_alt, "alt strategy sampled proportion");
    cmp_cmd->add_option("--j-max", cmp_j_max, "sweep J = 1..j_max");

    // optimize
    auto* opt_cmd = app.add_subcommand("optimize", "budget-constrained (J, m, p) design search")->fallthrough();
    std::string opt_family = "exponential", opt_sampling = "simple", opt_scope = "total";
    double opt_r = 1.0, opt_rho = 0.5, opt_r0 = 1.0, opt_cm = 1.0, opt_cn = 1.0,
           opt_budget = 1000.0;
    int opt_j_min = 1, opt_j_max = 20, opt_m_max = 0;
    opt_cmd->add_option("--family", opt_family, "gaussian | exponential | kbessel");
    opt_cmd->add_option("--sampling", opt_sampling, "simple | spatial");
    opt_cmd->add_option("--r", opt_r, "correlation range");
    opt_cmd->add_option("--rho", opt_rho, "spatially structured variance share");
    opt_cmd->add_option("--r0", opt_r0, "radius scale: R(m) = r0 sqrt(m)");
    opt_cmd->add_option("--cm", opt_cm, "cost per enumerated location");
    opt_cmd->add_option("--cn", opt_cn, "cost per survey");
    opt_cmd->add_option("--budget", opt_budget, "total budget C");
    opt_cmd->add_option("--j-min", opt_j_min, "minimum cluster count");
    opt_cmd->add_option("--j-max", opt_j_max, "maximum cluster count");
    opt_cmd->add_option("--m-max", opt_m_max, "cap on enumerated per cluster (0 = from budget)");
    opt_cmd->add_option("--budget-scope", opt_scope, "total | survey-only");

    // rho-dichot
    auto* rd_cmd = app.add_subcommand("rho-dichot", "rho from marginal + nugget conditional")->fallthrough();
    double rd_p = 0.5, rd_pc = 0.5;
    bool rd_allow = false;
    rd_cmd->add_option("--p", rd_p, "marginal probability");
    rd_cmd->add_option("--p-cond", rd_pc, "conditional probability at the nugget");
    rd_cmd->add_flag("--allow-gt1", rd_allow, "report rho > 1 instead of rejecting");

    // elicit
    auto* el_cmd = app.add_subcommand("elicit", "elicitation conversions and averaged ESS")->fallthrough();
    double el_pm = 0.5, el_pc = 0.5, el_ratio = 1.0, el_ilo = 0.0, el_ihi = 1.0, el_ib = 0.95,
           el_avg_R = 1.0;
    bool el_allow = false;
    int el_avg_j = 1, el_avg_n = 20, el_nodes = 64;
    std::string el_avg_family = "exponential", el_avg_sampling = "simple", el_rho_density,
                el_r_density;
    el_cmd->add_option("--p-marginal", el_pm, "marginal probability");
    el_cmd->add_option("--p-cond", el_pc, "conditional probability at the nugget");
    el_cmd->add_flag("--allow-gt1", el_allow, "report rho > 1 instead of rejecting");
    el_cmd->add_option("--sd-ratio", el_ratio, "close-pair to population sd ratio");
    el_cmd->add_option("--interval-lo", el_ilo, "credible interval lower end");
    el_cmd->add_option("--interval-hi", el_ihi, "credible interval upper end");
    el_cmd->add_option("--interval-b", el_ib, "credible interval mass");
    el_cmd->add_option("--avg-j", el_avg_j, "clusters for averaged ESS");
    el_cmd->add_option("--avg-n", el_avg_n, "sampled per cluster for averaged ESS");
    el_cmd->add_option("--avg-R", el_avg_R, "cluster radius for averaged ESS");
    el_cmd->add_option("--avg-family", el_avg_family, "gaussian | exponential | kbessel");
    el_cmd->add_option("--avg-sampling", el_avg_sampling, "simple | spatial");
    el_cmd->add_option("--rho-density", el_rho_density, "point:v | uniform:lo,hi | triangular:lo,mode,hi");
    el_cmd->add_option("--r-density", el_r_density, "point:v | uniform:lo,hi | triangular:lo,mode,hi");
    el_cmd->add_option("--nodes", el_nodes, "quadrature nodes per axis");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand("ess"))
            return run_ess(g, ess_cmd, ess_points, ess_r, ess_rho, ess_family);
        if (app.got_subcommand("stilde"))
            return run_stilde(g, st_cmd, st_family, st_sampling, st_shape, st_r, st_scale, st_n);
        if (app.got_subcommand("fit"))
            return run_fit(g, fit_cmd, fit_family, fit_sampling, fit_shape, fit_draws_out);
        if (app.got_subcommand("regen-table1")) return run_regen(g);
        if (app.got_subcommand("simulate"))
            return run_simulate(g, sim_cmd, sim_scenario, sim_n_total, sim_j_values, sim_rho,
                                sim_r, sim_family, sim_scheme, sim_density, sim_m, sim_p);
        if (app.got_subcommand("compare"))
            return run_compare(g, cmp_cmd, cmp_family, cmp_sampling, cmp_rho, cmp_r, cmp_r0,
                               cmp_m_base, cmp_p_base, cmp_m_alt, cmp_p_alt, cmp_j_max);
        if (app.got_subcommand("optimize"))
            return run_optimize(g, opt_cmd, opt_family, opt_sampling, opt_r, opt_rho, opt_r0,
                                opt_cm, opt_cn, opt_budget, opt_j_min, opt_j_max, opt_m_max,
                                opt_scope);
        if (app.got_subcommand("rho-dichot")) return run_rho_dichot(g, rd_cmd, rd_p, rd_pc);
        if (app.got_subcommand("elicit"))
            return run_elicit(g, el_cmd, el_pm, el_pc, el_ratio, el_ilo, el_ihi, el_ib,
                              el_avg_j, el_avg_n, el_avg_R, el_avg_family, el_avg_sampling,
                              el_rho_density, el_r_density, el_nodes);
        std::cerr << "error: no subcommand\n";
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return 4;
    } catch (const ComputeError& e) {
        std::cerr << "compute error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
