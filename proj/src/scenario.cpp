// Simulation sweeps over cluster count and the strategy comparison.
#include "spatess/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <optional>

#include "spatess/errors.hpp"
#include "spatess/ess.hpp"
#include "spatess/geometry.hpp"
#include "spatess/optimize.hpp"
#include "spatess/rng.hpp"

namespace spatess {

namespace {

struct PerJ {
    int J = 0;
    int n = 0;  // surveyed per cluster
    int m = 0;  // enumerated per cluster
    double p = 0.0;
};

PerJ resolve_j(const ScenarioConfig& cfg, int J) {
    PerJ out;
    out.J = J;
    out.n = cfg.N / J;
    if (cfg.kind == ScenarioKind::FixedMP) {
        const double m_exact = out.n / cfg.p_fixed;
        out.m = static_cast<int>(std::llround(m_exact));
        if (std::abs(out.m - m_exact) > 1e-9)
            throw ConfigError("scenario: n/p must be an integer enumerated count (J=" +
                              std::to_string(J) + " gives m=" + std::to_string(m_exact) + ")");
        out.p = cfg.p_fixed;
    } else {
        out.m = cfg.m_fixed;
        if (out.n > out.m)
            throw ConfigError("scenario: n = N/J exceeds the fixed m at J=" + std::to_string(J));
        out.p = static_cast<double>(out.n) / out.m;
    }
    return out;
}

// One cluster's sampled locations. FixedMP with p = 1 generates the sample
// directly under the scheme's layout; otherwise a uniform enumerated frame of
// m is generated and subsampled to n (taking all of it when n = m, since a
// fully sampled frame leaves no room for a spatial selection rule).
PointSet sampled_cluster(const ScenarioConfig& cfg, const PerJ& pj, const Region& region,
                         std::uint64_t frame_seed, std::uint64_t sub_seed) {
    if (cfg.kind == ScenarioKind::FixedMP && pj.n == pj.m) {
        return cfg.scheme == Sampling::Simple ? gen_uniform(region, pj.n, frame_seed)
                                              : gen_regular(region, pj.n, frame_seed);
    }
    const PointSet frame = gen_uniform(region, pj.m, frame_seed);
    if (pj.n == pj.m) return frame;
    if (cfg.scheme == Sampling::Simple) {
        std::vector<int> idx(frame.pts.size());
        std::iota(idx.begin(), idx.end(), 0);
        Rng rng(sub_seed);
        rng.shuffle(idx);
        PointSet out;
        out.scheme = Scheme::Uniform;
        out.seed = sub_seed;
        out.pts.reserve(pj.n);
        for (int i = 0; i < pj.n; ++i) out.pts.push_back(frame.pts[idx[i]]);
        return out;
    }
    return sample_inhibited(frame, pj.n, std::nullopt, 0, 0.0, sub_seed);
}

} // namespace

ScenarioKind parse_scenario_kind(const std::string& name) {
    if (name == "fixed_mp" || name == "fixed-mp" || name == "1") return ScenarioKind::FixedMP;
    if (name == "fixed_m" || name == "fixed-m" || name == "2") return ScenarioKind::FixedM;
    throw ConfigError("unknown scenario '" + name + "' (fixed_mp | fixed_m)");
}

const char* scenario_kind_name(ScenarioKind k) {
    return k == ScenarioKind::FixedMP ? "fixed_mp" : "fixed_m";
}

std::vector<int> ScenarioConfig::effective_j_values() const {
    if (!j_values.empty()) return j_values;
    if (kind == ScenarioKind::FixedMP) return {5, 10, 20, 25, 40, 50};
    return {10, 20, 25, 40, 50};  // FixedM: J >= N/m keeps n <= m
}

void ScenarioConfig::validate() const {
    if (N < 1) throw ConfigError("scenario: N must be >= 1");
    if (!(rho >= 0.0) || rho > 1.0) throw ConfigError("scenario: rho must be in [0, 1]");
    if (!(r > 0.0)) throw ConfigError("scenario: r must be > 0");
    if (!(density > 0.0)) throw ConfigError("scenario: density must be > 0");
    if (replicates < 1) throw ConfigError("scenario: replicates must be >= 1");
    if (kind == ScenarioKind::FixedMP) {
        if (!(p_fixed > 0.0) || p_fixed > 1.0)
            throw ConfigError("scenario: p must be in (0, 1]");
    } else {
        if (m_fixed < 1) throw ConfigError("scenario: m must be >= 1");
    }
    const auto js = effective_j_values();
    if (js.empty()) throw ConfigError("scenario: empty J grid");
    for (int J : js) {
        if (J < 1) throw ConfigError("scenario: J values must be >= 1");
        if (N % J != 0)
            throw ConfigError("scenario: N must be divisible by every J (violated at J=" +
                              std::to_string(J) + ")");
        resolve_j(*this, J);  // throws on m/p inconsistencies
    }
}

ScenarioResult run_scenario(const ScenarioConfig& cfg) {
    cfg.validate();
    ScenarioResult result;
    result.config = cfg;
    const auto js = cfg.effective_j_values();
    const Preset& preset = find_preset(cfg.family, cfg.scheme, Shape::Disc);

    for (std::size_t jdx = 0; jdx < js.size(); ++jdx) {
        const PerJ pj = resolve_j(cfg, js[jdx]);
        const Region region = Region::disc(std::sqrt(pj.m / cfg.density));
        const std::uint64_t j_seed = mix_seed(cfg.seed, jdx);

        double sum = 0.0, comp = 0.0, sumsq = 0.0;
        for (int rep = 0; rep < cfg.replicates; ++rep) {
            const std::uint64_t rep_seed = mix_seed(j_seed, rep);
            double ess = 0.0;
            for (int c = 0; c < pj.J; ++c) {
                ClusterConfig cluster;
                cluster.points = sampled_cluster(cfg, pj, region, mix_seed(rep_seed, 2 * c),
                                                 mix_seed(rep_seed, 2 * c + 1));
                cluster.family = cfg.family;
                cluster.r = cfg.r;
                cluster.rho = cfg.rho;
                ess += cluster_ess(cluster).n_star;
            }
            const double y = ess - comp;  // Kahan accumulation of the mean
            const double t = sum + y;
            comp = (t - sum) - y;
            sum = t;
            sumsq += ess * ess;
        }
        const double mean = sum / cfg.replicates;
        double sd = 0.0;
        if (cfg.replicates > 1) {
            const double var =
                std::max(0.0, (sumsq - cfg.replicates * mean * mean) / (cfg.replicates - 1));
            sd = std::sqrt(var);
        }

        // Approximation column: presets were fit on the unit disc, and the
        // correlation structure is jointly scale-invariant in (r, R), so the
        // ratio is evaluated at the unit-disc-equivalent (r/R, scale 1).
        const double q = ratio_q(cfg.scheme, cfg.r / region.scale(), 1.0, pj.n);
        const double approx = ess_approx(pj.J, pj.n, cfg.rho, s_tilde(preset.spec, q));

        result.rows.push_back({pj.J, pj.m, pj.p, mean, sd, approx});
    }
    return result;
}

std::string scenario_csv(const ScenarioResult& result, const std::string& config_hash) {
    std::string out;
    if (!config_hash.empty()) out += "# config_hash=" + config_hash + "\n";
    out += "scenario,family,scheme,rho,r,J,mean_ess_exact,sd_ess_exact,ess_approx\n";
    char buf[256];
    for (const auto& row : result.rows) {
        std::snprintf(buf, sizeof(buf), "%s,%s,%s,%.10g,%.10g,%d,%.10g,%.10g,%.10g\n",
                      scenario_kind_name(result.config.kind), family_name(result.config.family),
                      sampling_name(result.config.scheme), result.config.rho, result.config.r,
                      row.J, row.mean_ess_exact, row.sd_ess_exact, row.ess_approx);
        out += buf;
    }
    return out;
}

CompareResult compare_strategies(const CompareSpec& spec) {
    if (!(spec.rho >= 0.0) || spec.rho > 1.0) throw ConfigError("compare: rho must be in [0, 1]");
    if (!(spec.r > 0.0) || !(spec.r0 > 0.0)) throw ConfigError("compare: r and r0 must be > 0");
    if (spec.m_base < 1 || spec.m_alt < 1) throw ConfigError("compare: m must be >= 1");
    if (!(spec.p_base > 0.0) || spec.p_base > 1.0 || !(spec.p_alt > 0.0) || spec.p_alt > 1.0)
        throw ConfigError("compare: p must be in (0, 1]");
    if (spec.j_max < 1) throw ConfigError("compare: j_max must be >= 1");
    const double n_base = spec.m_base * spec.p_base;
    const double n_alt = spec.m_alt * spec.p_alt;
    if (std::abs(n_base - n_alt) > 1e-9)
        throw ConfigError("compare: strategies target different surveyed counts "
                          "(m_base p_base != m_alt p_alt)");
    if (n_base < 1.0) throw ConfigError("compare: m p < 1 leaves clusters empty");

    CompareResult out;
    out.base_n = n_base;
    auto sweep = [&](const char* tag, int m, double p, int& peak_j, double& peak_ess) {
        peak_j = 0;
        peak_ess = -1.0;
        for (int J = 1; J <= spec.j_max; ++J) {
            const double ess =
                objective_ess(J, m, p, spec.family, spec.sampling, spec.r, spec.rho, spec.r0);
            const double n = m * p;
            out.rows.push_back(
                {tag, J, m, p, n, std::llround(static_cast<double>(J) * m * p), ess});
            if (ess > peak_ess) {
                peak_ess = ess;
                peak_j = J;
            }
        }
    };
    sweep("base", spec.m_base, spec.p_base, out.peak_j_base, out.peak_ess_base);
    out.peak_p_base = spec.p_base;
    sweep("alt", spec.m_alt, spec.p_alt, out.peak_j_alt, out.peak_ess_alt);

    // Per-cluster n the alt strategy needs (at the base strategy's peak J) to
    // match the base peak ESS; root found by bisection on n in (0, m_alt].
    const double target = out.peak_ess_base;
    const int J = out.peak_j_base;
    auto ess_at_n = [&](double n) {
        return objective_ess(J, spec.m_alt, n / spec.m_alt, spec.family, spec.sampling, spec.r,
                             spec.rho, spec.r0);
    };
    double lo = 1.0, hi = static_cast<double>(spec.m_alt);
    if (ess_at_n(lo) > target || ess_at_n(hi) < target) {
        out.required_n_alt = std::numeric_limits<double>::quiet_NaN();
        out.n_drop = std::numeric_limits<double>::quiet_NaN();
    } else {
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            (ess_at_n(mid) < target ? lo : hi) = mid;
        }
        out.required_n_alt = 0.5 * (lo + hi);
        out.n_drop = (out.base_n - out.required_n_alt) / out.base_n;
    }
    return out;
}

std::string compare_csv(const CompareResult& result, const std::string& config_hash) {
    std::string out;
    if (!config_hash.empty()) out += "# config_hash=" + config_hash + "\n";
    out += "strategy,J,m,p,n,N,ess_approx\n";
    char buf[256];
    for (const auto& row : result.rows) {
        std::snprintf(buf, sizeof(buf), "%s,%d,%d,%.10g,%.10g,%lld,%.10g\n", row.strategy.c_str(),
                      row.J, row.m, row.p, row.n, row.N, row.ess);
        out += buf;
    }
    return out;
}

} // namespace spatess
