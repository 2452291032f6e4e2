// Simulation of (q, s) draws and bounded Levenberg least squares.
#include "spatess/fit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <utility>

#include "spatess/errors.hpp"
#include "spatess/geometry.hpp"
#include "spatess/rng.hpp"

#include "json.hpp"

namespace spatess {

namespace {

// ---- model evaluation and analytic Jacobians ----

int param_count(Form form) {
    switch (form) {
        case Form::Algebraic: return 2;
        case Form::Tanh: return 3;
        case Form::Logistic: return 3;
        case Form::Cubic: return 4;
    }
    return 0;
}

double model_value(Form form, const std::vector<double>& th, double q) {
    return eval_form(form, th, q);
}

// row = d model / d theta at q
void model_jacobian(Form form, const std::vector<double>& th, double q, double* row) {
    const double lq = std::log(q);
    switch (form) {
        case Form::Algebraic: {
            const double qb = std::pow(q, th[1]);
            const double u = 1.0 + th[0] * qb;
            row[0] = qb / (u * u);
            row[1] = th[0] * qb * lq / (u * u);
            break;
        }
        case Form::Tanh: {
            const double qg = std::pow(q, th[2]);
            const double t = std::tanh(th[1] * qg);
            const double sech2 = 1.0 - t * t;
            row[0] = t;
            row[1] = th[0] * sech2 * qg;
            row[2] = th[0] * sech2 * th[1] * qg * lq;
            break;
        }
        case Form::Logistic: {
            const double qg = std::pow(q, th[2]);
            const double w = std::exp(-th[1] * qg);
            const double den = (1.0 + w) * (1.0 + w);
            row[0] = 1.0 / (1.0 + w);
            row[1] = th[0] * w * qg / den;
            row[2] = th[0] * w * th[1] * qg * lq / den;
            break;
        }
        case Form::Cubic: {
            row[0] = 1.0;
            row[1] = q;
            row[2] = q * q;
            row[3] = q * q * q;
            break;
        }
    }
}

// Box constraints keep every form monotone-capable and bounded: the logistic
// requires all-positive coefficients and the tanh a positive exponent, which
// pins each family to its intended saturating orientation.
void clip_params(Form form, std::vector<double>& th) {
    auto clamp = [](double v, double lo, double hi) {
        if (!(v > lo)) return lo;
        if (v > hi) return hi;
        return v;
    };
    switch (form) {
        case Form::Algebraic:
            th[0] = clamp(th[0], 1e-8, 1e8);
            th[1] = clamp(th[1], 1e-8, 64.0);
            break;
        case Form::Tanh:
            th[0] = clamp(th[0], -1e8, 1e8);
            th[1] = clamp(th[1], -1e8, 1e8);
            th[2] = clamp(th[2], 1e-8, 64.0);
            break;
        case Form::Logistic:
            th[0] = clamp(th[0], 1e-8, 1e8);
            th[1] = clamp(th[1], 1e-8, 1e8);
            th[2] = clamp(th[2], 1e-8, 64.0);
            break;
        case Form::Cubic:
            break;
    }
}

const std::vector<std::vector<double>>& starts_for(Form form) {
    static const std::vector<std::vector<double>> alg = {
        {0.5, 1.0}, {1.0, 2.0}, {2.0, 1.5}, {0.9, 1.4}, {3.0, 1.0}};
    static const std::vector<std::vector<double>> tnh = {
        {1.0, 1.0, 1.0}, {0.7, 0.8, 1.3}, {1.0, 0.5, 2.0}, {0.9, 2.0, 1.0}, {0.6, 1.5, 0.9}};
    static const std::vector<std::vector<double>> lgs = {
        {1.0, 1.0, 1.0}, {0.9, 0.5, 1.5}, {1.2, 2.0, 1.0}, {0.8, 1.0, 0.8}, {1.5, 1.2, 1.1}};
    static const std::vector<std::vector<double>> cub = {{0.0, 0.0, 0.0, 0.0}};
    switch (form) {
        case Form::Algebraic: return alg;
        case Form::Tanh: return tnh;
        case Form::Logistic: return lgs;
        case Form::Cubic: return cub;
    }
    return cub;
}

double sse_of(Form form, const std::vector<double>& th,
              const std::vector<std::pair<double, double>>& data) {
    double sse = 0.0;
    for (const auto& d : data) {
        const double e = model_value(form, th, d.first) - d.second;
        sse += e * e;
    }
    return sse;
}

// Cholesky solve of A x = b for small p; returns false if not positive definite.
bool chol_solve(int p, const double* A, const double* b, double* x) {
    double L[16] = {0};
    for (int i = 0; i < p; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = A[i * p + j];
            for (int k = 0; k < j; ++k) s -= L[i * 4 + k] * L[j * 4 + k];
            if (i == j) {
                if (s <= 0.0) return false;
                L[i * 4 + j] = std::sqrt(s);
            } else {
                L[i * 4 + j] = s / L[j * 4 + j];
            }
        }
    }
    double y[4];
    for (int i = 0; i < p; ++i) {
        double s = b[i];
        for (int k = 0; k < i; ++k) s -= L[i * 4 + k] * y[k];
        y[i] = s / L[i * 4 + i];
    }
    for (int i = p - 1; i >= 0; --i) {
        double s = y[i];
        for (int k = i + 1; k < p; ++k) s -= L[k * 4 + i] * x[k];
        x[i] = s / L[i * 4 + i];
    }
    return true;
}

// Exact linear least squares for the cubic (normal equations).
bool fit_cubic(const std::vector<std::pair<double, double>>& data, std::vector<double>& th) {
    double A[16] = {0};
    double b[4] = {0};
    for (const auto& d : data) {
        const double phi[4] = {1.0, d.first, d.first * d.first, d.first * d.first * d.first};
        for (int i = 0; i < 4; ++i) {
            b[i] += phi[i] * d.second;
            for (int j = 0; j < 4; ++j) A[i * 4 + j] += phi[i] * phi[j];
        }
    }
    for (int i = 0; i < 4; ++i) A[i * 4 + i] *= 1.0 + 1e-12;
    double x[4];
    if (!chol_solve(4, A, b, x)) return false;
    th.assign(x, x + 4);
    return true;
}

// Damped Gauss-Newton (Levenberg) with box clipping; returns converged flag.
bool levenberg(Form form, const std::vector<std::pair<double, double>>& data,
               std::vector<double>& th, double& sse) {
    const int p = param_count(form);
    clip_params(form, th);
    sse = sse_of(form, th, data);
    double lambda = 1e-3;
    int stall = 0;
    bool converged = false;
    for (int iter = 0; iter < 400; ++iter) {
        double A[16] = {0};
        double g[4] = {0};
        double row[4] = {0};
        for (const auto& d : data) {
            model_jacobian(form, th, d.first, row);
            const double e = model_value(form, th, d.first) - d.second;
            for (int i = 0; i < p; ++i) {
                g[i] += row[i] * e;
                for (int j = 0; j <= i; ++j) A[i * p + j] += row[i] * row[j];
            }
        }
        for (int i = 0; i < p; ++i)
            for (int j = i + 1; j < p; ++j) A[i * p + j] = A[j * p + i];
        double gnorm = 0.0;
        for (int i = 0; i < p; ++i) gnorm = std::max(gnorm, std::abs(g[i]));
        if (gnorm <= 1e-12 * (1.0 + sse)) {
            converged = true;
            break;
        }
        bool accepted = false;
        while (lambda <= 1e14) {
            double Ad[16];
            double nb[4];
            double step[4];
            for (int i = 0; i < p; ++i) {
                nb[i] = -g[i];
                for (int j = 0; j < p; ++j) Ad[i * p + j] = A[i * p + j];
                Ad[i * p + i] += lambda * std::max(A[i * p + i], 1e-12);
            }
            if (chol_solve(p, Ad, nb, step)) {
                std::vector<double> trial(th);
                for (int i = 0; i < p; ++i) trial[i] += step[i];
                clip_params(form, trial);
                const double trial_sse = sse_of(form, trial, data);
                if (trial_sse < sse) {
                    const double rel = (sse - trial_sse) / (1.0 + sse);
                    th = trial;
                    sse = trial_sse;
                    lambda = std::max(lambda / 3.0, 1e-12);
                    stall = rel < 1e-13 ? stall + 1 : 0;
                    accepted = true;
                    break;
                }
            }
            lambda *= 4.0;
        }
        if (!accepted || stall >= 2) {
            converged = true;  // no descent direction left at machine precision
            break;
        }
    }
    return converged;
}

struct CellKey {
    Shape shape;
    Family family;
    Sampling sampling;
};

std::vector<CellKey> table_cells() {
    std::vector<CellKey> cells;
    for (Shape sh : {Shape::Disc, Shape::Rect})
        for (Family fam : {Family::Gaussian, Family::Exponential, Family::KBessel})
            for (Sampling sp : {Sampling::Simple, Sampling::Spatial})
                cells.push_back({sh, fam, sp});
    return cells;
}

} // namespace

std::pair<double, double> simulate_s(Family family, const Region& region, int n,
                                     double r, Sampling scheme, std::uint64_t seed) {
    if (n < 2) throw ConfigError("simulate_s: n must be >= 2");
    if (!(r > 0.0)) throw ConfigError("simulate_s: r must be > 0");
    const PointSet pts = scheme == Sampling::Simple ? gen_uniform(region, n, seed)
                                                    : gen_regular(region, n, seed);
    const double s = pair_sum_f(pts, family, r) / (static_cast<double>(n) * (n - 1));
    const double q = ratio_q(scheme, r, region.scale(), n);
    return {q, s};
}

std::vector<SimDraw> simulate_cell(Family family, Sampling sampling, Shape shape,
                                   int replicates, std::uint64_t seed) {
    if (replicates < 1) throw ConfigError("simulate_cell: replicates must be >= 1");
    std::vector<SimDraw> out;
    out.reserve(replicates);
    for (int rep = 0; rep < replicates; ++rep) {
        Rng par(mix_seed(seed, 2 * static_cast<std::uint64_t>(rep)));
        const double r = par.uniform(0.001, 2.0);
        const int n = par.uniform_int(10, 200);
        const Region region =
            shape == Shape::Disc ? Region::disc(1.0) : Region::rect(par.uniform(0.1, 1.0));
        const auto qs = simulate_s(family, region, n, r, sampling,
                                   mix_seed(seed, 2 * static_cast<std::uint64_t>(rep) + 1));
        out.push_back({qs.first, qs.second, n, r});
    }
    return out;
}

std::vector<FitOutcome> fit_approximation(const std::vector<std::pair<double, double>>& data,
                                          const std::vector<Form>& forms) {
    if (data.size() < 50) throw ConfigError("fit_approximation: need at least 50 points");
    for (const auto& d : data)
        if (!(d.first > 0.0)) throw ConfigError("fit_approximation: ratios must be > 0");
    std::vector<FitOutcome> out;
    for (Form form : forms) {
        FitOutcome best;
        best.form = form;
        best.mse = std::numeric_limits<double>::infinity();
        if (form == Form::Cubic) {
            std::vector<double> th;
            if (fit_cubic(data, th)) {
                best.coeffs = th;
                best.mse = sse_of(form, th, data) / static_cast<double>(data.size());
                best.converged = true;
            }
        } else {
            for (const auto& start : starts_for(form)) {
                std::vector<double> th = start;
                double sse = 0.0;
                const bool conv = levenberg(form, data, th, sse);
                const double mse = sse / static_cast<double>(data.size());
                if (mse < best.mse) {
                    best.coeffs = th;
                    best.mse = mse;
                    best.converged = conv;
                }
            }
        }
        out.push_back(std::move(best));
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const FitOutcome& a, const FitOutcome& b) { return a.mse < b.mse; });
    return out;
}

std::vector<CellFit> regenerate_table1(std::uint64_t seed, int replicates) {
    if (replicates < 500) throw ConfigError("regenerate_table1: replicates must be >= 500");
    std::vector<CellFit> out;
    const auto cells = table_cells();
    const std::vector<Form> all_forms = {Form::Algebraic, Form::Tanh, Form::Logistic, Form::Cubic};
    for (std::size_t idx = 0; idx < cells.size(); ++idx) {
        const CellKey& key = cells[idx];
        const std::uint64_t cell_seed = mix_seed(seed, 101 + idx);
        const auto draws = simulate_cell(key.family, key.sampling, key.shape, replicates, cell_seed);
        std::vector<std::pair<double, double>> data;
        data.reserve(draws.size());
        for (const auto& d : draws) data.emplace_back(d.q, d.s);
        CellFit fit;
        fit.family = key.family;
        fit.sampling = key.sampling;
        fit.shape = key.shape;
        fit.forms = fit_approximation(data, all_forms);
        fit.replicates = replicates;
        fit.seed = seed;
        out.push_back(std::move(fit));
    }
    return out;
}

std::string cellfits_to_json(const std::vector<CellFit>& cells, const std::string& config_hash) {
    nlohmann::ordered_json root;
    if (!config_hash.empty()) root["config_hash"] = config_hash;
    if (!cells.empty()) {
        root["seed"] = cells.front().seed;
        root["replicates"] = cells.front().replicates;
    }
    root["cells"] = nlohmann::ordered_json::array();
    for (const auto& cell : cells) {
        nlohmann::ordered_json jc;
        jc["shape"] = shape_name(cell.shape);
        jc["family"] = family_name(cell.family);
        jc["sampling"] = sampling_name(cell.sampling);
        jc["fits"] = nlohmann::ordered_json::array();
        for (const auto& f : cell.forms) {
            nlohmann::ordered_json jf;
            jf["form"] = form_name(f.form);
            jf["coeffs"] = f.coeffs;
            jf["mse"] = f.mse;
            jf["converged"] = f.converged;
            jc["fits"].push_back(std::move(jf));
        }
        root["cells"].push_back(std::move(jc));
    }
    return root.dump(2) + "\n";
}

std::string draws_to_csv(const std::vector<SimDraw>& draws) {
    std::string out = "q,s,n,r\n";
    char buf[128];
    for (const auto& d : draws) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%d,%.17g\n", d.q, d.s, d.n, d.r);
        out += buf;
    }
    return out;
}

} // namespace spatess
