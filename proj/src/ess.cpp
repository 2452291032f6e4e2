#include "spatess/ess.hpp"

#include <cmath>

namespace spatess {

double ess_exact(const std::vector<double>& sigma, int N) {
    if (N < 1 || sigma.size() != static_cast<std::size_t>(N) * N)
        throw ComputeError("ess_exact: sigma must be N x N with N >= 1");
    double scale = 0.0;
    for (int i = 0; i < N; ++i) scale = std::max(scale, std::abs(sigma[static_cast<std::size_t>(i) * N + i]));
    if (scale == 0.0) scale = 1.0;
    for (int i = 0; i < N; ++i) {
        for (int j = i + 1; j < N; ++j) {
            double a = sigma[static_cast<std::size_t>(i) * N + j];
            double b = sigma[static_cast<std::size_t>(j) * N + i];
            if (std::abs(a - b) > 1e-9 * scale)
                throw ComputeError("ess_exact: sigma is not symmetric");
        }
    }
    double tr = 0.0;
    for (int i = 0; i < N; ++i) tr += sigma[static_cast<std::size_t>(i) * N + i];
    double quad = 0.0;
    for (double v : sigma) quad += v;
    if (!(quad > 0.0)) throw ComputeError("ess_exact: 1' Sigma 1 must be positive");
    return tr / quad * N;
}

std::vector<double> cluster_sigma(const ClusterConfig& cluster) {
    const int n = cluster.points.size();
    std::vector<double> sigma(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) sigma[static_cast<std::size_t>(i) * n + i] = 1.0;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            double d = std::hypot(cluster.points.pts[i].x - cluster.points.pts[j].x,
                                  cluster.points.pts[i].y - cluster.points.pts[j].y);
            double v = cluster.rho * correlation(cluster.family, d, cluster.r);
            sigma[static_cast<std::size_t>(i) * n + j] = v;
            sigma[static_cast<std::size_t>(j) * n + i] = v;
        }
    }
    return sigma;
}

EssResult cluster_ess(const ClusterConfig& cluster) {
    const int n = cluster.points.size();
    if (n < 1) throw ComputeError("cluster_ess: empty cluster");
    if (cluster.rho < 0.0 || cluster.rho > 1.0) throw ConfigError("rho must lie in [0,1]");
    EssResult out;
    out.n = n;
    if (n == 1) {
        out.n_star = 1.0;
        return out;
    }
    double sum_f = pair_sum_f(cluster.points, cluster.family, cluster.r);
    out.s_bar = sum_f / (static_cast<double>(n) * (n - 1));
    out.icc_sp = cluster.rho * out.s_bar;
    out.n_star = n / (1.0 + cluster.rho / n * sum_f);
    return out;
}

double design_ess(const std::vector<ClusterConfig>& clusters) {
    if (clusters.empty()) throw ComputeError("design_ess: empty cluster list");
    double total = 0.0;
    for (const auto& c : clusters) total += cluster_ess(c).n_star;
    return total;
}

double ess_compound(int J, int n, double icc) {
    if (J < 1 || n < 1) throw ConfigError("ess_compound requires J >= 1, n >= 1");
    if (icc < 0.0 || icc > 1.0) throw ConfigError("icc must lie in [0,1]");
    return static_cast<double>(J) * n / (1.0 + (n - 1) * icc);
}

double ess_approx(int J, double n, double rho, double s_tilde) {
    if (J < 1 || !(n >= 1.0)) throw ConfigError("ess_approx requires J >= 1, n >= 1");
    if (rho < 0.0 || rho > 1.0) throw ConfigError("rho must lie in [0,1]");
    if (s_tilde < 0.0 || s_tilde > 1.0) throw ConfigError("s_tilde must lie in [0,1]");
    return J * n / (1.0 + rho * s_tilde * (n - 1.0));
}

} // namespace spatess
