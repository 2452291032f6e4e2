#pragma once
// Effective sample size: exact matrix form, per-cluster variogram form,
// block-additive designs, compound symmetry, and the closed-form approximation.
#include <vector>

#include "spatess/geometry.hpp"

namespace spatess {

struct ClusterConfig {
    PointSet points;
    Family family = Family::Exponential;
    double r = 1.0;
    double rho = 0.5;
};

struct EssResult {
    double n_star = 0.0;
    int n = 0;
    double s_bar = 0.0;
    double icc_sp = 0.0;
};

// N* = tr(Sigma) / (1' Sigma 1) * N on an N x N symmetric matrix (row-major).
double ess_exact(const std::vector<double>& sigma, int N);

EssResult cluster_ess(const ClusterConfig& cluster);

// Sum of per-cluster n_star (independent clusters, block-diagonal Sigma).
double design_ess(const std::vector<ClusterConfig>& clusters);

// Jn / (1 + (n-1) icc)
double ess_compound(int J, int n, double icc);

// Jn / (1 + rho s_tilde (n-1)); n may be fractional (n = m p).
double ess_approx(int J, double n, double rho, double s_tilde);

// Unit-diagonal covariance (1-rho) I + rho F for one cluster.
std::vector<double> cluster_sigma(const ClusterConfig& cluster);

} // namespace spatess
