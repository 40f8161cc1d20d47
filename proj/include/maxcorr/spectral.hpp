#pragma once

// The spectral basis psi_h and the midpoint grid used for Cramer-von Mises
// integrals over [0, pi].
//
//   S(lambda) = sum_{h=1}^{H} sqrt(n) gamma(h) psi_h(lambda),  C = int_0^pi S(lambda)^2 dlambda.

#include <Eigen/Core>

#include <memory>

#include "maxcorr/core_stats.hpp"

namespace maxcorr {

inline constexpr double kDefaultSpectralStep = 0.01;

/// psi_h(lambda) = sin(h lambda) / (h pi) for h >= 1, lambda / (2 pi) for h = 0.
double psi_basis(Index h, double lambda);

/// Midpoint rule on [0, pi] with step delta. pi is not a multiple of delta, so the
/// last cell is shorter and its node sits at that cell's midpoint.
struct SpectralGrid {
    double delta = kDefaultSpectralStep;
    Eigen::VectorXd midpoints;
    Eigen::VectorXd widths;

    static SpectralGrid make(double delta = kDefaultSpectralStep);
    Index size() const { return midpoints.size(); }
};

/// psi_h at every node, K x H (column h-1 holds lag h).
Eigen::MatrixXd psi_matrix(const SpectralGrid& grid, Index max_lag);

/// diag(sqrt(width)) * psi_matrix. For a vector a of autocovariances,
/// ||R a||^2 is the midpoint integral of (sum_h a_h psi_h)^2. Cached per (H, delta);
/// the returned matrix is shared read-only.
std::shared_ptr<const Eigen::MatrixXd> weighted_psi_matrix(Index max_lag, double delta = kDefaultSpectralStep);

/// n * int (sum_h gamma(h) psi_h)^2, with gamma holding lags 1..H.
double cvm_from_autocovariances(const Eigen::Ref<const Eigen::VectorXd>& gamma, Index n,
                                double delta = kDefaultSpectralStep);

}  // namespace maxcorr
