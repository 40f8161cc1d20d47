#pragma once

// GARCH(1,1) variance recursion and Gaussian quasi-maximum likelihood.
//
// The recursion is the "iterated" one used for estimation:
//   sigma2_1 = omega,  sigma2_t = omega + alpha y_{t-1}^2 + beta sigma2_{t-1},  t >= 2,
// so no pre-sample values are needed.

#include <Eigen/Core>

#include <array>

#include "maxcorr/optimizer.hpp"

namespace maxcorr {

struct GarchParams {
    double omega = 1.0;
    double alpha = 0.1;
    double beta = 0.8;

    Eigen::Vector3d vec() const { return {omega, alpha, beta}; }
    static GarchParams from(const Eigen::Vector3d& v) { return {v(0), v(1), v(2)}; }
    /// omega, alpha, beta > 0 and alpha + beta <= 1.
    bool admissible() const;
};

struct GarchPath {
    Eigen::VectorXd sigma2;
    Eigen::MatrixXd dsigma2;  // n x 3, d sigma2_t / d(omega, alpha, beta); empty unless requested
};

GarchPath garch_variance(const Eigen::Ref<const Eigen::VectorXd>& y, const GarchParams& p,
                         bool with_derivatives = false);

/// s_t = (1/2) d ln sigma2_t / d theta, one row per observation.
Eigen::MatrixXd garch_half_log_score(const GarchPath& path);

/// (1/n) sum_t w_t (ln sigma2_t + y_t^2 / sigma2_t) / 2 and its gradient in theta.
/// An empty `weights` means unit weights.
double garch_qml_objective(const Eigen::Ref<const Eigen::VectorXd>& y, const GarchParams& p,
                           const Eigen::VectorXd& weights, Eigen::Vector3d* gradient = nullptr);

struct GarchFitOptions {
    BfgsOptions bfgs{};
    double boundary_tolerance = 1e-6;
};

struct GarchFit {
    GarchParams params;
    double objective = 0.0;
    int iterations = 0;
    bool converged = false;
    bool boundary = false;  // alpha + beta within boundary_tolerance of 1
};

/// The three fixed multi-start points, scaled by the mean square of y.
std::array<GarchParams, 3> garch_start_points(const Eigen::Ref<const Eigen::VectorXd>& y);

/// Minimises the (weighted) negative quasi log-likelihood over the admissible set using
/// log/logit coordinates. Starts from `warm_start` only when given, else multi-start.
/// Throws NonConvergence when no start converges.
GarchFit fit_garch(const Eigen::Ref<const Eigen::VectorXd>& y, const Eigen::VectorXd& weights = {},
                   const GarchParams* warm_start = nullptr, const GarchFitOptions& options = {});

}  // namespace maxcorr
