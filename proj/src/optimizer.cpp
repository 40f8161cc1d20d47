#include "maxcorr/optimizer.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace maxcorr {

MinimizeResult minimize_bfgs(const Objective& f, Eigen::VectorXd x0, const BfgsOptions& options) {
    const Eigen::Index k = x0.size();
    MinimizeResult out;
    out.x = std::move(x0);
    out.gradient.resize(k);
    out.value = f(out.x, out.gradient);
    if (!std::isfinite(out.value)) return out;

    Eigen::MatrixXd inv_hessian = Eigen::MatrixXd::Identity(k, k);
    Eigen::VectorXd trial_grad(k);
    int stalled = 0;

    for (int iter = 0; iter < options.max_iterations; ++iter) {
        out.iterations = iter;
        if (out.gradient.lpNorm<Eigen::Infinity>() < options.gradient_tolerance) {
            out.converged = true;
            return out;
        }
        Eigen::VectorXd direction = -inv_hessian * out.gradient;
        double slope = direction.dot(out.gradient);
        if (!(slope < 0.0)) {
            inv_hessian.setIdentity();
            direction = -out.gradient;
            slope = -out.gradient.squaredNorm();
        }

        double step = 1.0;
        double trial_value = 0.0;
        Eigen::VectorXd trial;
        bool accepted = false;
        for (int backtrack = 0; backtrack < 60; ++backtrack) {
            trial = out.x + step * direction;
            trial_value = f(trial, trial_grad);
            if (std::isfinite(trial_value) && trial_value <= out.value + 1e-4 * step * slope) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            // No descent along the quasi-Newton direction: treat as a stationary point
            // when the curvature model has already been reset, otherwise retry.
            if (inv_hessian.isIdentity()) {
                out.converged = out.gradient.lpNorm<Eigen::Infinity>() < 1e-6;
                return out;
            }
            inv_hessian.setIdentity();
            continue;
        }

        const Eigen::VectorXd s = trial - out.x;
        const Eigen::VectorXd y = trial_grad - out.gradient;
        const double change = std::abs(trial_value - out.value);
        const double scale = std::max(1.0, std::abs(out.value));

        out.x = trial;
        out.gradient = trial_grad;
        out.value = trial_value;

        const double sy = s.dot(y);
        if (sy > 1e-12 * s.norm() * y.norm()) {
            const double rho = 1.0 / sy;
            const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(k, k);
            inv_hessian = (identity - rho * s * y.transpose()) * inv_hessian *
                              (identity - rho * y * s.transpose()) +
                          rho * s * s.transpose();
        }

        stalled = (change <= options.value_tolerance * scale) ? stalled + 1 : 0;
        if (stalled >= options.stall_iterations) {
            out.iterations = iter + 1;
            out.converged = true;
            return out;
        }
    }
    out.iterations = options.max_iterations;
    out.converged = out.gradient.lpNorm<Eigen::Infinity>() < options.gradient_tolerance;
    return out;
}

}  // namespace maxcorr
