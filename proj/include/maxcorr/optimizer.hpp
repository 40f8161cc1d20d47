#pragma once

#include <Eigen/Core>

#include <functional>

namespace maxcorr {

/// Objective returning f(x) and writing the gradient into `grad`.
/// Returning a non-finite value marks x as infeasible; the line search backs off.
using Objective = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd& grad)>;

struct BfgsOptions {
    int max_iterations = 1000;
    double gradient_tolerance = 1e-9;   // sup-norm of the gradient
    double value_tolerance = 1e-15;     // relative change in f between accepted steps
    int stall_iterations = 5;           // consecutive tiny-change steps before stopping
};

struct MinimizeResult {
    Eigen::VectorXd x;
    double value = 0.0;
    Eigen::VectorXd gradient;
    int iterations = 0;
    bool converged = false;
};

/// Unconstrained BFGS with an Armijo backtracking line search.
MinimizeResult minimize_bfgs(const Objective& f, Eigen::VectorXd x0,
                             const BfgsOptions& options = {});

}  // namespace maxcorr
