#include "maxcorr/garch.hpp"

#include <algorithm>
#include <cmath>
#include <vector>
#include <limits>
#include <string>

#include "maxcorr/errors.hpp"

namespace maxcorr {

bool GarchParams::admissible() const {
    return omega > 0.0 && alpha > 0.0 && beta > 0.0 && alpha + beta <= 1.0;
}

GarchPath garch_variance(const Eigen::Ref<const Eigen::VectorXd>& y, const GarchParams& p,
                         bool with_derivatives) {
    const Eigen::Index n = y.size();
    GarchPath path;
    path.sigma2.resize(n);
    if (n == 0) return path;
    path.sigma2(0) = p.omega;
    for (Eigen::Index t = 1; t < n; ++t)
        path.sigma2(t) = p.omega + p.alpha * y(t - 1) * y(t - 1) + p.beta * path.sigma2(t - 1);
    if (with_derivatives) {
        path.dsigma2.resize(n, 3);
        path.dsigma2.row(0) << 1.0, 0.0, 0.0;
        for (Eigen::Index t = 1; t < n; ++t) {
            path.dsigma2(t, 0) = 1.0 + p.beta * path.dsigma2(t - 1, 0);
            path.dsigma2(t, 1) = y(t - 1) * y(t - 1) + p.beta * path.dsigma2(t - 1, 1);
            path.dsigma2(t, 2) = path.sigma2(t - 1) + p.beta * path.dsigma2(t - 1, 2);
        }
    }
    return path;
}

Eigen::MatrixXd garch_half_log_score(const GarchPath& path) {
    return 0.5 * (path.dsigma2.array().colwise() / path.sigma2.array()).matrix();
}

double garch_qml_objective(const Eigen::Ref<const Eigen::VectorXd>& y, const GarchParams& p,
                           const Eigen::VectorXd& weights, Eigen::Vector3d* gradient) {
    const Eigen::Index n = y.size();
    const GarchPath path = garch_variance(y, p, gradient != nullptr);
    if (!(path.sigma2.array() > 0.0).all() || !path.sigma2.allFinite())
        return std::numeric_limits<double>::infinity();

    const bool weighted = weights.size() > 0;
    double value = 0.0;
    Eigen::Vector3d grad = Eigen::Vector3d::Zero();
    for (Eigen::Index t = 0; t < n; ++t) {
        const double w = weighted ? weights(t) : 1.0;
        const double ratio = y(t) * y(t) / path.sigma2(t);
        value += w * 0.5 * (std::log(path.sigma2(t)) + ratio);
        if (gradient)
            grad += (w * 0.5 * (1.0 - ratio) / path.sigma2(t)) * path.dsigma2.row(t).transpose();
    }
    if (gradient) *gradient = grad / static_cast<double>(n);
    return value / static_cast<double>(n);
}

std::array<GarchParams, 3> garch_start_points(const Eigen::Ref<const Eigen::VectorXd>& y) {
    const double v = y.squaredNorm() / static_cast<double>(y.size());
    return {GarchParams{v * 0.5, 0.1, 0.8}, GarchParams{v * 0.3, 0.2, 0.5},
            GarchParams{v * 0.8, 0.05, 0.9}};
}

namespace {

// u = (ln omega, ln(alpha/gap), ln(beta/gap)) with gap = 1 - alpha - beta.
GarchParams from_unconstrained(const Eigen::VectorXd& u) {
    const double m = std::max({0.0, u(1), u(2)});
    const double ea = std::exp(u(1) - m), eb = std::exp(u(2) - m), e0 = std::exp(-m);
    const double denom = e0 + ea + eb;
    return {std::exp(u(0)), ea / denom, eb / denom};
}

Eigen::VectorXd to_unconstrained(const GarchParams& p) {
    const double gap = std::max(1.0 - p.alpha - p.beta, 1e-8);
    Eigen::VectorXd u(3);
    u << std::log(p.omega), std::log(p.alpha / gap), std::log(p.beta / gap);
    return u;
}

MinimizeResult run_from(const Eigen::Ref<const Eigen::VectorXd>& y, const Eigen::VectorXd& weights,
                        const GarchParams& start, const BfgsOptions& options) {
    const Objective objective = [&](const Eigen::VectorXd& u, Eigen::VectorXd& grad_u) {
        const GarchParams p = from_unconstrained(u);
        Eigen::Vector3d g;
        const double value = garch_qml_objective(y, p, weights, &g);
        grad_u.resize(3);
        if (!std::isfinite(value)) {
            grad_u.setZero();
            return value;
        }
        // Chain rule through the log/softmax map.
        grad_u(0) = p.omega * g(0);
        grad_u(1) = p.alpha * (1.0 - p.alpha) * g(1) - p.alpha * p.beta * g(2);
        grad_u(2) = -p.alpha * p.beta * g(1) + p.beta * (1.0 - p.beta) * g(2);
        return value;
    };
    return minimize_bfgs(objective, to_unconstrained(start), options);
}

}  // namespace

GarchFit fit_garch(const Eigen::Ref<const Eigen::VectorXd>& y, const Eigen::VectorXd& weights,
                   const GarchParams* warm_start, const GarchFitOptions& options) {
    if (y.size() < 3) throw InvalidArgument("GARCH estimation needs more observations");
    if (!y.allFinite()) throw InvalidArgument("series contains non-finite values");
    if (y.squaredNorm() == 0.0) throw DegenerateSeries("GARCH estimation on an all-zero series");

    std::vector<GarchParams> starts;
    if (warm_start) {
        starts.push_back(*warm_start);
    } else {
        const auto fixed = garch_start_points(y);
        starts.assign(fixed.begin(), fixed.end());
    }

    GarchFit best;
    best.objective = std::numeric_limits<double>::infinity();
    bool any = false;
    for (const auto& start : starts) {
        const MinimizeResult r = run_from(y, weights, start, options.bfgs);
        if (!r.converged || !std::isfinite(r.value)) continue;
        if (!any || r.value < best.objective) {
            best.params = from_unconstrained(r.x);
            best.objective = r.value;
            best.iterations = r.iterations;
            best.converged = true;
            any = true;
        }
    }
    if (!any) throw NonConvergence("GARCH QML did not converge from any start point");
    best.boundary = best.params.alpha + best.params.beta >= 1.0 - options.boundary_tolerance;
    return best;
}

}  // namespace maxcorr
