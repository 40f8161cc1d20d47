#pragma once

// Plug-in filters and the first-order expansion of residual cross-products.
//
// A filter turns observations y into residuals eps_t(theta_hat) and exposes what
// the expansion needs:
//   G_t  level gradient (d f / d phi, zero-padded to k_theta)
//   s_t  (1/2) d ln sigma2_t / d theta
//   m_t  estimating equations with  theta_hat - theta_0 ~ A (1/n) sum m_t
//   A    k_theta x k_m
// The expansion variables are
//   D(h)    = (1/n) sum_{t>h} { (eps_t s_t + G_t/sigma_t) eps_{t-h} + eps_t (eps_{t-h} s_{t-h} + G_{t-h}/sigma_{t-h}) }
//   E_{t,h} = eps_t eps_{t-h} - D(h)' A m_t.

#include <Eigen/Core>

#include <string>
#include <string_view>

#include "maxcorr/core_stats.hpp"
#include "maxcorr/garch.hpp"

namespace maxcorr {

enum class FilterKind { none, mean, ar, garch11 };

struct FilterSpec {
    FilterKind kind = FilterKind::none;
    Index ar_order = 0;
    bool intercept = true;  // AR design carries a constant

    static FilterSpec none() { return {FilterKind::none, 0, false}; }
    static FilterSpec mean() { return {FilterKind::mean, 0, true}; }
    static FilterSpec ar(Index p, bool intercept = true) { return {FilterKind::ar, p, intercept}; }
    static FilterSpec garch11() { return {FilterKind::garch11, 0, false}; }

    /// k_theta
    Index parameter_count() const;
    /// Observations consumed before the first residual (p for AR, else 0).
    Index presample() const { return kind == FilterKind::ar ? ar_order : 0; }

    /// "none", "mean", "ar:2" (or "ar2"), "ar:2:nointercept", "garch".
    static FilterSpec parse(std::string_view text);
    std::string to_string() const;
};

struct FittedFilter {
    FilterSpec spec;
    Eigen::VectorXd observations;  // the y the filter was fitted to
    Eigen::VectorXd theta;
    Eigen::VectorXd residuals;     // eps_t(theta_hat), length n - presample
    Eigen::VectorXd sigma;
    Eigen::MatrixXd G;             // n x k_theta
    Eigen::MatrixXd S;             // n x k_theta
    Eigen::MatrixXd m;             // n x k_m
    Eigen::MatrixXd A;             // k_theta x k_m
    bool converged = true;
    bool boundary = false;

    Index size() const { return residuals.size(); }
    Index parameter_count() const { return theta.size(); }
    /// Rows are (A m_t)'.
    Eigen::MatrixXd influence() const { return m * A.transpose(); }
};

/// Condition-number threshold above which the AR Gram matrix counts as singular.
inline constexpr double kRankConditionLimit = 1e12;

FittedFilter fit_none(const Eigen::Ref<const Eigen::VectorXd>& y);
FittedFilter fit_mean(const Eigen::Ref<const Eigen::VectorXd>& y);
FittedFilter fit_ar_ols(const Eigen::Ref<const Eigen::VectorXd>& y, Index p, bool intercept = true);
FittedFilter fit_garch_qml(const Eigen::Ref<const Eigen::VectorXd>& y, const GarchFitOptions& options = {});
FittedFilter fit_filter(const Eigen::Ref<const Eigen::VectorXd>& y, const FilterSpec& spec);

/// Re-estimates `base.spec` on the same data under observation weights (one per
/// residual), as used by the random weighting bootstrap. theta, residuals and m
/// are evaluated at the weighted estimate; A is carried over from `base`.
/// GARCH starts from base.theta; NonConvergence propagates.
FittedFilter refit_weighted(const FittedFilter& base, const Eigen::VectorXd& weights);

struct ExpansionSet {
    Eigen::MatrixXd D;  // L x k_theta, row h-1 = D(h)'
    Eigen::MatrixXd E;  // n x L, E(t-1, h-1) = E_{t,h} for t > h, zero otherwise
    double gamma0 = 0.0;

    Index size() const { return E.rows(); }
    Index max_lag() const { return E.cols(); }
};

ExpansionSet compute_expansion(const FittedFilter& filter, Index max_lag);

/// D(h) for h = 1..max_lag without forming E.
Eigen::MatrixXd expansion_gradients(const FittedFilter& filter, Index max_lag);

}  // namespace maxcorr
