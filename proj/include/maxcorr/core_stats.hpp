#pragma once

// Sample autocovariances and autocorrelations, lag schedules, lag weights and
// the statistic transforms built on top of them (max and weighted portmanteau).
//
// Every autocovariance uses divisor n for every lag and never demeans: the
// filtered residuals are expected to already be centered by their filter.

#include <Eigen/Core>

#include <cmath>
#include <string>
#include <string_view>

#include "maxcorr/errors.hpp"

namespace maxcorr {

using Index = Eigen::Index;

/// An ordered finite sequence of real observations.
struct Series {
    Eigen::VectorXd values;
    std::string label;

    /// Validates n >= 2 and finiteness.
    static Series make(Eigen::VectorXd values, std::string label = {});

    Index size() const { return values.size(); }
};

/// gamma(0..L) and rho(1..L) of one series. rho is stored 0-based: rho[h-1] = rho(h).
template <typename Scalar>
struct BasicCorrelationSet {
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    Vector gamma;
    Vector rho;
    Index n = 0;

    Index max_lag() const { return rho.size(); }
    /// 1-based lag accessor.
    Scalar rho_at(Index h) const { return rho(h - 1); }
};

using CorrelationSet = BasicCorrelationSet<double>;

enum class WeightScheme { constant, ljung_box, custom };

struct LagWeights {
    WeightScheme scheme = WeightScheme::constant;
    Eigen::VectorXd resolved;  // resolved[h-1] = omega(h), all > 0
};

struct LagRule {
    enum class Kind { fixed, proportional };

    Kind kind = Kind::fixed;
    Index fixed_lag = 5;
    double delta = 1.0;

    static LagRule fixed(Index lag) { return {Kind::fixed, lag, 0.0}; }
    static LagRule proportional(double delta) { return {Kind::proportional, 0, delta}; }

    /// Parses "fixed:5", "5", "prop:0.5".
    static LagRule parse(std::string_view text);
    std::string to_string() const;
};

struct ResolvedLag {
    Index lag = 0;
    bool clipped = false;  // the rule asked for more than n - 1 lags
};

namespace detail {

template <typename Derived>
void require_finite(const Eigen::MatrixBase<Derived>& x) {
    if (!x.allFinite()) throw InvalidArgument("series contains non-finite values");
}

}  // namespace detail

/// gamma_n(h) = (1/n) sum_{t=h+1}^{n} e_t e_{t-h}.
template <typename Derived>
typename Derived::Scalar sample_autocovariance(const Eigen::MatrixBase<Derived>& e, Index h) {
    const Index n = e.size();
    if (h < 0 || h > n - 1)
        throw InvalidArgument("lag " + std::to_string(h) + " outside [0, " +
                              std::to_string(n - 1) + "]");
    detail::require_finite(e);
    using Scalar = typename Derived::Scalar;
    return e.tail(n - h).dot(e.head(n - h)) / static_cast<Scalar>(n);
}

/// gamma(0..L) and rho(1..L). Throws DegenerateSeries when gamma(0) == 0.
template <typename Derived>
BasicCorrelationSet<typename Derived::Scalar> sample_correlations(
        const Eigen::MatrixBase<Derived>& e, Index max_lag) {
    using Scalar = typename Derived::Scalar;
    const Index n = e.size();
    if (max_lag < 1) throw InvalidArgument("at least one lag is required");
    if (max_lag > n - 1)
        throw InvalidArgument("max lag " + std::to_string(max_lag) +
                              " exceeds n - 1 = " + std::to_string(n - 1));
    detail::require_finite(e);

    BasicCorrelationSet<Scalar> out;
    out.n = n;
    out.gamma.resize(max_lag + 1);
    for (Index h = 0; h <= max_lag; ++h)
        out.gamma(h) = e.tail(n - h).dot(e.head(n - h)) / static_cast<Scalar>(n);
    if (!(out.gamma(0) > Scalar(0)))
        throw DegenerateSeries("gamma(0) is zero: the series has no variation");
    out.rho = out.gamma.tail(max_lag) / out.gamma(0);
    return out;
}

ResolvedLag resolve_lag_rule(const LagRule& rule, Index n);

/// constant -> 1; ljung_box -> (n+2)/(n-h). `custom` must carry L positive values.
LagWeights resolve_weights(WeightScheme scheme, Index n, Index max_lag,
                           const Eigen::VectorXd& custom = {});

/// sqrt(n) max_h |w(h) rho(h)|.
template <typename Derived>
double max_corr_statistic(const Eigen::MatrixBase<Derived>& rho, Index n,
                          const Eigen::VectorXd& weights) {
    if (rho.size() < 1) throw InvalidArgument("at least one lag is required");
    return std::sqrt(static_cast<double>(n)) *
           rho.cwiseProduct(weights.head(rho.size())).cwiseAbs().maxCoeff();
}

inline double max_corr_statistic(const CorrelationSet& corrs, const LagWeights& w) {
    return max_corr_statistic(corrs.rho, corrs.n, w.resolved);
}

/// n sum_h w(h)^2 rho(h)^2.
template <typename Derived>
double portmanteau_statistic(const Eigen::MatrixBase<Derived>& rho, Index n,
                             const Eigen::VectorXd& weights) {
    if (rho.size() < 1) throw InvalidArgument("at least one lag is required");
    return static_cast<double>(n) *
           rho.cwiseProduct(weights.head(rho.size())).squaredNorm();
}

inline double portmanteau_statistic(const CorrelationSet& corrs, const LagWeights& w) {
    return portmanteau_statistic(corrs.rho, corrs.n, w.resolved);
}

std::string to_string(WeightScheme scheme);
WeightScheme parse_weight_scheme(std::string_view text);

}  // namespace maxcorr
