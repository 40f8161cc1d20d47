#include "maxcorr/filters.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <string>

namespace maxcorr {

Index FilterSpec::parameter_count() const {
    switch (kind) {
    case FilterKind::none: return 0;
    case FilterKind::mean: return 1;
    case FilterKind::ar: return ar_order + (intercept ? 1 : 0);
    case FilterKind::garch11: return 3;
    }
    return 0;
}

FilterSpec FilterSpec::parse(std::string_view text) {
    if (text == "none") return none();
    if (text == "mean") return mean();
    if (text == "garch" || text == "garch11") return garch11();
    if (text.substr(0, 2) == "ar") {
        auto rest = text.substr(2);
        if (!rest.empty() && rest.front() == ':') rest.remove_prefix(1);
        bool intercept = true;
        if (const auto colon = rest.find(':'); colon != std::string_view::npos) {
            if (rest.substr(colon + 1) != "nointercept")
                throw InvalidArgument("unknown AR option in '" + std::string(text) + "'");
            intercept = false;
            rest = rest.substr(0, colon);
        }
        if (rest.empty()) throw InvalidArgument("AR filter needs an order, e.g. ar:2");
        Index p = 0;
        for (char c : rest) {
            if (c < '0' || c > '9') throw InvalidArgument("bad AR order in '" + std::string(text) + "'");
            p = p * 10 + (c - '0');
        }
        if (p < 1) throw InvalidArgument("AR order must be at least 1 (use the mean filter)");
        return ar(p, intercept);
    }
    throw InvalidArgument("unknown filter '" + std::string(text) + "'");
}

std::string FilterSpec::to_string() const {
    switch (kind) {
    case FilterKind::none: return "none";
    case FilterKind::mean: return "mean";
    case FilterKind::ar: return "ar:" + std::to_string(ar_order) + (intercept ? "" : ":nointercept");
    case FilterKind::garch11: return "garch";
    }
    return "?";
}

namespace {

void require_input(const Eigen::Ref<const Eigen::VectorXd>& y, Index min_size) {
    if (y.size() < min_size)
        throw InvalidArgument("series of length " + std::to_string(y.size()) +
                              " is too short for this filter (needs " + std::to_string(min_size) + ")");
    if (!y.allFinite()) throw InvalidArgument("series contains non-finite values");
}

// Residuals that are zero up to rounding mean the filter absorbed all variation.
void require_variation(const Eigen::VectorXd& residuals, const Eigen::Ref<const Eigen::VectorXd>& y) {
    const double scale = y.squaredNorm() / static_cast<double>(y.size());
    const double resid = residuals.squaredNorm() / static_cast<double>(residuals.size());
    if (!(resid > 1e-24 * std::max(scale, 1e-300)))
        throw DegenerateSeries("filtered residuals are identically zero");
}

Eigen::MatrixXd ar_design(const Eigen::Ref<const Eigen::VectorXd>& y, Index p, bool intercept) {
    const Index n = y.size() - p;
    const Index offset = intercept ? 1 : 0;
    Eigen::MatrixXd x(n, p + offset);
    if (intercept) x.col(0).setOnes();
    for (Index j = 1; j <= p; ++j) x.col(offset + j - 1) = y.segment(p - j, n);
    return x;
}

}  // namespace

FittedFilter fit_none(const Eigen::Ref<const Eigen::VectorXd>& y) {
    require_input(y, 2);
    const Index n = y.size();
    FittedFilter f;
    f.spec = FilterSpec::none();
    f.observations = y;
    f.theta.resize(0);
    f.residuals = y;
    f.sigma = Eigen::VectorXd::Ones(n);
    f.G.resize(n, 0);
    f.S.resize(n, 0);
    f.m.resize(n, 0);
    f.A.resize(0, 0);
    return f;
}

FittedFilter fit_mean(const Eigen::Ref<const Eigen::VectorXd>& y) {
    require_input(y, 2);
    const Index n = y.size();
    FittedFilter f;
    f.spec = FilterSpec::mean();
    f.observations = y;
    f.theta = Eigen::VectorXd::Constant(1, y.mean());
    f.residuals = y.array() - f.theta(0);
    require_variation(f.residuals, y);
    f.sigma = Eigen::VectorXd::Ones(n);
    f.G = Eigen::MatrixXd::Ones(n, 1);
    f.S = Eigen::MatrixXd::Zero(n, 1);
    f.m = f.residuals;
    f.A = Eigen::MatrixXd::Ones(1, 1);
    return f;
}

FittedFilter fit_ar_ols(const Eigen::Ref<const Eigen::VectorXd>& y, Index p, bool intercept) {
    if (p < 1) throw InvalidArgument("AR order must be at least 1 (use the mean filter)");
    require_input(y, p + 2 + (intercept ? 1 : 0));
    const Eigen::MatrixXd x = ar_design(y, p, intercept);
    const Index n = x.rows();
    const Eigen::VectorXd target = y.tail(n);

    const Eigen::MatrixXd gram = x.transpose() * x / static_cast<double>(n);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    if (!(lo > 0.0) || hi / lo > kRankConditionLimit)
        throw RankDeficient("AR design matrix is numerically singular");

    const Eigen::LLT<Eigen::MatrixXd> chol(gram);
    FittedFilter f;
    f.spec = FilterSpec::ar(p, intercept);
    f.observations = y;
    f.theta = chol.solve(x.transpose() * target / static_cast<double>(n));
    f.residuals = target - x * f.theta;
    require_variation(f.residuals, y);
    f.sigma = Eigen::VectorXd::Ones(n);
    f.G = x;
    f.S = Eigen::MatrixXd::Zero(n, x.cols());
    f.m = x.array().colwise() * f.residuals.array();
    f.A = chol.solve(Eigen::MatrixXd::Identity(x.cols(), x.cols()));
    return f;
}

namespace {

void fill_garch(FittedFilter& f, const Eigen::Ref<const Eigen::VectorXd>& y, const GarchParams& p) {
    const GarchPath path = garch_variance(y, p, true);
    f.theta = p.vec();
    f.sigma = path.sigma2.cwiseSqrt();
    f.residuals = y.cwiseQuotient(f.sigma);
    f.S = garch_half_log_score(path);
    f.G = Eigen::MatrixXd::Zero(y.size(), 3);
    f.m = f.S.array().colwise() * (f.residuals.array().square() - 1.0);
}

}  // namespace

FittedFilter fit_garch_qml(const Eigen::Ref<const Eigen::VectorXd>& y, const GarchFitOptions& options) {
    require_input(y, 50);
    const GarchFit fit = fit_garch(y, {}, nullptr, options);
    FittedFilter f;
    f.spec = FilterSpec::garch11();
    f.observations = y;
    fill_garch(f, y, fit.params);
    require_variation(f.residuals, y);
    f.converged = fit.converged;
    f.boundary = fit.boundary;
    // Expected Hessian of the average negative quasi log-likelihood is 2 E[s s'].
    const Eigen::Matrix3d info = 2.0 * f.S.transpose() * f.S / static_cast<double>(y.size());
    f.A = info.ldlt().solve(Eigen::Matrix3d::Identity());
    return f;
}

FittedFilter fit_filter(const Eigen::Ref<const Eigen::VectorXd>& y, const FilterSpec& spec) {
    switch (spec.kind) {
    case FilterKind::none: return fit_none(y);
    case FilterKind::mean: return fit_mean(y);
    case FilterKind::ar: return fit_ar_ols(y, spec.ar_order, spec.intercept);
    case FilterKind::garch11: return fit_garch_qml(y);
    }
    throw InvalidArgument("unknown filter kind");
}

FittedFilter refit_weighted(const FittedFilter& base, const Eigen::VectorXd& weights) {
    if (weights.size() != base.size())
        throw InvalidArgument("one weight per residual is required");
    const Eigen::VectorXd& y = base.observations;
    FittedFilter f = base;
    switch (base.spec.kind) {
    case FilterKind::none:
        break;
    case FilterKind::mean: {
        f.theta(0) = weights.dot(y) / weights.sum();
        f.residuals = y.array() - f.theta(0);
        f.m = f.residuals;
        break;
    }
    case FilterKind::ar: {
        const Eigen::MatrixXd x = ar_design(y, base.spec.ar_order, base.spec.intercept);
        const Eigen::VectorXd target = y.tail(x.rows());
        const Eigen::MatrixXd xw = x.array().colwise() * weights.array();
        f.theta = (xw.transpose() * x).ldlt().solve(xw.transpose() * target);
        f.residuals = target - x * f.theta;
        f.m = x.array().colwise() * f.residuals.array();
        break;
    }
    case FilterKind::garch11: {
        const GarchParams warm = GarchParams::from(base.theta);
        const GarchFit fit = fit_garch(y, weights, &warm);
        fill_garch(f, y, fit.params);
        f.converged = fit.converged;
        f.boundary = fit.boundary;
        break;
    }
    }
    return f;
}

Eigen::MatrixXd expansion_gradients(const FittedFilter& filter, Index max_lag) {
    const Index n = filter.size();
    const Index k = filter.parameter_count();
    if (max_lag < 1 || max_lag > n - 1) throw InvalidArgument("expansion needs 1 <= L <= n - 1");
    const Eigen::VectorXd& e = filter.residuals;
    Eigen::MatrixXd D(max_lag, k);
    if (k == 0) return D;
    // z_t = eps_t s_t + G_t / sigma_t. Plain loops keep the summation order fixed,
    // so results are reproducible against straightforward reference code.
    Eigen::MatrixXd z(n, k);
    for (Index t = 0; t < n; ++t)
        for (Index j = 0; j < k; ++j) z(t, j) = e(t) * filter.S(t, j) + filter.G(t, j) / filter.sigma(t);
    const double nd = static_cast<double>(n);
    for (Index h = 1; h <= max_lag; ++h) {
        for (Index j = 0; j < k; ++j) {
            double sum = 0.0;
            for (Index t = h; t < n; ++t) sum += z(t, j) * e(t - h) + e(t) * z(t - h, j);
            D(h - 1, j) = sum / nd;
        }
    }
    return D;
}

ExpansionSet compute_expansion(const FittedFilter& filter, Index max_lag) {
    const Index n = filter.size();
    const Index k = filter.parameter_count();
    if (max_lag < 1 || max_lag > n - 1) throw InvalidArgument("expansion needs 1 <= L <= n - 1");
    const Eigen::VectorXd& e = filter.residuals;
    const double nd = static_cast<double>(n);

    ExpansionSet out;
    double ss = 0.0;
    for (Index t = 0; t < n; ++t) ss += e(t) * e(t);
    out.gamma0 = ss / nd;
    if (!(out.gamma0 > 0.0)) throw DegenerateSeries("gamma(0) is zero: residuals carry no variation");
    out.D = expansion_gradients(filter, max_lag);

    // c_t = A m_t
    Eigen::MatrixXd c(n, k);
    for (Index t = 0; t < n; ++t) {
        for (Index i = 0; i < k; ++i) {
            double sum = 0.0;
            for (Index j = 0; j < filter.m.cols(); ++j) sum += filter.A(i, j) * filter.m(t, j);
            c(t, i) = sum;
        }
    }
    out.E = Eigen::MatrixXd::Zero(n, max_lag);
    for (Index h = 1; h <= max_lag; ++h) {
        for (Index t = h; t < n; ++t) {
            double correction = 0.0;
            for (Index i = 0; i < k; ++i) correction += out.D(h - 1, i) * c(t, i);
            out.E(t, h - 1) = e(t) * e(t - h) - correction;
        }
    }
    return out;
}

}  // namespace maxcorr
