#include "maxcorr/competing_tests.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include <cmath>

#include "maxcorr/distributions.hpp"

namespace maxcorr {

double hong_statistic(const Eigen::Ref<const Eigen::VectorXd>& rho, Index n, const Eigen::VectorXd& weights) {
    const Index L = rho.size();
    if (L < 1 || L >= n) throw InvalidArgument("Hong's statistic needs 1 <= L < n");
    const double nd = static_cast<double>(n);
    double sum = 0.0;
    for (Index h = 0; h < L; ++h) sum += weights(h) * (nd * rho(h) * rho(h) - 1.0);
    return sum / std::sqrt(2.0 * static_cast<double>(L));
}

double hong_statistic(const Eigen::Ref<const Eigen::VectorXd>& rho, Index n) {
    return hong_statistic(rho, n, resolve_weights(WeightScheme::ljung_box, n, rho.size()).resolved);
}

double hong_asymptotic_p_value(double statistic) { return 1.0 - normal_cdf(statistic); }

double ljung_box_statistic(const Eigen::Ref<const Eigen::VectorXd>& rho, Index n) {
    const Index L = rho.size();
    if (L < 1 || L >= n) throw InvalidArgument("Ljung-Box statistic needs 1 <= L < n");
    const double nd = static_cast<double>(n);
    double sum = 0.0;
    for (Index h = 1; h <= L; ++h) sum += (nd + 2.0) / (nd - static_cast<double>(h)) * rho(h - 1) * rho(h - 1);
    return nd * sum;
}

TestResult hong_asymptotic_test(const FittedFilter& filter, Index max_lag) {
    const CorrelationSet corrs = sample_correlations(filter.residuals, max_lag);
    TestResult r;
    r.test = "hong-asymptotic";
    r.statistic = hong_statistic(corrs.rho, corrs.n);
    r.p_value = hong_asymptotic_p_value(r.statistic);
    r.lag = max_lag;
    r.asymptotic = true;
    return r;
}

// ---- Cramer-von Mises -----------------------------------------------------

Eigen::VectorXd all_autocovariances(const Eigen::VectorXd& residuals) {
    const Index n = residuals.size();
    if (n < 2) throw InvalidArgument("need at least two residuals");
    Eigen::VectorXd gamma(n - 1);
    for (Index h = 1; h < n; ++h) gamma(h - 1) = sample_autocovariance(residuals, h);
    return gamma;
}

double cvm_statistic(const FittedFilter& filter, double delta) {
    const Eigen::VectorXd& e = filter.residuals;
    if (!(e.squaredNorm() > 0.0)) throw DegenerateSeries("residuals carry no variation");
    return cvm_from_autocovariances(all_autocovariances(e), e.size(), delta);
}

double cvm_statistic(const Eigen::Ref<const Eigen::VectorXd>& y, const FilterSpec& filter, double delta) {
    return cvm_statistic(fit_filter(y, filter), delta);
}

TestResult cvm_bootstrap(const FittedFilter& filter, const BootstrapSpec& spec_in, double delta) {
    const BootstrapSpec spec = spec_in.normalized();
    if (spec.method == BootstrapMethod::brwb) return brwb_test(filter, spec, BrwbOptions{.delta = delta});

    const Index n = filter.size();
    const Index H = n - 1;
    const ExpansionSet expansion = compute_expansion(filter, H);
    const Index b = spec.block.resolve(n);
    const BlockScheme scheme = make_blocks(n, b);

    const Eigen::MatrixXd centered = centered_expansion(expansion, spec.recenter);
    Eigen::MatrixXd block_sums(scheme.count(), H);
    for (Index s = 0; s < scheme.count(); ++s)
        block_sums.row(s) = centered.middleRows(scheme.blocks[s].start, scheme.blocks[s].length).colwise().sum();

    // gamma*(h) = (1/n) sum_s xi_s K(s,h), so R gamma* = (R K' / n) xi.
    const auto r = weighted_psi_matrix(H, delta);
    const Eigen::MatrixXd projected = (*r * block_sums.transpose()) / static_cast<double>(n);
    const Eigen::MatrixXd xi = multiplier_matrix(scheme, spec.seed, spec.draws);

    TestResult out;
    out.test = "cvm-" + to_string(spec.method);
    out.statistic = cvm_statistic(filter, delta);
    out.draws = static_cast<double>(n) * (projected * xi).colwise().squaredNorm().transpose();
    out.p_value = bootstrap_p_value(out.draws, out.statistic);
    out.lag = H;
    out.block_size = b;
    out.draws_requested = spec.draws;
    out.seed = spec.seed;
    out.stream_digest = stream_digest(xi);
    return out;
}

TestResult cvm_bootstrap(const Eigen::Ref<const Eigen::VectorXd>& y, const FilterSpec& filter,
                         const BootstrapSpec& spec, double delta) {
    return cvm_bootstrap(fit_filter(y, filter), spec, delta);
}

// ---- Orthogonalized Q-test -------------------------------------------------

std::string to_string(LrvKind kind) { return kind == LrvKind::identity ? "identity" : "bartlett"; }

LrvKind parse_lrv_kind(std::string_view text) {
    if (text == "identity") return LrvKind::identity;
    if (text == "bartlett") return LrvKind::bartlett;
    throw InvalidArgument("unknown long-run variance kind '" + std::string(text) + "'");
}

double dv_bandwidth(Index n) { return 2.0 * std::cbrt(static_cast<double>(n) / 100.0); }

LrvEstimate identity_lrv(Index max_lag) {
    LrvEstimate out;
    out.kind = LrvKind::identity;
    out.S = Eigen::MatrixXd::Identity(max_lag, max_lag);
    out.V = out.S;
    return out;
}

LrvEstimate bartlett_lrv(const Eigen::VectorXd& e, Index max_lag, double bandwidth) {
    const Index n = e.size();
    if (max_lag < 1 || max_lag >= n) throw InvalidArgument("long-run variance needs 1 <= L < n");
    if (!(bandwidth > 0.0)) throw InvalidArgument("bandwidth must be positive");
    const double nd = static_cast<double>(n);
    const double gamma0 = e.squaredNorm() / nd;
    if (!(gamma0 > 0.0)) throw DegenerateSeries("residuals carry no variation");

    Eigen::MatrixXd u = Eigen::MatrixXd::Zero(n, max_lag);
    for (Index i = 1; i <= max_lag; ++i) {
        auto col = u.col(i - 1).tail(n - i);
        col = e.tail(n - i).cwiseProduct(e.head(n - i));
        col.array() -= col.mean();
    }

    LrvEstimate out;
    out.kind = LrvKind::bartlett;
    out.bandwidth = bandwidth;
    out.S = u.transpose() * u / nd;
    const Index lags = std::min<Index>(static_cast<Index>(std::floor(bandwidth)), n - 1);
    for (Index l = 1; l <= lags; ++l) {
        const double k = 1.0 - static_cast<double>(l) / bandwidth;
        if (k <= 0.0) continue;
        const Eigen::MatrixXd gl = u.bottomRows(n - l).transpose() * u.topRows(n - l) / nd;
        out.S += k * (gl + gl.transpose());
    }
    out.V = out.S / (gamma0 * gamma0);
    return out;
}

LrvEstimate estimate_lrv(LrvKind kind, const Eigen::VectorXd& residuals, Index max_lag) {
    if (kind == LrvKind::identity) return identity_lrv(max_lag);
    return bartlett_lrv(residuals, max_lag, dv_bandwidth(residuals.size()));
}

DvTransform make_dv_transform(const Eigen::MatrixXd& V, const Eigen::MatrixXd& jacobian) {
    const Index L = V.rows();
    if (V.cols() != L || jacobian.rows() != L) throw InvalidArgument("transform dimensions disagree");
    DvTransform out;

    Eigen::LLT<Eigen::MatrixXd> llt(V);
    if (llt.info() != Eigen::Success) {
        const double ridge = 1e-8 * V.trace() / static_cast<double>(L);
        llt.compute(V + ridge * Eigen::MatrixXd::Identity(L, L));
        if (llt.info() != Eigen::Success) throw RankDeficient("long-run variance is not positive definite");
        out.regularized = true;
    }
    const Eigen::MatrixXd whiten = llt.matrixL().solve(Eigen::MatrixXd::Identity(L, L));

    Eigen::MatrixXd projector = Eigen::MatrixXd::Identity(L, L);
    if (jacobian.cols() > 0) {
        const Eigen::MatrixXd xt = whiten * jacobian;
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(xt);
        out.rank = qr.rank();
        if (out.rank >= L) throw InvalidArgument("need more lags than estimated parameters");
        const Eigen::MatrixXd q1 = qr.householderQ() * Eigen::MatrixXd::Identity(L, out.rank);
        projector -= q1 * q1.transpose();
    }

    // Modified Gram-Schmidt over the projector's columns, in lag order.
    const Index keep = L - out.rank;
    Eigen::MatrixXd basis(L, keep);
    Index found = 0;
    for (Index j = 0; j < L && found < keep; ++j) {
        Eigen::VectorXd v = projector.col(j);
        for (Index i = 0; i < found; ++i) v -= basis.col(i).dot(v) * basis.col(i);
        const double norm = v.norm();
        if (norm < 1e-10) continue;
        basis.col(found++) = v / norm;
    }
    if (found < keep) throw RankDeficient("could not complete the orthogonal complement basis");

    out.map = basis.transpose() * whiten;
    return out;
}

TestResult dv_q_test(const FittedFilter& filter, Index max_lag, LrvKind lrv, DvMode mode,
                     const BootstrapSpec& spec) {
    const CorrelationSet corrs = sample_correlations(filter.residuals, max_lag);
    const double nd = static_cast<double>(corrs.n);
    const LrvEstimate v = estimate_lrv(lrv, filter.residuals, max_lag);
    Eigen::MatrixXd jacobian(max_lag, 0);
    if (filter.parameter_count() > 0) jacobian = expansion_gradients(filter, max_lag) / corrs.gamma(0);
    const DvTransform transform = make_dv_transform(v.V, jacobian);

    TestResult r;
    r.statistic = nd * transform.apply(corrs.rho).squaredNorm();
    r.lag = max_lag;
    if (transform.regularized) r.warnings.push_back("long-run variance regularized by a ridge");
    if (transform.rank < filter.parameter_count())
        r.warnings.push_back("estimation directions are collinear (rank " + std::to_string(transform.rank) + ")");

    if (mode == DvMode::asymptotic) {
        r.test = "dv-" + to_string(lrv) + "-asymptotic";
        r.asymptotic = true;
        r.p_value = chi2_upper_tail(r.statistic, static_cast<double>(transform.dof()));
        return r;
    }
    const CorrelationDraws draws = correlation_draws(filter, max_lag, spec);
    r.test = "dv-" + to_string(lrv) + "-" + to_string(draws.spec.method);
    r.draws = nd * (transform.map * draws.draws).colwise().squaredNorm().transpose();
    r.p_value = bootstrap_p_value(r.draws, r.statistic);
    r.block_size = draws.block_size;
    r.draws_requested = draws.spec.draws;
    r.seed = draws.spec.seed;
    r.stream_digest = draws.stream_digest;
    return r;
}

}  // namespace maxcorr
