#include "maxcorr/bootstrap.hpp"

#include <bit>
#include <cmath>
#include <random>

#include "maxcorr/competing_tests.hpp"

namespace maxcorr {

BlockScheme make_blocks(Index n, Index block_size) {
    if (block_size < 1 || block_size >= n)
        throw InvalidArgument("block size must satisfy 1 <= b_n < n (b_n = " +
                              std::to_string(block_size) + ", n = " + std::to_string(n) + ")");
    BlockScheme scheme{n, block_size, {}};
    scheme.blocks.reserve(static_cast<std::size_t>((n + block_size - 1) / block_size));
    for (Index start = 0; start < n; start += block_size)
        scheme.blocks.push_back({start, std::min(block_size, n - start)});
    return scheme;
}

Index BlockRule::resolve(Index n) const {
    if (kind == Kind::fixed) return size;
    return std::max<Index>(1, static_cast<Index>(std::floor(std::sqrt(static_cast<double>(n)))));
}

BlockRule BlockRule::parse(std::string_view text) {
    if (text == "sqrt" || text == "sqrt_n") return sqrt_n();
    Index b = 0;
    for (char c : text) {
        if (c < '0' || c > '9') throw InvalidArgument("bad block size '" + std::string(text) + "'");
        b = b * 10 + (c - '0');
    }
    if (text.empty() || b < 1) throw InvalidArgument("block size must be at least 1");
    return fixed(b);
}

std::string BlockRule::to_string() const {
    return kind == Kind::sqrt_n ? std::string("sqrt") : std::to_string(size);
}

BootstrapSpec BootstrapSpec::normalized() const {
    if (draws < 1) throw InvalidArgument("bootstrap needs at least one draw");
    if (block.kind == BlockRule::Kind::fixed && block.size < 1)
        throw InvalidArgument("block size must be at least 1");
    BootstrapSpec out = *this;
    if (method == BootstrapMethod::wb) {
        out.block = BlockRule::fixed(1);
        out.recenter = false;
    }
    return out;
}

std::string to_string(BootstrapMethod method) {
    switch (method) {
    case BootstrapMethod::dwb: return "dwb";
    case BootstrapMethod::wb: return "wb";
    case BootstrapMethod::brwb: return "brwb";
    }
    return "?";
}

BootstrapMethod parse_bootstrap_method(std::string_view text) {
    if (text == "dwb") return BootstrapMethod::dwb;
    if (text == "wb") return BootstrapMethod::wb;
    if (text == "brwb") return BootstrapMethod::brwb;
    throw InvalidArgument("unknown bootstrap method '" + std::string(text) + "'");
}

BootstrapSpec reduce_to_wild(BootstrapSpec spec) {
    spec.method = BootstrapMethod::wb;
    spec.block = BlockRule::fixed(1);
    spec.recenter = false;
    return spec;
}

Eigen::VectorXd draw_block_multipliers(const BlockScheme& scheme, Engine& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXd xi(scheme.count());
    for (Index s = 0; s < xi.size(); ++s) xi(s) = normal(rng);
    return xi;
}

Eigen::VectorXd expand_multipliers(const BlockScheme& scheme, const Eigen::VectorXd& xi) {
    Eigen::VectorXd phi(scheme.n);
    for (Index s = 0; s < scheme.count(); ++s)
        phi.segment(scheme.blocks[s].start, scheme.blocks[s].length).setConstant(xi(s));
    return phi;
}

Eigen::VectorXd draw_auxiliary(const BlockScheme& scheme, Engine& rng) {
    return expand_multipliers(scheme, draw_block_multipliers(scheme, rng));
}

Eigen::MatrixXd multiplier_matrix(const BlockScheme& scheme, std::uint64_t seed, Index draws) {
    Eigen::MatrixXd xi(scheme.count(), draws);
    for (Index i = 0; i < draws; ++i) {
        Engine rng = make_stream(seed, static_cast<std::uint64_t>(i));
        xi.col(i) = draw_block_multipliers(scheme, rng);
    }
    return xi;
}

std::uint64_t stream_digest(const Eigen::MatrixXd& values) {
    std::uint64_t h = hash_key("stream");
    for (Index j = 0; j < values.cols(); ++j)
        for (Index i = 0; i < values.rows(); ++i)
            h = mix64(h ^ std::bit_cast<std::uint64_t>(values(i, j)));
    return h;
}

Eigen::MatrixXd centered_expansion(const ExpansionSet& expansion, bool recenter) {
    Eigen::MatrixXd c = expansion.E;
    if (!recenter) return c;
    const Index n = expansion.size();
    for (Index h = 1; h <= expansion.max_lag(); ++h) {
        double sum = 0.0;
        for (Index t = h; t < n; ++t) sum += expansion.E(t, h - 1);
        const double mean = sum / static_cast<double>(n);
        c.col(h - 1).tail(n - h).array() -= mean;
    }
    return c;
}

Eigen::VectorXd bootstrap_correlations(const ExpansionSet& expansion, const Eigen::VectorXd& phi,
                                       bool recenter) {
    const Index n = expansion.size();
    if (phi.size() != n) throw InvalidArgument("auxiliary sequence must have one value per residual");
    if (!(expansion.gamma0 > 0.0)) throw DegenerateSeries("bootstrap denominator gamma(0) is zero");
    const double nd = static_cast<double>(n);
    Eigen::VectorXd rho(expansion.max_lag());
    for (Index h = 1; h <= expansion.max_lag(); ++h) {
        double center = 0.0;
        if (recenter) {
            for (Index t = h; t < n; ++t) center += expansion.E(t, h - 1);
            center /= nd;
        }
        double sum = 0.0;
        for (Index t = h; t < n; ++t) sum += phi(t) * (expansion.E(t, h - 1) - center);
        rho(h - 1) = (sum / nd) / expansion.gamma0;
    }
    return rho;
}

std::string to_string(StatisticKind kind) {
    switch (kind) {
    case StatisticKind::max_corr: return "maxcorr";
    case StatisticKind::portmanteau: return "portmanteau";
    case StatisticKind::hong: return "hong";
    case StatisticKind::ljung_box: return "ljung_box";
    }
    return "?";
}

StatisticKind parse_statistic_kind(std::string_view text) {
    if (text == "maxcorr" || text == "max") return StatisticKind::max_corr;
    if (text == "portmanteau") return StatisticKind::portmanteau;
    if (text == "hong") return StatisticKind::hong;
    if (text == "ljung_box" || text == "ljung-box" || text == "lb") return StatisticKind::ljung_box;
    throw InvalidArgument("unknown statistic '" + std::string(text) + "'");
}

double correlation_statistic(StatisticKind kind, const Eigen::Ref<const Eigen::VectorXd>& rho, Index n,
                             const Eigen::VectorXd& weights) {
    switch (kind) {
    case StatisticKind::max_corr: return max_corr_statistic(rho, n, weights);
    case StatisticKind::portmanteau: return portmanteau_statistic(rho, n, weights);
    case StatisticKind::hong: return hong_statistic(rho, n);
    case StatisticKind::ljung_box: return ljung_box_statistic(rho, n);
    }
    throw InvalidArgument("unknown statistic kind");
}

double bootstrap_p_value(const Eigen::VectorXd& draws, double statistic) {
    if (draws.size() == 0) throw InvalidArgument("no bootstrap draws");
    const auto count = (draws.array() >= statistic).count();
    return static_cast<double>(count) / static_cast<double>(draws.size());
}

CorrelationDraws correlation_draws(const FittedFilter& filter, Index max_lag, const BootstrapSpec& spec_in) {
    const BootstrapSpec spec = spec_in.normalized();
    if (spec.method == BootstrapMethod::brwb)
        throw InvalidArgument("the random weighting bootstrap applies to the CvM statistic only");
    const ExpansionSet expansion = compute_expansion(filter, max_lag);
    const Index n = expansion.size();

    CorrelationDraws out;
    out.spec = spec;
    out.observed = sample_correlations(filter.residuals, max_lag);
    out.block_size = spec.block.resolve(n);
    const BlockScheme scheme = make_blocks(n, out.block_size);

    // phi is block-constant, so sum_t phi_t C(t,h) = sum_s xi_s (sum_{t in B_s} C(t,h)).
    const Eigen::MatrixXd centered = centered_expansion(expansion, spec.recenter);
    Eigen::MatrixXd block_sums(scheme.count(), max_lag);
    for (Index s = 0; s < scheme.count(); ++s)
        block_sums.row(s) = centered.middleRows(scheme.blocks[s].start, scheme.blocks[s].length).colwise().sum();

    const Eigen::MatrixXd xi = multiplier_matrix(scheme, spec.seed, spec.draws);
    out.stream_digest = stream_digest(xi);
    out.draws = (block_sums.transpose() * xi) / (static_cast<double>(n) * expansion.gamma0);
    return out;
}

TestResult evaluate_statistic(StatisticKind kind, const CorrelationDraws& draws, const LagWeights& weights) {
    const Index n = draws.observed.n;
    TestResult r;
    r.test = to_string(kind) + "-" + to_string(draws.spec.method);
    r.statistic = correlation_statistic(kind, draws.observed.rho, n, weights.resolved);
    r.draws.resize(draws.draws.cols());
    for (Index i = 0; i < draws.draws.cols(); ++i)
        r.draws(i) = correlation_statistic(kind, draws.draws.col(i), n, weights.resolved);
    r.p_value = bootstrap_p_value(r.draws, r.statistic);
    r.lag = draws.observed.max_lag();
    r.block_size = draws.block_size;
    r.draws_requested = draws.spec.draws;
    r.seed = draws.spec.seed;
    r.stream_digest = draws.stream_digest;
    return r;
}

TestResult bootstrap_test(const FittedFilter& filter, Index max_lag, const LagWeights& weights,
                          StatisticKind kind, const BootstrapSpec& spec) {
    return evaluate_statistic(kind, correlation_draws(filter, max_lag, spec), weights);
}

TestResult bootstrap_test(const Eigen::Ref<const Eigen::VectorXd>& y, const FilterSpec& filter_spec,
                          const LagRule& lag_rule, WeightScheme weights, StatisticKind kind,
                          const BootstrapSpec& spec) {
    const FittedFilter filter = fit_filter(y, filter_spec);
    ResolvedLag lag = resolve_lag_rule(lag_rule, y.size());
    std::vector<std::string> warnings;
    if (lag.lag > filter.size() - 1) lag = {filter.size() - 1, true};
    if (lag.clipped) warnings.push_back("lag rule clipped to n - 1 = " + std::to_string(lag.lag));
    TestResult r = bootstrap_test(filter, lag.lag, resolve_weights(weights, filter.size(), lag.lag), kind, spec);
    r.warnings.insert(r.warnings.end(), warnings.begin(), warnings.end());
    return r;
}

}  // namespace maxcorr
