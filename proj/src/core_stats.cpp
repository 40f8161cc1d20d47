#include "maxcorr/core_stats.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace maxcorr {

Series Series::make(Eigen::VectorXd values, std::string label) {
    if (values.size() < 2) throw InvalidArgument("a series needs at least two observations");
    detail::require_finite(values);
    return Series{std::move(values), std::move(label)};
}

namespace {

double parse_double(std::string_view text) {
    double value = 0.0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end)
        throw InvalidArgument("not a number: '" + std::string(text) + "'");
    return value;
}

Index parse_index(std::string_view text) {
    long long value = 0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end)
        throw InvalidArgument("not an integer: '" + std::string(text) + "'");
    return static_cast<Index>(value);
}

}  // namespace

LagRule LagRule::parse(std::string_view text) {
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) return fixed(parse_index(text));
    const auto head = text.substr(0, colon);
    const auto tail = text.substr(colon + 1);
    if (head == "fixed") return fixed(parse_index(tail));
    if (head == "prop" || head == "proportional") return proportional(parse_double(tail));
    throw InvalidArgument("unknown lag rule '" + std::string(text) + "'");
}

std::string LagRule::to_string() const {
    std::ostringstream os;
    if (kind == Kind::fixed)
        os << "fixed:" << fixed_lag;
    else
        os << "prop:" << delta;
    return os.str();
}

ResolvedLag resolve_lag_rule(const LagRule& rule, Index n) {
    if (n < 2) throw InvalidArgument("sample size must be at least 2");
    Index lag = 0;
    if (rule.kind == LagRule::Kind::fixed) {
        lag = rule.fixed_lag;
    } else {
        if (!(rule.delta > 0.0 && rule.delta <= 1.0))
            throw InvalidArgument("proportional lag rule needs delta in (0, 1]");
        if (n < 8) throw InvalidArgument("proportional lag rule needs n >= 8");
        const double nd = static_cast<double>(n);
        lag = static_cast<Index>(std::trunc(rule.delta * nd / std::log(nd)));
    }
    if (lag < 1) throw InvalidArgument("lag rule resolves to no testable lags");
    if (lag > n - 1) return {n - 1, true};
    return {lag, false};
}

LagWeights resolve_weights(WeightScheme scheme, Index n, Index max_lag,
                           const Eigen::VectorXd& custom) {
    if (max_lag < 1 || max_lag >= n) throw InvalidArgument("weights need 1 <= L < n");
    LagWeights out{scheme, Eigen::VectorXd(max_lag)};
    switch (scheme) {
    case WeightScheme::constant:
        out.resolved.setOnes();
        break;
    case WeightScheme::ljung_box:
        for (Index h = 1; h <= max_lag; ++h)
            out.resolved(h - 1) = static_cast<double>(n + 2) / static_cast<double>(n - h);
        break;
    case WeightScheme::custom:
        if (custom.size() != max_lag)
            throw InvalidArgument("custom weights must have one entry per lag");
        if (!(custom.array() > 0.0).all() || !custom.allFinite())
            throw InvalidArgument("custom weights must be strictly positive");
        out.resolved = custom;
        break;
    }
    return out;
}

std::string to_string(WeightScheme scheme) {
    switch (scheme) {
    case WeightScheme::constant: return "constant";
    case WeightScheme::ljung_box: return "ljung_box";
    case WeightScheme::custom: return "custom";
    }
    return "?";
}

WeightScheme parse_weight_scheme(std::string_view text) {
    if (text == "constant") return WeightScheme::constant;
    if (text == "ljung_box" || text == "ljung-box") return WeightScheme::ljung_box;
    throw InvalidArgument("unknown weight scheme '" + std::string(text) + "'");
}

}  // namespace maxcorr
