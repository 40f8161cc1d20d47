#pragma once

// Dependent wild bootstrap (DWB), wild bootstrap (WB) and the shared machinery
// for bootstrapped p-values.
//
// A DWB draw multiplies the recentred expansion variables E_{t,h} by a
// block-constant N(0,1) multiplier phi_t:
//   rho*(h) = [ (1/n) sum_{t>h} phi_t { E_{t,h} - (1/n) sum_{s>h} E_{s,h} } ] / [ (1/n) sum eps_t^2 ].
// The WB is the special case b_n = 1 without recentring.

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "maxcorr/core_stats.hpp"
#include "maxcorr/filters.hpp"
#include "maxcorr/rng.hpp"

namespace maxcorr {

struct Block {
    Index start = 0;   // 0-based
    Index length = 0;
};

/// Consecutive blocks of length b_n; the last block is shorter when b_n does not divide n.
struct BlockScheme {
    Index n = 0;
    Index block_size = 0;
    std::vector<Block> blocks;

    Index count() const { return static_cast<Index>(blocks.size()); }
    Index block_of(Index t) const { return t / block_size; }
};

BlockScheme make_blocks(Index n, Index block_size);

enum class BootstrapMethod { dwb, wb, brwb };

struct BlockRule {
    enum class Kind { sqrt_n, fixed };

    Kind kind = Kind::sqrt_n;
    Index size = 0;

    static BlockRule sqrt_n() { return {Kind::sqrt_n, 0}; }
    static BlockRule fixed(Index b) { return {Kind::fixed, b}; }
    /// floor(sqrt(n)) (at least 1) or the fixed size.
    Index resolve(Index n) const;
    /// "sqrt" or an integer.
    static BlockRule parse(std::string_view text);
    std::string to_string() const;
};

struct BootstrapSpec {
    BootstrapMethod method = BootstrapMethod::dwb;
    BlockRule block = BlockRule::sqrt_n();
    Index draws = 500;
    std::uint64_t seed = 0;
    bool recenter = true;

    static BootstrapSpec dwb(Index draws = 500, std::uint64_t seed = 0) {
        return {BootstrapMethod::dwb, BlockRule::sqrt_n(), draws, seed, true};
    }
    static BootstrapSpec wb(Index draws = 500, std::uint64_t seed = 0) {
        return {BootstrapMethod::wb, BlockRule::fixed(1), draws, seed, false};
    }
    static BootstrapSpec brwb(Index draws = 500, std::uint64_t seed = 0) {
        return {BootstrapMethod::brwb, BlockRule::sqrt_n(), draws, seed, true};
    }

    /// Validates M >= 1 and b_n >= 1, and forces b_n = 1 / no recentring for WB.
    BootstrapSpec normalized() const;
    Index block_size(Index n) const { return normalized().block.resolve(n); }
};

std::string to_string(BootstrapMethod method);
BootstrapMethod parse_bootstrap_method(std::string_view text);

/// b_n := 1, recenter := off, method := wb.
BootstrapSpec reduce_to_wild(BootstrapSpec spec);

/// One N(0,1) multiplier per block.
Eigen::VectorXd draw_block_multipliers(const BlockScheme& scheme, Engine& rng);
/// phi_t = xi_s for t in block s.
Eigen::VectorXd expand_multipliers(const BlockScheme& scheme, const Eigen::VectorXd& xi);
/// phi_t for one draw.
Eigen::VectorXd draw_auxiliary(const BlockScheme& scheme, Engine& rng);

/// Multipliers for draws 0..M-1 (blocks x M); draw i uses stream (seed, i).
Eigen::MatrixXd multiplier_matrix(const BlockScheme& scheme, std::uint64_t seed, Index draws);

/// Order-sensitive hash of a matrix's bit patterns, used to audit shared draw streams.
std::uint64_t stream_digest(const Eigen::MatrixXd& values);

/// E_{t,h} minus its (divisor-n) mean over t > h, zero for t <= h. With
/// recenter = false the expansion variables are returned unchanged.
Eigen::MatrixXd centered_expansion(const ExpansionSet& expansion, bool recenter);

/// rho*(h), h = 1..L, for one auxiliary sequence phi (length n).
Eigen::VectorXd bootstrap_correlations(const ExpansionSet& expansion, const Eigen::VectorXd& phi,
                                       bool recenter);

enum class StatisticKind { max_corr, portmanteau, hong, ljung_box };

std::string to_string(StatisticKind kind);
StatisticKind parse_statistic_kind(std::string_view text);

/// Applies the statistic transform to one correlation vector. `weights` is used by
/// max_corr and portmanteau; hong and ljung_box carry their own (n+2)/(n-h) weights.
double correlation_statistic(StatisticKind kind, const Eigen::Ref<const Eigen::VectorXd>& rho,
                             Index n, const Eigen::VectorXd& weights);

struct TestResult {
    std::string test;
    double statistic = 0.0;
    Eigen::VectorXd draws;
    double p_value = 1.0;
    Index lag = 0;
    Index block_size = 0;
    Index draws_requested = 0;
    std::uint64_t seed = 0;
    std::uint64_t stream_digest = 0;
    Index discarded = 0;
    bool asymptotic = false;
    std::vector<std::string> warnings;

    bool reject(double alpha) const { return p_value < alpha; }
};

/// (1/M) #{draws >= statistic}.
double bootstrap_p_value(const Eigen::VectorXd& draws, double statistic);

/// Observed correlations plus M bootstrapped correlation vectors sharing one stream.
struct CorrelationDraws {
    CorrelationSet observed;
    Eigen::MatrixXd draws;  // L x M
    Index block_size = 0;
    std::uint64_t stream_digest = 0;
    BootstrapSpec spec;
};

CorrelationDraws correlation_draws(const FittedFilter& filter, Index max_lag, const BootstrapSpec& spec);

TestResult evaluate_statistic(StatisticKind kind, const CorrelationDraws& draws, const LagWeights& weights);

TestResult bootstrap_test(const FittedFilter& filter, Index max_lag, const LagWeights& weights,
                          StatisticKind kind, const BootstrapSpec& spec);

/// Fits the filter, resolves the lag rule on the sample size and runs the test.
TestResult bootstrap_test(const Eigen::Ref<const Eigen::VectorXd>& y, const FilterSpec& filter,
                          const LagRule& lag_rule, WeightScheme weights, StatisticKind kind,
                          const BootstrapSpec& spec);

}  // namespace maxcorr
