#pragma once

// Data generating processes and the replication engine behind rejection-frequency
// tables.
//
// Seeding: replication r of a DGP draws its data from derive_seed(master, hash(dgp key), r),
// so every test applied to the same DGP sees the same samples. The bootstrap seed of
// that replication is derived from the data seed, which makes tests sharing a DGP
// also share multiplier streams.

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "maxcorr/bootstrap.hpp"
#include "maxcorr/competing_tests.hpp"
#include "maxcorr/filters.hpp"
#include "maxcorr/rng.hpp"

namespace maxcorr {

enum class ErrorKind { iid, garch, ma2, ar1, remote_ma };

struct ErrorSpec {
    ErrorKind kind = ErrorKind::iid;
    Index q = 24;                       // remote_ma order
    std::optional<bool> standardize;    // unset: standardize iff the process is GARCH

    /// "iid", "garch", "ma2", "ar1", "ma:24".
    static ErrorSpec parse(std::string_view text);
    std::string to_string() const;
    /// Analytic unconditional standard deviation.
    double unconditional_sd() const;
};

enum class ProcessKind { simple, bilinear, ar2, garch11 };

std::string to_string(ProcessKind kind);
ProcessKind parse_process_kind(std::string_view text);

struct DgpSpec {
    ProcessKind process = ProcessKind::simple;
    ErrorSpec error;
    Index n = 100;

    bool standardized_error() const;
    /// Stable identifier used to derive data streams.
    std::string key() const;
};

/// e_1..e_length. Pre-sample innovations and lags are zero; the GARCH error starts at w_1^2 = 1.
Eigen::VectorXd gen_error(const ErrorSpec& spec, Index length, Engine& rng, bool standardize = false);

struct GeneratedSeries {
    Eigen::VectorXd y;
    bool overflow = false;  // a GARCH variance left the representable range
};

/// Draws 2n observations and keeps the last n.
GeneratedSeries gen_process(const DgpSpec& spec, Engine& rng);

enum class TestFamily { max_corr, portmanteau, hong, ljung_box, cvm, dv };

struct TestId {
    TestFamily family = TestFamily::max_corr;
    BootstrapMethod method = BootstrapMethod::dwb;
    bool asymptotic = false;
    LrvKind lrv = LrvKind::identity;          // dv only
    WeightScheme weights = WeightScheme::constant;

    /// "maxcorr-dwb", "portmanteau-wb", "hong-asy", "lb-dwb", "cvm-brwb",
    /// "dv-bartlett-asy", "dv-identity-dwb", ...
    static TestId parse(std::string_view text);
    std::string to_string() const;
};

/// Runs one test on a fitted filter. `lag` is ignored by CvM tests (they use every lag).
TestResult run_test(const TestId& id, const FittedFilter& filter, Index lag, const BootstrapSpec& spec);

struct Cell {
    std::string name;
    DgpSpec dgp;
    FilterSpec filter = FilterSpec::mean();
    TestId test;
    LagRule lag = LagRule::fixed(5);
    BootstrapSpec bootstrap;
};

struct McConfig {
    std::vector<Cell> cells;
    Index replications = 1000;
    std::vector<double> levels{0.01, 0.05, 0.10};
    std::uint64_t seed = 20240101;
    unsigned threads = 1;
    double max_failure_fraction = 0.02;

    void validate() const;
};

struct CellResult {
    Cell cell;
    Index lag = 0;
    Index replications = 0;       // attempted
    Index failures = 0;           // excluded replications
    Index overflows = 0;
    bool failed = false;          // failures above the cap
    std::string error;            // first failure message
    Eigen::VectorXd rejection;    // per level
    Eigen::VectorXd std_error;    // sqrt(p (1 - p) / R)
    std::vector<double> p_values; // kept replications, in replication order
    double seconds = 0.0;
};

struct RejectionTable {
    McConfig config;
    std::vector<CellResult> cells;
    double seconds = 0.0;
};

/// Seed of replication r's data.
std::uint64_t replication_seed(std::uint64_t master, const DgpSpec& dgp, Index replication);

CellResult run_cell(const Cell& cell, Index replications, std::uint64_t master_seed,
                    const std::vector<double>& levels = {0.01, 0.05, 0.10}, unsigned threads = 1,
                    double max_failure_fraction = 0.02);

RejectionTable run_table(const McConfig& config);

/// Runs body(i) for i in [0, count) on up to `threads` workers. The first exception
/// (lowest index) is rethrown after all workers stop.
void parallel_for(Index count, unsigned threads, const std::function<void(Index)>& body);

/// Thread count from MAXCORR_THREADS, else hardware concurrency (at least 1).
unsigned default_thread_count();

}  // namespace maxcorr
