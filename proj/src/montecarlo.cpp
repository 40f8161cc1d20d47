#include "maxcorr/montecarlo.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <random>
#include <thread>

namespace maxcorr {

namespace {

constexpr double kGarchErrorOmega = 1.0, kGarchErrorAlpha = 0.2, kGarchErrorBeta = 0.5;
constexpr double kGarchOmega = 1.0, kGarchAlpha = 0.2, kGarchBeta = 0.5;
constexpr double kOverflowLimit = 1e150;

Index parse_index(std::string_view text, std::string_view what) {
    Index value = 0;
    if (text.empty()) throw InvalidArgument("missing " + std::string(what));
    for (char c : text) {
        if (c < '0' || c > '9') throw InvalidArgument("bad " + std::string(what) + " '" + std::string(text) + "'");
        value = value * 10 + (c - '0');
    }
    return value;
}

}  // namespace

ErrorSpec ErrorSpec::parse(std::string_view text) {
    ErrorSpec spec;
    if (text == "iid") spec.kind = ErrorKind::iid;
    else if (text == "garch") spec.kind = ErrorKind::garch;
    else if (text == "ma2") spec.kind = ErrorKind::ma2;
    else if (text == "ar1") spec.kind = ErrorKind::ar1;
    else if (text.starts_with("ma:")) {
        spec.kind = ErrorKind::remote_ma;
        spec.q = parse_index(text.substr(3), "MA order");
        if (spec.q < 1) throw InvalidArgument("MA order must be at least 1");
    } else {
        throw InvalidArgument("unknown error process '" + std::string(text) + "'");
    }
    return spec;
}

std::string ErrorSpec::to_string() const {
    switch (kind) {
    case ErrorKind::iid: return "iid";
    case ErrorKind::garch: return "garch";
    case ErrorKind::ma2: return "ma2";
    case ErrorKind::ar1: return "ar1";
    case ErrorKind::remote_ma: return "ma:" + std::to_string(q);
    }
    return "?";
}

double ErrorSpec::unconditional_sd() const {
    switch (kind) {
    case ErrorKind::iid: return 1.0;
    case ErrorKind::garch: return std::sqrt(kGarchErrorOmega / (1.0 - kGarchErrorAlpha - kGarchErrorBeta));
    case ErrorKind::ma2: return std::sqrt(1.0 + 0.25 + 0.0625);
    case ErrorKind::ar1: return std::sqrt(1.0 / (1.0 - 0.49));
    case ErrorKind::remote_ma: return std::sqrt(1.0 + 0.0625);
    }
    return 1.0;
}

std::string to_string(ProcessKind kind) {
    switch (kind) {
    case ProcessKind::simple: return "simple";
    case ProcessKind::bilinear: return "bilinear";
    case ProcessKind::ar2: return "ar2";
    case ProcessKind::garch11: return "garch";
    }
    return "?";
}

ProcessKind parse_process_kind(std::string_view text) {
    if (text == "simple") return ProcessKind::simple;
    if (text == "bilinear") return ProcessKind::bilinear;
    if (text == "ar2") return ProcessKind::ar2;
    if (text == "garch" || text == "garch11") return ProcessKind::garch11;
    throw InvalidArgument("unknown process '" + std::string(text) + "'");
}

bool DgpSpec::standardized_error() const {
    return error.standardize.value_or(process == ProcessKind::garch11);
}

std::string DgpSpec::key() const {
    return to_string(process) + "/" + error.to_string() + (standardized_error() ? "/std" : "/raw") + "/n=" +
           std::to_string(n);
}

Eigen::VectorXd gen_error(const ErrorSpec& spec, Index length, Engine& rng, bool standardize) {
    if (length < 1) throw InvalidArgument("error length must be at least 1");
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXd nu(length);
    for (Index t = 0; t < length; ++t) nu(t) = normal(rng);

    Eigen::VectorXd e(length);
    switch (spec.kind) {
    case ErrorKind::iid:
        e = nu;
        break;
    case ErrorKind::garch: {
        double w2 = 1.0;
        e(0) = nu(0);
        for (Index t = 1; t < length; ++t) {
            w2 = kGarchErrorOmega + kGarchErrorAlpha * e(t - 1) * e(t - 1) + kGarchErrorBeta * w2;
            e(t) = nu(t) * std::sqrt(w2);
        }
        break;
    }
    case ErrorKind::ma2:
        for (Index t = 0; t < length; ++t)
            e(t) = nu(t) + (t >= 1 ? 0.5 * nu(t - 1) : 0.0) + (t >= 2 ? 0.25 * nu(t - 2) : 0.0);
        break;
    case ErrorKind::ar1:
        e(0) = nu(0);
        for (Index t = 1; t < length; ++t) e(t) = 0.7 * e(t - 1) + nu(t);
        break;
    case ErrorKind::remote_ma:
        for (Index t = 0; t < length; ++t) e(t) = nu(t) + (t >= spec.q ? 0.25 * nu(t - spec.q) : 0.0);
        break;
    }
    if (standardize) e /= spec.unconditional_sd();
    return e;
}

GeneratedSeries gen_process(const DgpSpec& spec, Engine& rng) {
    if (spec.n < 2) throw InvalidArgument("sample size must be at least 2");
    const Index total = 2 * spec.n;
    const Eigen::VectorXd e = gen_error(spec.error, total, rng, spec.standardized_error());
    GeneratedSeries out;
    Eigen::VectorXd y(total);
    switch (spec.process) {
    case ProcessKind::simple:
        y = e;
        break;
    case ProcessKind::bilinear:
        for (Index t = 0; t < total; ++t) {
            const double lagged = (t >= 2) ? 0.5 * e(t - 1) * y(t - 2) : 0.0;
            y(t) = lagged + e(t);
        }
        break;
    case ProcessKind::ar2:
        for (Index t = 0; t < total; ++t)
            y(t) = (t >= 1 ? 0.3 * y(t - 1) : 0.0) - (t >= 2 ? 0.15 * y(t - 2) : 0.0) + e(t);
        break;
    case ProcessKind::garch11: {
        double s2 = kGarchOmega / (1.0 - kGarchAlpha - kGarchBeta);
        y(0) = std::sqrt(s2) * e(0);
        for (Index t = 1; t < total; ++t) {
            s2 = kGarchOmega + kGarchAlpha * y(t - 1) * y(t - 1) + kGarchBeta * s2;
            if (!(s2 < kOverflowLimit)) {
                out.overflow = true;
                s2 = kOverflowLimit;
            }
            y(t) = std::sqrt(s2) * e(t);
        }
        break;
    }
    }
    out.y = y.tail(spec.n);
    return out;
}

TestId TestId::parse(std::string_view text) {
    std::vector<std::string_view> parts;
    for (std::size_t start = 0;;) {
        const auto dash = text.find('-', start);
        parts.push_back(text.substr(start, dash - start));
        if (dash == std::string_view::npos) break;
        start = dash + 1;
    }
    TestId id;
    const auto bad = [&] { return InvalidArgument("unknown test '" + std::string(text) + "'"); };
    std::size_t next = 1;
    const std::string_view head = parts[0];
    if (head == "maxcorr") id.family = TestFamily::max_corr;
    else if (head == "portmanteau") id.family = TestFamily::portmanteau;
    else if (head == "hong") id.family = TestFamily::hong;
    else if (head == "lb") id.family = TestFamily::ljung_box;
    else if (head == "cvm") id.family = TestFamily::cvm;
    else if (head == "dv") {
        id.family = TestFamily::dv;
        if (parts.size() < 3) throw bad();
        id.lrv = parse_lrv_kind(parts[1]);
        next = 2;
    } else {
        throw bad();
    }
    if (parts.size() != next + 1) throw bad();
    const std::string_view method = parts[next];
    if (method == "asy") {
        if (id.family != TestFamily::hong && id.family != TestFamily::dv) throw bad();
        id.asymptotic = true;
    } else {
        id.method = parse_bootstrap_method(method);
        if (id.method == BootstrapMethod::brwb && id.family != TestFamily::cvm) throw bad();
    }
    return id;
}

std::string TestId::to_string() const {
    std::string head;
    switch (family) {
    case TestFamily::max_corr: head = "maxcorr"; break;
    case TestFamily::portmanteau: head = "portmanteau"; break;
    case TestFamily::hong: head = "hong"; break;
    case TestFamily::ljung_box: head = "lb"; break;
    case TestFamily::cvm: head = "cvm"; break;
    case TestFamily::dv: head = "dv-" + maxcorr::to_string(lrv); break;
    }
    return head + "-" + (asymptotic ? std::string("asy") : maxcorr::to_string(method));
}

TestResult run_test(const TestId& id, const FittedFilter& filter, Index lag, const BootstrapSpec& spec_in) {
    BootstrapSpec spec = spec_in;
    if (!id.asymptotic) {
        spec.method = id.method;
        if (id.method == BootstrapMethod::wb) spec = reduce_to_wild(spec);
    }
    const auto kind_of = [](TestFamily f) {
        switch (f) {
        case TestFamily::portmanteau: return StatisticKind::portmanteau;
        case TestFamily::hong: return StatisticKind::hong;
        case TestFamily::ljung_box: return StatisticKind::ljung_box;
        default: return StatisticKind::max_corr;
        }
    };
    switch (id.family) {
    case TestFamily::max_corr:
    case TestFamily::portmanteau:
    case TestFamily::ljung_box:
        return bootstrap_test(filter, lag, resolve_weights(id.weights, filter.size(), lag), kind_of(id.family), spec);
    case TestFamily::hong:
        if (id.asymptotic) return hong_asymptotic_test(filter, lag);
        return bootstrap_test(filter, lag, resolve_weights(id.weights, filter.size(), lag), StatisticKind::hong, spec);
    case TestFamily::cvm:
        return cvm_bootstrap(filter, spec);
    case TestFamily::dv:
        return dv_q_test(filter, lag, id.lrv, id.asymptotic ? DvMode::asymptotic : DvMode::bootstrap, spec);
    }
    throw InvalidArgument("unknown test family");
}

void McConfig::validate() const {
    if (replications < 1) throw InvalidArgument("replications must be at least 1");
    if (levels.empty()) throw InvalidArgument("at least one nominal level is required");
    for (double a : levels)
        if (!(a > 0.0 && a < 1.0)) throw InvalidArgument("nominal levels must lie in (0, 1)");
    for (const Cell& c : cells) {
        if (c.dgp.n < 8) throw InvalidArgument("cell '" + c.name + "': sample size below 8");
        const Index available = c.dgp.n - c.filter.presample();
        const Index requested = c.lag.kind == LagRule::Kind::fixed ? c.lag.fixed_lag : resolve_lag_rule(c.lag, c.dgp.n).lag;
        if (c.test.family != TestFamily::cvm && requested >= available)
            throw InvalidArgument("cell '" + c.name + "': lag must be below the sample size");
        c.bootstrap.normalized();
    }
}

std::uint64_t replication_seed(std::uint64_t master, const DgpSpec& dgp, Index replication) {
    return derive_seed(master, hash_key(dgp.key()), static_cast<std::uint64_t>(replication));
}

void parallel_for(Index count, unsigned threads, const std::function<void(Index)>& body) {
    if (count <= 0) return;
    const unsigned workers = static_cast<unsigned>(std::clamp<Index>(threads == 0 ? 1 : threads, 1, count));
    if (workers == 1) {
        for (Index i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<Index> next{0};
    std::mutex error_mutex;
    Index error_index = count;
    std::exception_ptr error;
    auto work = [&] {
        for (Index i = next++; i < count; i = next++) {
            try {
                body(i);
            } catch (...) {
                const std::lock_guard lock(error_mutex);
                if (i < error_index) {
                    error_index = i;
                    error = std::current_exception();
                }
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

unsigned default_thread_count() {
    if (const char* env = std::getenv("MAXCORR_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

struct Replication {
    double p_value = 1.0;
    bool ok = false;
    bool overflow = false;
    std::string error;
};

}  // namespace

CellResult run_cell(const Cell& cell, Index replications, std::uint64_t master_seed,
                    const std::vector<double>& levels, unsigned threads, double max_failure_fraction) {
    if (replications < 1) throw InvalidArgument("replications must be at least 1");
    const auto start = std::chrono::steady_clock::now();
    CellResult out;
    out.cell = cell;
    out.replications = replications;
    out.lag = cell.test.family == TestFamily::cvm ? cell.dgp.n - cell.filter.presample() - 1
                                                  : resolve_lag_rule(cell.lag, cell.dgp.n).lag;

    std::vector<Replication> reps(static_cast<std::size_t>(replications));
    parallel_for(replications, threads, [&](Index r) {
        Replication& rep = reps[static_cast<std::size_t>(r)];
        const std::uint64_t data_seed = replication_seed(master_seed, cell.dgp, r);
        Engine rng(data_seed);
        try {
            const GeneratedSeries series = gen_process(cell.dgp, rng);
            rep.overflow = series.overflow;
            const FittedFilter filter = fit_filter(series.y, cell.filter);
            BootstrapSpec spec = cell.bootstrap;
            spec.seed = derive_seed(data_seed, hash_key("bootstrap"), cell.bootstrap.seed);
            const Index lag = std::min(out.lag, filter.size() - 1);
            rep.p_value = run_test(cell.test, filter, lag, spec).p_value;
            rep.ok = true;
        } catch (const Error& e) {
            rep.error = e.what();
        }
    });

    Eigen::VectorXd rejections = Eigen::VectorXd::Zero(static_cast<Index>(levels.size()));
    for (const Replication& rep : reps) {
        if (rep.overflow) ++out.overflows;
        if (!rep.ok) {
            if (out.error.empty()) out.error = rep.error;
            ++out.failures;
            continue;
        }
        out.p_values.push_back(rep.p_value);
        for (std::size_t j = 0; j < levels.size(); ++j)
            if (rep.p_value < levels[j]) rejections(static_cast<Index>(j)) += 1.0;
    }
    const Index kept = replications - out.failures;
    out.failed = static_cast<double>(out.failures) > max_failure_fraction * static_cast<double>(replications);
    if (kept > 0) {
        out.rejection = rejections / static_cast<double>(kept);
        out.std_error = (out.rejection.array() * (1.0 - out.rejection.array()) / static_cast<double>(kept)).sqrt();
    } else {
        out.rejection = Eigen::VectorXd::Constant(rejections.size(), std::numeric_limits<double>::quiet_NaN());
        out.std_error = out.rejection;
    }
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

RejectionTable run_table(const McConfig& config) {
    config.validate();
    const auto start = std::chrono::steady_clock::now();
    RejectionTable table;
    table.config = config;
    table.cells.reserve(config.cells.size());
    for (const Cell& cell : config.cells)
        table.cells.push_back(run_cell(cell, config.replications, config.seed, config.levels, config.threads,
                                       config.max_failure_fraction));
    table.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return table;
}

}  // namespace maxcorr
