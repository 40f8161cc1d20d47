// maxcorr: white noise tests on a series, and Monte Carlo rejection tables.
//
// Exit codes: 0 success, 1 internal error, 2 usage or input error,
// 3 numerical failure (degenerate series, failed fit, failed simulation cell).

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "cli_config.hpp"
#include "maxcorr/table_io.hpp"

#ifndef MAXCORR_VERSION
#define MAXCORR_VERSION "dev"
#endif

using namespace maxcorr;

namespace {

enum ExitCode { kOk = 0, kInternal = 1, kInput = 2, kNumeric = 3 };

struct TestOptions {
    std::string input;
    std::string filter = "mean";
    std::string test = "maxcorr";
    std::string bootstrap = "dwb";
    std::string lag = "5";
    std::string weights = "constant";
    std::string block = "sqrt";
    Index draws = 500;
    std::uint64_t seed = 1;
    double alpha = 0.05;
    bool no_recenter = false;
    bool json = false;
    bool with_draws = false;
};

struct SimulateOptions {
    std::string config;
    std::string preset;
    std::optional<Index> reps;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    std::optional<Index> draws;
    std::string out;
    bool json = false;
    bool timings = false;
    bool quiet = false;
};

std::string fmt(const char* spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

bool parse_double(const std::string& text, double& value) {
    std::istringstream is(text);
    is >> value;
    return !is.fail() && (is >> std::ws).eof();
}

Eigen::VectorXd read_series(std::istream& in, const std::string& source) {
    std::vector<double> values;
    std::string line;
    int lineno = 0;
    int pending_blank = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos) {
            if (pending_blank == 0) pending_blank = lineno;
            continue;
        }
        const std::string where = source + ":" + std::to_string(lineno);
        if (pending_blank) throw InputError(source + ":" + std::to_string(pending_blank) + ": missing value");
        const std::string cell = line.substr(first, line.find_last_not_of(" \t") - first + 1);
        if (cell.find_first_of(",;\t ") != std::string::npos) throw InputError(where + ": expected a single column");
        double v = 0.0;
        if (!parse_double(cell, v)) {
            if (values.empty() && lineno == 1) continue;  // header
            throw InputError(where + ": non-numeric value '" + cell + "'");
        }
        if (!std::isfinite(v)) throw InputError(where + ": missing or non-finite value '" + cell + "'");
        values.push_back(v);
    }
    if (values.empty()) throw InputError(source + ": no observations");
    return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Index>(values.size()));
}

Eigen::VectorXd load_series(const std::string& path) {
    if (path == "-") return read_series(std::cin, "<stdin>");
    std::ifstream in(path);
    if (!in) throw InputError("cannot open '" + path + "'");
    return read_series(in, path);
}

int run_test_command(const TestOptions& opt) {
    const Eigen::VectorXd y = load_series(opt.input);
    const FilterSpec filter_spec = FilterSpec::parse(opt.filter);
    const LagRule lag_rule = LagRule::parse(opt.lag);
    TestId id = TestId::parse(opt.test + "-" + (opt.bootstrap == "none" ? std::string("asy") : opt.bootstrap));
    id.weights = parse_weight_scheme(opt.weights);
    if (!(opt.alpha > 0.0 && opt.alpha < 1.0)) throw InvalidArgument("alpha must lie in (0, 1)");
    if (y.size() <= filter_spec.presample() + 1)
        throw InputError("series of length " + std::to_string(y.size()) + " is too short for filter " +
                         filter_spec.to_string());

    if (lag_rule.kind == LagRule::Kind::fixed && lag_rule.fixed_lag >= y.size())
        throw InputError("lag " + std::to_string(lag_rule.fixed_lag) + " needs more than " +
                         std::to_string(y.size()) + " observations");
    const FittedFilter filter = fit_filter(y, filter_spec);
    std::vector<std::string> warnings;
    const ResolvedLag resolved = resolve_lag_rule(lag_rule, y.size());
    Index lag = resolved.lag;
    if (lag > filter.size() - 1) {
        lag = filter.size() - 1;
        warnings.push_back("lag clipped to " + std::to_string(lag) + " (residual length " +
                           std::to_string(filter.size()) + ")");
    } else if (resolved.clipped) {
        warnings.push_back("lag clipped to n - 1");
    }

    BootstrapSpec spec{id.method, BlockRule::parse(opt.block), opt.draws, opt.seed, !opt.no_recenter};
    if (!id.asymptotic) spec = spec.normalized();
    TestResult result = run_test(id, filter, lag, spec);
    warnings.insert(warnings.end(), result.warnings.begin(), result.warnings.end());
    const Index shown = std::min<Index>(lag, filter.size() - 1);
    const Eigen::VectorXd rho = sample_correlations(filter.residuals, shown).rho;
    const bool reject = result.reject(opt.alpha);

    if (opt.json) {
        nlohmann::json j = result_to_json(result, opt.with_draws);
        j["manifest"] = {{"command", "test"}, {"version", MAXCORR_VERSION}, {"input", opt.input},
                         {"seed", opt.seed}};
        j["n"] = y.size();
        j["filter"] = filter.spec.to_string();
        j["theta"] = std::vector<double>(filter.theta.data(), filter.theta.data() + filter.theta.size());
        j["converged"] = filter.converged;
        j["lag_rule"] = lag_rule.to_string();
        j["weights"] = to_string(id.weights);
        j["alpha"] = opt.alpha;
        j["reject"] = reject;
        j["correlogram"] = std::vector<double>(rho.data(), rho.data() + rho.size());
        j["warnings"] = warnings;
        std::cout << j.dump(2) << '\n';
        return kOk;
    }

    std::ostringstream os;
    os << "maxcorr " << MAXCORR_VERSION << " test\n"
       << "input       " << opt.input << '\n'
       << "n           " << y.size() << '\n'
       << "filter      " << filter.spec.to_string() << '\n'
       << "parameters ";
    if (filter.theta.size() == 0) os << " (none)";
    for (Index i = 0; i < filter.theta.size(); ++i) os << ' ' << fmt("%.6f", filter.theta(i));
    os << '\n'
       << "test        " << result.test << '\n'
       << "lag         " << result.lag << " (" << lag_rule.to_string() << ")\n"
       << "weights     " << to_string(id.weights) << '\n'
       << "statistic   " << fmt("%.6f", result.statistic) << '\n';
    if (!result.asymptotic) {
        os << "draws       " << result.draws_requested << '\n'
           << "block size  " << result.block_size << '\n'
           << "seed        " << opt.seed << '\n';
        if (result.discarded) os << "discarded   " << result.discarded << '\n';
    }
    os << "p-value     " << fmt("%.4f", result.p_value) << '\n'
       << "decision    " << (reject ? "reject" : "do not reject") << " white noise at " << fmt("%g", 100 * opt.alpha)
       << "%\n";
    for (const std::string& w : warnings) os << "warning     " << w << '\n';
    os << "\nlag  correlation\n";
    for (Index h = 0; h < rho.size(); ++h) os << fmt("%3.0f", static_cast<double>(h + 1)) << "  " << fmt("% .6f", rho(h)) << '\n';
    std::cout << os.str();
    return kOk;
}

bool write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
    return static_cast<bool>(out);
}

int run_simulate_command(const SimulateOptions& opt) {
    if (opt.config.empty() == opt.preset.empty()) throw InputError("give either a config file or --preset");
    if (!opt.preset.empty() && opt.preset != "table2") throw InputError("unknown preset '" + opt.preset + "'");
    cli::SimulationConfig sim = opt.preset.empty() ? cli::load_config(opt.config) : cli::table2_preset();
    McConfig& config = sim.config;
    if (opt.reps) config.replications = *opt.reps;
    if (opt.seed) config.seed = *opt.seed;
    if (opt.draws)
        for (Cell& c : config.cells) c.bootstrap.draws = *opt.draws;
    config.threads = opt.threads ? *opt.threads : sim.threads ? *sim.threads : default_thread_count();
    try {
        config.validate();
    } catch (const InvalidArgument& e) {
        throw InputError(e.what());
    }

    const std::string source = opt.preset.empty() ? opt.config : "preset:" + opt.preset;
    RejectionTable table;
    table.config = config;
    const auto start = std::chrono::steady_clock::now();
    for (const Cell& cell : config.cells) {
        table.cells.push_back(run_cell(cell, config.replications, config.seed, config.levels, config.threads,
                                       config.max_failure_fraction));
        if (!opt.quiet)
            std::cerr << "cell " << cell.name << ": " << fmt("%.2f", table.cells.back().seconds) << "s\n";
    }
    table.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!opt.quiet) std::cerr << "total: " << fmt("%.2f", table.seconds) << "s on " << config.threads << " threads\n";

    nlohmann::json dump = table_to_json(table, opt.timings);
    dump["manifest"] = {{"command", "simulate"}, {"version", MAXCORR_VERSION}, {"source", source},
                        {"seed", config.seed}, {"config", cli::config_to_text(config)}};
    if (opt.timings) dump["manifest"]["wall_clock_seconds"] = table.seconds;
    std::string text = "# maxcorr " + std::string(MAXCORR_VERSION) + " simulate source=" + source +
                       " seed=" + std::to_string(config.seed) + " reps=" + std::to_string(config.replications) + "\n";
    if (!opt.out.empty()) text += "# manifest: " + opt.out + ".json\n";
    text += format_table(table);

    if (!opt.out.empty()) {
        if (!write_file(opt.out + ".tsv", text) || !write_file(opt.out + ".json", dump.dump(2) + "\n"))
            throw InputError("cannot write output under '" + opt.out + "'");
    } else {
        std::cout << (opt.json ? dump.dump(2) + "\n" : text);
    }

    bool failed = false;
    for (const CellResult& c : table.cells) {
        if (!c.failed) continue;
        failed = true;
        std::cerr << "error: cell " << c.cell.name << " failed (" << c.failures << " of " << c.replications
                  << " replications): " << c.error << '\n';
    }
    return failed ? kNumeric : kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"White noise tests based on the maximum sample correlation, with bootstrap p-values"};
    app.set_version_flag("--version", MAXCORR_VERSION);
    app.require_subcommand(1);

    TestOptions topt;
    CLI::App* test = app.add_subcommand("test", "Test a single-column series for white noise");
    test->add_option("input", topt.input, "Series file, one value per line (optional header); '-' reads stdin")
        ->required();
    test->add_option("--filter", topt.filter, "none, mean, ar:p, ar:p:nointercept, garch")->capture_default_str();
    test->add_option("--test", topt.test, "maxcorr, portmanteau, hong, lb, cvm, dv-identity, dv-bartlett")
        ->capture_default_str();
    test->add_option("--bootstrap", topt.bootstrap, "dwb, wb, brwb (cvm only), or asy")->capture_default_str();
    test->add_option("--lag", topt.lag, "Maximum lag: an integer or prop:delta for [delta n / ln n]")
        ->capture_default_str();
    test->add_option("--weights", topt.weights, "Lag weights: constant or ljung_box")->capture_default_str();
    test->add_option("--M", topt.draws, "Bootstrap draws")->capture_default_str();
    test->add_option("--block", topt.block, "Block size: sqrt or an integer")->capture_default_str();
    test->add_option("--seed", topt.seed, "Bootstrap seed")->capture_default_str();
    test->add_option("--alpha", topt.alpha, "Nominal level for the decision")->capture_default_str();
    test->add_flag("--no-recenter", topt.no_recenter, "Do not recentre the bootstrapped cross-products");
    test->add_flag("--json", topt.json, "Structured report");
    test->add_flag("--with-draws", topt.with_draws, "Include bootstrap draws in the JSON report");

    SimulateOptions sopt;
    CLI::App* sim = app.add_subcommand("simulate", "Run a Monte Carlo rejection-frequency table");
    sim->add_option("config", sopt.config, "Config file");
    sim->add_option("--preset", sopt.preset, "Bundled config: table2");
    sim->add_option("--reps", sopt.reps, "Replications per cell");
    sim->add_option("--seed", sopt.seed, "Master seed");
    sim->add_option("--threads", sopt.threads, "Worker threads (default: MAXCORR_THREADS or all cores)")
        ->check(CLI::PositiveNumber);
    sim->add_option("--M", sopt.draws, "Override bootstrap draws in every cell");
    sim->add_option("--out", sopt.out, "Write PREFIX.tsv and PREFIX.json instead of printing");
    sim->add_flag("--json", sopt.json, "Print the structured dump instead of the table");
    sim->add_flag("--timings", sopt.timings, "Include runtimes in the structured dump");
    sim->add_flag("--quiet", sopt.quiet, "No progress on stderr");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kInput;
    }

    try {
        if (*test) return run_test_command(topt);
        return run_simulate_command(sopt);
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInput;
    } catch (const InvalidArgument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInput;
    } catch (const Error& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kNumeric;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kInternal;
    }
}
