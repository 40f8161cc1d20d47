#include "maxcorr/table_io.hpp"

#include <cstdio>
#include <sstream>

namespace maxcorr {

namespace {

std::string fixed(double value, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, value);
    return buf;
}

std::string level_label(double a) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g%%", 100.0 * a);
    return buf;
}

std::string hex(std::uint64_t v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

}  // namespace

std::string format_table(const RejectionTable& table) {
    std::ostringstream os;
    os << "cell\tprocess\terror\tfilter\ttest\tn\tL\treps\tfailures";
    for (double a : table.config.levels) os << '\t' << level_label(a);
    for (double a : table.config.levels) os << "\tse(" << level_label(a) << ')';
    os << '\n';
    for (const CellResult& c : table.cells) {
        os << c.cell.name << '\t' << to_string(c.cell.dgp.process) << '\t' << c.cell.dgp.error.to_string() << '\t'
           << c.cell.filter.to_string() << '\t' << c.cell.test.to_string() << '\t' << c.cell.dgp.n << '\t' << c.lag
           << '\t' << c.replications << '\t' << c.failures;
        for (Index j = 0; j < c.rejection.size(); ++j) os << '\t' << fixed(c.rejection(j), 3);
        for (Index j = 0; j < c.std_error.size(); ++j) os << '\t' << fixed(c.std_error(j), 4);
        if (c.failed) os << "\tFAILED: " << c.error;
        os << '\n';
    }
    return os.str();
}

nlohmann::json table_to_json(const RejectionTable& table, bool with_timings) {
    using nlohmann::json;
    json cells = json::array();
    for (const CellResult& c : table.cells) {
        json cell{
            {"name", c.cell.name},
            {"process", to_string(c.cell.dgp.process)},
            {"error", c.cell.dgp.error.to_string()},
            {"standardized_error", c.cell.dgp.standardized_error()},
            {"n", c.cell.dgp.n},
            {"filter", c.cell.filter.to_string()},
            {"test", c.cell.test.to_string()},
            {"weights", to_string(c.cell.test.weights)},
            {"lag_rule", c.cell.lag.to_string()},
            {"lag", c.lag},
            {"M", c.cell.bootstrap.draws},
            {"block_rule", c.cell.bootstrap.block.to_string()},
            {"data_stream", hex(hash_key(c.cell.dgp.key()))},
            {"replications", c.replications},
            {"failures", c.failures},
            {"overflows", c.overflows},
            {"failed", c.failed},
            {"rejection", std::vector<double>(c.rejection.data(), c.rejection.data() + c.rejection.size())},
            {"std_error", std::vector<double>(c.std_error.data(), c.std_error.data() + c.std_error.size())},
        };
        if (!c.error.empty()) cell["first_error"] = c.error;
        if (with_timings) cell["seconds"] = c.seconds;
        cells.push_back(std::move(cell));
    }
    json out{
        {"master_seed", table.config.seed},
        {"replications", table.config.replications},
        {"levels", table.config.levels},
        {"max_failure_fraction", table.config.max_failure_fraction},
        {"cells", std::move(cells)},
    };
    if (with_timings) out["seconds"] = table.seconds;
    return out;
}

nlohmann::json result_to_json(const TestResult& r, bool with_draws) {
    nlohmann::json out{
        {"test", r.test},
        {"statistic", r.statistic},
        {"p_value", r.p_value},
        {"lag", r.lag},
        {"asymptotic", r.asymptotic},
        {"warnings", r.warnings},
    };
    if (!r.asymptotic) {
        out["M"] = r.draws_requested;
        out["block_size"] = r.block_size;
        out["seed"] = r.seed;
        out["stream_digest"] = hex(r.stream_digest);
        out["discarded"] = r.discarded;
    }
    if (with_draws) out["draws"] = std::vector<double>(r.draws.data(), r.draws.data() + r.draws.size());
    return out;
}

}  // namespace maxcorr
