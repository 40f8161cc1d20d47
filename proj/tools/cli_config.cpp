#include "cli_config.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace maxcorr::cli {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

template <class T>
T parse_number(const std::string& text, const std::string& where) {
    T value{};
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end) throw InputError(where + ": bad number '" + text + "'");
    return value;
}

bool parse_bool(const std::string& text, const std::string& where) {
    if (text == "true" || text == "yes" || text == "1") return true;
    if (text == "false" || text == "no" || text == "0") return false;
    throw InputError(where + ": expected true or false, got '" + text + "'");
}

std::vector<double> parse_levels(const std::string& text, const std::string& where) {
    std::vector<double> out;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ',');) out.push_back(parse_number<double>(trim(item), where));
    if (out.empty()) throw InputError(where + ": empty level list");
    return out;
}

std::string format_double(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

Cell default_cell(Index index) {
    Cell c;
    c.name = "cell" + std::to_string(index + 1);
    c.test = TestId::parse("maxcorr-dwb");
    c.bootstrap = BootstrapSpec::dwb();
    return c;
}

void apply_cell_key(Cell& cell, const std::string& key, const std::string& value, const std::string& where) {
    if (key == "name") cell.name = value;
    else if (key == "process") cell.dgp.process = parse_process_kind(value);
    else if (key == "error") {
        const std::optional<bool> keep = cell.dgp.error.standardize;
        cell.dgp.error = ErrorSpec::parse(value);
        cell.dgp.error.standardize = keep;
    } else if (key == "standardize") cell.dgp.error.standardize = parse_bool(value, where);
    else if (key == "n") cell.dgp.n = parse_number<Index>(value, where);
    else if (key == "filter") cell.filter = FilterSpec::parse(value);
    else if (key == "test") {
        const WeightScheme w = cell.test.weights;
        cell.test = TestId::parse(value);
        cell.test.weights = w;
    } else if (key == "weights") cell.test.weights = parse_weight_scheme(value);
    else if (key == "lag") cell.lag = LagRule::parse(value);
    else if (key == "M") cell.bootstrap.draws = parse_number<Index>(value, where);
    else if (key == "block") cell.bootstrap.block = BlockRule::parse(value);
    else if (key == "bootstrap_seed") cell.bootstrap.seed = parse_number<std::uint64_t>(value, where);
    else if (key == "recenter") cell.bootstrap.recenter = parse_bool(value, where);
    else throw InputError(where + ": unknown cell key '" + key + "'");
}

}  // namespace

SimulationConfig parse_config(std::istream& in, const std::string& source) {
    SimulationConfig out;
    McConfig& config = out.config;
    std::set<std::string> seen;
    bool in_cell = false;
    std::string line;
    for (int lineno = 1; std::getline(in, line); ++lineno) {
        const std::string where = source + ":" + std::to_string(lineno);
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string text = trim(line);
        if (text.empty()) continue;
        if (text.front() == '[') {
            if (text != "[cell]") throw InputError(where + ": unknown section " + text);
            config.cells.push_back(default_cell(static_cast<Index>(config.cells.size())));
            in_cell = true;
            seen.clear();
            continue;
        }
        const auto eq = text.find('=');
        if (eq == std::string::npos) throw InputError(where + ": expected key = value");
        const std::string key = trim(std::string_view(text).substr(0, eq));
        const std::string value = trim(std::string_view(text).substr(eq + 1));
        if (key.empty() || value.empty()) throw InputError(where + ": expected key = value");
        if (!seen.insert(key).second) throw InputError(where + ": duplicate key '" + key + "'");
        try {
            if (in_cell) {
                apply_cell_key(config.cells.back(), key, value, where);
            } else if (key == "replications") {
                config.replications = parse_number<Index>(value, where);
            } else if (key == "seed") {
                config.seed = parse_number<std::uint64_t>(value, where);
            } else if (key == "levels") {
                config.levels = parse_levels(value, where);
            } else if (key == "threads") {
                out.threads = parse_number<unsigned>(value, where);
            } else if (key == "max_failure_fraction") {
                config.max_failure_fraction = parse_number<double>(value, where);
            } else {
                throw InputError(where + ": unknown key '" + key + "'");
            }
        } catch (const InvalidArgument& e) {
            throw InputError(where + ": " + e.what());
        }
    }
    if (config.cells.empty()) throw InputError(source + ": no [cell] sections");
    for (Cell& c : config.cells) c.bootstrap.method = c.test.method;
    try {
        config.validate();
    } catch (const InvalidArgument& e) {
        throw InputError(source + ": " + e.what());
    }
    return out;
}

SimulationConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open config '" + path + "'");
    return parse_config(in, path);
}

SimulationConfig table2_preset() {
    SimulationConfig out;
    McConfig& config = out.config;
    for (Index n : {100, 500}) {
        for (const char* error : {"iid", "garch", "ma2", "ar1"}) {
            for (const char* lag : {"5", "prop:0.5", "prop:1"}) {
                Cell c = default_cell(0);
                c.dgp = {ProcessKind::simple, ErrorSpec::parse(error), n};
                c.lag = LagRule::parse(lag);
                c.name = std::string(error) + "-n" + std::to_string(n) + "-L" +
                         std::to_string(resolve_lag_rule(c.lag, n).lag);
                config.cells.push_back(std::move(c));
            }
        }
    }
    return out;
}

std::string config_to_text(const McConfig& config) {
    std::ostringstream os;
    os << "replications = " << config.replications << '\n' << "seed = " << config.seed << '\n' << "levels = ";
    for (std::size_t i = 0; i < config.levels.size(); ++i) os << (i ? "," : "") << format_double(config.levels[i]);
    os << '\n' << "max_failure_fraction = " << format_double(config.max_failure_fraction) << '\n';
    for (const Cell& c : config.cells) {
        os << "\n[cell]\n"
           << "name = " << c.name << '\n'
           << "process = " << to_string(c.dgp.process) << '\n'
           << "error = " << c.dgp.error.to_string() << '\n'
           << "standardize = " << (c.dgp.standardized_error() ? "true" : "false") << '\n'
           << "n = " << c.dgp.n << '\n'
           << "filter = " << c.filter.to_string() << '\n'
           << "test = " << c.test.to_string() << '\n'
           << "weights = " << to_string(c.test.weights) << '\n'
           << "lag = " << c.lag.to_string() << '\n'
           << "M = " << c.bootstrap.draws << '\n'
           << "block = " << c.bootstrap.block.to_string() << '\n'
           << "bootstrap_seed = " << c.bootstrap.seed << '\n'
           << "recenter = " << (c.bootstrap.recenter ? "true" : "false") << '\n';
    }
    return os.str();
}

}  // namespace maxcorr::cli
