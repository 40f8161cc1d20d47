#pragma once

// Simulation config files.
//
// Flat "key = value" lines; '#' starts a comment. Keys before the first [cell]
// header are global:
//   replications, seed, levels (comma list), threads, max_failure_fraction
// Each [cell] section describes one cell:
//   name, process, error, standardize, n, filter, test, weights, lag, M, block,
//   bootstrap_seed, recenter
// Unknown keys and duplicate keys are errors.

#include <istream>
#include <optional>
#include <string>

#include "maxcorr/montecarlo.hpp"

namespace maxcorr::cli {

struct SimulationConfig {
    McConfig config;
    std::optional<unsigned> threads;  // from the file, if given
};

SimulationConfig parse_config(std::istream& in, const std::string& source);
SimulationConfig load_config(const std::string& path);

/// Max-corr DWB rows of the mean-filter table: simple y = e with iid, GARCH,
/// MA(2) and AR(1) errors, n in {100, 500}, lags 5, [.5 n / ln n] and [n / ln n].
SimulationConfig table2_preset();

/// Canonical text form; parse_config(config_to_text(c)) reproduces c.
std::string config_to_text(const McConfig& config);

}  // namespace maxcorr::cli
