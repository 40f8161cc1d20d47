#pragma once

// Serialization of rejection tables: a tab-delimited text table (one row per
// cell, one column per nominal level) and a JSON dump with full metadata.

#include <json.hpp>

#include <string>

#include "maxcorr/montecarlo.hpp"

namespace maxcorr {

std::string format_table(const RejectionTable& table);

/// Cells, frequencies, standard errors and seeds. Runtimes are included only when
/// `with_timings` is set, so the default dump is reproducible byte for byte.
nlohmann::json table_to_json(const RejectionTable& table, bool with_timings = false);

nlohmann::json result_to_json(const TestResult& result, bool with_draws = false);

}  // namespace maxcorr
