#pragma once

#include "wagedecomp/decomposition.hpp"
#include "wagedecomp/inequality.hpp"
#include "wagedecomp/regression.hpp"

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace wagedecomp {

enum class OutputFormat { text, csv, json };
OutputFormat parse_output_format(std::string_view text);

/// Scalar index battery for one outcome column: GE(-1, 0, 1, 2),
/// Atkinson(0.5, 1, 2), Gini, p90/p10 and p75/p25.
struct IndexReport {
    std::string column;
    std::size_t n_obs = 0;
    double total_weight = 0.0;
    std::size_t dropped_nonpositive = 0;
    std::vector<std::pair<std::string, double>> indices;
};
IndexReport compute_index_report(const IncomeVector &v, std::string column,
                                 std::size_t dropped_nonpositive = 0);

// Renderers. Text tables round to display precision (indices 4 decimals,
// percents 2); CSV and JSON carry full precision so numeric fields
// round-trip exactly.
std::string render_index_report(const IndexReport &report, OutputFormat format);
std::string render_profile(const InequalityProfile &profile, OutputFormat format);
std::string render_fits(const std::vector<std::pair<std::string, FitResult>> &fits,
                        OutputFormat format);
std::string render_decomposition(const DataDecomposition &result, OutputFormat format);

} // namespace wagedecomp
