#pragma once

#include "wagedecomp/decomposition.hpp"
#include "wagedecomp/design.hpp"
#include "wagedecomp/microdata.hpp"
#include "wagedecomp/synthlab.hpp"

#include <optional>
#include <string>
#include <vector>

namespace wagedecomp {

struct OaxacaOptions {
    std::optional<std::string> high_group;
    ReferenceGroup reference = ReferenceGroup::low;
};

/// One declarative JSON document drives an entire run: input, schema,
/// filters, design, grouping, and (for synthesis) the population spec.
/// See the README for the documented grammar.
struct AnalysisConfig {
    std::string source; // config path, for error messages
    std::string input_path;
    std::vector<ColumnSchema> schema;
    std::optional<FilterSpec> filters;
    std::optional<DesignSpec> design;
    std::optional<Grouping> grouping;
    std::string outcome_column = "daily_wage";
    bool use_weights = true;
    bool drop_zeros = false;
    OaxacaOptions oaxaca;
    std::optional<PopulationSpec> population;
    std::optional<std::string> output_path;
};

/// Parses the JSON config text; unknown top-level keys, bad roles, and
/// malformed sections raise ValidationError naming the offending key.
AnalysisConfig parse_config_text(const std::string &json_text, const std::string &source_name);

/// Reads and parses a config file; a missing file raises ValidationError
/// naming the path.
AnalysisConfig load_config(const std::string &path);

} // namespace wagedecomp
