// Command-line front end: ingest -> derive -> filter -> analyze -> report.
// Exit codes: 0 success, 1 compute failure, 2 validation/config failure.

#include "wagedecomp/config.hpp"
#include "wagedecomp/decomposition.hpp"
#include "wagedecomp/inequality.hpp"
#include "wagedecomp/microdata.hpp"
#include "wagedecomp/regression.hpp"
#include "wagedecomp/report.hpp"
#include "wagedecomp/synthlab.hpp"

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/core.h>

namespace {

using namespace wagedecomp;

struct CliOptions {
    std::string config_path;
    std::string format = "text";
    std::string output;
    bool drop_zeros = false;
    std::string weights;
    std::uint64_t seed = 0;
    bool seed_given = false;
};

void add_common_options(CLI::App *cmd, CliOptions &opts) {
    cmd->add_option("--config", opts.config_path, "Analysis config file (JSON)")->required();
    cmd->add_option("--format", opts.format, "Output format")
        ->check(CLI::IsMember({"text", "csv", "json"}));
    cmd->add_option("--output", opts.output, "Write the report to this path instead of stdout");
    cmd->add_flag("--drop-zeros", opts.drop_zeros,
                  "Drop rows with a non-positive outcome before analysis");
    cmd->add_option("--weights", opts.weights, "Apply the declared weight column")
        ->check(CLI::IsMember({"on", "off"}));
}

AnalysisConfig effective_config(const CliOptions &opts) {
    AnalysisConfig config = load_config(opts.config_path);
    if (!opts.weights.empty())
        config.use_weights = opts.weights == "on";
    if (opts.drop_zeros)
        config.drop_zeros = true;
    if (!opts.output.empty())
        config.output_path = opts.output;
    return config;
}

void emit(const AnalysisConfig &config, const std::string &report) {
    if (config.output_path) {
        std::ofstream out(*config.output_path);
        if (!out)
            throw ValidationError(fmt::format("cannot open output file '{}'", *config.output_path));
        out << report;
        out.flush();
        if (!out)
            throw ValidationError(fmt::format("failed writing output file '{}'", *config.output_path));
        std::cerr << fmt::format("wrote report to {}\n", *config.output_path);
    } else {
        std::cout << report;
    }
}

struct LoadedData {
    MicrodataTable table;
    std::size_t dropped_nonpositive_outcome = 0;
};

/// Shared ingestion pipeline for the analysis commands: load against the
/// schema, derive daily/log wages, apply configured filters, then the
/// drop-zeros pass on the outcome column. Row-drop counts go to stderr.
LoadedData load_input(const AnalysisConfig &config) {
    if (config.input_path.empty())
        throw ValidationError(fmt::format("{}: config declares no input file", config.source));
    if (config.schema.empty())
        throw ValidationError(fmt::format("{}: config declares no schema", config.source));

    MicrodataTable raw = load_table_file(config.input_path, config.schema);
    DeriveResult derived = derive_wage_columns(raw);
    for (const auto &[column, count] : derived.report.missing.dropped_per_column)
        std::cerr << fmt::format("dropped {} row(s) with missing '{}'\n", count, column);
    if (derived.report.dropped_invalid_days > 0)
        std::cerr << fmt::format("dropped {} row(s) with invalid day counts\n",
                                 derived.report.dropped_invalid_days);

    MicrodataTable table = std::move(derived.table);
    if (config.filters) {
        FilterResult filtered = apply_filters(table, *config.filters);
        if (filtered.dropped_age > 0)
            std::cerr << fmt::format("dropped {} row(s) outside the age bounds\n",
                                     filtered.dropped_age);
        if (filtered.dropped_nonpositive_wage > 0)
            std::cerr << fmt::format("dropped {} row(s) with non-positive daily wage\n",
                                     filtered.dropped_nonpositive_wage);
        table = std::move(filtered.table);
    }

    LoadedData data{std::move(table), 0};
    if (config.drop_zeros) {
        if (!data.table.has_column(config.outcome_column))
            throw ValidationError(
                fmt::format("outcome column '{}' not found", config.outcome_column));
        const auto &outcome = data.table.numeric(config.outcome_column);
        std::vector<std::size_t> keep;
        keep.reserve(outcome.size());
        for (std::size_t i = 0; i < outcome.size(); ++i)
            if (outcome[i] > 0.0)
                keep.push_back(i);
        data.dropped_nonpositive_outcome = outcome.size() - keep.size();
        if (data.dropped_nonpositive_outcome > 0) {
            std::cerr << fmt::format("dropped {} row(s) with non-positive '{}'\n",
                                     data.dropped_nonpositive_outcome, config.outcome_column);
            data.table = data.table.select_rows(keep);
        }
    }
    return data;
}

const Grouping &require_grouping(const AnalysisConfig &config) {
    if (!config.grouping)
        throw ValidationError(fmt::format("{}: this command requires a 'grouping' section",
                                          config.source));
    return *config.grouping;
}

const DesignSpec &require_design(const AnalysisConfig &config) {
    if (!config.design)
        throw ValidationError(fmt::format("{}: this command requires a 'design' section",
                                          config.source));
    return *config.design;
}

int cmd_ineq(const CliOptions &opts) {
    const AnalysisConfig config = effective_config(opts);
    const OutputFormat format = parse_output_format(opts.format);
    LoadedData data = load_input(config);

    if (!data.table.has_column(config.outcome_column))
        throw ValidationError(fmt::format("outcome column '{}' not found", config.outcome_column));
    IncomeVector v(data.table.numeric(config.outcome_column),
                   effective_weights(data.table, config.use_weights));
    const IndexReport report =
        compute_index_report(v, config.outcome_column, data.dropped_nonpositive_outcome);
    emit(config, render_index_report(report, format));
    return 0;
}

int cmd_theil_decomp(const CliOptions &opts) {
    const AnalysisConfig config = effective_config(opts);
    const OutputFormat format = parse_output_format(opts.format);
    const Grouping &grouping = require_grouping(config);
    LoadedData data = load_input(config);

    const InequalityProfile profile =
        inequality_profile(data.table, grouping, config.outcome_column, config.use_weights);
    emit(config, render_profile(profile, format));
    return 0;
}

int cmd_mincer(const CliOptions &opts) {
    const AnalysisConfig config = effective_config(opts);
    const OutputFormat format = parse_output_format(opts.format);
    const Grouping &grouping = require_grouping(config);
    const DesignSpec &design = require_design(config);
    LoadedData data = load_input(config);

    std::vector<std::pair<std::string, FitResult>> fits;
    for (const auto &group : grouping.group_order) {
        try {
            fits.emplace_back(group, mincer_fit(data.table, design, grouping, group,
                                                config.use_weights));
        } catch (const ComputeError &e) {
            throw ComputeError(fmt::format("group '{}': {}", group, e.what()));
        }
    }
    emit(config, render_fits(fits, format));
    return 0;
}

int cmd_oaxaca(const CliOptions &opts) {
    const AnalysisConfig config = effective_config(opts);
    const OutputFormat format = parse_output_format(opts.format);
    const Grouping &grouping = require_grouping(config);
    const DesignSpec &design = require_design(config);
    LoadedData data = load_input(config);

    DecomposeOptions decompose;
    decompose.reference = config.oaxaca.reference;
    decompose.high_group = config.oaxaca.high_group;
    decompose.use_weights = config.use_weights;
    const DataDecomposition result =
        decompose_from_data(data.table, design, grouping, decompose);
    emit(config, render_decomposition(result, format));
    return 0;
}

int cmd_synth(const CliOptions &opts) {
    const AnalysisConfig config = effective_config(opts);
    if (!config.population)
        throw ValidationError(fmt::format("{}: this command requires a 'population' section",
                                          config.source));
    PopulationSpec spec = *config.population;
    if (opts.seed_given)
        spec.seed = opts.seed;

    const MicrodataTable table = generate_population(spec);
    if (config.output_path) {
        write_delimited_file(table, *config.output_path);
        std::cerr << fmt::format("wrote {} row(s) to {}\n", table.n_rows(), *config.output_path);
    } else {
        write_delimited(table, std::cout);
    }
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Wage inequality and wage-gap decomposition toolkit"};
    app.require_subcommand(1);

    CliOptions opts;
    CLI::App *ineq = app.add_subcommand("ineq", "Scalar inequality indices for one outcome column");
    CLI::App *theil =
        app.add_subcommand("theil-decomp", "Between/within Theil decomposition by group");
    CLI::App *mincer = app.add_subcommand("mincer", "Earnings-function fit per group");
    CLI::App *oaxaca = app.add_subcommand("oaxaca", "Wage-gap decomposition between two groups");
    CLI::App *synth = app.add_subcommand("synth", "Generate a synthetic population dataset");
    for (CLI::App *cmd : {ineq, theil, mincer, oaxaca, synth})
        add_common_options(cmd, opts);
    synth->add_option("--seed", opts.seed, "Override the population seed")
        ->each([&](const std::string &) { opts.seed_given = true; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand(ineq))
            return cmd_ineq(opts);
        if (app.got_subcommand(theil))
            return cmd_theil_decomp(opts);
        if (app.got_subcommand(mincer))
            return cmd_mincer(opts);
        if (app.got_subcommand(oaxaca))
            return cmd_oaxaca(opts);
        return cmd_synth(opts);
    } catch (const ValidationError &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const ComputeError &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
