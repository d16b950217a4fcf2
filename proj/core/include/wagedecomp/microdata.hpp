#pragma once

#include "wagedecomp/errors.hpp"

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace wagedecomp {

/// What a raw column means to the pipeline. `derived` is reserved for
/// columns the pipeline itself appends (daily_wage, log_daily_wage) and is
/// not accepted in user schemas.
enum class ColumnRole {
    outcome_weekly_wage,
    full_days,
    half_days,
    age,
    categorical,
    binary,
    group_label,
    weight,
    ignore,
    derived,
};

std::string_view to_string(ColumnRole role);
ColumnRole parse_column_role(std::string_view text);

/// Declared shape of one raw column. For categorical and group_label
/// columns, category_map translates raw codes (e.g. "06") to level names
/// (e.g. "primary"); several codes may share a level. Level order follows
/// first appearance in the map. Categorical columns must name a base level
/// that occurs among the mapped levels.
struct ColumnSchema {
    std::string name;
    ColumnRole role = ColumnRole::ignore;
    std::vector<std::pair<std::string, std::string>> category_map;
    std::string base_level;

    const std::string *level_for(std::string_view code) const;
    std::vector<std::string> levels() const;
};

/// Checks per-role uniqueness and categorical base declarations.
/// Throws ValidationError on the first violation.
void validate_schema(const std::vector<ColumnSchema> &schema);

/// Immutable-after-load rectangular dataset. Columns are typed (numeric or
/// text) according to their role and keep their declared schema, so later
/// stages can look up category maps and base levels.
class MicrodataTable {
  public:
    MicrodataTable() = default;
    explicit MicrodataTable(std::string provenance) : provenance_(std::move(provenance)) {}

    std::size_t n_rows() const { return n_rows_; }
    std::size_t n_columns() const { return columns_.size(); }
    const std::string &provenance() const { return provenance_; }

    void add_numeric_column(ColumnSchema schema, std::vector<double> values);
    void add_text_column(ColumnSchema schema, std::vector<std::string> values);

    bool has_column(std::string_view name) const;
    bool is_numeric(std::string_view name) const;
    ColumnRole role(std::string_view name) const;
    const ColumnSchema &schema(std::string_view name) const;
    const std::vector<double> &numeric(std::string_view name) const;
    const std::vector<std::string> &text(std::string_view name) const;
    std::vector<std::string> column_names() const;
    std::optional<std::string> column_with_role(ColumnRole role) const;

    /// New table holding the given rows (in the given order).
    MicrodataTable select_rows(std::span<const std::size_t> rows) const;

  private:
    struct Column {
        ColumnSchema schema;
        bool is_numeric = true;
        std::vector<double> num;
        std::vector<std::string> str;
    };

    const Column &find(std::string_view name) const;
    void check_length(std::string_view name, std::size_t len);

    std::vector<Column> columns_;
    std::string provenance_;
    std::size_t n_rows_ = 0;
};

/// Parses delimited text (UTF-8, first row header, comma or tab
/// auto-detected from the header line) against a declared schema.
///
/// The header must carry exactly the declared column names; columns with
/// role `ignore` are dropped. Numeric cells that fail to parse raise a
/// ValidationError naming row and column; empty cells and "NA" become
/// missing values to be dropped later by the validation pass.
MicrodataTable load_table(std::istream &input, const std::vector<ColumnSchema> &schema,
                          std::string provenance = "<stream>");
MicrodataTable load_table_file(const std::string &path, const std::vector<ColumnSchema> &schema);

/// Daily rate from a weekly wage and day counts; a half day counts as half
/// an intensity unit, so the denominator is full_days + 0.5 * half_days.
/// Day counts outside [0, 7] or a combined intensity above 7 raise
/// ValidationError; a zero denominator raises ComputeError.
double derive_daily_wage(double weekly_wage, double full_days, double half_days);

/// Natural log of a strictly positive daily wage; ComputeError otherwise.
double log_wage(double daily_wage);

struct MissingReport {
    std::vector<std::pair<std::string, std::size_t>> dropped_per_column;
    std::size_t rows_dropped = 0;
};

/// Drops rows with a missing value in any role-bearing column (NaN for
/// numeric, empty string for text). No imputation.
struct DropMissingResult {
    MicrodataTable table;
    MissingReport report;
};
DropMissingResult drop_missing_rows(const MicrodataTable &table);

struct DeriveReport {
    MissingReport missing;
    std::size_t dropped_invalid_days = 0;
    std::size_t rows_in = 0;
    std::size_t rows_out = 0;
};

/// Validation + derivation pass: drops rows with missing role values,
/// rejects rows whose day counts violate the derive_daily_wage rules, and
/// appends derived numeric columns "daily_wage" and "log_daily_wage"
/// (the latter is NaN where the daily wage is zero; the positive-wage
/// filter removes those rows).
struct DeriveResult {
    MicrodataTable table;
    DeriveReport report;
};
DeriveResult derive_wage_columns(const MicrodataTable &table);

/// Row filters applied after derivation. Bounds are inclusive.
struct FilterSpec {
    double age_min = 15.0;
    double age_max = 60.0;
    bool require_positive_wage = true;
};

struct FilterResult {
    MicrodataTable table;
    std::size_t dropped_age = 0;
    std::size_t dropped_nonpositive_wage = 0;
};
FilterResult apply_filters(const MicrodataTable &table, const FilterSpec &spec);

/// Label-to-group mapping over a group_label column. Raw codes are first
/// translated through the column's category_map when one is declared.
struct Grouping {
    std::string column;
    std::vector<std::string> group_order;
    std::vector<std::pair<std::string, std::string>> label_map;

    /// NFC = {ST, SC, OBC}, FC = {Others}.
    static Grouping fc_vs_nfc(std::string column);
    /// Identity partition keyed ST / SC / OBC / Others.
    static Grouping four_caste(std::string column);
    static Grouping custom(std::string column,
                           std::vector<std::pair<std::string, std::string>> label_map);

    const std::string *group_for(std::string_view label) const;
};

/// Canonical (category-mapped) group label per row.
std::vector<std::string> canonical_labels(const MicrodataTable &table, const std::string &column);

/// Disjoint, exhaustive partition of the table rows. Declared groups that
/// match no rows are kept with zero rows so downstream checks can name them.
struct Partition {
    std::vector<std::string> groups;
    std::vector<std::vector<std::size_t>> rows;

    std::size_t index_of(std::string_view group) const;
};

Partition partition_by_group(const MicrodataTable &table, const Grouping &grouping);
MicrodataTable subtable(const MicrodataTable &table, const Partition &partition,
                        std::size_t group_index);

/// Per-row group key under a grouping (used by the Theil decomposition).
std::vector<std::string> group_keys_per_row(const MicrodataTable &table, const Grouping &grouping);

/// Observation weights: the declared weight column when present and
/// enabled, otherwise unit weights.
std::vector<double> effective_weights(const MicrodataTable &table, bool use_weights);

} // namespace wagedecomp
