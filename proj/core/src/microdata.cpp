#include "wagedecomp/microdata.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <sstream>
#include <unordered_set>

#include <fmt/core.h>

namespace wagedecomp {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool numeric_role(ColumnRole role) {
    switch (role) {
    case ColumnRole::categorical:
    case ColumnRole::group_label:
        return false;
    default:
        return true;
    }
}

bool unique_role(ColumnRole role) {
    switch (role) {
    case ColumnRole::outcome_weekly_wage:
    case ColumnRole::full_days:
    case ColumnRole::half_days:
    case ColumnRole::age:
    case ColumnRole::group_label:
    case ColumnRole::weight:
        return true;
    default:
        return false;
    }
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

std::vector<std::string> split_line(std::string_view line, char delim) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(delim, start);
        if (pos == std::string_view::npos) {
            fields.emplace_back(trim(line.substr(start)));
            break;
        }
        fields.emplace_back(trim(line.substr(start, pos - start)));
        start = pos + 1;
    }
    return fields;
}

bool is_missing_cell(std::string_view cell) { return cell.empty() || cell == "NA"; }

double parse_numeric_cell(std::string_view cell, const std::string &provenance,
                          std::size_t data_row, const std::string &column) {
    double value = 0.0;
    const char *first = cell.data();
    const char *last = cell.data() + cell.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last)
        throw ValidationError(fmt::format("{}: data row {}, column '{}': cannot parse '{}' as a number",
                                          provenance, data_row, column, cell));
    return value;
}

} // namespace

std::string_view to_string(ColumnRole role) {
    switch (role) {
    case ColumnRole::outcome_weekly_wage:
        return "outcome_weekly_wage";
    case ColumnRole::full_days:
        return "full_days";
    case ColumnRole::half_days:
        return "half_days";
    case ColumnRole::age:
        return "age";
    case ColumnRole::categorical:
        return "categorical";
    case ColumnRole::binary:
        return "binary";
    case ColumnRole::group_label:
        return "group_label";
    case ColumnRole::weight:
        return "weight";
    case ColumnRole::ignore:
        return "ignore";
    case ColumnRole::derived:
        return "derived";
    }
    return "unknown";
}

ColumnRole parse_column_role(std::string_view text) {
    if (text == "outcome_weekly_wage")
        return ColumnRole::outcome_weekly_wage;
    if (text == "full_days")
        return ColumnRole::full_days;
    if (text == "half_days")
        return ColumnRole::half_days;
    if (text == "age")
        return ColumnRole::age;
    if (text == "categorical")
        return ColumnRole::categorical;
    if (text == "binary")
        return ColumnRole::binary;
    if (text == "group_label")
        return ColumnRole::group_label;
    if (text == "weight")
        return ColumnRole::weight;
    if (text == "ignore")
        return ColumnRole::ignore;
    throw ValidationError(fmt::format("unknown column role '{}'", text));
}

const std::string *ColumnSchema::level_for(std::string_view code) const {
    for (const auto &[raw, level] : category_map)
        if (raw == code)
            return &level;
    return nullptr;
}

std::vector<std::string> ColumnSchema::levels() const {
    std::vector<std::string> out;
    for (const auto &[raw, level] : category_map)
        if (std::find(out.begin(), out.end(), level) == out.end())
            out.push_back(level);
    return out;
}

void validate_schema(const std::vector<ColumnSchema> &schema) {
    if (schema.empty())
        throw ValidationError("schema declares no columns");

    std::unordered_set<std::string> names;
    std::vector<ColumnRole> seen_unique;
    for (const auto &col : schema) {
        if (col.name.empty())
            throw ValidationError("schema contains a column with an empty name");
        if (!names.insert(col.name).second)
            throw ValidationError(fmt::format("duplicate column name '{}' in schema", col.name));
        if (col.role == ColumnRole::derived)
            throw ValidationError(
                fmt::format("column '{}': role 'derived' is reserved for pipeline output", col.name));
        if (unique_role(col.role)) {
            if (std::find(seen_unique.begin(), seen_unique.end(), col.role) != seen_unique.end())
                throw ValidationError(
                    fmt::format("role '{}' declared more than once", to_string(col.role)));
            seen_unique.push_back(col.role);
        }
        if (col.role == ColumnRole::categorical) {
            if (col.category_map.empty())
                throw ValidationError(
                    fmt::format("categorical column '{}' declares no category map", col.name));
            if (col.base_level.empty())
                throw ValidationError(
                    fmt::format("categorical column '{}' declares no base level", col.name));
            const auto lv = col.levels();
            if (std::find(lv.begin(), lv.end(), col.base_level) == lv.end())
                throw ValidationError(
                    fmt::format("categorical column '{}': base level '{}' is not among its levels",
                                col.name, col.base_level));
        }
    }

    for (ColumnRole required : {ColumnRole::outcome_weekly_wage, ColumnRole::full_days,
                                ColumnRole::half_days, ColumnRole::age})
        if (std::find(seen_unique.begin(), seen_unique.end(), required) == seen_unique.end())
            throw ValidationError(
                fmt::format("schema must declare exactly one column with role '{}'",
                            to_string(required)));
}

void MicrodataTable::check_length(std::string_view name, std::size_t len) {
    if (columns_.empty()) {
        n_rows_ = len;
        return;
    }
    if (len != n_rows_)
        throw ComputeError(fmt::format("column '{}' has {} rows, table has {}", name, len, n_rows_));
}

void MicrodataTable::add_numeric_column(ColumnSchema schema, std::vector<double> values) {
    if (has_column(schema.name))
        throw ComputeError(fmt::format("column '{}' already present", schema.name));
    if (!numeric_role(schema.role))
        throw ComputeError(fmt::format("column '{}' has a text role, expected numeric", schema.name));
    check_length(schema.name, values.size());
    Column col;
    col.schema = std::move(schema);
    col.is_numeric = true;
    col.num = std::move(values);
    columns_.push_back(std::move(col));
}

void MicrodataTable::add_text_column(ColumnSchema schema, std::vector<std::string> values) {
    if (has_column(schema.name))
        throw ComputeError(fmt::format("column '{}' already present", schema.name));
    if (numeric_role(schema.role))
        throw ComputeError(fmt::format("column '{}' has a numeric role, expected text", schema.name));
    check_length(schema.name, values.size());
    Column col;
    col.schema = std::move(schema);
    col.is_numeric = false;
    col.str = std::move(values);
    columns_.push_back(std::move(col));
}

const MicrodataTable::Column &MicrodataTable::find(std::string_view name) const {
    for (const auto &col : columns_)
        if (col.schema.name == name)
            return col;
    throw ValidationError(fmt::format("no column named '{}'", name));
}

bool MicrodataTable::has_column(std::string_view name) const {
    for (const auto &col : columns_)
        if (col.schema.name == name)
            return true;
    return false;
}

bool MicrodataTable::is_numeric(std::string_view name) const { return find(name).is_numeric; }

ColumnRole MicrodataTable::role(std::string_view name) const { return find(name).schema.role; }

const ColumnSchema &MicrodataTable::schema(std::string_view name) const { return find(name).schema; }

const std::vector<double> &MicrodataTable::numeric(std::string_view name) const {
    const Column &col = find(name);
    if (!col.is_numeric)
        throw ValidationError(fmt::format("column '{}' is not numeric", name));
    return col.num;
}

const std::vector<std::string> &MicrodataTable::text(std::string_view name) const {
    const Column &col = find(name);
    if (col.is_numeric)
        throw ValidationError(fmt::format("column '{}' is not text", name));
    return col.str;
}

std::vector<std::string> MicrodataTable::column_names() const {
    std::vector<std::string> out;
    out.reserve(columns_.size());
    for (const auto &col : columns_)
        out.push_back(col.schema.name);
    return out;
}

std::optional<std::string> MicrodataTable::column_with_role(ColumnRole role) const {
    for (const auto &col : columns_)
        if (col.schema.role == role)
            return col.schema.name;
    return std::nullopt;
}

MicrodataTable MicrodataTable::select_rows(std::span<const std::size_t> rows) const {
    MicrodataTable out(provenance_);
    for (const auto &col : columns_) {
        if (col.is_numeric) {
            std::vector<double> vals;
            vals.reserve(rows.size());
            for (std::size_t r : rows)
                vals.push_back(col.num.at(r));
            out.add_numeric_column(col.schema, std::move(vals));
        } else {
            std::vector<std::string> vals;
            vals.reserve(rows.size());
            for (std::size_t r : rows)
                vals.push_back(col.str.at(r));
            out.add_text_column(col.schema, std::move(vals));
        }
    }
    out.n_rows_ = rows.size();
    return out;
}

MicrodataTable load_table(std::istream &input, const std::vector<ColumnSchema> &schema,
                          std::string provenance) {
    validate_schema(schema);

    std::string line;
    if (!std::getline(input, line))
        throw ValidationError(fmt::format("{}: empty input, expected a header line", provenance));

    const char delim = line.find('\t') != std::string::npos ? '\t' : ',';
    const std::vector<std::string> header = split_line(line, delim);

    // Positional lookup: every header name must be declared and vice versa.
    std::vector<std::size_t> schema_for_field(header.size());
    std::vector<bool> declared_seen(schema.size(), false);
    for (std::size_t f = 0; f < header.size(); ++f) {
        bool found = false;
        for (std::size_t s = 0; s < schema.size(); ++s) {
            if (schema[s].name == header[f]) {
                if (declared_seen[s])
                    throw ValidationError(
                        fmt::format("{}: duplicate header column '{}'", provenance, header[f]));
                declared_seen[s] = true;
                schema_for_field[f] = s;
                found = true;
                break;
            }
        }
        if (!found)
            throw ValidationError(
                fmt::format("{}: header column '{}' is not declared in the schema", provenance,
                            header[f]));
    }
    for (std::size_t s = 0; s < schema.size(); ++s)
        if (!declared_seen[s])
            throw ValidationError(fmt::format("{}: declared column '{}' is missing from the header",
                                              provenance, schema[s].name));

    std::vector<std::vector<double>> num_data(schema.size());
    std::vector<std::vector<std::string>> str_data(schema.size());

    std::size_t data_row = 0;
    while (std::getline(input, line)) {
        if (trim(line).empty())
            continue;
        ++data_row;
        const std::vector<std::string> fields = split_line(line, delim);
        if (fields.size() != header.size())
            throw ValidationError(fmt::format("{}: data row {} has {} fields, header has {}",
                                              provenance, data_row, fields.size(), header.size()));
        for (std::size_t f = 0; f < fields.size(); ++f) {
            const std::size_t s = schema_for_field[f];
            const ColumnSchema &cs = schema[s];
            if (cs.role == ColumnRole::ignore)
                continue;
            if (!numeric_role(cs.role)) {
                str_data[s].push_back(is_missing_cell(fields[f]) ? std::string() : fields[f]);
                continue;
            }
            if (is_missing_cell(fields[f])) {
                num_data[s].push_back(kNaN);
                continue;
            }
            const double value = parse_numeric_cell(fields[f], provenance, data_row, cs.name);
            if (cs.role == ColumnRole::binary && value != 0.0 && value != 1.0)
                throw ValidationError(
                    fmt::format("{}: data row {}, column '{}': binary value must be 0 or 1, got {}",
                                provenance, data_row, cs.name, fields[f]));
            num_data[s].push_back(value);
        }
    }

    MicrodataTable table(std::move(provenance));
    for (std::size_t s = 0; s < schema.size(); ++s) {
        if (schema[s].role == ColumnRole::ignore)
            continue;
        if (numeric_role(schema[s].role))
            table.add_numeric_column(schema[s], std::move(num_data[s]));
        else
            table.add_text_column(schema[s], std::move(str_data[s]));
    }
    return table;
}

MicrodataTable load_table_file(const std::string &path, const std::vector<ColumnSchema> &schema) {
    std::ifstream input(path);
    if (!input)
        throw ValidationError(fmt::format("cannot open input file '{}'", path));
    return load_table(input, schema, path);
}

double derive_daily_wage(double weekly_wage, double full_days, double half_days) {
    if (!(full_days >= 0.0 && full_days <= 7.0))
        throw ValidationError(fmt::format("full days must lie in [0, 7], got {}", full_days));
    if (!(half_days >= 0.0 && half_days <= 7.0))
        throw ValidationError(fmt::format("half days must lie in [0, 7], got {}", half_days));
    const double intensity = full_days + 0.5 * half_days;
    if (intensity > 7.0)
        throw ValidationError(
            fmt::format("combined work intensity {} exceeds 7 days per week", intensity));
    if (intensity == 0.0)
        throw ComputeError("cannot derive a daily wage from zero days worked");
    return weekly_wage / intensity;
}

double log_wage(double daily_wage) {
    if (!(daily_wage > 0.0))
        throw ComputeError(fmt::format("log wage requires a positive daily wage, got {}", daily_wage));
    return std::log(daily_wage);
}

DropMissingResult drop_missing_rows(const MicrodataTable &table) {
    const std::size_t n = table.n_rows();
    std::vector<bool> keep(n, true);
    MissingReport report;

    for (const auto &name : table.column_names()) {
        const ColumnRole role = table.role(name);
        if (role == ColumnRole::ignore || role == ColumnRole::derived)
            continue;
        std::size_t missing = 0;
        if (table.is_numeric(name)) {
            const auto &vals = table.numeric(name);
            for (std::size_t i = 0; i < n; ++i)
                if (std::isnan(vals[i])) {
                    keep[i] = false;
                    ++missing;
                }
        } else {
            const auto &vals = table.text(name);
            for (std::size_t i = 0; i < n; ++i)
                if (vals[i].empty()) {
                    keep[i] = false;
                    ++missing;
                }
        }
        if (missing > 0)
            report.dropped_per_column.emplace_back(name, missing);
    }

    std::vector<std::size_t> rows;
    rows.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        if (keep[i])
            rows.push_back(i);
    report.rows_dropped = n - rows.size();

    return {table.select_rows(rows), std::move(report)};
}

DeriveResult derive_wage_columns(const MicrodataTable &table) {
    DeriveReport report;
    report.rows_in = table.n_rows();

    auto weekly_col = table.column_with_role(ColumnRole::outcome_weekly_wage);
    auto full_col = table.column_with_role(ColumnRole::full_days);
    auto half_col = table.column_with_role(ColumnRole::half_days);
    if (!weekly_col)
        throw ValidationError("wage derivation requires a column with role outcome_weekly_wage");
    if (!full_col)
        throw ValidationError("wage derivation requires a column with role full_days");
    if (!half_col)
        throw ValidationError("wage derivation requires a column with role half_days");

    DropMissingResult dropped = drop_missing_rows(table);
    report.missing = std::move(dropped.report);
    const MicrodataTable &clean = dropped.table;

    const auto &weekly = clean.numeric(*weekly_col);
    const auto &full = clean.numeric(*full_col);
    const auto &half = clean.numeric(*half_col);

    std::vector<std::size_t> valid;
    valid.reserve(clean.n_rows());
    for (std::size_t i = 0; i < clean.n_rows(); ++i) {
        const bool in_range = full[i] >= 0.0 && full[i] <= 7.0 && half[i] >= 0.0 && half[i] <= 7.0;
        const double intensity = full[i] + 0.5 * half[i];
        if (!in_range || intensity > 7.0 || intensity == 0.0) {
            ++report.dropped_invalid_days;
            continue;
        }
        valid.push_back(i);
    }

    MicrodataTable out = clean.select_rows(valid);
    std::vector<double> daily(valid.size());
    std::vector<double> logw(valid.size());
    {
        const auto &w = out.numeric(*weekly_col);
        const auto &f = out.numeric(*full_col);
        const auto &h = out.numeric(*half_col);
        for (std::size_t i = 0; i < out.n_rows(); ++i) {
            daily[i] = w[i] / (f[i] + 0.5 * h[i]);
            logw[i] = daily[i] > 0.0 ? std::log(daily[i]) : kNaN;
        }
    }
    out.add_numeric_column({.name = "daily_wage", .role = ColumnRole::derived}, std::move(daily));
    out.add_numeric_column({.name = "log_daily_wage", .role = ColumnRole::derived}, std::move(logw));

    report.rows_out = out.n_rows();
    return {std::move(out), std::move(report)};
}

FilterResult apply_filters(const MicrodataTable &table, const FilterSpec &spec) {
    const std::size_t n = table.n_rows();
    std::vector<bool> keep(n, true);
    FilterResult result;

    auto age_col = table.column_with_role(ColumnRole::age);
    if (!age_col)
        throw ValidationError("age filter configured but the table has no column with role age");
    const auto &age = table.numeric(*age_col);
    for (std::size_t i = 0; i < n; ++i)
        if (!(age[i] >= spec.age_min && age[i] <= spec.age_max)) {
            keep[i] = false;
            ++result.dropped_age;
        }

    if (spec.require_positive_wage) {
        if (!table.has_column("daily_wage"))
            throw ValidationError(
                "positive-wage filter configured but no derived daily_wage column is present");
        const auto &daily = table.numeric("daily_wage");
        for (std::size_t i = 0; i < n; ++i)
            if (keep[i] && !(daily[i] > 0.0)) {
                keep[i] = false;
                ++result.dropped_nonpositive_wage;
            }
    }

    std::vector<std::size_t> rows;
    rows.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        if (keep[i])
            rows.push_back(i);
    result.table = table.select_rows(rows);
    return result;
}

Grouping Grouping::fc_vs_nfc(std::string column) {
    Grouping g;
    g.column = std::move(column);
    g.group_order = {"NFC", "FC"};
    g.label_map = {{"ST", "NFC"}, {"SC", "NFC"}, {"OBC", "NFC"}, {"Others", "FC"}};
    return g;
}

Grouping Grouping::four_caste(std::string column) {
    Grouping g;
    g.column = std::move(column);
    g.group_order = {"ST", "SC", "OBC", "Others"};
    g.label_map = {{"ST", "ST"}, {"SC", "SC"}, {"OBC", "OBC"}, {"Others", "Others"}};
    return g;
}

Grouping Grouping::custom(std::string column,
                          std::vector<std::pair<std::string, std::string>> label_map) {
    Grouping g;
    g.column = std::move(column);
    g.label_map = std::move(label_map);
    for (const auto &[label, group] : g.label_map)
        if (std::find(g.group_order.begin(), g.group_order.end(), group) == g.group_order.end())
            g.group_order.push_back(group);
    if (g.group_order.empty())
        throw ValidationError("custom grouping declares no groups");
    return g;
}

const std::string *Grouping::group_for(std::string_view label) const {
    for (const auto &[from, to] : label_map)
        if (from == label)
            return &to;
    return nullptr;
}

std::vector<std::string> canonical_labels(const MicrodataTable &table, const std::string &column) {
    const auto &raw = table.text(column);
    const ColumnSchema &cs = table.schema(column);
    if (cs.category_map.empty())
        return raw;

    std::vector<std::string> out;
    out.reserve(raw.size());
    for (const auto &code : raw) {
        const std::string *level = cs.level_for(code);
        if (level == nullptr)
            throw ValidationError(fmt::format(
                "column '{}': code '{}' does not appear in the declared category map", column, code));
        out.push_back(*level);
    }
    return out;
}

std::size_t Partition::index_of(std::string_view group) const {
    for (std::size_t i = 0; i < groups.size(); ++i)
        if (groups[i] == group)
            return i;
    throw ValidationError(fmt::format("no group named '{}' in this partition", group));
}

Partition partition_by_group(const MicrodataTable &table, const Grouping &grouping) {
    Partition p;
    p.groups = grouping.group_order;
    p.rows.resize(p.groups.size());

    const std::vector<std::string> labels = canonical_labels(table, grouping.column);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const std::string *group = grouping.group_for(labels[i]);
        if (group == nullptr)
            throw ValidationError(fmt::format("label '{}' in column '{}' is not covered by the grouping",
                                              labels[i], grouping.column));
        p.rows[p.index_of(*group)].push_back(i);
    }
    return p;
}

MicrodataTable subtable(const MicrodataTable &table, const Partition &partition,
                        std::size_t group_index) {
    return table.select_rows(partition.rows.at(group_index));
}

std::vector<std::string> group_keys_per_row(const MicrodataTable &table, const Grouping &grouping) {
    const std::vector<std::string> labels = canonical_labels(table, grouping.column);
    std::vector<std::string> keys;
    keys.reserve(labels.size());
    for (const auto &label : labels) {
        const std::string *group = grouping.group_for(label);
        if (group == nullptr)
            throw ValidationError(fmt::format("label '{}' in column '{}' is not covered by the grouping",
                                              label, grouping.column));
        keys.push_back(*group);
    }
    return keys;
}

std::vector<double> effective_weights(const MicrodataTable &table, bool use_weights) {
    if (use_weights) {
        if (auto col = table.column_with_role(ColumnRole::weight)) {
            const auto &w = table.numeric(*col);
            for (std::size_t i = 0; i < w.size(); ++i)
                if (!(w[i] >= 0.0))
                    throw ValidationError(
                        fmt::format("column '{}': weight at row {} must be non-negative", *col,
                                    i + 1));
            return w;
        }
    }
    return std::vector<double>(table.n_rows(), 1.0);
}

} // namespace wagedecomp
