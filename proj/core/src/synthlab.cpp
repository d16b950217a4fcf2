#include "wagedecomp/synthlab.hpp"

#include "wagedecomp/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <random>
#include <unordered_set>

#include <fmt/core.h>

namespace wagedecomp {

namespace {

void validate_dist(const std::string &column, const ColumnDist &dist) {
    switch (dist.kind) {
    case ColumnDist::Kind::constant:
        if (!std::isfinite(dist.value))
            throw ValidationError(fmt::format("column '{}': constant value must be finite", column));
        return;
    case ColumnDist::Kind::uniform:
        if (!(dist.lo < dist.hi))
            throw ValidationError(
                fmt::format("column '{}': uniform bounds must satisfy lo < hi, got [{}, {}]", column,
                            dist.lo, dist.hi));
        return;
    case ColumnDist::Kind::bernoulli:
        if (!(dist.p >= 0.0 && dist.p <= 1.0))
            throw ValidationError(
                fmt::format("column '{}': bernoulli probability must lie in [0, 1], got {}", column,
                            dist.p));
        return;
    case ColumnDist::Kind::categorical: {
        if (dist.levels.size() < 2)
            throw ValidationError(
                fmt::format("column '{}': categorical needs at least two levels", column));
        if (dist.levels.size() != dist.probs.size())
            throw ValidationError(fmt::format("column '{}': {} levels but {} probabilities", column,
                                              dist.levels.size(), dist.probs.size()));
        std::unordered_set<std::string> seen;
        double total = 0.0;
        for (std::size_t i = 0; i < dist.levels.size(); ++i) {
            if (dist.levels[i].empty() || !seen.insert(dist.levels[i]).second)
                throw ValidationError(
                    fmt::format("column '{}': levels must be unique and nonempty", column));
            if (!(dist.probs[i] >= 0.0))
                throw ValidationError(
                    fmt::format("column '{}': probabilities must be non-negative", column));
            total += dist.probs[i];
        }
        if (std::fabs(total - 1.0) > 1e-9)
            throw ValidationError(
                fmt::format("column '{}': probabilities sum to {}, expected 1", column, total));
        return;
    }
    }
    throw ValidationError(fmt::format("column '{}': unknown distribution kind", column));
}

// One independent mt19937_64 stream per (group, tag). Tags 0..C-1 are the
// declared columns, C is the log-wage noise stream, C+1 the day counts.
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t group_index, std::uint64_t tag) {
    std::uint64_t s = seed ^ (0x9e3779b97f4a7c15ULL * (group_index + 1)) ^
                      (0xbf58476d1ce4e5b9ULL * (tag + 1));
    return splitmix64(s);
}

// Uniform in [0, 1) from the high 53 bits; the open variant shifts by half
// an ulp so it never returns an exact 0 (required by the inverse CDF).
double uniform_half_open(std::mt19937_64 &engine) {
    return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}
double uniform_open(std::mt19937_64 &engine) {
    return (static_cast<double>(engine() >> 11) + 0.5) * 0x1.0p-53;
}

const char *const kReservedNames[] = {"full_days", "half_days", "weekly_wage",
                                      "daily_wage", "log_daily_wage", kInterceptName,
                                      kAgeSquaredTerm};

void validate_population(const PopulationSpec &spec) {
    if (spec.groups.empty())
        throw ValidationError("population spec declares no groups");
    if (spec.group_column.empty())
        throw ValidationError("population spec declares an empty group column name");

    std::unordered_set<std::string> labels;
    for (const auto &group : spec.groups) {
        if (group.label.empty() || !labels.insert(group.label).second)
            throw ValidationError("population group labels must be unique and nonempty");
        if (group.n < 1)
            throw ValidationError(fmt::format("group '{}': n must be at least 1", group.label));
        if (!(group.noise_sd >= 0.0) || !std::isfinite(group.noise_sd))
            throw ValidationError(
                fmt::format("group '{}': noise_sd must be finite and non-negative", group.label));

        std::unordered_set<std::string> names;
        for (const auto &[name, dist] : group.columns) {
            if (name.empty() || !names.insert(name).second)
                throw ValidationError(fmt::format(
                    "group '{}': column names must be unique and nonempty", group.label));
            if (name == spec.group_column ||
                std::find(std::begin(kReservedNames), std::end(kReservedNames), name) !=
                    std::end(kReservedNames))
                throw ValidationError(
                    fmt::format("group '{}': column name '{}' is reserved", group.label, name));
            validate_dist(name, dist);
        }

        const std::size_t expected = PopulationSpec::design_names(group).size();
        if (group.beta.size() != expected)
            throw ValidationError(
                fmt::format("group '{}': beta has {} entries but the design implies {}", group.label,
                            group.beta.size(), expected));
    }

    // Mixed layouts would make the emitted table ragged, so every group
    // must declare the same columns: same names, kinds, and (for
    // categoricals) the same level lists. Distribution parameters may vary.
    const auto &first = spec.groups.front();
    for (const auto &group : spec.groups) {
        if (group.columns.size() != first.columns.size())
            throw ValidationError("population groups declare different column counts");
        for (std::size_t c = 0; c < group.columns.size(); ++c) {
            const auto &[name_a, dist_a] = first.columns[c];
            const auto &[name_b, dist_b] = group.columns[c];
            if (name_a != name_b || dist_a.kind != dist_b.kind)
                throw ValidationError(fmt::format(
                    "population groups disagree on column {} ('{}' vs '{}')", c + 1, name_a, name_b));
            if (dist_a.kind == ColumnDist::Kind::categorical && dist_a.levels != dist_b.levels)
                throw ValidationError(fmt::format(
                    "population groups disagree on the levels of column '{}'", name_a));
        }
    }
}

ColumnRole continuous_role(const std::string &name) {
    return name == "age" ? ColumnRole::age : ColumnRole::derived;
}

} // namespace

ColumnDist ColumnDist::constant(double value) {
    ColumnDist d;
    d.kind = Kind::constant;
    d.value = value;
    validate_dist("constant", d);
    return d;
}

ColumnDist ColumnDist::uniform(double lo, double hi) {
    ColumnDist d;
    d.kind = Kind::uniform;
    d.lo = lo;
    d.hi = hi;
    validate_dist("uniform", d);
    return d;
}

ColumnDist ColumnDist::bernoulli(double p) {
    ColumnDist d;
    d.kind = Kind::bernoulli;
    d.p = p;
    validate_dist("bernoulli", d);
    return d;
}

ColumnDist ColumnDist::categorical(std::vector<std::string> levels, std::vector<double> probs) {
    ColumnDist d;
    d.kind = Kind::categorical;
    d.levels = std::move(levels);
    d.probs = std::move(probs);
    validate_dist("categorical", d);
    return d;
}

std::vector<std::string> PopulationSpec::design_names(const GroupPopulation &group) {
    std::vector<std::string> names{kInterceptName};
    for (const auto &[name, dist] : group.columns) {
        if (dist.kind == ColumnDist::Kind::categorical)
            for (std::size_t l = 1; l < dist.levels.size(); ++l)
                names.push_back(dist.levels[l]);
        else
            names.push_back(name);
    }
    return names;
}

MicrodataTable generate_population(const PopulationSpec &spec) {
    validate_population(spec);

    const std::size_t n_columns = spec.groups.front().columns.size();
    const std::size_t total_rows = [&] {
        std::size_t total = 0;
        for (const auto &group : spec.groups)
            total += group.n;
        return total;
    }();

    std::vector<std::string> group_labels;
    group_labels.reserve(total_rows);
    std::vector<std::vector<double>> num_cols(n_columns);
    std::vector<std::vector<std::string>> str_cols(n_columns);
    std::vector<double> full_days, half_days, weekly, daily, logw;
    full_days.reserve(total_rows);
    half_days.reserve(total_rows);
    weekly.reserve(total_rows);
    daily.reserve(total_rows);
    logw.reserve(total_rows);

    for (std::size_t g = 0; g < spec.groups.size(); ++g) {
        const GroupPopulation &group = spec.groups[g];
        std::vector<std::mt19937_64> column_engines;
        column_engines.reserve(n_columns);
        for (std::size_t c = 0; c < n_columns; ++c)
            column_engines.emplace_back(stream_seed(spec.seed, g, c));
        std::mt19937_64 noise_engine(stream_seed(spec.seed, g, n_columns));
        std::mt19937_64 days_engine(stream_seed(spec.seed, g, n_columns + 1));

        std::vector<double> x(group.beta.size());
        for (std::size_t i = 0; i < group.n; ++i) {
            group_labels.push_back(group.label);
            x[0] = 1.0;
            std::size_t xi = 1;
            for (std::size_t c = 0; c < n_columns; ++c) {
                const ColumnDist &dist = group.columns[c].second;
                switch (dist.kind) {
                case ColumnDist::Kind::constant:
                    num_cols[c].push_back(dist.value);
                    x[xi++] = dist.value;
                    break;
                case ColumnDist::Kind::uniform: {
                    const double v =
                        dist.lo + uniform_half_open(column_engines[c]) * (dist.hi - dist.lo);
                    num_cols[c].push_back(v);
                    x[xi++] = v;
                    break;
                }
                case ColumnDist::Kind::bernoulli: {
                    const double v = uniform_half_open(column_engines[c]) < dist.p ? 1.0 : 0.0;
                    num_cols[c].push_back(v);
                    x[xi++] = v;
                    break;
                }
                case ColumnDist::Kind::categorical: {
                    const double u = uniform_half_open(column_engines[c]);
                    std::size_t pick = dist.levels.size() - 1;
                    double cum = 0.0;
                    for (std::size_t l = 0; l < dist.probs.size(); ++l) {
                        cum += dist.probs[l];
                        if (u < cum) {
                            pick = l;
                            break;
                        }
                    }
                    str_cols[c].push_back(dist.levels[pick]);
                    for (std::size_t l = 1; l < dist.levels.size(); ++l)
                        x[xi++] = pick == l ? 1.0 : 0.0;
                    break;
                }
                }
            }

            double lw = 0.0;
            for (std::size_t j = 0; j < x.size(); ++j)
                lw += group.beta[j] * x[j];
            lw += group.noise_sd * inverse_normal_cdf(uniform_open(noise_engine));

            const double fd = 3.0 + std::floor(uniform_half_open(days_engine) * 4.0);
            const double hd = std::floor(uniform_half_open(days_engine) * 3.0);
            const double d = std::exp(lw);
            logw.push_back(lw);
            daily.push_back(d);
            full_days.push_back(fd);
            half_days.push_back(hd);
            weekly.push_back(d * (fd + 0.5 * hd));
        }
    }

    MicrodataTable table("synthetic");
    table.add_text_column({.name = spec.group_column, .role = ColumnRole::group_label},
                          std::move(group_labels));
    for (std::size_t c = 0; c < n_columns; ++c) {
        const auto &[name, dist] = spec.groups.front().columns[c];
        switch (dist.kind) {
        case ColumnDist::Kind::constant:
            table.add_numeric_column({.name = name,
                                      .role = dist.value == 0.0 || dist.value == 1.0
                                                  ? ColumnRole::binary
                                                  : continuous_role(name)},
                                     std::move(num_cols[c]));
            break;
        case ColumnDist::Kind::uniform:
            table.add_numeric_column({.name = name, .role = continuous_role(name)},
                                     std::move(num_cols[c]));
            break;
        case ColumnDist::Kind::bernoulli:
            table.add_numeric_column({.name = name, .role = ColumnRole::binary},
                                     std::move(num_cols[c]));
            break;
        case ColumnDist::Kind::categorical: {
            ColumnSchema cs;
            cs.name = name;
            cs.role = ColumnRole::categorical;
            for (const auto &level : dist.levels)
                cs.category_map.emplace_back(level, level);
            cs.base_level = dist.levels.front();
            table.add_text_column(std::move(cs), std::move(str_cols[c]));
            break;
        }
        }
    }
    table.add_numeric_column({.name = "full_days", .role = ColumnRole::full_days},
                             std::move(full_days));
    table.add_numeric_column({.name = "half_days", .role = ColumnRole::half_days},
                             std::move(half_days));
    table.add_numeric_column({.name = "weekly_wage", .role = ColumnRole::outcome_weekly_wage},
                             std::move(weekly));
    table.add_numeric_column({.name = "daily_wage", .role = ColumnRole::derived}, std::move(daily));
    table.add_numeric_column({.name = "log_daily_wage", .role = ColumnRole::derived},
                             std::move(logw));
    return table;
}

void write_delimited(const MicrodataTable &table, std::ostream &out) {
    const std::vector<std::string> names = table.column_names();
    for (std::size_t c = 0; c < names.size(); ++c) {
        if (names[c].find(',') != std::string::npos || names[c].find('\n') != std::string::npos)
            throw ValidationError(
                fmt::format("column name '{}' contains the delimiter", names[c]));
        out << (c == 0 ? "" : ",") << names[c];
    }
    out << '\n';

    for (std::size_t i = 0; i < table.n_rows(); ++i) {
        for (std::size_t c = 0; c < names.size(); ++c) {
            if (c > 0)
                out << ',';
            if (table.is_numeric(names[c])) {
                const double v = table.numeric(names[c])[i];
                if (std::isnan(v))
                    out << "NA";
                else
                    out << fmt::format("{:.17g}", v);
            } else {
                const std::string &cell = table.text(names[c])[i];
                if (cell.find(',') != std::string::npos || cell.find('\n') != std::string::npos)
                    throw ValidationError(fmt::format(
                        "text value '{}' in column '{}' contains the delimiter", cell, names[c]));
                out << cell;
            }
        }
        out << '\n';
    }
}

void write_delimited_file(const MicrodataTable &table, const std::string &path) {
    std::ofstream out(path);
    if (!out)
        throw ValidationError(fmt::format("cannot open output file '{}'", path));
    write_delimited(table, out);
    out.flush();
    if (!out)
        throw ValidationError(fmt::format("failed writing output file '{}'", path));
}

double oracle_theil(std::span<const double> values) {
    if (values.empty())
        throw ComputeError("oracle needs at least one value");
    double sum = 0.0;
    for (double x : values) {
        if (!(x > 0.0))
            throw ComputeError(fmt::format("oracle requires strictly positive values, got {}", x));
        sum += x;
    }
    const double mean = sum / static_cast<double>(values.size());
    double t = 0.0;
    for (double x : values)
        t += (x / mean) * std::log(x / mean);
    return t / static_cast<double>(values.size());
}

std::vector<double> oracle_ols_normal_equations(const std::vector<std::vector<double>> &X,
                                                const std::vector<double> &y) {
    const std::size_t n = X.size();
    if (n == 0 || y.size() != n)
        throw ComputeError("oracle needs a nonempty design with matching response length");
    const std::size_t p = X.front().size();
    for (const auto &row : X)
        if (row.size() != p)
            throw ComputeError("oracle design rows have inconsistent lengths");

    // Augmented [X'X | X'y], then Gauss-Jordan with partial pivoting.
    std::vector<std::vector<double>> aug(p, std::vector<double>(p + 1, 0.0));
    for (std::size_t j = 0; j < p; ++j) {
        for (std::size_t k = 0; k < p; ++k)
            for (std::size_t i = 0; i < n; ++i)
                aug[j][k] += X[i][j] * X[i][k];
        for (std::size_t i = 0; i < n; ++i)
            aug[j][p] += X[i][j] * y[i];
    }

    double scale = 0.0;
    for (std::size_t j = 0; j < p; ++j)
        scale = std::max(scale, std::fabs(aug[j][j]));
    for (std::size_t col = 0; col < p; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < p; ++r)
            if (std::fabs(aug[r][col]) > std::fabs(aug[pivot][col]))
                pivot = r;
        if (std::fabs(aug[pivot][col]) <= 1e-12 * std::max(scale, 1.0))
            throw ComputeError("oracle normal matrix is singular");
        std::swap(aug[col], aug[pivot]);
        const double d = aug[col][col];
        for (std::size_t k = 0; k <= p; ++k)
            aug[col][k] /= d;
        for (std::size_t r = 0; r < p; ++r) {
            if (r == col)
                continue;
            const double factor = aug[r][col];
            for (std::size_t k = 0; k <= p; ++k)
                aug[r][k] -= factor * aug[col][k];
        }
    }

    std::vector<double> beta(p);
    for (std::size_t j = 0; j < p; ++j)
        beta[j] = aug[j][p];
    return beta;
}

OracleDecomposition oracle_decomposition(const MicrodataTable &table, const DesignSpec &spec,
                                         const Grouping &grouping, const std::string &high_group) {
    if (grouping.group_order.size() != 2)
        throw ValidationError("oracle decomposition expects exactly two groups");
    const Partition partition = partition_by_group(table, grouping);
    const std::size_t hi = partition.index_of(high_group);
    const std::size_t lo = 1 - hi;

    const auto group_stats = [&](std::size_t k) {
        const DesignMatrix d = encode_design(subtable(table, partition, k), spec, false);
        const std::size_t n = static_cast<std::size_t>(d.n());
        const std::size_t p = static_cast<std::size_t>(d.p());
        std::vector<std::vector<double>> rows(n, std::vector<double>(p));
        std::vector<double> y(n);
        std::vector<double> means(p, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            y[i] = d.y(static_cast<Eigen::Index>(i));
            for (std::size_t j = 0; j < p; ++j) {
                rows[i][j] = d.X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
                means[j] += rows[i][j];
            }
        }
        for (double &m : means)
            m /= static_cast<double>(n);
        return std::pair{means, oracle_ols_normal_equations(rows, y)};
    };

    const auto [mean_h, beta_h] = group_stats(hi);
    const auto [mean_l, beta_l] = group_stats(lo);

    OracleDecomposition r;
    for (std::size_t j = 0; j < mean_h.size(); ++j) {
        const double dx = mean_h[j] - mean_l[j];
        const double db = beta_h[j] - beta_l[j];
        r.endowment += dx * beta_l[j];
        r.coefficient += mean_l[j] * db;
        r.interaction += dx * db;
    }
    return r;
}

} // namespace wagedecomp
