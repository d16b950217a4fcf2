#pragma once

#include "wagedecomp/design.hpp"
#include "wagedecomp/microdata.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace wagedecomp {

/// Sampling distribution for one synthetic regressor column.
struct ColumnDist {
    enum class Kind { constant, uniform, bernoulli, categorical };

    Kind kind = Kind::constant;
    double value = 0.0;               // constant
    double lo = 0.0, hi = 1.0;        // uniform(a, b)
    double p = 0.5;                   // bernoulli
    std::vector<std::string> levels;  // categorical; first level is the base
    std::vector<double> probs;        // must sum to 1

    static ColumnDist constant(double value);
    static ColumnDist uniform(double lo, double hi);
    static ColumnDist bernoulli(double p);
    static ColumnDist categorical(std::vector<std::string> levels, std::vector<double> probs);
};

/// One synthetic group: log wage = x' beta + Normal(0, noise_sd^2) noise.
/// `beta` is laid out over the implied design columns: intercept first,
/// then one entry per constant/uniform/bernoulli column and one per
/// non-base level of each categorical column, in declared order.
struct GroupPopulation {
    std::string label;
    std::size_t n = 0;
    std::vector<std::pair<std::string, ColumnDist>> columns;
    std::vector<double> beta;
    double noise_sd = 0.0;
};

struct PopulationSpec {
    std::vector<GroupPopulation> groups;
    std::uint64_t seed = 0;
    std::string group_column = "group";

    /// Implied design-column names for one group (intercept first).
    static std::vector<std::string> design_names(const GroupPopulation &group);
};

/// Deterministic synthetic table. Sampling uses mt19937_64 with one
/// SplitMix64-derived stream per (group, column) plus one noise stream per
/// group, uniforms from the high 53 bits, and normals through the inverse
/// CDF, so identical spec+seed reproduces bytes across platforms. The
/// emitted table carries weekly-wage and day-count columns with
/// weekly_wage = daily * (full_days + 0.5 * half_days) and
/// daily = exp(log wage), so it exercises the whole ingestion pipeline.
MicrodataTable generate_population(const PopulationSpec &spec);

/// Writes the table in the ingestion module's delimited format
/// (comma-separated, header row, 17-significant-digit numerics).
void write_delimited(const MicrodataTable &table, std::ostream &out);
void write_delimited_file(const MicrodataTable &table, const std::string &path);

// ---------------------------------------------------------------------------
// Independent oracles. These re-derive results along a second computational
// path (naive summation, explicit normal equations solved by Gauss-Jordan)
// and deliberately share no code with the modules they check.
// ---------------------------------------------------------------------------

/// Literal two-pass Theil evaluation in plain double precision.
double oracle_theil(std::span<const double> values);

/// Unweighted OLS coefficients from explicit normal equations (X'X b = X'y)
/// solved by Gauss-Jordan elimination; safe only for small well-conditioned
/// systems. Throws ComputeError on a singular normal matrix.
std::vector<double> oracle_ols_normal_equations(const std::vector<std::vector<double>> &X,
                                                const std::vector<double> &y);

/// Endowment/coefficient/interaction components recomputed from scratch:
/// per-group means and normal-equation OLS on the encoded design.
struct OracleDecomposition {
    double endowment = 0.0;
    double coefficient = 0.0;
    double interaction = 0.0;
};
OracleDecomposition oracle_decomposition(const MicrodataTable &table, const DesignSpec &spec,
                                         const Grouping &grouping, const std::string &high_group);

} // namespace wagedecomp
