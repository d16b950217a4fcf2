#pragma once

#include "wagedecomp/design.hpp"
#include "wagedecomp/microdata.hpp"
#include "wagedecomp/regression.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace wagedecomp {

/// Per-group inputs to the wage-gap decompositions: weighted design-column
/// means (intercept entry 1), fitted coefficients, and sample size.
struct GroupStats {
    std::string label;
    std::vector<std::string> names;
    Eigen::VectorXd mean_x;
    Eigen::VectorXd beta;
    std::size_t n = 0;
    Eigen::MatrixXd vcov; // coefficient covariance; empty when unknown

    static GroupStats from_fit(std::string label, const FitResult &fit);
};

/// Which group's coefficients weight the endowment term.
enum class ReferenceGroup { low, high };

/// Threefold split of the mean log-wage gap W = mean_H'beta_H - mean_L'beta_L.
/// With the default low reference:
///   endowment   E = (mean_H - mean_L)' beta_L
///   coefficient C = mean_L' (beta_H - beta_L)
///   interaction I = (mean_H - mean_L)' (beta_H - beta_L)
/// W = E + C + I holds as an algebraic identity. Per-variable rows are the
/// elementwise summands.
struct ThreefoldResult {
    struct Row {
        std::string name;
        double endowment = 0.0;
        double coefficient = 0.0;
        double interaction = 0.0;
        double total() const { return endowment + coefficient + interaction; }
    };

    double gap = 0.0; // W
    double endowment = 0.0;
    double coefficient = 0.0;
    double interaction = 0.0;
    std::vector<Row> per_variable;
    std::string high_label;
    std::string low_label;
    ReferenceGroup reference = ReferenceGroup::low;
};

ThreefoldResult threefold(const GroupStats &high, const GroupStats &low,
                          ReferenceGroup reference = ReferenceGroup::low);

/// Original E/C/U/D formulation: endowments at the high group's
/// coefficients, the coefficients part over non-intercept columns only,
/// and the intercept difference isolated as the shift coefficient U.
/// R = E + C + U, D = C + U. Ratios are empty when R == 0.
struct BlinderResult {
    double endowments = 0.0;  // E = (mean_H - mean_L)' beta_H
    double coefficients = 0.0; // C, non-intercept columns
    double shift = 0.0;        // U, intercept difference
    std::string high_label;
    std::string low_label;

    double raw_differential() const { return endowments + coefficients + shift; }
    double adjusted_differential() const { return coefficients + shift; }
    std::optional<double> endowments_pct_of_raw() const;     // 100 * E / R
    std::optional<double> discrimination_pct_of_raw() const; // 100 * D / R
};

BlinderResult blinder_original(const GroupStats &high, const GroupStats &low);

/// Component shares of the gap, 100 * {E, C, I} / W. Raises ComputeError
/// when W == 0.
struct PercentShares {
    double endowment_pct = 0.0;
    double coefficient_pct = 0.0;
    double interaction_pct = 0.0;
};
PercentShares percent_report(const ThreefoldResult &r);

/// Per-variable detail rows with percent-of-gap columns plus a subtotal
/// row equal to the aggregates. Percent fields are empty when W == 0.
struct DetailedTable {
    struct Row {
        std::string name;
        double endowment = 0.0;
        double coefficient = 0.0;
        double interaction = 0.0;
        std::optional<double> endowment_pct;
        std::optional<double> coefficient_pct;
        std::optional<double> interaction_pct;
        std::optional<double> total_pct;
    };

    std::vector<Row> rows;
    Row subtotal;
};
DetailedTable detailed_table(const ThreefoldResult &r);

struct DecomposeOptions {
    ReferenceGroup reference = ReferenceGroup::low;
    /// Group treated as the high-wage side; defaults to the group with the
    /// higher weighted mean response.
    std::optional<std::string> high_group;
    bool use_weights = true;
};

/// Fits each of the two groups with fit_wls, assembles GroupStats from the
/// fitted means and coefficients, and runs both decompositions. The gap
/// equals the difference of the groups' weighted mean responses through
/// the regression mean identity.
struct DataDecomposition {
    ThreefoldResult threefold;
    BlinderResult blinder;
    FitResult fit_high;
    FitResult fit_low;
    GroupStats stats_high;
    GroupStats stats_low;
};
DataDecomposition decompose_from_data(const MicrodataTable &table, const DesignSpec &spec,
                                      const Grouping &grouping, const DecomposeOptions &options = {});

} // namespace wagedecomp
