#pragma once

#include "wagedecomp/microdata.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace wagedecomp {

/// Outcome values with optional non-negative observation weights. The
/// generalized-entropy and Atkinson entry points additionally require
/// strictly positive values; Gini accepts zeros.
class IncomeVector {
  public:
    IncomeVector(std::vector<double> values, std::vector<double> weights);
    static IncomeVector unit_weights(std::vector<double> values);

    std::span<const double> values() const { return values_; }
    std::span<const double> weights() const { return weights_; }
    std::size_t size() const { return values_.size(); }
    double total_weight() const { return total_weight_; }
    double weighted_mean() const;

  private:
    std::vector<double> values_;
    std::vector<double> weights_;
    double total_weight_ = 0.0;
};

/// Generalized entropy index GE(alpha).
///   alpha = 0  mean log deviation
///   alpha = 1  Theil index
///   alpha = 2  half the squared coefficient of variation
///   otherwise  (1 / (alpha (alpha-1))) [ weighted mean of (x/mean)^alpha - 1 ]
/// Weights are normalized by their total, so unit weights reproduce the
/// unweighted definitions. Values must be strictly positive.
double ge_index(const IncomeVector &v, double alpha);

/// Theil index, GE(1): weighted mean of (x/mean) ln(x/mean).
double theil_index(const IncomeVector &v);

/// Weighted Gini coefficient via the sorted cumulative-share formula;
/// equals the mean absolute pairwise difference over twice the mean.
/// Requires non-negative values with a positive mean.
double gini(const IncomeVector &v);

/// Atkinson index A(epsilon), epsilon > 0.
///   epsilon = 1  1 - geometric mean / arithmetic mean
///   otherwise    1 - [ weighted mean of (x/mean)^(1-eps) ]^(1/(1-eps))
double atkinson(const IncomeVector &v, double epsilon);

/// Weighted quantile under the nearest-rank convention: the smallest value
/// whose cumulative weight reaches pct% of the total weight. Percentile
/// ratios are convention-sensitive, so this is the single quantile
/// definition used everywhere.
double weighted_quantile(const IncomeVector &v, double pct);

/// quantile(hi) / quantile(lo); requires 0 < lo < hi < 100 and a strictly
/// positive lo-quantile.
double percentile_ratio(const IncomeVector &v, double hi, double lo);

/// One group key per observation. `groups` fixes the reporting order; when
/// empty it is derived from the labels in order of first appearance.
struct GroupAssignment {
    std::vector<std::string> labels;
    std::vector<std::string> groups;

    static GroupAssignment from_labels(std::vector<std::string> labels);
};

/// Additive between/within split of the Theil index by subgroup.
struct DecompositionReport {
    struct Group {
        std::string group;
        double employment_share = 0.0; // % of total weight
        double mean_wage = 0.0;
        double T_k = 0.0;              // group's own Theil
        double income_share = 0.0;     // y_k, sums to 1
        std::size_t n = 0;
    };

    double total_T = 0.0;
    double between_T_b = 0.0;
    double within_T_w = 0.0;
    double within_share_pct = 0.0;  // 100 * T_w / T (0 when T == 0)
    double between_share_pct = 0.0; // 100 * T_b / T (0 when T == 0)
    std::vector<Group> per_group;
};

/// T_b = sum_k y_k ln(mean_k / mean); T_w = sum_k y_k T_k. The report
/// satisfies T = T_b + T_w to numerical tolerance. Every declared group
/// must be nonempty.
DecompositionReport decompose_theil(const IncomeVector &v, const GroupAssignment &g);

/// Table-level profile: one row per group with employment share, mean
/// wage, Gini and Theil, plus the total decomposition row.
struct InequalityProfile {
    struct Row {
        std::string group;
        double employment_share = 0.0;
        double mean_wage = 0.0;
        double gini = 0.0;
        double theil = 0.0;
        std::size_t n = 0;
    };

    std::string outcome_column;
    std::vector<Row> rows;
    double total_gini = 0.0;
    double total_mean_wage = 0.0;
    DecompositionReport decomposition;
};

InequalityProfile inequality_profile(const MicrodataTable &table, const Grouping &grouping,
                                     const std::string &outcome_column, bool use_weights = true);

} // namespace wagedecomp
