#include "wagedecomp/inequality.hpp"

#include "wagedecomp/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/core.h>

namespace wagedecomp {

namespace {

void require_positive_values(const IncomeVector &v, const char *what) {
    for (double x : v.values())
        if (!(x > 0.0))
            throw ComputeError(fmt::format("{} requires strictly positive values, got {}", what, x));
}

} // namespace

IncomeVector::IncomeVector(std::vector<double> values, std::vector<double> weights)
    : values_(std::move(values)), weights_(std::move(weights)) {
    if (values_.size() != weights_.size())
        throw ComputeError(fmt::format("income vector has {} values but {} weights", values_.size(),
                                       weights_.size()));
    if (values_.empty())
        throw ComputeError("income vector is empty");
    for (double x : values_)
        if (std::isnan(x))
            throw ComputeError("income vector contains a missing value");
    for (double w : weights_)
        if (!(w >= 0.0))
            throw ComputeError(fmt::format("observation weights must be non-negative, got {}", w));
    total_weight_ = pairwise_sum(weights_);
    if (!(total_weight_ > 0.0))
        throw ComputeError("at least one observation weight must be strictly positive");
}

IncomeVector IncomeVector::unit_weights(std::vector<double> values) {
    std::vector<double> w(values.size(), 1.0);
    return IncomeVector(std::move(values), std::move(w));
}

double IncomeVector::weighted_mean() const {
    const double num = pairwise_sum(values_.size(),
                                    [&](std::size_t i) { return weights_[i] * values_[i]; });
    return num / total_weight_;
}

double ge_index(const IncomeVector &v, double alpha) {
    require_positive_values(v, "generalized entropy");
    const double mean = v.weighted_mean();
    const double W = v.total_weight();
    const auto xs = v.values();
    const auto ws = v.weights();
    const std::size_t n = v.size();

    if (alpha == 1.0)
        return pairwise_sum(n, [&](std::size_t i) {
                   const double r = xs[i] / mean;
                   return ws[i] * r * std::log(r);
               }) /
               W;
    if (alpha == 0.0)
        return pairwise_sum(n, [&](std::size_t i) { return ws[i] * std::log(mean / xs[i]); }) / W;
    const double m = pairwise_sum(n, [&](std::size_t i) {
                         return ws[i] * std::pow(xs[i] / mean, alpha);
                     }) /
                     W;
    return (m - 1.0) / (alpha * (alpha - 1.0));
}

double theil_index(const IncomeVector &v) { return ge_index(v, 1.0); }

double gini(const IncomeVector &v) {
    const auto xs = v.values();
    const auto ws = v.weights();
    const std::size_t n = v.size();
    for (double x : xs)
        if (!(x >= 0.0))
            throw ComputeError(fmt::format("Gini requires non-negative values, got {}", x));

    const double mean = v.weighted_mean();
    if (!(mean > 0.0))
        throw ComputeError("Gini requires a strictly positive mean");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });

    const double W = v.total_weight();
    // G = 2 sum_i w_i x_i (c_i - w_i / 2) / (W^2 mu) - 1 with c_i the
    // cumulative weight through observation i in ascending value order.
    // Ties contribute identically regardless of their sort order.
    double cum = 0.0;
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t i = order[k];
        cum += ws[i];
        acc += ws[i] * xs[i] * (cum - 0.5 * ws[i]);
    }
    return 2.0 * acc / (W * W * mean) - 1.0;
}

double atkinson(const IncomeVector &v, double epsilon) {
    if (!(epsilon > 0.0))
        throw ComputeError(fmt::format("Atkinson index requires epsilon > 0, got {}", epsilon));
    require_positive_values(v, "Atkinson index");
    const double mean = v.weighted_mean();
    const double W = v.total_weight();
    const auto xs = v.values();
    const auto ws = v.weights();
    const std::size_t n = v.size();

    if (epsilon == 1.0) {
        const double mean_log =
            pairwise_sum(n, [&](std::size_t i) { return ws[i] * std::log(xs[i]); }) / W;
        return 1.0 - std::exp(mean_log) / mean;
    }
    const double power = 1.0 - epsilon;
    const double m = pairwise_sum(n, [&](std::size_t i) {
                         return ws[i] * std::pow(xs[i] / mean, power);
                     }) /
                     W;
    return 1.0 - std::pow(m, 1.0 / power);
}

double weighted_quantile(const IncomeVector &v, double pct) {
    if (!(pct > 0.0 && pct < 100.0))
        throw ComputeError(fmt::format("quantile percentage must lie in (0, 100), got {}", pct));
    const auto xs = v.values();
    const auto ws = v.weights();
    const std::size_t n = v.size();

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });

    const double W = v.total_weight();
    // Nearest rank: smallest value whose cumulative weight reaches the
    // target. The tiny slack absorbs round-off when the target sits exactly
    // on a cumulative-weight boundary.
    const double target = pct / 100.0 * W;
    const double slack = 1e-12 * W;
    double cum = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        cum += ws[order[k]];
        if (cum >= target - slack)
            return xs[order[k]];
    }
    return xs[order[n - 1]];
}

double percentile_ratio(const IncomeVector &v, double hi, double lo) {
    if (!(lo > 0.0 && hi < 100.0 && lo < hi))
        throw ComputeError(
            fmt::format("percentile ratio requires 0 < lo < hi < 100, got hi {} lo {}", hi, lo));
    const double q_lo = weighted_quantile(v, lo);
    if (!(q_lo > 0.0))
        throw ComputeError(
            fmt::format("percentile ratio requires a positive p{} quantile, got {}", lo, q_lo));
    return weighted_quantile(v, hi) / q_lo;
}

GroupAssignment GroupAssignment::from_labels(std::vector<std::string> labels) {
    GroupAssignment g;
    for (const auto &label : labels)
        if (std::find(g.groups.begin(), g.groups.end(), label) == g.groups.end())
            g.groups.push_back(label);
    g.labels = std::move(labels);
    return g;
}

DecompositionReport decompose_theil(const IncomeVector &v, const GroupAssignment &g) {
    if (g.labels.size() != v.size())
        throw ComputeError(fmt::format("{} group labels for {} observations", g.labels.size(),
                                       v.size()));
    require_positive_values(v, "Theil decomposition");

    const std::size_t K = g.groups.size();
    std::vector<std::vector<std::size_t>> members(K);
    for (std::size_t i = 0; i < g.labels.size(); ++i) {
        const auto it = std::find(g.groups.begin(), g.groups.end(), g.labels[i]);
        if (it == g.groups.end())
            throw ValidationError(
                fmt::format("label '{}' does not appear in the declared group list", g.labels[i]));
        members[static_cast<std::size_t>(it - g.groups.begin())].push_back(i);
    }
    for (std::size_t k = 0; k < K; ++k)
        if (members[k].empty())
            throw ComputeError(fmt::format("group '{}' has no observations", g.groups[k]));

    const auto xs = v.values();
    const auto ws = v.weights();
    const double W = v.total_weight();
    const double mean = v.weighted_mean();
    const double total_income = mean * W;

    DecompositionReport report;
    report.total_T = theil_index(v);

    double T_b = 0.0;
    double T_w = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
        std::vector<double> gx, gw;
        gx.reserve(members[k].size());
        gw.reserve(members[k].size());
        for (std::size_t i : members[k]) {
            gx.push_back(xs[i]);
            gw.push_back(ws[i]);
        }
        const IncomeVector sub(std::move(gx), std::move(gw));

        DecompositionReport::Group row;
        row.group = g.groups[k];
        row.n = members[k].size();
        row.mean_wage = sub.weighted_mean();
        row.employment_share = 100.0 * sub.total_weight() / W;
        row.income_share = row.mean_wage * sub.total_weight() / total_income;
        row.T_k = theil_index(sub);
        T_b += row.income_share * std::log(row.mean_wage / mean);
        T_w += row.income_share * row.T_k;
        report.per_group.push_back(std::move(row));
    }

    report.between_T_b = T_b;
    report.within_T_w = T_w;
    if (report.total_T != 0.0) {
        report.within_share_pct = 100.0 * T_w / report.total_T;
        report.between_share_pct = 100.0 * T_b / report.total_T;
    }
    return report;
}

InequalityProfile inequality_profile(const MicrodataTable &table, const Grouping &grouping,
                                     const std::string &outcome_column, bool use_weights) {
    if (!table.has_column(outcome_column))
        throw ValidationError(fmt::format("outcome column '{}' not found", outcome_column));
    if (table.n_rows() == 0)
        throw ComputeError("cannot profile an empty table");

    const std::vector<double> weights = effective_weights(table, use_weights);
    const IncomeVector all(table.numeric(outcome_column), weights);

    InequalityProfile profile;
    profile.outcome_column = outcome_column;
    profile.total_gini = gini(all);
    profile.total_mean_wage = all.weighted_mean();

    GroupAssignment assignment;
    assignment.labels = group_keys_per_row(table, grouping);
    assignment.groups = grouping.group_order;
    profile.decomposition = decompose_theil(all, assignment);

    const Partition partition = partition_by_group(table, grouping);
    const auto &values = table.numeric(outcome_column);
    for (std::size_t k = 0; k < partition.groups.size(); ++k) {
        std::vector<double> gx, gw;
        for (std::size_t i : partition.rows[k]) {
            gx.push_back(values[i]);
            gw.push_back(weights[i]);
        }
        const IncomeVector sub(std::move(gx), std::move(gw));

        InequalityProfile::Row row;
        row.group = partition.groups[k];
        row.n = partition.rows[k].size();
        row.employment_share = 100.0 * sub.total_weight() / all.total_weight();
        row.mean_wage = sub.weighted_mean();
        row.gini = gini(sub);
        row.theil = theil_index(sub);
        profile.rows.push_back(std::move(row));
    }
    return profile;
}

} // namespace wagedecomp
