#include "wagedecomp/decomposition.hpp"

#include "wagedecomp/numeric.hpp"

#include <algorithm>

#include <fmt/core.h>
#include <fmt/ranges.h>

namespace wagedecomp {

namespace {

void require_matching_columns(const GroupStats &high, const GroupStats &low) {
    if (high.names != low.names) {
        std::vector<std::string> only_one_side;
        for (const auto &n : high.names)
            if (std::find(low.names.begin(), low.names.end(), n) == low.names.end())
                only_one_side.push_back(n);
        for (const auto &n : low.names)
            if (std::find(high.names.begin(), high.names.end(), n) == high.names.end())
                only_one_side.push_back(n);
        throw ValidationError(
            only_one_side.empty()
                ? std::string("decomposition requires both groups to list their design columns in "
                              "the same order")
                : fmt::format("decomposition requires identical design columns; present on one "
                              "side only: {}",
                              fmt::join(only_one_side, ", ")));
    }
    const auto p = static_cast<Eigen::Index>(high.names.size());
    if (high.mean_x.size() != p || high.beta.size() != p || low.mean_x.size() != p ||
        low.beta.size() != p)
        throw ValidationError("group statistics do not match their design column list");
    if (p == 0)
        throw ValidationError("group statistics declare no design columns");
}

} // namespace

GroupStats GroupStats::from_fit(std::string label, const FitResult &fit) {
    GroupStats s;
    s.label = std::move(label);
    s.names = fit.names;
    s.mean_x = fit.mean_x;
    s.beta = fit.coefficients;
    s.n = fit.n_obs;
    s.vcov = fit.vcov;
    return s;
}

ThreefoldResult threefold(const GroupStats &high, const GroupStats &low, ReferenceGroup reference) {
    require_matching_columns(high, low);
    const Eigen::Index p = high.mean_x.size();
    const Eigen::VectorXd dx = high.mean_x - low.mean_x;
    const Eigen::VectorXd db = high.beta - low.beta;

    ThreefoldResult r;
    r.high_label = high.label;
    r.low_label = low.label;
    r.reference = reference;
    r.gap = high.mean_x.dot(high.beta) - low.mean_x.dot(low.beta);

    for (Eigen::Index j = 0; j < p; ++j) {
        ThreefoldResult::Row row;
        row.name = high.names[static_cast<std::size_t>(j)];
        if (reference == ReferenceGroup::low) {
            row.endowment = dx(j) * low.beta(j);
            row.coefficient = low.mean_x(j) * db(j);
            row.interaction = dx(j) * db(j);
        } else {
            row.endowment = dx(j) * high.beta(j);
            row.coefficient = high.mean_x(j) * db(j);
            row.interaction = -dx(j) * db(j);
        }
        r.endowment += row.endowment;
        r.coefficient += row.coefficient;
        r.interaction += row.interaction;
        r.per_variable.push_back(std::move(row));
    }
    return r;
}

BlinderResult blinder_original(const GroupStats &high, const GroupStats &low) {
    require_matching_columns(high, low);
    const auto it = std::find(high.names.begin(), high.names.end(), kInterceptName);
    if (it == high.names.end())
        throw ComputeError(fmt::format(
            "the endowments/coefficients/shift decomposition requires an intercept column '{}'",
            kInterceptName));
    const auto intercept = static_cast<Eigen::Index>(it - high.names.begin());

    BlinderResult r;
    r.high_label = high.label;
    r.low_label = low.label;
    r.endowments = (high.mean_x - low.mean_x).dot(high.beta);
    for (Eigen::Index j = 0; j < high.mean_x.size(); ++j)
        if (j != intercept)
            r.coefficients += low.mean_x(j) * (high.beta(j) - low.beta(j));
    r.shift = high.beta(intercept) - low.beta(intercept);
    return r;
}

std::optional<double> BlinderResult::endowments_pct_of_raw() const {
    const double raw = raw_differential();
    if (raw == 0.0)
        return std::nullopt;
    return 100.0 * endowments / raw;
}

std::optional<double> BlinderResult::discrimination_pct_of_raw() const {
    const double raw = raw_differential();
    if (raw == 0.0)
        return std::nullopt;
    return 100.0 * adjusted_differential() / raw;
}

PercentShares percent_report(const ThreefoldResult &r) {
    if (r.gap == 0.0)
        throw ComputeError("component shares are undefined when the wage gap is zero");
    return {100.0 * r.endowment / r.gap, 100.0 * r.coefficient / r.gap,
            100.0 * r.interaction / r.gap};
}

DetailedTable detailed_table(const ThreefoldResult &r) {
    DetailedTable t;
    const bool has_gap = r.gap != 0.0;
    for (const auto &v : r.per_variable) {
        DetailedTable::Row row;
        row.name = v.name;
        row.endowment = v.endowment;
        row.coefficient = v.coefficient;
        row.interaction = v.interaction;
        if (has_gap) {
            row.endowment_pct = 100.0 * v.endowment / r.gap;
            row.coefficient_pct = 100.0 * v.coefficient / r.gap;
            row.interaction_pct = 100.0 * v.interaction / r.gap;
            row.total_pct = 100.0 * v.total() / r.gap;
        }
        t.rows.push_back(std::move(row));
    }
    t.subtotal.name = "Subtotal";
    t.subtotal.endowment = r.endowment;
    t.subtotal.coefficient = r.coefficient;
    t.subtotal.interaction = r.interaction;
    if (has_gap) {
        t.subtotal.endowment_pct = 100.0 * r.endowment / r.gap;
        t.subtotal.coefficient_pct = 100.0 * r.coefficient / r.gap;
        t.subtotal.interaction_pct = 100.0 * r.interaction / r.gap;
        t.subtotal.total_pct =
            100.0 * (r.endowment + r.coefficient + r.interaction) / r.gap;
    }
    return t;
}

DataDecomposition decompose_from_data(const MicrodataTable &table, const DesignSpec &spec,
                                      const Grouping &grouping, const DecomposeOptions &options) {
    if (grouping.group_order.size() != 2)
        throw ValidationError(fmt::format("wage-gap decomposition requires exactly two groups, got {}",
                                          grouping.group_order.size()));

    const Partition partition = partition_by_group(table, grouping);
    for (std::size_t k = 0; k < 2; ++k)
        if (partition.rows[k].empty())
            throw ComputeError(fmt::format("group '{}' has no observations", partition.groups[k]));

    MicrodataTable sub0 = subtable(table, partition, 0);
    MicrodataTable sub1 = subtable(table, partition, 1);
    FitResult fit0 = fit_wls(encode_design(sub0, spec, options.use_weights));
    FitResult fit1 = fit_wls(encode_design(sub1, spec, options.use_weights));

    const auto weighted_mean_response = [&](const MicrodataTable &sub) {
        const auto &y = sub.numeric(spec.response);
        const std::vector<double> w = effective_weights(sub, options.use_weights);
        const double num = pairwise_sum(y.size(), [&](std::size_t i) { return w[i] * y[i]; });
        return num / pairwise_sum(w);
    };
    const double mean0 = weighted_mean_response(sub0);
    const double mean1 = weighted_mean_response(sub1);

    std::size_t high_idx;
    if (options.high_group) {
        if (*options.high_group == partition.groups[0])
            high_idx = 0;
        else if (*options.high_group == partition.groups[1])
            high_idx = 1;
        else
            throw ValidationError(fmt::format("high group '{}' is not one of the grouping's groups",
                                              *options.high_group));
    } else {
        high_idx = mean0 >= mean1 ? 0 : 1;
    }

    DataDecomposition d;
    d.fit_high = high_idx == 0 ? fit0 : fit1;
    d.fit_low = high_idx == 0 ? fit1 : fit0;
    d.stats_high = GroupStats::from_fit(partition.groups[high_idx], d.fit_high);
    d.stats_low = GroupStats::from_fit(partition.groups[1 - high_idx], d.fit_low);
    d.threefold = threefold(d.stats_high, d.stats_low, options.reference);
    d.blinder = blinder_original(d.stats_high, d.stats_low);
    return d;
}

} // namespace wagedecomp
