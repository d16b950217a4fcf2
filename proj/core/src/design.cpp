#include "wagedecomp/design.hpp"

#include <cmath>

#include <fmt/core.h>

namespace wagedecomp {

namespace {

void append_column(Eigen::MatrixXd &X, std::vector<std::string> &names, const std::string &name,
                   const std::vector<double> &values) {
    const Eigen::Index col = X.cols();
    X.conservativeResize(Eigen::NoChange, col + 1);
    for (Eigen::Index i = 0; i < X.rows(); ++i)
        X(i, col) = values[static_cast<std::size_t>(i)];
    names.push_back(name);
}

} // namespace

DesignMatrix encode_design(const MicrodataTable &table, const DesignSpec &spec, bool use_weights) {
    const std::size_t n = table.n_rows();
    if (n == 0)
        throw ComputeError("cannot build a design matrix from an empty table");
    if (!table.has_column(spec.response))
        throw ValidationError(fmt::format("response column '{}' not found", spec.response));
    if (spec.predictors.empty())
        throw ValidationError("model specification lists no predictors");

    DesignMatrix d;
    d.X.resize(static_cast<Eigen::Index>(n), 0);

    if (spec.include_intercept)
        append_column(d.X, d.names, kInterceptName, std::vector<double>(n, 1.0));

    for (const auto &pred : spec.predictors) {
        if (pred == kAgeSquaredTerm) {
            auto age_col = table.column_with_role(ColumnRole::age);
            if (!age_col)
                throw ValidationError(
                    "predictor 'age_squared' requires a column with role age");
            const auto &age = table.numeric(*age_col);
            std::vector<double> sq(n);
            for (std::size_t i = 0; i < n; ++i)
                sq[i] = age[i] * age[i];
            append_column(d.X, d.names, kAgeSquaredTerm, sq);
            continue;
        }
        if (!table.has_column(pred))
            throw ValidationError(fmt::format("predictor column '{}' not found", pred));
        if (table.is_numeric(pred)) {
            append_column(d.X, d.names, pred, table.numeric(pred));
            continue;
        }

        // Categorical expansion: one dummy per non-base level, declared order.
        const ColumnSchema &cs = table.schema(pred);
        if (cs.role != ColumnRole::categorical)
            throw ValidationError(fmt::format(
                "predictor column '{}' has role '{}', expected a numeric or categorical column", pred,
                to_string(cs.role)));
        const std::vector<std::string> labels = canonical_labels(table, pred);
        for (const auto &level : cs.levels()) {
            if (level == cs.base_level)
                continue;
            std::vector<double> dummy(n, 0.0);
            for (std::size_t i = 0; i < n; ++i)
                if (labels[i] == level)
                    dummy[i] = 1.0;
            append_column(d.X, d.names, level, dummy);
        }
    }

    for (Eigen::Index j = spec.include_intercept ? 1 : 0; j < d.X.cols(); ++j) {
        const double first = d.X(0, j);
        if ((d.X.col(j).array() == first).all())
            d.warnings.push_back(fmt::format(
                "predictor column '{}' is constant across all rows; the fit will be rank deficient",
                d.names[static_cast<std::size_t>(j)]));
    }

    const auto &resp = table.numeric(spec.response);
    d.y.resize(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        if (std::isnan(resp[i]))
            throw ComputeError(fmt::format(
                "response column '{}' contains a missing value at row {}; filter the data first",
                spec.response, i + 1));
        d.y(static_cast<Eigen::Index>(i)) = resp[i];
    }

    const std::vector<double> w = effective_weights(table, use_weights);
    d.w.resize(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i)
        d.w(static_cast<Eigen::Index>(i)) = w[i];

    return d;
}

} // namespace wagedecomp
