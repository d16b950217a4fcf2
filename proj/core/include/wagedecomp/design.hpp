#pragma once

#include "wagedecomp/microdata.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace wagedecomp {

inline constexpr const char *kInterceptName = "constant";
inline constexpr const char *kAgeSquaredTerm = "age_squared";

/// Model specification: a response column plus an ordered predictor list.
/// Predictors are column names; numeric columns enter as-is, categorical
/// columns expand to one 0/1 column per non-base level (base omitted), and
/// the reserved name "age_squared" derives the square of the age column.
struct DesignSpec {
    std::string response = "log_daily_wage";
    std::vector<std::string> predictors;
    bool include_intercept = true;
};

struct DesignMatrix {
    Eigen::MatrixXd X;
    Eigen::VectorXd y;
    Eigen::VectorXd w;
    std::vector<std::string> names;
    std::vector<std::string> warnings;

    Eigen::Index n() const { return X.rows(); }
    Eigen::Index p() const { return X.cols(); }
};

/// Builds the design matrix. Column order is deterministic: intercept
/// first, then predictors in spec order with categorical levels in
/// declared order. A constant non-intercept column only warns; the rank
/// check happens in the regression.
DesignMatrix encode_design(const MicrodataTable &table, const DesignSpec &spec,
                           bool use_weights = true);

} // namespace wagedecomp
