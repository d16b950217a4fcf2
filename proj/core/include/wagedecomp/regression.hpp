#pragma once

#include "wagedecomp/design.hpp"
#include "wagedecomp/microdata.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <vector>

namespace wagedecomp {

/// Weighted least-squares estimate bundle with classical inference.
struct FitResult {
    std::vector<std::string> names;
    Eigen::VectorXd coefficients;
    Eigen::VectorXd std_errors;
    Eigen::VectorXd t_values;
    Eigen::VectorXd p_values;
    double r_squared = 0.0;
    double adj_r_squared = 0.0;
    double sigma2 = 0.0; // RSS / (n - p)
    std::size_t n_obs = 0;
    Eigen::VectorXd residuals;
    Eigen::VectorXd mean_x; // weighted design-column means
    Eigen::MatrixXd vcov;   // sigma2 * (X'WX)^-1
};

/// Minimizes sum_i w_i (y_i - x_i' beta)^2 via column-pivoted Householder
/// QR of the sqrt(w)-scaled design (no explicit normal-equation inverse).
/// Rank is decided by a 1e-10 relative tolerance on the R diagonal;
/// deficiency raises ComputeError naming the dependent column(s).
/// Standard errors are classical homoskedastic, t is beta/SE, and p comes
/// from the Student-t distribution with n - p degrees of freedom.
FitResult fit_wls(const Eigen::MatrixXd &X, const Eigen::VectorXd &y, const Eigen::VectorXd &w,
                  std::vector<std::string> names = {});

FitResult fit_wls(const DesignMatrix &design);

/// Two-sided tail probability P(|T| >= |t|) for Student-t with df > 0,
/// evaluated through the regularized incomplete beta function.
double student_t_sf(double t, double df);

/// Earnings-function fit for one subset of a grouping: encodes the design
/// on the subset rows and runs fit_wls.
FitResult mincer_fit(const MicrodataTable &table, const DesignSpec &spec, const Grouping &grouping,
                     const std::string &subset, bool use_weights = true);

} // namespace wagedecomp
