#include "wagedecomp/regression.hpp"

#include "wagedecomp/numeric.hpp"

#include <cmath>

#include <fmt/core.h>
#include <fmt/ranges.h>

namespace wagedecomp {

double student_t_sf(double t, double df) {
    if (!(df > 0.0))
        throw ComputeError(fmt::format("degrees of freedom must be positive, got {}", df));
    if (t == 0.0)
        return 1.0;
    const double x = df / (df + t * t);
    return regularized_incomplete_beta(0.5 * df, 0.5, x);
}

FitResult fit_wls(const Eigen::MatrixXd &X, const Eigen::VectorXd &y, const Eigen::VectorXd &w,
                  std::vector<std::string> names) {
    const Eigen::Index n = X.rows();
    const Eigen::Index p = X.cols();
    if (y.size() != n || w.size() != n)
        throw ComputeError(fmt::format("design has {} rows, response {} and weights {}", n, y.size(),
                                       w.size()));
    if (p == 0)
        throw ComputeError("design matrix has no columns");
    if (n <= p)
        throw ComputeError(
            fmt::format("{} observations cannot identify {} coefficients with residual degrees of "
                        "freedom left",
                        n, p));
    if (names.empty())
        for (Eigen::Index j = 0; j < p; ++j)
            names.push_back(fmt::format("x{}", j));
    if (static_cast<Eigen::Index>(names.size()) != p)
        throw ComputeError(fmt::format("{} column names for {} design columns", names.size(), p));
    for (Eigen::Index i = 0; i < n; ++i)
        if (!(w(i) > 0.0))
            throw ComputeError(
                fmt::format("observation weights must be strictly positive, got {}", w(i)));

    const Eigen::VectorXd sqw = w.array().sqrt();
    const Eigen::MatrixXd Xs = sqw.asDiagonal() * X;
    const Eigen::VectorXd ys = sqw.asDiagonal() * y;

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Xs);
    const Eigen::MatrixXd R = qr.matrixR().topLeftCorner(p, p).triangularView<Eigen::Upper>();

    // Column pivoting orders the R diagonal by decreasing magnitude, so a
    // relative threshold against the leading entry separates the dependent
    // columns cleanly.
    const double max_diag = std::abs(R(0, 0));
    Eigen::Index rank = 0;
    for (Eigen::Index j = 0; j < p; ++j)
        if (std::abs(R(j, j)) > 1e-10 * max_diag)
            ++rank;
    if (max_diag == 0.0)
        rank = 0;
    if (rank < p) {
        const auto &perm = qr.colsPermutation().indices();
        std::vector<std::string> dependent;
        for (Eigen::Index j = rank; j < p; ++j)
            dependent.push_back(names[static_cast<std::size_t>(perm(j))]);
        throw ComputeError(fmt::format("design matrix is rank deficient; dependent column(s): {}",
                                       fmt::join(dependent, ", ")));
    }

    FitResult fit;
    fit.names = std::move(names);
    fit.n_obs = static_cast<std::size_t>(n);
    fit.coefficients = qr.solve(ys);
    fit.residuals = y - X * fit.coefficients;

    const double rss = (sqw.asDiagonal() * fit.residuals).squaredNorm();
    const double df = static_cast<double>(n - p);
    fit.sigma2 = rss / df;

    const Eigen::MatrixXd r_inv =
        R.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(p, p));
    const Eigen::MatrixXd inv_xtx =
        qr.colsPermutation() * (r_inv * r_inv.transpose()) *
        qr.colsPermutation().transpose();
    fit.vcov = fit.sigma2 * inv_xtx;

    fit.std_errors.resize(p);
    fit.t_values.resize(p);
    fit.p_values.resize(p);
    for (Eigen::Index j = 0; j < p; ++j) {
        fit.std_errors(j) = std::sqrt(fit.vcov(j, j));
        fit.t_values(j) = fit.coefficients(j) / fit.std_errors(j);
        fit.p_values(j) = student_t_sf(fit.t_values(j), df);
    }

    const double total_w = pairwise_sum(static_cast<std::size_t>(n),
                                        [&](std::size_t i) { return w(static_cast<Eigen::Index>(i)); });
    const double y_mean =
        pairwise_sum(static_cast<std::size_t>(n),
                     [&](std::size_t i) {
                         const auto k = static_cast<Eigen::Index>(i);
                         return w(k) * y(k);
                     }) /
        total_w;
    const double tss = pairwise_sum(static_cast<std::size_t>(n), [&](std::size_t i) {
        const auto k = static_cast<Eigen::Index>(i);
        const double d = y(k) - y_mean;
        return w(k) * d * d;
    });
    fit.r_squared = tss > 0.0 ? 1.0 - rss / tss : 0.0;
    fit.adj_r_squared = 1.0 - (1.0 - fit.r_squared) * static_cast<double>(n - 1) / df;

    fit.mean_x.resize(p);
    for (Eigen::Index j = 0; j < p; ++j)
        fit.mean_x(j) = pairwise_sum(static_cast<std::size_t>(n),
                                     [&](std::size_t i) {
                                         const auto k = static_cast<Eigen::Index>(i);
                                         return w(k) * X(k, j);
                                     }) /
                        total_w;
    return fit;
}

FitResult fit_wls(const DesignMatrix &design) {
    return fit_wls(design.X, design.y, design.w, design.names);
}

FitResult mincer_fit(const MicrodataTable &table, const DesignSpec &spec, const Grouping &grouping,
                     const std::string &subset, bool use_weights) {
    const Partition partition = partition_by_group(table, grouping);
    const std::size_t k = partition.index_of(subset);
    if (partition.rows[k].empty())
        throw ComputeError(fmt::format("group '{}' has no observations", subset));
    return fit_wls(encode_design(subtable(table, partition, k), spec, use_weights));
}

} // namespace wagedecomp
