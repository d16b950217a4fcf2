#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <wagedecomp/regression.hpp>

#include "test_helpers.hpp"

using namespace wagedecomp;

namespace {

Eigen::VectorXd ones(Eigen::Index n) { return Eigen::VectorXd::Ones(n); }

// Independent check on the tail probability: adaptive Simpson quadrature of
// the t density over [0, t], then p = 1 - 2 * integral.
double t_density(double x, double df) {
    const double c = std::exp(std::lgamma(0.5 * (df + 1.0)) - std::lgamma(0.5 * df)) /
                     std::sqrt(df * std::numbers::pi);
    return c * std::pow(1.0 + x * x / df, -0.5 * (df + 1.0));
}

double simpson(double fa, double fm, double fb, double h) { return h * (fa + 4.0 * fm + fb) / 6.0; }

double adaptive_simpson(double df, double a, double b, double fa, double fm, double fb,
                        double whole, double eps, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = t_density(lm, df);
    const double frm = t_density(rm, df);
    const double left = simpson(fa, flm, fm, m - a);
    const double right = simpson(fm, frm, fb, b - m);
    if (depth > 40 || std::fabs(left + right - whole) <= 15.0 * eps)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(df, a, m, fa, flm, fm, left, 0.5 * eps, depth + 1) +
           adaptive_simpson(df, m, b, fm, frm, fb, right, 0.5 * eps, depth + 1);
}

double t_sf_by_quadrature(double t, double df) {
    const double a = 0.0, b = std::fabs(t);
    if (b == 0.0)
        return 1.0;
    const double fa = t_density(a, df);
    const double fb = t_density(b, df);
    const double fm = t_density(0.5 * (a + b), df);
    const double integral =
        adaptive_simpson(df, a, b, fa, fm, fb, simpson(fa, fm, fb, b - a), 1e-13, 0);
    return 1.0 - 2.0 * integral;
}

} // namespace

TEST_CASE("three-point line fit with known closed form") {
    Eigen::MatrixXd X(3, 2);
    X << 1, 0, 1, 1, 1, 2;
    Eigen::VectorXd y(3);
    y << 1, 2, 4;
    const auto fit = fit_wls(X, y, ones(3), {"constant", "x"});

    CHECK(fit.coefficients(0) == doctest::Approx(5.0 / 6.0).epsilon(1e-13));
    CHECK(fit.coefficients(1) == doctest::Approx(1.5).epsilon(1e-13));
    CHECK(fit.r_squared == doctest::Approx(27.0 / 28.0).epsilon(1e-13));
    CHECK(fit.adj_r_squared == doctest::Approx(13.0 / 14.0).epsilon(1e-13));
    CHECK(fit.sigma2 == doctest::Approx(1.0 / 6.0).epsilon(1e-13));
    CHECK(fit.std_errors(0) == doctest::Approx(std::sqrt(5.0 / 36.0)).epsilon(1e-13));
    CHECK(fit.std_errors(1) == doctest::Approx(std::sqrt(1.0 / 12.0)).epsilon(1e-13));
    CHECK(fit.t_values(1) == doctest::Approx(std::sqrt(27.0)).epsilon(1e-13));
    CHECK(fit.p_values(1) == doctest::Approx(student_t_sf(fit.t_values(1), 1.0)).epsilon(1e-15));
    CHECK(fit.n_obs == 3);
    CHECK(fit.names == std::vector<std::string>{"constant", "x"});
    CHECK(fit.mean_x(0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(fit.mean_x(1) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(fit.residuals(0) == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
    CHECK(fit.residuals(1) == doctest::Approx(-1.0 / 3.0).epsilon(1e-12));
    CHECK(fit.vcov(0, 0) == doctest::Approx(5.0 / 36.0).epsilon(1e-12));
    CHECK(fit.vcov(1, 1) == doctest::Approx(1.0 / 12.0).epsilon(1e-12));
}

TEST_CASE("an exact linear relation is recovered exactly") {
    Eigen::MatrixXd X(4, 2);
    X << 1, 1, 1, 2, 1, 3, 1, 4;
    Eigen::VectorXd y = 2.0 * X.col(0) + 3.0 * X.col(1);
    const auto fit = fit_wls(X, y, ones(4));
    CHECK(fit.coefficients(0) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(fit.coefficients(1) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fit.residuals.cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("rank deficiency names the dependent columns") {
    Eigen::MatrixXd X(5, 3);
    for (int i = 0; i < 5; ++i) {
        X(i, 0) = 1.0;
        X(i, 1) = i;
        X(i, 2) = 2.0 * i; // multiple of column 1
    }
    Eigen::VectorXd y(5);
    y << 1, 2, 3, 5, 8;
    try {
        fit_wls(X, y, ones(5), {"constant", "x", "x_twice"});
        FAIL("expected ComputeError");
    } catch (const ComputeError &e) {
        const std::string msg = e.what();
        CHECK(msg.find("rank deficient") != std::string::npos);
        CHECK(msg.find("dependent column(s):") != std::string::npos);
    }
}

TEST_CASE("underidentified systems are rejected") {
    Eigen::MatrixXd X(2, 2);
    X << 1, 0, 1, 1;
    Eigen::VectorXd y(2);
    y << 1, 2;
    CHECK_THROWS_AS(fit_wls(X, y, ones(2)), ComputeError);
}

TEST_CASE("weights must be strictly positive for the fit") {
    Eigen::MatrixXd X(3, 1);
    X << 1, 1, 1;
    Eigen::VectorXd y(3);
    y << 1, 2, 3;
    Eigen::VectorXd w(3);
    w << 1, 0, 1;
    CHECK_THROWS_AS(fit_wls(X, y, w), ComputeError);
}

TEST_CASE("integer weights replicate observations") {
    Eigen::MatrixXd X(3, 2);
    X << 1, 0, 1, 1, 1, 3;
    Eigen::VectorXd y(3);
    y << 1.0, 2.5, 4.0;
    Eigen::VectorXd w(3);
    w << 1, 2, 3;
    const auto weighted = fit_wls(X, y, w);

    Eigen::MatrixXd Xr(6, 2);
    Eigen::VectorXd yr(6);
    int r = 0;
    for (int i = 0; i < 3; ++i)
        for (int k = 0; k < w(i); ++k, ++r) {
            Xr.row(r) = X.row(i);
            yr(r) = y(i);
        }
    const auto replicated = fit_wls(Xr, yr, ones(6));
    CHECK(weighted.coefficients(0) ==
          doctest::Approx(replicated.coefficients(0)).epsilon(1e-12));
    CHECK(weighted.coefficients(1) ==
          doctest::Approx(replicated.coefficients(1)).epsilon(1e-12));
}

TEST_CASE("weighted residuals are orthogonal to the design") {
    std::mt19937_64 eng(31);
    for (int rep = 0; rep < 20; ++rep) {
        const int n = 12 + static_cast<int>(wdtest::u01(eng) * 50);
        const int p = 2 + static_cast<int>(wdtest::u01(eng) * 3);
        Eigen::MatrixXd X(n, p);
        Eigen::VectorXd y(n), w(n);
        for (int i = 0; i < n; ++i) {
            X(i, 0) = 1.0;
            for (int j = 1; j < p; ++j)
                X(i, j) = wdtest::normal01(eng);
            y(i) = wdtest::normal01(eng);
            w(i) = 0.25 + wdtest::u01(eng);
        }
        const auto fit = fit_wls(X, y, w);
        const Eigen::VectorXd g = X.transpose() * (w.asDiagonal() * fit.residuals);
        for (int j = 0; j < p; ++j) {
            const double scale =
                std::max(1.0, X.col(j).norm() * fit.residuals.norm());
            CHECK(std::fabs(g(j)) <= 1e-8 * scale);
        }

        // weighted mean of y equals the weighted column means through beta
        const double wy = (w.array() * y.array()).sum() / w.sum();
        const double xb = fit.mean_x.dot(fit.coefficients);
        CHECK(std::fabs(wy - xb) <= 1e-12 * std::max(1.0, std::fabs(wy)));
    }
}

TEST_CASE("shifting the response moves only the intercept") {
    std::mt19937_64 eng(77);
    const int n = 40;
    Eigen::MatrixXd X(n, 3);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) {
        X(i, 0) = 1.0;
        X(i, 1) = wdtest::normal01(eng);
        X(i, 2) = wdtest::u01(eng) * 10.0;
        y(i) = 0.5 + 0.3 * X(i, 1) - 0.2 * X(i, 2) + 0.1 * wdtest::normal01(eng);
    }
    const auto base = fit_wls(X, y, ones(n));
    const double c = 4.25;
    const auto shifted = fit_wls(X, y.array() + c, ones(n));
    CHECK(shifted.coefficients(0) == doctest::Approx(base.coefficients(0) + c).epsilon(1e-10));
    CHECK(shifted.coefficients(1) == doctest::Approx(base.coefficients(1)).epsilon(1e-10));
    CHECK(shifted.coefficients(2) == doctest::Approx(base.coefficients(2)).epsilon(1e-10));

    // scaling a regressor scales its coefficient inversely, fits unchanged
    Eigen::MatrixXd Xs = X;
    const double s = 100.0;
    Xs.col(2) *= s;
    const auto scaled = fit_wls(Xs, y, ones(n));
    CHECK(scaled.coefficients(2) == doctest::Approx(base.coefficients(2) / s).epsilon(1e-10));
    CHECK(scaled.coefficients(1) == doctest::Approx(base.coefficients(1)).epsilon(1e-10));
    CHECK((scaled.residuals - base.residuals).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("student t tail probabilities") {
    CHECK(student_t_sf(0.0, 5.0) == 1.0);
    CHECK(student_t_sf(1.0, 1.0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(student_t_sf(2.0, 10.0) == doctest::Approx(0.073388034770740365).epsilon(1e-12));
    CHECK(student_t_sf(1.96, 30.0) == doctest::Approx(0.059342312896050471).epsilon(1e-12));
    CHECK(std::fabs(student_t_sf(1.96, 1e6) - 0.049996067585269789) <= 1e-9);
    CHECK(std::fabs(student_t_sf(1.96, 1e6) - 0.05) <= 1e-3);
    CHECK(student_t_sf(-2.0, 10.0) == student_t_sf(2.0, 10.0));
    CHECK(student_t_sf(3.0, 10.0) < student_t_sf(2.0, 10.0));
    CHECK_THROWS_AS(student_t_sf(1.0, 0.0), ComputeError);
    CHECK_THROWS_AS(student_t_sf(1.0, -2.0), ComputeError);
}

TEST_CASE("tail probabilities agree with direct quadrature") {
    for (double df : {1.0, 2.0, 5.0, 30.0, 120.0})
        for (double t : {0.5, 1.0, 2.0, 3.0, 5.0, 7.5, 10.0})
            CHECK(std::fabs(student_t_sf(t, df) - t_sf_by_quadrature(t, df)) <= 1e-8);
}

TEST_CASE("design-matrix overload matches the raw interface") {
    MicrodataTable t;
    t.add_numeric_column({"log_daily_wage", ColumnRole::derived, {}, ""}, {1.0, 2.0, 4.0, 4.5});
    t.add_numeric_column({"age", ColumnRole::age, {}, ""}, {0.0, 1.0, 2.0, 3.0});
    const auto d = encode_design(t, {"log_daily_wage", {"age"}, true});
    const auto via_design = fit_wls(d);
    const auto direct = fit_wls(d.X, d.y, d.w, d.names);
    CHECK(via_design.coefficients == direct.coefficients);
    CHECK(via_design.names == direct.names);
}

TEST_CASE("per-group earnings fit") {
    MicrodataTable t;
    t.add_text_column({"caste", ColumnRole::group_label, {}, ""},
                      {"A", "A", "A", "B", "B", "B"});
    t.add_numeric_column({"age", ColumnRole::age, {}, ""},
                         {20.0, 30.0, 40.0, 20.0, 30.0, 40.0});
    std::vector<double> lw(6);
    for (int i = 0; i < 3; ++i)
        lw[i] = 1.0 + 0.05 * t.numeric("age")[i];
    for (int i = 3; i < 6; ++i)
        lw[i] = 1.4 + 0.02 * t.numeric("age")[i];
    t.add_numeric_column({"log_daily_wage", ColumnRole::derived, {}, ""}, lw);

    const auto grouping = Grouping::custom("caste", {{"A", "A"}, {"B", "B"}});
    const DesignSpec spec{"log_daily_wage", {"age"}, true};
    const auto fit_a = mincer_fit(t, spec, grouping, "A");
    CHECK(fit_a.coefficients(0) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(fit_a.coefficients(1) == doctest::Approx(0.05).epsilon(1e-10));
    const auto fit_b = mincer_fit(t, spec, grouping, "B");
    CHECK(fit_b.coefficients(1) == doctest::Approx(0.02).epsilon(1e-10));

    const auto with_empty = Grouping::custom("caste", {{"A", "A"}, {"B", "B"}, {"C", "C"}});
    CHECK_THROWS_WITH_AS(mincer_fit(t, spec, with_empty, "C"),
                         "group 'C' has no observations", ComputeError);
}
