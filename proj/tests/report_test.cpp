#include <doctest.h>

#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>
#include <wagedecomp/report.hpp>

using namespace wagedecomp;

namespace {

std::vector<std::string> lines_of(const std::string &text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line))
        lines.push_back(line);
    return lines;
}

IncomeVector two_values() { return IncomeVector::unit_weights({1.0, 3.0}); }

MicrodataTable profile_table() {
    MicrodataTable t;
    t.add_text_column({"g", ColumnRole::group_label, {}, ""}, {"A", "A", "B", "B"});
    t.add_numeric_column({"daily_wage", ColumnRole::derived, {}, ""}, {2.0, 2.0, 4.0, 4.0});
    return t;
}

DataDecomposition exact_decomposition(double slope_b) {
    MicrodataTable t;
    t.add_text_column({"g", ColumnRole::group_label, {}, ""}, {"A", "A", "A", "B", "B", "B"});
    t.add_numeric_column({"x", ColumnRole::derived, {}, ""}, {1.0, 2.0, 3.0, 1.0, 2.0, 3.0});
    std::vector<double> lw(6);
    for (int i = 0; i < 3; ++i)
        lw[i] = 1.0 + 0.5 * t.numeric("x")[i];
    for (int i = 3; i < 6; ++i)
        lw[i] = 1.0 + slope_b * t.numeric("x")[i];
    t.add_numeric_column({"log_daily_wage", ColumnRole::derived, {}, ""}, lw);
    DecomposeOptions opt;
    opt.high_group = "A";
    return decompose_from_data(t, {"log_daily_wage", {"x"}, true},
                               Grouping::custom("g", {{"A", "A"}, {"B", "B"}}), opt);
}

} // namespace

TEST_CASE("output format names") {
    CHECK(parse_output_format("text") == OutputFormat::text);
    CHECK(parse_output_format("csv") == OutputFormat::csv);
    CHECK(parse_output_format("json") == OutputFormat::json);
    CHECK_THROWS_AS(parse_output_format("yaml"), ValidationError);
}

TEST_CASE("index battery order and values") {
    const auto report = compute_index_report(two_values(), "daily_wage", 3);
    CHECK(report.n_obs == 2);
    CHECK(report.total_weight == 2.0);
    CHECK(report.dropped_nonpositive == 3);
    REQUIRE(report.indices.size() == 10);
    CHECK(report.indices[0].first == "GE(-1)");
    CHECK(report.indices[2].first == "GE(1)");
    CHECK(report.indices[7].first == "Gini");
    CHECK(report.indices[9].first == "p75/p25");
    CHECK(report.indices[2].second == doctest::Approx(0.13081203594113697).epsilon(1e-14));
    CHECK(report.indices[7].second == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("index report rendering") {
    const auto report = compute_index_report(two_values(), "daily_wage");

    const std::string text = render_index_report(report, OutputFormat::text);
    CHECK(text.find("Inequality indices for daily_wage") != std::string::npos);
    CHECK(text.find("0.1308") != std::string::npos);
    CHECK(text.find("Gini") != std::string::npos);
    CHECK(text.find("0.2500") != std::string::npos);

    const std::string csv = render_index_report(report, OutputFormat::csv);
    const auto lines = lines_of(csv);
    REQUIRE(lines.size() == 14); // header + 3 meta rows + 10 indices
    CHECK(lines[0] == "measure,value");
    CHECK(lines[1] == "n_obs,2");
    // full-precision CSV values parse back to the exact doubles
    bool checked = false;
    for (const auto &line : lines)
        if (line.rfind("GE(0),", 0) == 0) {
            const double parsed = std::strtod(line.c_str() + 6, nullptr);
            CHECK(parsed == report.indices[1].second);
            checked = true;
        }
    CHECK(checked);

    const auto j = nlohmann::ordered_json::parse(render_index_report(report, OutputFormat::json));
    CHECK(j["column"] == "daily_wage");
    CHECK(j["n_obs"] == 2);
    CHECK(j["indices"]["GE(1)"].get<double>() == report.indices[2].second);
    CHECK(j["indices"]["p90/p10"].get<double>() == 3.0);
}

TEST_CASE("profile rendering") {
    const auto profile =
        inequality_profile(profile_table(), Grouping::custom("g", {{"A", "A"}, {"B", "B"}}),
                           "daily_wage");
    CHECK(profile.decomposition.between_T_b ==
          doctest::Approx(0.056633012265132426).epsilon(1e-14));

    const std::string text = render_profile(profile, OutputFormat::text);
    CHECK(text.find("between-group Theil (T_b): 0.0566") != std::string::npos);
    CHECK(text.find("share: 100.00%") != std::string::npos);
    CHECK(text.find("Total") != std::string::npos);

    const auto csv_lines = lines_of(render_profile(profile, OutputFormat::csv));
    REQUIRE(csv_lines.size() == 4); // header, A, B, Total
    CHECK(csv_lines[0] ==
          "group,n,employment_share_pct,mean_wage,gini,theil,income_share,between_T_b,within_T_w,"
          "between_share_pct,within_share_pct");
    CHECK(csv_lines[1].rfind("A,2,", 0) == 0);
    CHECK(csv_lines[3].rfind("Total,4,", 0) == 0);

    const auto j = nlohmann::ordered_json::parse(render_profile(profile, OutputFormat::json));
    CHECK(j["outcome"] == "daily_wage");
    REQUIRE(j["groups"].size() == 2);
    CHECK(j["groups"][0]["group"] == "A");
    CHECK(j["groups"][0]["mean_wage"].get<double>() == 2.0);
    CHECK(j["decomposition"]["between_T_b"].get<double>() ==
          profile.decomposition.between_T_b);
    CHECK(j["decomposition"]["shares"]["between"].get<double>() ==
          profile.decomposition.between_share_pct);
}

TEST_CASE("fit rendering marks significance levels") {
    FitResult fit;
    fit.names = {"constant", "strong", "medium", "weak"};
    fit.coefficients = Eigen::Vector4d(1.0, 0.5, 0.25, 0.02);
    fit.std_errors = Eigen::Vector4d(0.1, 0.1, 0.1, 0.1);
    fit.t_values = Eigen::Vector4d(10.0, 5.0, 2.5, 0.2);
    fit.p_values = Eigen::Vector4d(0.005, 0.03, 0.07, 0.5);
    fit.residuals = Eigen::VectorXd::Zero(4);
    fit.mean_x = Eigen::Vector4d(1.0, 0.0, 0.0, 0.0);
    fit.vcov = Eigen::Matrix4d::Identity();
    fit.r_squared = 0.9;
    fit.adj_r_squared = 0.85;
    fit.sigma2 = 0.01;
    fit.n_obs = 40;

    const std::string text = render_fits({{"NFC", fit}}, OutputFormat::text);
    CHECK(text.find("Earnings function fit: NFC") != std::string::npos);
    for (const auto &line : lines_of(text)) {
        if (line.find("constant") != std::string::npos && line.find("term") == std::string::npos)
            CHECK(line.find("0.0050 ***") != std::string::npos);
        if (line.find("strong") != std::string::npos)
            CHECK(line.find("0.0300 **") != std::string::npos);
        if (line.find("medium") != std::string::npos)
            CHECK(line.find("0.0700 *") != std::string::npos);
        if (line.find("weak") != std::string::npos) {
            CHECK(line.find('*') == std::string::npos);
            CHECK(line.back() == '0'); // no trailing whitespace after the p value
        }
    }

    const auto csv_lines = lines_of(render_fits({{"NFC", fit}, {"FC", fit}}, OutputFormat::csv));
    REQUIRE(csv_lines.size() == 9); // header + 2 groups x 4 terms
    CHECK(csv_lines[0] ==
          "group,term,estimate,std_error,t_value,p_value,n,r_squared,adj_r_squared,sigma2");
    CHECK(csv_lines[1].rfind("NFC,constant,1,", 0) == 0);
    CHECK(csv_lines[5].rfind("FC,constant,", 0) == 0);

    const auto j = nlohmann::ordered_json::parse(render_fits({{"NFC", fit}}, OutputFormat::json));
    REQUIRE(j["fits"].size() == 1);
    CHECK(j["fits"][0]["group"] == "NFC");
    CHECK(j["fits"][0]["n"] == 40);
    CHECK(j["fits"][0]["coefficients"][1]["term"] == "strong");
    CHECK(j["fits"][0]["coefficients"][1]["estimate"].get<double>() == 0.5);
}

TEST_CASE("decomposition rendering with a real gap") {
    const auto result = exact_decomposition(0.4);
    const std::string text = render_decomposition(result, OutputFormat::text);
    CHECK(text.find("Wage-gap decomposition: A (high) vs B (low), reference: low") !=
          std::string::npos);
    CHECK(text.find("Threefold split") != std::string::npos);
    CHECK(text.find("undefined") == std::string::npos);
    CHECK(text.find("Subtotal") != std::string::npos);
    CHECK(text.find("% of R") != std::string::npos);

    const auto csv_lines = lines_of(render_decomposition(result, OutputFormat::csv));
    CHECK(csv_lines[0] == "term,endowment,coefficient,interaction,total,endowment_pct,"
                          "coefficient_pct,interaction_pct,total_pct");
    bool has_gap_row = false, has_blinder = false;
    for (const auto &line : csv_lines) {
        if (line.rfind("gap,", 0) == 0)
            has_gap_row = true;
        if (line.rfind("blinder_raw_differential,", 0) == 0)
            has_blinder = true;
    }
    CHECK(has_gap_row);
    CHECK(has_blinder);

    const auto j =
        nlohmann::ordered_json::parse(render_decomposition(result, OutputFormat::json));
    CHECK(j["high_group"] == "A");
    CHECK(j["reference"] == "low");
    CHECK(j["threefold"]["gap"].get<double>() == result.threefold.gap);
    CHECK_FALSE(j["threefold"]["shares_pct"].is_null());
    CHECK(j["threefold"]["per_variable"].size() == 2);
    CHECK(j["blinder"]["raw_differential"].get<double>() ==
          result.blinder.raw_differential());
    CHECK(j["fits"]["high"]["n"] == 3);
}

TEST_CASE("zero gaps render as undefined shares") {
    const auto result = exact_decomposition(0.5); // identical groups
    REQUIRE(result.threefold.gap == 0.0);

    const std::string text = render_decomposition(result, OutputFormat::text);
    CHECK(text.find("undefined") != std::string::npos);

    const auto j =
        nlohmann::ordered_json::parse(render_decomposition(result, OutputFormat::json));
    CHECK(j["threefold"]["shares_pct"].is_null());
    CHECK(j["blinder"]["endowments_pct_of_raw"].is_null());

    const std::string csv = render_decomposition(result, OutputFormat::csv);
    bool pct_row_empty = false;
    for (const auto &line : lines_of(csv))
        if (line.rfind("blinder_endowments_pct_of_raw,", 0) == 0)
            pct_row_empty = line.back() == ',';
    CHECK(pct_row_empty);
}
