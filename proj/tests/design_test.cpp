#include <doctest.h>

#include <cstring>
#include <vector>

#include <wagedecomp/design.hpp>

using namespace wagedecomp;

namespace {

MicrodataTable sample_table() {
    MicrodataTable t;
    t.add_numeric_column({"log_daily_wage", ColumnRole::derived, {}, ""},
                         {4.6, 4.8, 5.1, 4.9});
    t.add_numeric_column({"age", ColumnRole::age, {}, ""}, {25.0, 32.0, 41.0, 28.0});
    t.add_numeric_column({"male", ColumnRole::binary, {}, ""}, {1.0, 0.0, 1.0, 1.0});
    t.add_text_column({"edu",
                       ColumnRole::categorical,
                       {{"p", "primary"}, {"s", "secondary"}, {"g", "graduate"}},
                       "primary"},
                      {"p", "s", "g", "s"});
    t.add_text_column({"caste", ColumnRole::group_label, {}, ""}, {"ST", "SC", "Others", "ST"});
    return t;
}

} // namespace

TEST_CASE("numeric predictors pass through with an intercept first") {
    const auto t = sample_table();
    const auto d = encode_design(t, {"log_daily_wage", {"age", "male"}, true});
    REQUIRE(d.names == std::vector<std::string>{"constant", "age", "male"});
    CHECK(d.n() == 4);
    CHECK(d.p() == 3);
    CHECK(d.X(0, 0) == 1.0);
    CHECK(d.X(3, 0) == 1.0);
    CHECK(d.X(2, 1) == 41.0);
    CHECK(d.X(1, 2) == 0.0);
    CHECK(d.y(2) == 5.1);
    CHECK(d.w(0) == 1.0);
    CHECK(d.warnings.empty());

    const auto no_const = encode_design(t, {"log_daily_wage", {"age"}, false});
    CHECK(no_const.names == std::vector<std::string>{"age"});
}

TEST_CASE("age_squared derives from the age-role column") {
    const auto d = encode_design(sample_table(), {"log_daily_wage", {"age", "age_squared"}, true});
    REQUIRE(d.names == std::vector<std::string>{"constant", "age", "age_squared"});
    CHECK(d.X(0, 2) == 625.0);
    CHECK(d.X(2, 2) == 1681.0);

    MicrodataTable no_age;
    no_age.add_numeric_column({"log_daily_wage", ColumnRole::derived, {}, ""}, {1.0});
    no_age.add_numeric_column({"x", ColumnRole::derived, {}, ""}, {2.0});
    CHECK_THROWS_AS(encode_design(no_age, {"log_daily_wage", {"age_squared"}, true}),
                    ValidationError);
}

TEST_CASE("categorical columns expand to non-base dummies in declared order") {
    const auto d = encode_design(sample_table(), {"log_daily_wage", {"edu"}, true});
    REQUIRE(d.names == std::vector<std::string>{"constant", "secondary", "graduate"});
    // rows: primary, secondary, graduate, secondary
    CHECK(d.X(0, 1) == 0.0);
    CHECK(d.X(0, 2) == 0.0);
    CHECK(d.X(1, 1) == 1.0);
    CHECK(d.X(1, 2) == 0.0);
    CHECK(d.X(2, 1) == 0.0);
    CHECK(d.X(2, 2) == 1.0);
    CHECK(d.X(3, 1) == 1.0);

    // at most one dummy fires per row; none on the base level
    for (Eigen::Index i = 0; i < d.n(); ++i) {
        const double row_sum = d.X(i, 1) + d.X(i, 2);
        CHECK(row_sum <= 1.0);
    }
    CHECK(d.X(0, 1) + d.X(0, 2) == 0.0);
}

TEST_CASE("unseen categorical codes are rejected at encoding time") {
    MicrodataTable t;
    t.add_numeric_column({"log_daily_wage", ColumnRole::derived, {}, ""}, {1.0});
    t.add_text_column({"edu", ColumnRole::categorical, {{"p", "primary"}, {"s", "secondary"}},
                       "primary"},
                      {"z"});
    CHECK_THROWS_AS(encode_design(t, {"log_daily_wage", {"edu"}, true}), ValidationError);
}

TEST_CASE("design errors") {
    const auto t = sample_table();
    CHECK_THROWS_AS(encode_design(t, {"nope", {"age"}, true}), ValidationError);
    CHECK_THROWS_AS(encode_design(t, {"log_daily_wage", {}, true}), ValidationError);
    CHECK_THROWS_AS(encode_design(t, {"log_daily_wage", {"nope"}, true}), ValidationError);
    CHECK_THROWS_AS(encode_design(t, {"log_daily_wage", {"caste"}, true}), ValidationError);

    MicrodataTable empty;
    CHECK_THROWS_AS(encode_design(empty, {"log_daily_wage", {"age"}, true}), ComputeError);

    MicrodataTable with_nan;
    with_nan.add_numeric_column({"log_daily_wage", ColumnRole::derived, {}, ""},
                                {1.0, std::nan("")});
    with_nan.add_numeric_column({"age", ColumnRole::age, {}, ""}, {30.0, 31.0});
    CHECK_THROWS_AS(encode_design(with_nan, {"log_daily_wage", {"age"}, true}), ComputeError);
}

TEST_CASE("constant predictors only warn") {
    MicrodataTable t;
    t.add_numeric_column({"log_daily_wage", ColumnRole::derived, {}, ""}, {1.0, 2.0});
    t.add_numeric_column({"k", ColumnRole::derived, {}, ""}, {5.0, 5.0});
    const auto d = encode_design(t, {"log_daily_wage", {"k"}, true});
    REQUIRE(d.warnings.size() == 1);
    CHECK(d.warnings[0].find("'k'") != std::string::npos);
}

TEST_CASE("encoding is bitwise deterministic") {
    const auto t = sample_table();
    const DesignSpec spec{"log_daily_wage", {"age", "age_squared", "male", "edu"}, true};
    const auto a = encode_design(t, spec);
    const auto b = encode_design(t, spec);
    REQUIRE(a.X.size() == b.X.size());
    CHECK(std::memcmp(a.X.data(), b.X.data(), sizeof(double) * a.X.size()) == 0);
    CHECK(std::memcmp(a.y.data(), b.y.data(), sizeof(double) * a.y.size()) == 0);
    CHECK(a.names == b.names);
}

TEST_CASE("weights flow from the weight column") {
    MicrodataTable t;
    t.add_numeric_column({"log_daily_wage", ColumnRole::derived, {}, ""}, {1.0, 2.0});
    t.add_numeric_column({"age", ColumnRole::age, {}, ""}, {30.0, 31.0});
    t.add_numeric_column({"wt", ColumnRole::weight, {}, ""}, {2.0, 3.5});
    CHECK(encode_design(t, {"log_daily_wage", {"age"}, true}, true).w(1) == 3.5);
    CHECK(encode_design(t, {"log_daily_wage", {"age"}, true}, false).w(1) == 1.0);
}
