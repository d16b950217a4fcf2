#include "wagedecomp/report.hpp"

#include <algorithm>
#include <cstddef>

#include <fmt/core.h>
#include <json.hpp>

namespace wagedecomp {

namespace {

using ordered_json = nlohmann::ordered_json;

// Text tables round for display; CSV keeps every value at %.17g and JSON
// carries native doubles, so both machine formats round-trip exactly.
std::string full(double v) { return fmt::format("{:.17g}", v); }
std::string f1(double v) { return fmt::format("{:.1f}", v); }
std::string f2(double v) { return fmt::format("{:.2f}", v); }
std::string f4(double v) { return fmt::format("{:.4f}", v); }
std::string f6(double v) { return fmt::format("{:.6f}", v); }

const char *stars(double p) {
    if (p < 0.01)
        return "***";
    if (p < 0.05)
        return "**";
    if (p < 0.10)
        return "*";
    return "";
}

std::size_t max_width(const std::vector<std::string> &names, std::size_t floor_width) {
    std::size_t w = floor_width;
    for (const auto &n : names)
        w = std::max(w, n.size());
    return w;
}

ordered_json fit_to_json(const FitResult &fit) {
    ordered_json j;
    j["n"] = fit.n_obs;
    j["r_squared"] = fit.r_squared;
    j["adj_r_squared"] = fit.adj_r_squared;
    j["sigma2"] = fit.sigma2;
    ordered_json coeffs = ordered_json::array();
    for (std::size_t i = 0; i < fit.names.size(); ++i) {
        const auto k = static_cast<Eigen::Index>(i);
        ordered_json c;
        c["term"] = fit.names[i];
        c["estimate"] = fit.coefficients(k);
        c["std_error"] = fit.std_errors(k);
        c["t_value"] = fit.t_values(k);
        c["p_value"] = fit.p_values(k);
        coeffs.push_back(std::move(c));
    }
    j["coefficients"] = std::move(coeffs);
    return j;
}

std::string fit_text(const std::string &label, const FitResult &fit) {
    std::string out = fmt::format("Earnings function fit: {}\n", label);
    out += fmt::format("  n = {}, R^2 = {}, adj R^2 = {}, sigma^2 = {}\n\n", fit.n_obs,
                       f4(fit.r_squared), f4(fit.adj_r_squared), f4(fit.sigma2));
    const std::size_t w = max_width(fit.names, 4);
    out += fmt::format("  {:<{}}  {:>12}  {:>12}  {:>9}  {:>8}\n", "term", w, "estimate",
                       "std error", "t value", "p value");
    for (std::size_t i = 0; i < fit.names.size(); ++i) {
        const auto k = static_cast<Eigen::Index>(i);
        const char *s = stars(fit.p_values(k));
        out += fmt::format("  {:<{}}  {:>12}  {:>12}  {:>9}  {:>8}{}{}\n", fit.names[i], w,
                           f6(fit.coefficients(k)), f6(fit.std_errors(k)), f2(fit.t_values(k)),
                           f4(fit.p_values(k)), *s ? " " : "", s);
    }
    out += "  significance: *** p<0.01, ** p<0.05, * p<0.10\n";
    return out;
}

std::string opt_full(const std::optional<double> &v) { return v ? full(*v) : ""; }
std::string opt_f2(const std::optional<double> &v) { return v ? f2(*v) : "undefined"; }

} // namespace

OutputFormat parse_output_format(std::string_view text) {
    if (text == "text")
        return OutputFormat::text;
    if (text == "csv")
        return OutputFormat::csv;
    if (text == "json")
        return OutputFormat::json;
    throw ValidationError(
        fmt::format("unknown output format '{}', expected text, csv, or json", text));
}

IndexReport compute_index_report(const IncomeVector &v, std::string column,
                                 std::size_t dropped_nonpositive) {
    IndexReport report;
    report.column = std::move(column);
    report.n_obs = v.size();
    report.total_weight = v.total_weight();
    report.dropped_nonpositive = dropped_nonpositive;
    report.indices = {
        {"GE(-1)", ge_index(v, -1.0)},
        {"GE(0)", ge_index(v, 0.0)},
        {"GE(1)", ge_index(v, 1.0)},
        {"GE(2)", ge_index(v, 2.0)},
        {"A(0.5)", atkinson(v, 0.5)},
        {"A(1)", atkinson(v, 1.0)},
        {"A(2)", atkinson(v, 2.0)},
        {"Gini", gini(v)},
        {"p90/p10", percentile_ratio(v, 90.0, 10.0)},
        {"p75/p25", percentile_ratio(v, 75.0, 25.0)},
    };
    return report;
}

std::string render_index_report(const IndexReport &report, OutputFormat format) {
    switch (format) {
    case OutputFormat::text: {
        std::string out = fmt::format("Inequality indices for {}\n", report.column);
        out += fmt::format("  observations: {}\n", report.n_obs);
        out += fmt::format("  total weight: {}\n", full(report.total_weight));
        out += fmt::format("  dropped non-positive values: {}\n\n", report.dropped_nonpositive);
        for (const auto &[name, value] : report.indices)
            out += fmt::format("  {:<8} {:>10}\n", name, f4(value));
        return out;
    }
    case OutputFormat::csv: {
        std::string out = "measure,value\n";
        out += fmt::format("n_obs,{}\n", report.n_obs);
        out += fmt::format("total_weight,{}\n", full(report.total_weight));
        out += fmt::format("dropped_nonpositive,{}\n", report.dropped_nonpositive);
        for (const auto &[name, value] : report.indices)
            out += fmt::format("{},{}\n", name, full(value));
        return out;
    }
    case OutputFormat::json: {
        ordered_json j;
        j["column"] = report.column;
        j["n_obs"] = report.n_obs;
        j["total_weight"] = report.total_weight;
        j["dropped_nonpositive"] = report.dropped_nonpositive;
        ordered_json indices;
        for (const auto &[name, value] : report.indices)
            indices[name] = value;
        j["indices"] = std::move(indices);
        return j.dump(2) + "\n";
    }
    }
    throw ValidationError("unknown output format");
}

std::string render_profile(const InequalityProfile &profile, OutputFormat format) {
    const DecompositionReport &d = profile.decomposition;
    switch (format) {
    case OutputFormat::text: {
        std::string out =
            fmt::format("Theil decomposition of {} by group\n\n", profile.outcome_column);
        std::vector<std::string> names;
        for (const auto &row : profile.rows)
            names.push_back(row.group);
        const std::size_t w = max_width(names, 5);
        out += fmt::format("  {:<{}}  {:>8}  {:>13}  {:>12}  {:>8}  {:>8}  {:>12}\n", "group", w,
                           "n", "emp share %", "mean wage", "Gini", "Theil", "income share");
        for (std::size_t k = 0; k < profile.rows.size(); ++k) {
            const auto &row = profile.rows[k];
            out += fmt::format("  {:<{}}  {:>8}  {:>13}  {:>12}  {:>8}  {:>8}  {:>12}\n", row.group,
                               w, row.n, f2(row.employment_share), f4(row.mean_wage), f4(row.gini),
                               f4(row.theil), f4(d.per_group[k].income_share));
        }
        std::size_t total_n = 0;
        for (const auto &row : profile.rows)
            total_n += row.n;
        out += fmt::format("  {:<{}}  {:>8}  {:>13}  {:>12}  {:>8}  {:>8}  {:>12}\n", "Total", w,
                           total_n, f2(100.0), f4(profile.total_mean_wage),
                           f4(profile.total_gini), f4(d.total_T), f4(1.0));
        out += fmt::format("\n  between-group Theil (T_b): {}  share: {}%\n", f4(d.between_T_b),
                           f2(d.between_share_pct));
        out += fmt::format("  within-group Theil  (T_w): {}  share: {}%\n", f4(d.within_T_w),
                           f2(d.within_share_pct));
        return out;
    }
    case OutputFormat::csv: {
        std::string out = "group,n,employment_share_pct,mean_wage,gini,theil,income_share,"
                          "between_T_b,within_T_w,between_share_pct,within_share_pct\n";
        for (std::size_t k = 0; k < profile.rows.size(); ++k) {
            const auto &row = profile.rows[k];
            out += fmt::format("{},{},{},{},{},{},{},,,,\n", row.group, row.n,
                               full(row.employment_share), full(row.mean_wage), full(row.gini),
                               full(row.theil), full(d.per_group[k].income_share));
        }
        std::size_t total_n = 0;
        for (const auto &row : profile.rows)
            total_n += row.n;
        out += fmt::format("Total,{},{},{},{},{},{},{},{},{},{}\n", total_n, full(100.0),
                           full(profile.total_mean_wage), full(profile.total_gini), full(d.total_T),
                           full(1.0), full(d.between_T_b), full(d.within_T_w),
                           full(d.between_share_pct), full(d.within_share_pct));
        return out;
    }
    case OutputFormat::json: {
        ordered_json j;
        j["outcome"] = profile.outcome_column;
        ordered_json groups = ordered_json::array();
        for (std::size_t k = 0; k < profile.rows.size(); ++k) {
            const auto &row = profile.rows[k];
            ordered_json g;
            g["group"] = row.group;
            g["n"] = row.n;
            g["employment_share"] = row.employment_share;
            g["mean_wage"] = row.mean_wage;
            g["gini"] = row.gini;
            g["T_k"] = d.per_group[k].T_k;
            g["income_share"] = d.per_group[k].income_share;
            groups.push_back(std::move(g));
        }
        j["groups"] = std::move(groups);
        j["total"] = {{"mean_wage", profile.total_mean_wage},
                      {"gini", profile.total_gini},
                      {"theil", d.total_T}};
        j["decomposition"] = {{"total_T", d.total_T},
                              {"between_T_b", d.between_T_b},
                              {"within_T_w", d.within_T_w},
                              {"shares", {{"between", d.between_share_pct},
                                          {"within", d.within_share_pct}}}};
        return j.dump(2) + "\n";
    }
    }
    throw ValidationError("unknown output format");
}

std::string render_fits(const std::vector<std::pair<std::string, FitResult>> &fits,
                        OutputFormat format) {
    switch (format) {
    case OutputFormat::text: {
        std::string out;
        for (std::size_t i = 0; i < fits.size(); ++i) {
            if (i > 0)
                out += "\n";
            out += fit_text(fits[i].first, fits[i].second);
        }
        return out;
    }
    case OutputFormat::csv: {
        std::string out =
            "group,term,estimate,std_error,t_value,p_value,n,r_squared,adj_r_squared,sigma2\n";
        for (const auto &[label, fit] : fits)
            for (std::size_t i = 0; i < fit.names.size(); ++i) {
                const auto k = static_cast<Eigen::Index>(i);
                out += fmt::format("{},{},{},{},{},{},{},{},{},{}\n", label, fit.names[i],
                                   full(fit.coefficients(k)), full(fit.std_errors(k)),
                                   full(fit.t_values(k)), full(fit.p_values(k)), fit.n_obs,
                                   full(fit.r_squared), full(fit.adj_r_squared), full(fit.sigma2));
            }
        return out;
    }
    case OutputFormat::json: {
        ordered_json j;
        ordered_json arr = ordered_json::array();
        for (const auto &[label, fit] : fits) {
            ordered_json f;
            f["group"] = label;
            ordered_json body = fit_to_json(fit);
            for (auto &item : body.items())
                f[item.key()] = std::move(item.value());
            arr.push_back(std::move(f));
        }
        j["fits"] = std::move(arr);
        return j.dump(2) + "\n";
    }
    }
    throw ValidationError("unknown output format");
}

std::string render_decomposition(const DataDecomposition &result, OutputFormat format) {
    const ThreefoldResult &t = result.threefold;
    const BlinderResult &b = result.blinder;
    const DetailedTable detail = detailed_table(t);
    const bool has_gap = t.gap != 0.0;

    switch (format) {
    case OutputFormat::text: {
        std::string out = fmt::format("Wage-gap decomposition: {} (high) vs {} (low), reference: {}\n\n",
                                      t.high_label, t.low_label,
                                      t.reference == ReferenceGroup::low ? "low" : "high");
        out += "Threefold split\n";
        out += fmt::format("  gross wage differential (W): {}\n", f4(t.gap));
        const auto share = [&](double component) {
            return has_gap ? fmt::format("{}%", f2(100.0 * component / t.gap))
                           : std::string("undefined");
        };
        out += fmt::format("  endowment (E):    {:>10}   share: {}\n", f4(t.endowment),
                           share(t.endowment));
        out += fmt::format("  coefficient (C):  {:>10}   share: {}\n", f4(t.coefficient),
                           share(t.coefficient));
        out += fmt::format("  interaction (I):  {:>10}   share: {}\n", f4(t.interaction),
                           share(t.interaction));

        out += "\nEndowments / coefficients / shift summary (x100)\n";
        out += fmt::format("  endowments (E):            {:>8}\n", f1(100.0 * b.endowments));
        out += fmt::format("  coefficients (C):          {:>8}\n", f1(100.0 * b.coefficients));
        out += fmt::format("  shift coefficient (U):     {:>8}\n", f1(100.0 * b.shift));
        out += fmt::format("  raw differential (R):      {:>8}\n", f1(100.0 * b.raw_differential()));
        out += fmt::format("  adjusted differential (D): {:>8}\n",
                           f1(100.0 * b.adjusted_differential()));
        out += fmt::format("  endowments as % of R:      {:>8}\n",
                           opt_f2(b.endowments_pct_of_raw()));
        out += fmt::format("  discrimination as % of R:  {:>8}\n",
                           opt_f2(b.discrimination_pct_of_raw()));

        out += "\nPer-variable detail\n";
        std::vector<std::string> names;
        for (const auto &row : detail.rows)
            names.push_back(row.name);
        const std::size_t w = max_width(names, 8);
        const auto pct = [](const std::optional<double> &v) {
            return v ? f2(*v) : std::string("-");
        };
        out += fmt::format("  {:<{}}  {:>10}  {:>8}  {:>11}  {:>8}  {:>11}  {:>8}  {:>8}\n", "term",
                           w, "endowment", "%", "coefficient", "%", "interaction", "%", "total %");
        const auto detail_line = [&](const DetailedTable::Row &row) {
            return fmt::format("  {:<{}}  {:>10}  {:>8}  {:>11}  {:>8}  {:>11}  {:>8}  {:>8}\n",
                               row.name, w, f6(row.endowment), pct(row.endowment_pct),
                               f6(row.coefficient), pct(row.coefficient_pct), f6(row.interaction),
                               pct(row.interaction_pct), pct(row.total_pct));
        };
        for (const auto &row : detail.rows)
            out += detail_line(row);
        out += detail_line(detail.subtotal);
        return out;
    }
    case OutputFormat::csv: {
        std::string out = "term,endowment,coefficient,interaction,total,endowment_pct,"
                          "coefficient_pct,interaction_pct,total_pct\n";
        const auto detail_line = [&](const DetailedTable::Row &row) {
            return fmt::format("{},{},{},{},{},{},{},{},{}\n", row.name, full(row.endowment),
                               full(row.coefficient), full(row.interaction),
                               full(row.endowment + row.coefficient + row.interaction),
                               opt_full(row.endowment_pct), opt_full(row.coefficient_pct),
                               opt_full(row.interaction_pct), opt_full(row.total_pct));
        };
        for (const auto &row : detail.rows)
            out += detail_line(row);
        out += detail_line(detail.subtotal);
        out += fmt::format("gap,,,,{},,,,\n", full(t.gap));
        out += fmt::format("blinder_endowments,,,,{},,,,\n", full(b.endowments));
        out += fmt::format("blinder_coefficients,,,,{},,,,\n", full(b.coefficients));
        out += fmt::format("blinder_shift,,,,{},,,,\n", full(b.shift));
        out += fmt::format("blinder_raw_differential,,,,{},,,,\n", full(b.raw_differential()));
        out += fmt::format("blinder_adjusted_differential,,,,{},,,,\n",
                           full(b.adjusted_differential()));
        out += fmt::format("blinder_endowments_pct_of_raw,,,,,,,,{}\n",
                           opt_full(b.endowments_pct_of_raw()));
        out += fmt::format("blinder_discrimination_pct_of_raw,,,,,,,,{}\n",
                           opt_full(b.discrimination_pct_of_raw()));
        return out;
    }
    case OutputFormat::json: {
        ordered_json j;
        j["high_group"] = t.high_label;
        j["low_group"] = t.low_label;
        j["reference"] = t.reference == ReferenceGroup::low ? "low" : "high";

        ordered_json three;
        three["gap"] = t.gap;
        three["endowment"] = t.endowment;
        three["coefficient"] = t.coefficient;
        three["interaction"] = t.interaction;
        if (has_gap) {
            const PercentShares shares = percent_report(t);
            three["shares_pct"] = {{"endowment", shares.endowment_pct},
                                   {"coefficient", shares.coefficient_pct},
                                   {"interaction", shares.interaction_pct}};
        } else {
            three["shares_pct"] = nullptr;
        }
        ordered_json vars = ordered_json::array();
        for (const auto &row : t.per_variable) {
            ordered_json v;
            v["term"] = row.name;
            v["endowment"] = row.endowment;
            v["coefficient"] = row.coefficient;
            v["interaction"] = row.interaction;
            vars.push_back(std::move(v));
        }
        three["per_variable"] = std::move(vars);
        j["threefold"] = std::move(three);

        ordered_json blinder;
        blinder["endowments"] = b.endowments;
        blinder["coefficients"] = b.coefficients;
        blinder["shift"] = b.shift;
        blinder["raw_differential"] = b.raw_differential();
        blinder["adjusted_differential"] = b.adjusted_differential();
        if (auto v = b.endowments_pct_of_raw())
            blinder["endowments_pct_of_raw"] = *v;
        else
            blinder["endowments_pct_of_raw"] = nullptr;
        if (auto v = b.discrimination_pct_of_raw())
            blinder["discrimination_pct_of_raw"] = *v;
        else
            blinder["discrimination_pct_of_raw"] = nullptr;
        j["blinder"] = std::move(blinder);

        j["fits"] = {{"high", fit_to_json(result.fit_high)}, {"low", fit_to_json(result.fit_low)}};
        return j.dump(2) + "\n";
    }
    }
    throw ValidationError("unknown output format");
}

} // namespace wagedecomp
