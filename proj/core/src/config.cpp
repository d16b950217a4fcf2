#include "wagedecomp/config.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string_view>

#include <fmt/core.h>
#include <json.hpp>

namespace wagedecomp {

namespace {

using ordered_json = nlohmann::ordered_json;

struct Context {
    const std::string &source;

    [[noreturn]] void fail(std::string_view where, std::string_view what) const {
        throw ValidationError(fmt::format("{}: {}: {}", source, where, what));
    }

    void expect_object(const ordered_json &j, std::string_view where) const {
        if (!j.is_object())
            fail(where, "expected an object");
    }

    void expect_keys(const ordered_json &obj, std::string_view where,
                     std::initializer_list<std::string_view> allowed) const {
        for (const auto &item : obj.items()) {
            bool ok = false;
            for (std::string_view key : allowed)
                if (item.key() == key) {
                    ok = true;
                    break;
                }
            if (!ok)
                fail(where, fmt::format("unknown key '{}'", item.key()));
        }
    }

    std::string get_string(const ordered_json &obj, std::string_view where,
                           const char *key) const {
        if (!obj.contains(key))
            fail(where, fmt::format("missing required key '{}'", key));
        if (!obj[key].is_string())
            fail(where, fmt::format("key '{}' must be a string", key));
        return obj[key].get<std::string>();
    }

    double get_number(const ordered_json &obj, std::string_view where, const char *key) const {
        if (!obj.contains(key))
            fail(where, fmt::format("missing required key '{}'", key));
        if (!obj[key].is_number())
            fail(where, fmt::format("key '{}' must be a number", key));
        return obj[key].get<double>();
    }

    bool get_bool(const ordered_json &obj, std::string_view where, const char *key,
                  bool fallback) const {
        if (!obj.contains(key))
            return fallback;
        if (!obj[key].is_boolean())
            fail(where, fmt::format("key '{}' must be true or false", key));
        return obj[key].get<bool>();
    }
};

std::vector<std::pair<std::string, std::string>> parse_string_map(const Context &ctx,
                                                                  const ordered_json &obj,
                                                                  std::string_view where) {
    ctx.expect_object(obj, where);
    std::vector<std::pair<std::string, std::string>> map;
    for (const auto &item : obj.items()) {
        if (!item.value().is_string())
            ctx.fail(where, fmt::format("value for '{}' must be a string", item.key()));
        map.emplace_back(item.key(), item.value().get<std::string>());
    }
    return map;
}

std::vector<ColumnSchema> parse_schema(const Context &ctx, const ordered_json &j) {
    if (!j.is_array())
        ctx.fail("schema", "expected an array of column declarations");
    std::vector<ColumnSchema> schema;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string where = fmt::format("schema[{}]", i + 1);
        const ordered_json &col = j[i];
        ctx.expect_object(col, where);
        ctx.expect_keys(col, where, {"name", "role", "categories", "base"});

        ColumnSchema cs;
        cs.name = ctx.get_string(col, where, "name");
        const std::string role_text = ctx.get_string(col, where, "role");
        try {
            cs.role = parse_column_role(role_text);
        } catch (const ValidationError &e) {
            ctx.fail(where, e.what());
        }
        if (col.contains("categories"))
            cs.category_map = parse_string_map(ctx, col["categories"],
                                               fmt::format("{}.categories", where));
        if (col.contains("base")) {
            if (!col["base"].is_string())
                ctx.fail(where, "key 'base' must be a string");
            cs.base_level = col["base"].get<std::string>();
        }
        schema.push_back(std::move(cs));
    }
    return schema;
}

FilterSpec parse_filters(const Context &ctx, const ordered_json &j) {
    ctx.expect_object(j, "filters");
    ctx.expect_keys(j, "filters", {"age_min", "age_max", "require_positive_wage"});
    FilterSpec spec;
    if (j.contains("age_min"))
        spec.age_min = ctx.get_number(j, "filters", "age_min");
    if (j.contains("age_max"))
        spec.age_max = ctx.get_number(j, "filters", "age_max");
    if (!(spec.age_min <= spec.age_max))
        ctx.fail("filters", fmt::format("age_min {} exceeds age_max {}", spec.age_min, spec.age_max));
    spec.require_positive_wage = ctx.get_bool(j, "filters", "require_positive_wage", true);
    return spec;
}

DesignSpec parse_design(const Context &ctx, const ordered_json &j) {
    ctx.expect_object(j, "design");
    ctx.expect_keys(j, "design", {"response", "predictors", "include_intercept"});
    DesignSpec spec;
    if (j.contains("response"))
        spec.response = ctx.get_string(j, "design", "response");
    if (!j.contains("predictors") || !j["predictors"].is_array() || j["predictors"].empty())
        ctx.fail("design", "key 'predictors' must be a nonempty array of column names");
    for (const auto &p : j["predictors"]) {
        if (!p.is_string())
            ctx.fail("design", "predictors must be strings");
        spec.predictors.push_back(p.get<std::string>());
    }
    for (std::size_t a = 0; a < spec.predictors.size(); ++a)
        for (std::size_t b = a + 1; b < spec.predictors.size(); ++b)
            if (spec.predictors[a] == spec.predictors[b])
                ctx.fail("design", fmt::format("duplicate predictor '{}'", spec.predictors[a]));
    spec.include_intercept = ctx.get_bool(j, "design", "include_intercept", true);
    return spec;
}

Grouping parse_grouping(const Context &ctx, const ordered_json &j) {
    ctx.expect_object(j, "grouping");
    ctx.expect_keys(j, "grouping", {"column", "kind", "map"});
    const std::string column = ctx.get_string(j, "grouping", "column");
    const std::string kind = ctx.get_string(j, "grouping", "kind");
    if (kind == "fc_vs_nfc") {
        if (j.contains("map"))
            ctx.fail("grouping", "'map' is only valid with kind 'custom'");
        return Grouping::fc_vs_nfc(column);
    }
    if (kind == "four_caste") {
        if (j.contains("map"))
            ctx.fail("grouping", "'map' is only valid with kind 'custom'");
        return Grouping::four_caste(column);
    }
    if (kind == "custom") {
        if (!j.contains("map"))
            ctx.fail("grouping", "kind 'custom' requires a 'map' object");
        auto map = parse_string_map(ctx, j["map"], "grouping.map");
        if (map.empty())
            ctx.fail("grouping", "'map' must not be empty");
        return Grouping::custom(column, std::move(map));
    }
    ctx.fail("grouping",
             fmt::format("unknown kind '{}', expected fc_vs_nfc, four_caste, or custom", kind));
}

OaxacaOptions parse_oaxaca(const Context &ctx, const ordered_json &j) {
    ctx.expect_object(j, "oaxaca");
    ctx.expect_keys(j, "oaxaca", {"high_group", "reference"});
    OaxacaOptions opts;
    if (j.contains("high_group"))
        opts.high_group = ctx.get_string(j, "oaxaca", "high_group");
    if (j.contains("reference")) {
        const std::string ref = ctx.get_string(j, "oaxaca", "reference");
        if (ref == "low")
            opts.reference = ReferenceGroup::low;
        else if (ref == "high")
            opts.reference = ReferenceGroup::high;
        else
            ctx.fail("oaxaca", fmt::format("unknown reference '{}', expected low or high", ref));
    }
    return opts;
}

ColumnDist parse_dist(const Context &ctx, const ordered_json &col, std::string_view where) {
    int kinds = 0;
    for (const char *key : {"constant", "uniform", "bernoulli", "categorical"})
        if (col.contains(key))
            ++kinds;
    if (kinds != 1)
        ctx.fail(where, "declare exactly one of constant, uniform, bernoulli, categorical");

    const auto wrap = [&](auto make) -> ColumnDist {
        try {
            return make();
        } catch (const ValidationError &e) {
            ctx.fail(where, e.what());
        }
    };

    if (col.contains("constant")) {
        if (!col["constant"].is_number())
            ctx.fail(where, "'constant' must be a number");
        return wrap([&] { return ColumnDist::constant(col["constant"].get<double>()); });
    }
    if (col.contains("uniform")) {
        const auto &u = col["uniform"];
        if (!u.is_array() || u.size() != 2 || !u[0].is_number() || !u[1].is_number())
            ctx.fail(where, "'uniform' must be a two-number array [lo, hi]");
        return wrap([&] { return ColumnDist::uniform(u[0].get<double>(), u[1].get<double>()); });
    }
    if (col.contains("bernoulli")) {
        if (!col["bernoulli"].is_number())
            ctx.fail(where, "'bernoulli' must be a number");
        return wrap([&] { return ColumnDist::bernoulli(col["bernoulli"].get<double>()); });
    }
    const auto &c = col["categorical"];
    ctx.expect_object(c, fmt::format("{}.categorical", where));
    ctx.expect_keys(c, fmt::format("{}.categorical", where), {"levels", "probs"});
    if (!c.contains("levels") || !c["levels"].is_array() || !c.contains("probs") ||
        !c["probs"].is_array())
        ctx.fail(where, "'categorical' needs 'levels' and 'probs' arrays");
    std::vector<std::string> levels;
    std::vector<double> probs;
    for (const auto &l : c["levels"]) {
        if (!l.is_string())
            ctx.fail(where, "'levels' must be strings");
        levels.push_back(l.get<std::string>());
    }
    for (const auto &p : c["probs"]) {
        if (!p.is_number())
            ctx.fail(where, "'probs' must be numbers");
        probs.push_back(p.get<double>());
    }
    return wrap(
        [&] { return ColumnDist::categorical(std::move(levels), std::move(probs)); });
}

PopulationSpec parse_population(const Context &ctx, const ordered_json &j) {
    ctx.expect_object(j, "population");
    ctx.expect_keys(j, "population", {"seed", "group_column", "groups"});
    PopulationSpec spec;
    if (j.contains("seed")) {
        if (!j["seed"].is_number_integer() && !j["seed"].is_number_unsigned())
            ctx.fail("population", "'seed' must be an integer");
        spec.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("group_column"))
        spec.group_column = ctx.get_string(j, "population", "group_column");
    if (!j.contains("groups") || !j["groups"].is_array() || j["groups"].empty())
        ctx.fail("population", "'groups' must be a nonempty array");

    for (std::size_t g = 0; g < j["groups"].size(); ++g) {
        const std::string where = fmt::format("population.groups[{}]", g + 1);
        const ordered_json &gj = j["groups"][g];
        ctx.expect_object(gj, where);
        ctx.expect_keys(gj, where, {"label", "n", "noise_sd", "columns", "beta"});

        GroupPopulation group;
        group.label = ctx.get_string(gj, where, "label");
        const double n = ctx.get_number(gj, where, "n");
        if (!(n >= 1.0) || n != static_cast<double>(static_cast<std::size_t>(n)))
            ctx.fail(where, "'n' must be a positive integer");
        group.n = static_cast<std::size_t>(n);
        if (gj.contains("noise_sd"))
            group.noise_sd = ctx.get_number(gj, where, "noise_sd");

        if (gj.contains("columns")) {
            if (!gj["columns"].is_array())
                ctx.fail(where, "'columns' must be an array");
            for (std::size_t c = 0; c < gj["columns"].size(); ++c) {
                const std::string cw = fmt::format("{}.columns[{}]", where, c + 1);
                const ordered_json &cj = gj["columns"][c];
                ctx.expect_object(cj, cw);
                ctx.expect_keys(cj, cw,
                                {"name", "constant", "uniform", "bernoulli", "categorical"});
                group.columns.emplace_back(ctx.get_string(cj, cw, "name"),
                                           parse_dist(ctx, cj, cw));
            }
        }

        if (!gj.contains("beta") || !gj["beta"].is_array())
            ctx.fail(where, "'beta' must be an array of numbers");
        for (const auto &b : gj["beta"]) {
            if (!b.is_number())
                ctx.fail(where, "'beta' entries must be numbers");
            group.beta.push_back(b.get<double>());
        }
        spec.groups.push_back(std::move(group));
    }
    return spec;
}

} // namespace

AnalysisConfig parse_config_text(const std::string &json_text, const std::string &source_name) {
    Context ctx{source_name};
    ordered_json doc;
    try {
        doc = ordered_json::parse(json_text);
    } catch (const nlohmann::json::exception &e) {
        throw ValidationError(fmt::format("{}: not valid JSON: {}", source_name, e.what()));
    }
    ctx.expect_object(doc, "config");
    ctx.expect_keys(doc, "config",
                    {"input", "schema", "filters", "design", "grouping", "outcome", "use_weights",
                     "drop_zeros", "oaxaca", "population", "output"});

    AnalysisConfig config;
    config.source = source_name;
    if (doc.contains("input"))
        config.input_path = ctx.get_string(doc, "config", "input");
    if (doc.contains("schema")) {
        config.schema = parse_schema(ctx, doc["schema"]);
        try {
            validate_schema(config.schema);
        } catch (const ValidationError &e) {
            ctx.fail("schema", e.what());
        }
    }
    if (doc.contains("filters"))
        config.filters = parse_filters(ctx, doc["filters"]);
    if (doc.contains("design"))
        config.design = parse_design(ctx, doc["design"]);
    if (doc.contains("grouping"))
        config.grouping = parse_grouping(ctx, doc["grouping"]);
    if (doc.contains("outcome"))
        config.outcome_column = ctx.get_string(doc, "config", "outcome");
    config.use_weights = ctx.get_bool(doc, "config", "use_weights", true);
    config.drop_zeros = ctx.get_bool(doc, "config", "drop_zeros", false);
    if (doc.contains("oaxaca"))
        config.oaxaca = parse_oaxaca(ctx, doc["oaxaca"]);
    if (doc.contains("population"))
        config.population = parse_population(ctx, doc["population"]);
    if (doc.contains("output"))
        config.output_path = ctx.get_string(doc, "config", "output");
    return config;
}

AnalysisConfig load_config(const std::string &path) {
    std::ifstream input(path);
    if (!input)
        throw ValidationError(fmt::format("cannot open config file '{}'", path));
    std::ostringstream buffer;
    buffer << input.rdbuf();
    return parse_config_text(buffer.str(), path);
}

} // namespace wagedecomp
