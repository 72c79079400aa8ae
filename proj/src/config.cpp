#include "config.hpp"

#include "error.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace bm {

using nlohmann::json;

namespace {

[[noreturn]] void schema(const std::string& what) { fail(ErrorCode::kConfig, "config: " + what); }

void only_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) schema(where + " must be an object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, _] : j.items())
        if (!ok.count(key)) schema("unknown key '" + key + "' in " + where);
}

double number(const json& j, const std::string& key, const std::string& where) {
    if (!j.contains(key)) schema(where + "." + key + " is required");
    if (!j[key].is_number()) schema(where + "." + key + " must be a number");
    return j[key].get<double>();
}

double number_or(const json& j, const std::string& key, double fallback, const std::string& where) {
    return j.contains(key) ? number(j, key, where) : fallback;
}

std::vector<double> numbers(const json& j, const std::string& key, const std::string& where) {
    if (!j.contains(key)) schema(where + "." + key + " is required");
    if (!j[key].is_array()) schema(where + "." + key + " must be an array of numbers");
    std::vector<double> out;
    for (const auto& v : j[key]) {
        if (!v.is_number()) schema(where + "." + key + " must be an array of numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

std::string text(const json& j, const std::string& key, const std::string& where) {
    if (!j.contains(key)) schema(where + "." + key + " is required");
    if (!j[key].is_string()) schema(where + "." + key + " must be a string");
    return j[key].get<std::string>();
}

std::size_t count(const json& j, const std::string& key, std::size_t fallback, const std::string& where) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number_integer() || j[key].get<long long>() <= 0) schema(where + "." + key + " must be a positive integer");
    return j[key].get<std::size_t>();
}

}  // namespace

CostModel parse_cost(const json& j) {
    const std::string where = "cost";
    if (!j.is_object()) schema("cost must be an object");
    const std::string family = text(j, "family", where);
    if (family == "power") {
        only_keys(j, where, {"family", "scale", "exponent"});
        return power_cost(number_or(j, "scale", 1.0, where), number(j, "exponent", where));
    }
    if (family == "quadratic_plus_linear") {
        only_keys(j, where, {"family", "a", "b"});
        return quadratic_plus_linear_cost(number(j, "a", where), number(j, "b", where));
    }
    if (family == "custom-table") {
        only_keys(j, where, {"family", "x", "marginal"});
        return table_cost(numbers(j, "x", where), numbers(j, "marginal", where));
    }
    if (family == "power_sum") {
        only_keys(j, where, {"family", "a", "p", "b", "q"});
        return power_sum_cost(number(j, "a", where), number(j, "p", where), number(j, "b", where),
                              number(j, "q", where));
    }
    schema("unknown cost family '" + family + "'");
}

TypeDistribution parse_distribution(const json& j) {
    const std::string where = "distribution";
    if (!j.is_object()) schema("distribution must be an object");
    const std::string kind = text(j, "kind", where);
    if (kind == "uniform") {
        only_keys(j, where, {"kind", "a", "b"});
        return uniform_distribution(number(j, "a", where), number(j, "b", where));
    }
    if (kind == "linear-density") {
        only_keys(j, where, {"kind", "a", "b", "slope"});
        return linear_density_distribution(number(j, "a", where), number(j, "b", where), number(j, "slope", where));
    }
    if (kind == "truncated-power") {
        only_keys(j, where, {"kind", "a", "b", "alpha"});
        return truncated_power_distribution(number(j, "a", where), number(j, "b", where), number(j, "alpha", where));
    }
    if (kind == "discrete") {
        only_keys(j, where, {"kind", "types", "probs"});
        return discrete_distribution(numbers(j, "types", where), numbers(j, "probs", where));
    }
    schema("unknown distribution kind '" + kind + "'");
}

void set_variant(RunConfig& cfg, const std::string& name, double param) {
    auto& s = cfg.spec;
    s.variant = parse_variant(name);
    s.resource_value = 0.0;
    s.agents = 1;
    if (s.variant == Variant::kLinearValue) {
        if (!(param >= 0.0)) schema("linear_value needs k >= 0");
        s.resource_value = param;
    } else if (s.variant == Variant::kMultiAgent) {
        if (!(param >= 1.0) || param != static_cast<double>(static_cast<int>(param)))
            schema("multi_agent needs an integer number of agents >= 1");
        s.agents = static_cast<int>(param);
    }
}

void apply_variant_override(RunConfig& cfg, const std::string& spec_text) {
    const auto colon = spec_text.find(':');
    const std::string name = spec_text.substr(0, colon);
    double param = 0.0;
    const Variant v = parse_variant(name);
    if (colon != std::string::npos) {
        try {
            std::size_t used = 0;
            param = std::stod(spec_text.substr(colon + 1), &used);
            if (used != spec_text.size() - colon - 1) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            schema("bad variant override '" + spec_text + "'");
        }
    } else if (v == Variant::kLinearValue) {
        param = cfg.spec.resource_value;
    } else if (v == Variant::kMultiAgent) {
        param = std::max(2, cfg.spec.agents);
    }
    set_variant(cfg, name, param);
}

RunConfig parse_config(const json& j) {
    if (!j.is_object()) schema("top level must be an object");
    only_keys(j, "config",
              {"cost", "distribution", "budget", "variant", "solver", "oracle", "sweep", "subsidy", "table1", "seed",
               "description"});
    RunConfig cfg;
    cfg.raw = j;
    if (!j.contains("cost")) schema("cost is required");
    if (!j.contains("distribution")) schema("distribution is required");
    cfg.spec.cost = parse_cost(j["cost"]);
    cfg.spec.dist = parse_distribution(j["distribution"]);
    cfg.spec.budget = number(j, "budget", "config");
    if (!(cfg.spec.budget > 0.0)) schema("budget must be positive");

    if (j.contains("variant")) {
        const auto& v = j["variant"];
        if (v.is_string()) {
            set_variant(cfg, v.get<std::string>(), v.get<std::string>() == "multi_agent" ? 2.0 : 0.0);
        } else {
            only_keys(v, "variant", {"type", "k", "agents"});
            const std::string type = text(v, "type", "variant");
            double param = 0.0;
            if (type == "linear_value" || type == "linear-value") param = number(v, "k", "variant");
            if (type == "multi_agent" || type == "multi-agent") param = number(v, "agents", "variant");
            set_variant(cfg, type, param);
        }
    }

    if (j.contains("solver")) {
        const auto& s = j["solver"];
        only_keys(s, "solver", {"grid", "tol", "method", "envelope_grid", "max_bisection"});
        cfg.solver.grid = count(s, "grid", cfg.solver.grid, "solver");
        cfg.solver.envelope_grid = count(s, "envelope_grid", cfg.solver.envelope_grid, "solver");
        cfg.solver.max_bisection = static_cast<int>(count(s, "max_bisection", 300, "solver"));
        cfg.solver.tol = number_or(s, "tol", cfg.solver.tol, "solver");
        if (s.contains("method")) {
            const auto m = text(s, "method", "solver");
            if (m == "shooting") cfg.method = Method::kShooting;
            else if (m == "separable") cfg.method = Method::kSeparable;
            else schema("solver.method must be 'shooting' or 'separable'");
        }
    }
    if (cfg.solver.grid < 8) schema("solver.grid must be >= 8");
    if (!(cfg.solver.tol > 0.0)) schema("solver.tol must be positive");

    if (j.contains("oracle")) {
        const auto& o = j["oracle"];
        only_keys(o, "oracle", {"n_types", "n_actions", "exact_check", "exact_types", "exact_actions", "exact_buckets"});
        cfg.oracle.n_types = count(o, "n_types", cfg.oracle.n_types, "oracle");
        cfg.oracle.n_actions = count(o, "n_actions", cfg.oracle.n_actions, "oracle");
        cfg.oracle.exact_types = count(o, "exact_types", cfg.oracle.exact_types, "oracle");
        cfg.oracle.exact_actions = count(o, "exact_actions", cfg.oracle.exact_actions, "oracle");
        cfg.oracle.exact_buckets = count(o, "exact_buckets", cfg.oracle.exact_buckets, "oracle");
        if (o.contains("exact_check")) {
            if (!o["exact_check"].is_boolean()) schema("oracle.exact_check must be a boolean");
            cfg.oracle.exact_check = o["exact_check"].get<bool>();
        }
    }
    if (j.contains("sweep")) {
        const auto& s = j["sweep"];
        only_keys(s, "sweep", {"k", "T"});
        if (s.contains("k")) cfg.sweep_k = numbers(s, "k", "sweep");
        if (s.contains("T")) cfg.sweep_T = numbers(s, "T", "sweep");
    }
    if (j.contains("subsidy")) {
        const auto& s = j["subsidy"];
        only_keys(s, "subsidy", {"rates"});
        cfg.subsidy_rates = numbers(s, "rates", "subsidy");
    }
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned()) schema("seed must be a nonnegative integer");
        cfg.seed = j["seed"].get<std::uint64_t>();
    }

    cfg.table1.cost = power_cost(1.0, 2.0);
    if (j.contains("table1")) {
        const auto& t = j["table1"];
        only_keys(t, "table1", {"types", "deltas", "p_top", "budget", "restarts", "tie_break", "cost"});
        if (t.contains("types")) cfg.table1.types = numbers(t, "types", "table1");
        if (t.contains("deltas")) cfg.table1.deltas = numbers(t, "deltas", "table1");
        cfg.table1.p_top = number_or(t, "p_top", cfg.table1.p_top, "table1");
        cfg.table1.budget = number_or(t, "budget", cfg.table1.budget, "table1");
        cfg.table1.bic.restarts = static_cast<int>(count(t, "restarts", 64, "table1"));
        if (t.contains("tie_break")) {
            const auto tb = text(t, "tie_break", "table1");
            if (tb == "uniform") cfg.table1.bic.tie_break = TieBreak::kUniform;
            else if (tb == "low-index") cfg.table1.bic.tie_break = TieBreak::kLowIndex;
            else schema("table1.tie_break must be 'uniform' or 'low-index'");
        }
        if (t.contains("cost")) cfg.table1.cost = parse_cost(t["cost"]);
        if (cfg.table1.types.size() != 3) schema("table1.types must list exactly three types");
    }
    cfg.table1.bic.seed = cfg.seed;
    return cfg;
}

RunConfig parse_config_text(const std::string& body) {
    json j;
    try {
        j = json::parse(body);
    } catch (const json::parse_error& e) {
        fail(ErrorCode::kConfig, std::string("config: invalid JSON: ") + e.what());
    }
    return parse_config(j);
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::kIo, "cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

}  // namespace bm
