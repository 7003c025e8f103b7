#include "sdq/config.hpp"

#include <cmath>
#include <random>
#include <set>

#include "sdq/mse.hpp"
#include "sdq/sha256.hpp"

namespace sdq {

double XSpec::resolve() const {
    switch (kind) {
        case Kind::Literal: return literal;
        case Kind::Golden: return (std::sqrt(5.0) - 1.0) / 2.0;
        case Kind::Sqrt2m1: return std::sqrt(2.0) - 1.0;
        case Kind::Liouville: return mse::liouville_input(liouville_x0, liouville_l).x;
    }
    return 0.0;
}

std::string XSpec::describe() const {
    switch (kind) {
        case Kind::Literal: return "literal";
        case Kind::Golden: return "golden";
        case Kind::Sqrt2m1: return "sqrt2m1";
        case Kind::Liouville:
            return "liouville(x0=" + std::to_string(liouville_x0) +
                   ",l=" + std::to_string(liouville_l) + ")";
    }
    return "?";
}

const std::map<std::string, QuantizerRule>& rule_bank() {
    static const std::map<std::string, QuantizerRule> bank = [] {
        std::map<std::string, QuantizerRule> b;
        b["ideal"] = QuantizerRule::ideal();
        // Second-order linear rules, measured bounded for constant inputs
        // across (0.05, 0.95) and giving dominant-multiplicity-1 tiles;
        // certification thresholds and connectivity are tabulated in the
        // README.
        b["linear-1bit-a"] =
            QuantizerRule::clamped_linear({0.5, 1.0, 0.5}, {0.5, 0.0}, {0, 1});
        b["linear-1bit-b"] =
            QuantizerRule::clamped_linear({0.0, 1.0, 0.75}, {0.5, 0.0}, {0, 1});
        b["linear-2bit"] =
            QuantizerRule::clamped_linear({0.5, 1.0, 0.5}, {0.5, 0.0}, {-1, 0, 1, 2});
        return b;
    }();
    return bank;
}

namespace {

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = {
        "scheme.rule", "scheme.kind", "scheme.alpha", "scheme.beta", "scheme.levels",
        "scheme.order",
        "input.x", "input.x0", "input.l",
        "run.steps", "run.burn_in", "run.blow_up", "run.seed", "run.u0", "run.threads",
        "tile.grid", "tile.eps_cover",
        "spectral.k_max",
        "mse.filter", "mse.p", "mse.m_list",
        "output.dir",
    };
    return keys;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_table(const toml::Table& t) {
    for (const auto& [key, value] : t)
        if (!known_keys().count(key))
            throw ConfigError("unknown key '" + key + "'", value.line);

    ExperimentConfig cfg;
    auto get = [&](const char* key) -> const toml::Value* {
        auto it = t.find(key);
        return it == t.end() ? nullptr : &it->second;
    };

    if (const auto* v = get("scheme.order")) cfg.order = static_cast<int>(v->as_int());
    if (cfg.order < 1 || cfg.order > 8)
        throw ConfigError("scheme.order must be between 1 and 8");

    if (const auto* v = get("scheme.rule")) {
        cfg.rule_name = v->as_string();
        auto it = rule_bank().find(cfg.rule_name);
        if (it == rule_bank().end())
            throw ConfigError("unknown rule '" + cfg.rule_name + "' (not in the rule bank)",
                              v->line);
        cfg.rule = it->second;
    } else if (get("scheme.kind")) {
        cfg.rule = QuantizerRule::from_toml(t, "scheme");
        cfg.rule_name = "custom";
    } else {
        cfg.rule = QuantizerRule::ideal();
    }

    if (const auto* v = get("input.x")) {
        if (v->type == toml::Value::Type::String) {
            const std::string& name = v->as_string();
            if (name == "golden") cfg.x.kind = XSpec::Kind::Golden;
            else if (name == "sqrt2m1") cfg.x.kind = XSpec::Kind::Sqrt2m1;
            else if (name == "liouville") {
                cfg.x.kind = XSpec::Kind::Liouville;
                if (const auto* x0 = get("input.x0")) cfg.x.liouville_x0 = x0->as_float();
                if (const auto* l = get("input.l"))
                    cfg.x.liouville_l = static_cast<int>(l->as_int());
            } else {
                throw ConfigError("unknown input.x name '" + name + "'", v->line);
            }
        } else {
            cfg.x.kind = XSpec::Kind::Literal;
            cfg.x.literal = v->as_float();
        }
    }

    if (const auto* v = get("run.steps")) cfg.steps = v->as_int();
    if (cfg.steps < 0) throw ConfigError("run.steps must be >= 0");
    if (const auto* v = get("run.burn_in")) cfg.burn_in = v->as_int();
    if (cfg.burn_in < 0) throw ConfigError("run.burn_in must be >= 0");
    if (const auto* v = get("run.blow_up")) cfg.blow_up = v->as_float();
    if (const auto* v = get("run.seed")) cfg.seed = static_cast<std::uint64_t>(v->as_int());
    if (const auto* v = get("run.u0")) cfg.u0 = v->as_float_array();
    if (!cfg.u0.empty() && static_cast<int>(cfg.u0.size()) != cfg.order)
        throw ConfigError("run.u0 length must equal scheme.order");
    if (const auto* v = get("run.threads")) cfg.threads = static_cast<int>(v->as_int());
    if (cfg.threads < 1) throw ConfigError("run.threads must be >= 1");

    if (const auto* v = get("tile.grid")) cfg.grid = static_cast<int>(v->as_int());
    if (cfg.grid < 2) throw ConfigError("tile.grid must be >= 2");
    if (const auto* v = get("tile.eps_cover")) cfg.eps_cover = v->as_float();
    if (!(cfg.eps_cover > 0.0 && cfg.eps_cover < 0.5))
        throw ConfigError("tile.eps_cover must lie in (0, 0.5)");

    if (const auto* v = get("spectral.k_max")) cfg.k_max = static_cast<int>(v->as_int());
    if (cfg.k_max < 1) throw ConfigError("spectral.k_max must be >= 1");

    if (const auto* v = get("mse.filter")) cfg.filter_family = v->as_string();
    if (cfg.filter_family != "sinc" && cfg.filter_family != "rect")
        throw ConfigError("mse.filter must be 'sinc' or 'rect'");
    if (const auto* v = get("mse.p")) cfg.filter_p = static_cast<int>(v->as_int());
    if (cfg.filter_p < 0) throw ConfigError("mse.p must be >= 0");
    if (const auto* v = get("mse.m_list")) {
        for (long long M : v->as_int_array()) {
            if (M < 1) throw ConfigError("mse.m_list entries must be >= 1", v->line);
            cfg.m_list.push_back(static_cast<int>(M));
        }
    }

    if (const auto* v = get("output.dir")) cfg.out_dir = v->as_string();

    cfg.config_hash = sha256_hex(toml::canonical(t));
    cfg.modulator().validate();
    return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    return from_table(toml::parse_file(path));
}

Modulator ExperimentConfig::modulator() const {
    Modulator mod;
    mod.order = order;
    mod.rule = rule;
    mod.x = x.resolve();
    return mod;
}

StateVector ExperimentConfig::initial_state() const {
    StateVector u = u0.empty() ? StateVector(static_cast<size_t>(order), 0.0) : u0;
    if (seed != 0) {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> jitter(-1e-3, 1e-3);
        for (double& v : u) v += jitter(rng);
    }
    return u;
}

}  // namespace sdq
