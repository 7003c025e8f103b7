#include "sdq/core.hpp"

#include <limits>

namespace sdq {

QuantizerRule QuantizerRule::ideal() {
    QuantizerRule r;
    r.kind = RuleKind::Ideal;
    return r;
}

QuantizerRule QuantizerRule::linear(std::vector<double> alpha, std::array<double, 2> beta) {
    QuantizerRule r;
    r.kind = RuleKind::Linear;
    r.alpha = std::move(alpha);
    r.beta = beta;
    return r;
}

QuantizerRule QuantizerRule::clamped_linear(std::vector<double> alpha, std::array<double, 2> beta,
                                            std::vector<long long> levels) {
    QuantizerRule r;
    r.kind = RuleKind::ClampedLinear;
    r.alpha = std::move(alpha);
    r.beta = beta;
    r.levels = std::move(levels);
    return r;
}

void QuantizerRule::validate(int order) const {
    if (kind == RuleKind::Ideal) return;  // ideal ignores alpha/beta/levels
    if (static_cast<int>(alpha.size()) != order + 1)
        throw ArgumentError("linear rule needs order+1 alpha coefficients");
    if (beta[1] != std::floor(beta[1]))
        throw ArgumentError("beta_1 must be an integer (output alphabet is integer)");
    if (kind == RuleKind::ClampedLinear) {
        if (levels.size() < 2)
            throw ArgumentError("clamped rule needs at least two levels");
        for (size_t i = 1; i < levels.size(); ++i)
            if (levels[i] <= levels[i - 1])
                throw ArgumentError("levels must be strictly increasing");
    }
}

void Modulator::validate() const {
    if (order < 1) throw ArgumentError("order must be >= 1");
    rule.validate(order);
    if (rule.kind == RuleKind::ClampedLinear) {
        if (x < static_cast<double>(rule.levels.front()) ||
            x > static_cast<double>(rule.levels.back()))
            throw ArgumentError("input x must lie within [d_1, d_K] for a clamped rule");
    }
}

long long eval_quantizer(const QuantizerRule& rule, double x, std::span<const double> v) {
    return eval_quantizer_inline(rule, x, v.data(), static_cast<int>(v.size()));
}

StateVector modulator_map(const Modulator& mod, std::span<const double> v) {
    if (static_cast<int>(v.size()) != mod.order)
        throw ArgumentError("state dimension does not match modulator order");
    StateVector u(v.begin(), v.end());
    modulator_step(mod, u.data());
    return u;
}

std::vector<double> skew_map(int m, double x, std::span<const double> v) {
    if (static_cast<int>(v.size()) != m)
        throw ArgumentError("state dimension does not match order");
    std::vector<double> out(m);
    double c = 0.0;
    for (int j = 0; j < m; ++j) {
        c += v[j];
        out[j] = arith::frac(c + x);
    }
    return out;
}

namespace {

// binomial(n + j - 1, j) with 64-bit overflow detection.
long long checked_shift_binom(long long n, int j) {
    __int128 acc = 1;
    for (int i = 1; i <= j; ++i) {
        acc = acc * (n + i - 1);
        acc /= i;  // exact: C(n+i-1, i) = C(n+i-2, i-1) * (n+i-1) / i
        if (acc > static_cast<__int128>(std::numeric_limits<long long>::max()))
            throw OverflowError("binomial shift coordinate exceeds 64-bit range");
    }
    return static_cast<long long>(acc);
}

}  // namespace

std::vector<long long> binomial_shift_vector(int m, long long n) {
    if (m < 1) throw ArgumentError("order must be >= 1");
    if (n < 0) throw ArgumentError("n must be non-negative");
    std::vector<long long> s(m);
    for (int j = 1; j <= m; ++j) s[j - 1] = checked_shift_binom(n, j);
    return s;
}

std::vector<std::vector<long long>> lower_ones_matrix(int m) {
    std::vector<std::vector<long long>> L(m, std::vector<long long>(m, 0));
    for (int j = 0; j < m; ++j)
        for (int k = 0; k <= j; ++k) L[j][k] = 1;
    return L;
}

std::vector<double> apply_l_power(int m, long long n, std::span<const double> v) {
    if (static_cast<int>(v.size()) != m)
        throw ArgumentError("state dimension does not match order");
    // (L^n)_{jk} = C(n + j - k - 1, j - k) for j >= k; depends only on d = j - k.
    std::vector<long long> w(m);
    w[0] = 1;  // d = 0
    for (int d = 1; d < m; ++d) w[d] = checked_shift_binom(n, d);
    std::vector<double> out(m);
    for (int j = 0; j < m; ++j) {
        long double acc = 0.0L;
        for (int k = 0; k <= j; ++k)
            acc += static_cast<long double>(w[j - k]) * static_cast<long double>(v[k]);
        out[j] = static_cast<double>(acc);
    }
    return out;
}

toml::Table QuantizerRule::to_toml() const {
    toml::Table t;
    switch (kind) {
        case RuleKind::Ideal: t["kind"] = toml::make_string("ideal"); break;
        case RuleKind::Linear: t["kind"] = toml::make_string("linear"); break;
        case RuleKind::ClampedLinear: t["kind"] = toml::make_string("clamped_linear"); break;
    }
    if (kind != RuleKind::Ideal) {
        t["alpha"] = toml::make_float_array(alpha);
        t["beta"] = toml::make_float_array({beta[0], beta[1]});
    }
    if (kind == RuleKind::ClampedLinear)
        t["levels"] = toml::make_int_array(levels);
    return t;
}

QuantizerRule QuantizerRule::from_toml(const toml::Table& t, const std::string& prefix) {
    auto key = [&](const char* k) { return prefix.empty() ? std::string(k) : prefix + "." + k; };
    auto it = t.find(key("kind"));
    if (it == t.end()) throw ConfigError("missing '" + key("kind") + "'");
    const std::string& kind = it->second.as_string();

    if (kind == "ideal") return ideal();

    auto need = [&](const char* k) -> const toml::Value& {
        auto f = t.find(key(k));
        if (f == t.end()) throw ConfigError("missing '" + key(k) + "' for rule kind '" + kind + "'");
        return f->second;
    };
    std::vector<double> alpha = need("alpha").as_float_array();
    std::vector<double> beta_v = need("beta").as_float_array();
    if (beta_v.size() != 2)
        throw ConfigError("'" + key("beta") + "' must have exactly two entries");
    std::array<double, 2> beta{beta_v[0], beta_v[1]};

    if (kind == "linear") return linear(std::move(alpha), beta);
    if (kind == "clamped_linear")
        return clamped_linear(std::move(alpha), beta, need("levels").as_int_array());
    throw ConfigError("unknown rule kind '" + kind + "'");
}

}  // namespace sdq
