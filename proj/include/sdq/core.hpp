#pragma once

#include <array>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "sdq/arith.hpp"
#include "sdq/errors.hpp"
#include "sdq/toml.hpp"

namespace sdq {

using StateVector = std::vector<double>;

enum class RuleKind { Linear, Ideal, ClampedLinear };

// Quantization rule Q(x, v): maps the input and the current state to an
// output level. Linear rules take the floor of an affine form; the clamped
// variant additionally restricts the output to a finite integer alphabet.
// The ideal rule returns the unique integer q with sum(v) + x - q in
// [-1/2, 1/2).
struct QuantizerRule {
    RuleKind kind = RuleKind::Ideal;
    std::vector<double> alpha;       // (a_0, ..., a_m); a_0 multiplies x
    std::array<double, 2> beta{0.0, 0.0};
    std::vector<long long> levels;   // strictly increasing integers (clamped only)

    static QuantizerRule ideal();
    static QuantizerRule linear(std::vector<double> alpha, std::array<double, 2> beta);
    static QuantizerRule clamped_linear(std::vector<double> alpha, std::array<double, 2> beta,
                                        std::vector<long long> levels);

    // Throws ArgumentError on violated invariants for the given order.
    void validate(int order) const;

    toml::Table to_toml() const;
    static QuantizerRule from_toml(const toml::Table& t, const std::string& prefix = "");
};

struct Modulator {
    int order = 1;
    QuantizerRule rule;
    double x = 0.0;

    void validate() const;
};

// Output level for state v. Total function; no failure modes.
long long eval_quantizer(const QuantizerRule& rule, double x, std::span<const double> v);

// One application of the piecewise affine modulator map: L v + (x - q) 1,
// where L is the lower-triangular all-ones matrix.
StateVector modulator_map(const Modulator& mod, std::span<const double> v);

// In-place hot-path step; u has mod.order entries and is replaced by the
// next state. Returns the emitted symbol.
inline long long modulator_step(const Modulator& mod, double* u);

// Generalized skew translation on the torus: L v + x 1 (mod 1).
std::vector<double> skew_map(int m, double x, std::span<const double> v);

// s[n] = (sum_{k<n} L^k) 1; the j-th coordinate equals binomial(j+n-1, j).
// Throws OverflowError if a coordinate exceeds the 64-bit range.
std::vector<long long> binomial_shift_vector(int m, long long n);

// The m x m lower-triangular matrix of ones (row-major), for tests/oracles.
std::vector<std::vector<long long>> lower_ones_matrix(int m);

// L^n v computed from the binomial form (L^n)_{jk} = C(n+j-k-1, j-k), j >= k,
// accumulated in extended precision.
std::vector<double> apply_l_power(int m, long long n, std::span<const double> v);

// --- inline hot path ---

inline long long eval_quantizer_inline(const QuantizerRule& rule, double x,
                                       const double* v, int m) {
    switch (rule.kind) {
        case RuleKind::Ideal: {
            double s = x;
            for (int j = 0; j < m; ++j) s += v[j];
            return static_cast<long long>(std::floor(s + 0.5));
        }
        case RuleKind::Linear:
        case RuleKind::ClampedLinear: {
            double s = rule.alpha[0] * x + rule.beta[0];
            for (int j = 0; j < m; ++j) s += rule.alpha[j + 1] * v[j];
            auto q = static_cast<long long>(std::floor(s)) +
                     static_cast<long long>(rule.beta[1]);
            if (rule.kind == RuleKind::ClampedLinear) {
                if (q < rule.levels.front()) q = rule.levels.front();
                if (q > rule.levels.back()) q = rule.levels.back();
            }
            return q;
        }
    }
    return 0;  // unreachable
}

inline long long modulator_step(const Modulator& mod, double* u) {
    long long q = eval_quantizer_inline(mod.rule, mod.x, u, mod.order);
    double r = mod.x - static_cast<double>(q);
    double c = 0.0;
    for (int j = 0; j < mod.order; ++j) {
        c += u[j];          // prefix sum of the previous state
        u[j] = c + r;
    }
    return q;
}

}  // namespace sdq
