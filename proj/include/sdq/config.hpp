#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sdq/core.hpp"
#include "sdq/toml.hpp"

namespace sdq {

// Input value specification: a literal, one of the named irrationals, or the
// factorial-bit construction used by the adversarial probes.
struct XSpec {
    enum class Kind { Literal, Golden, Sqrt2m1, Liouville };
    Kind kind = Kind::Sqrt2m1;
    double literal = 0.0;
    double liouville_x0 = 0.5;
    int liouville_l = 2;

    double resolve() const;
    std::string describe() const;
};

struct ExperimentConfig {
    int order = 2;
    QuantizerRule rule;
    std::string rule_name = "ideal";
    XSpec x;

    long long steps = 1'000'000;
    long long burn_in = 1'000;
    double blow_up = 1e6;
    std::vector<double> u0;        // empty = zero vector
    std::uint64_t seed = 0;        // non-zero jitters u0 deterministically

    int grid = 128;
    double eps_cover = 0.02;
    int k_max = 50;

    std::string filter_family = "sinc";  // "sinc" | "rect"
    int filter_p = 0;                     // 0 = order + 1
    std::vector<int> m_list;

    std::string out_dir = ".";
    int threads = 1;
    std::string config_hash;  // sha256 of the canonicalized TOML

    static ExperimentConfig from_table(const toml::Table& t);
    static ExperimentConfig load(const std::string& path);

    Modulator modulator() const;
    StateVector initial_state() const;  // u0 with the seeded jitter applied
};

// Named rule presets; "ideal" plus the linear configurations that were
// measured to give certified single tiles (see README).
const std::map<std::string, QuantizerRule>& rule_bank();

}  // namespace sdq
