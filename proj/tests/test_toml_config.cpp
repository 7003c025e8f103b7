#include <doctest.h>

#include <cmath>

#include "sdq/config.hpp"
#include "sdq/sha256.hpp"
#include "sdq/toml.hpp"

using namespace sdq;

TEST_CASE("toml parsing of sections, scalars and arrays") {
    auto t = toml::parse(
        "# experiment\n"
        "threads = 2\n"
        "[scheme]\n"
        "rule = \"ideal\"   # bank entry\n"
        "order = 2\n"
        "[run]\n"
        "steps = 1000000\n"
        "blow_up = 1.5e6\n"
        "u0 = [0.0, 0.25]\n"
        "flag = true\n");
    CHECK(t.at("threads").as_int() == 2);
    CHECK(t.at("scheme.rule").as_string() == "ideal");
    CHECK(t.at("scheme.order").as_int() == 2);
    CHECK(t.at("run.steps").as_int() == 1000000);
    CHECK(t.at("run.blow_up").as_float() == doctest::Approx(1.5e6));
    CHECK(t.at("run.u0").as_float_array() == std::vector<double>{0.0, 0.25});
    CHECK(t.at("run.flag").as_bool());
}

TEST_CASE("toml parse errors carry line numbers") {
    try {
        toml::parse("ok = 1\nbroken\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.line == 2);
    }
    CHECK_THROWS_AS(toml::parse("a = [1, 2\n"), ConfigError);
    CHECK_THROWS_AS(toml::parse("a = \"unterminated\n"), ConfigError);
    CHECK_THROWS_AS(toml::parse("a = 1\na = 2\n"), ConfigError);
}

TEST_CASE("canonical form is order-insensitive") {
    auto a = toml::parse("[b]\nk = 1\n[a]\nj = 2.5\n");
    auto b = toml::parse("[a]\nj = 2.5\n[b]\nk = 1\n");
    CHECK(toml::canonical(a) == toml::canonical(b));
    CHECK(sha256_hex(toml::canonical(a)) == sha256_hex(toml::canonical(b)));
}

TEST_CASE("sha256 known vectors") {
    CHECK(sha256_hex("") ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    // Block-boundary lengths exercise the two-block padding path.
    CHECK(sha256_hex(std::string(56, 'a')).size() == 64);
    CHECK(sha256_hex(std::string(64, 'a')).size() == 64);
}

TEST_CASE("experiment config round trip with named inputs") {
    auto cfg = ExperimentConfig::from_table(toml::parse(
        "[scheme]\nrule = \"ideal\"\norder = 2\n"
        "[input]\nx = \"sqrt2m1\"\n"
        "[run]\nsteps = 5000\nburn_in = 100\nseed = 7\n"
        "[tile]\ngrid = 64\n"
        "[mse]\nfilter = \"sinc\"\nm_list = [16, 32]\n"));
    CHECK(cfg.order == 2);
    CHECK(cfg.x.resolve() == doctest::Approx(std::sqrt(2.0) - 1.0));
    CHECK(cfg.steps == 5000);
    CHECK(cfg.grid == 64);
    CHECK(cfg.m_list == std::vector<int>{16, 32});
    CHECK(cfg.config_hash.size() == 64);

    // Jittered initial state is deterministic in the seed.
    auto u1 = cfg.initial_state();
    auto u2 = cfg.initial_state();
    CHECK(u1 == u2);
    CHECK(u1[0] != 0.0);
    CHECK(std::abs(u1[0]) <= 1e-3);
}

TEST_CASE("config rejects unknown keys and bad values") {
    CHECK_THROWS_AS(ExperimentConfig::from_table(toml::parse("[scheme]\nordr = 2\n")),
                    ConfigError);
    CHECK_THROWS_AS(
        ExperimentConfig::from_table(toml::parse("[scheme]\nrule = \"nope\"\n")),
        ConfigError);
    CHECK_THROWS_AS(
        ExperimentConfig::from_table(toml::parse("[tile]\ngrid = 1\n")),
        ConfigError);
    CHECK_THROWS_AS(
        ExperimentConfig::from_table(toml::parse("[run]\nu0 = [0.0]\n[scheme]\norder = 2\n")),
        ConfigError);
}

TEST_CASE("liouville input resolves through the config") {
    auto cfg = ExperimentConfig::from_table(toml::parse(
        "[scheme]\nrule = \"ideal\"\norder = 1\n"
        "[input]\nx = \"liouville\"\nx0 = 0.5\nl = 2\n"));
    CHECK(cfg.x.resolve() == doctest::Approx(0.765625059604645).epsilon(1e-15));
}

TEST_CASE("rule bank entries validate at order 2") {
    for (const auto& [name, rule] : rule_bank()) {
        if (name == "ideal") continue;
        CHECK_NOTHROW(rule.validate(2));
    }
}
