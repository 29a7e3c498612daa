#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdio>
#include <fstream>
#include <string>

#include "doctest.h"
#include "mclab/config.hpp"
#include "mclab/errors.hpp"

using namespace mclab;

TEST_CASE("parses keys, comments and blank lines") {
    auto cfg = KeyValueConfig::from_text(
        "# run parameters\n"
        "x = 1e5\n"
        "\n"
        "family = two-squares   # trailing comment\n"
        "n_mc=200\n");
    CHECK(cfg.get_double("x", 0.0) == 1e5);
    CHECK(cfg.get_string("family", "") == "two-squares");
    CHECK(cfg.get_u64("n_mc", 0) == 200);
    cfg.require_consumed();
}

TEST_CASE("defaults are echoed in the resolved map") {
    auto cfg = KeyValueConfig::from_text("x = 10\n");
    CHECK(cfg.get_double("x", 0.0) == 10.0);
    CHECK(cfg.get_double("y", 7.5) == 7.5);
    auto res = cfg.resolved();
    CHECK(res.at("x") == "10");
    CHECK(res.at("y") == "7.5");
}

TEST_CASE("set overrides and later reads see the override") {
    auto cfg = KeyValueConfig::from_text("seed = 1\n");
    cfg.set("seed", "42");
    CHECK(cfg.get_u64("seed", 0) == 42);
}

TEST_CASE("malformed lines are rejected with the line number") {
    CHECK_THROWS_WITH_AS(KeyValueConfig::from_text("x = 1\nx = 2\n"),
                         doctest::Contains("duplicate key 'x' at line 2"), ConfigError);
    CHECK_THROWS_WITH_AS(KeyValueConfig::from_text("= 3\n"), doctest::Contains("line 1"), ConfigError);
    CHECK_THROWS_WITH_AS(KeyValueConfig::from_text("just words\n"), doctest::Contains("line 1"), ConfigError);
}

TEST_CASE("typed getters validate the whole token") {
    auto cfg = KeyValueConfig::from_text(
        "a = 1.5x\n"
        "b = -3\n"
        "c = 2.5\n"
        "d = 1,2,junk\n"
        "e =\n");
    CHECK_THROWS_WITH_AS(cfg.get_double("a", 0.0), doctest::Contains("expects a number"), ConfigError);
    CHECK_THROWS_WITH_AS(cfg.get_u64("b", 0), doctest::Contains("unsigned"), ConfigError);
    CHECK(cfg.get_int("b", 0) == -3);
    CHECK_THROWS_WITH_AS(cfg.get_int("c", 0), doctest::Contains("integer"), ConfigError);
    CHECK_THROWS_WITH_AS(cfg.get_double_list("d", ""), doctest::Contains("comma-separated"), ConfigError);
    CHECK_THROWS_WITH_AS(cfg.get_double_list("e", "1"), doctest::Contains("non-empty"), ConfigError);
}

TEST_CASE("list parsing") {
    auto cfg = KeyValueConfig::from_text("q_list = 0.25, 0.5 ,1\n");
    auto qs = cfg.get_double_list("q_list", "");
    REQUIRE(qs.size() == 3);
    CHECK(qs[0] == 0.25);
    CHECK(qs[1] == 0.5);
    CHECK(qs[2] == 1.0);
    auto fallback = cfg.get_double_list("other", "1,2");
    REQUIRE(fallback.size() == 2);
    CHECK(fallback[1] == 2.0);
}

TEST_CASE("unknown keys are rejected once reads are done") {
    auto cfg = KeyValueConfig::from_text("x = 1\ntypo_key = 3\n");
    CHECK(cfg.get_double("x", 0.0) == 1.0);
    CHECK_THROWS_WITH_AS(cfg.require_consumed(), doctest::Contains("typo_key"), ConfigError);
}

TEST_CASE("file round trip and missing file") {
    std::string path = "config_roundtrip_tmp.cfg";
    {
        std::ofstream out(path);
        out << "x = 3.5\n# done\n";
    }
    auto cfg = KeyValueConfig::from_file(path);
    CHECK(cfg.get_double("x", 0.0) == 3.5);
    std::remove(path.c_str());
    CHECK_THROWS_WITH_AS(KeyValueConfig::from_file("definitely_missing.cfg"), doctest::Contains("cannot open"),
                         ConfigError);
}
