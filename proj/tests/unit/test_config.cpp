#include "doctest.h"

#include "multikink_tools/commands.hpp"
#include "multikink_tools/config.hpp"

#include <multikink/errors.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace {

std::string message_of(const std::string& text) {
    try {
        (void)mkt::parse_config(text);
    } catch (const mk::ConfigError& e) {
        return e.what();
    }
    return {};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path scratch(const std::string& name) {
    fs::path p = fs::temp_directory_path() / ("multikink_unit_" + name);
    fs::remove_all(p);
    return p;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("defaults of an empty file") {
    const auto c = mkt::parse_config("");
    CHECK(c.seed == 0);
    CHECK(c.potential.kind == "phi4");
    CHECK_FALSE(c.chain.has_value());
    CHECK_FALSE(c.boost.has_value());
    CHECK(c.wants("csv"));
    CHECK(c.wants("json"));
    CHECK_FALSE(c.wants("xml"));
}

TEST_CASE("full file round trip") {
    const auto c = mkt::load_config(MULTIKINK_TEST_DATA "/sine_gordon_pair.ini");
    CHECK(c.seed == 7);
    CHECK(c.potential.kind == "sine_gordon");
    REQUIRE(c.chain);
    CHECK(c.chain->labels == std::vector<int>{0, 1, 2});
    CHECK(c.chain->velocities == std::vector<double>{-0.3, 0.3});
    CHECK(c.chain->shifts[0] == doctest::Approx(-c.chain->shifts[1]));
    REQUIRE(c.construct);
    CHECK(c.construct->max_iter == 60);
    REQUIRE(c.boost);
    CHECK(c.boost->v == doctest::Approx(0.2));
    CHECK(c.grid.t0 == doctest::Approx(12.0));
}

TEST_CASE("syntax errors carry a line number") {
    const std::string msg = message_of("[potential]\nkind = phi4\n[grid\n");
    CHECK(msg.find("line 3") != std::string::npos);
}

TEST_CASE("unknown names are rejected") {
    CHECK(message_of("[potential]\ncolour = red\n").find("colour") != std::string::npos);
    CHECK(message_of("[bogus]\nx = 1\n").find("[bogus]") != std::string::npos);
    CHECK(message_of("answer = 42\n").find("answer") != std::string::npos);
}

TEST_CASE("value errors name the field") {
    CHECK(message_of("[grid]\ndx = fast\n").find("dx") != std::string::npos);
    CHECK(message_of("[grid]\ndx = -1\n").find("[grid]") != std::string::npos);
    CHECK(message_of("[potential]\nkind = phi5\n").find("phi5") != std::string::npos);
    CHECK(message_of("[potential]\nkind = polynomial\nsearch_interval = -2, 2\n").find("coeffs") !=
          std::string::npos);
    CHECK(message_of("[potential]\nkind = trigonometric\ncos_coeffs = 1, -1\n").find("search_interval") !=
          std::string::npos);
    CHECK(message_of("[construct]\ntol = 0\n").find("tol") != std::string::npos);
    CHECK(message_of("[boost]\nv = 1\n").find("[boost]") != std::string::npos);
    CHECK(message_of("seed = -3\n").find("seed") != std::string::npos);
}

TEST_CASE("chain validation") {
    CHECK(message_of("[chain]\nlabels = 0, 1, 2\nvelocities = 0.1\nshifts = 0, 1\n").find("expected 2") !=
          std::string::npos);
    CHECK(message_of("[chain]\nlabels = 0, 1\nvelocities = 1.2\nshifts = 0\n").find("|v| < 1") !=
          std::string::npos);
    CHECK(message_of("[chain]\nlabels = 0, 1, 2\nvelocities = 0.3, 0.1\nshifts = 0, 0\n").find("increasing") !=
          std::string::npos);
}

TEST_CASE("missing optional sections") {
    const auto c = mkt::parse_config("[potential]\nkind = sine_gordon\n");
    CHECK_THROWS_AS((void)mkt::require_boost(c), mk::ConfigError);
    CHECK_THROWS_AS((void)mkt::require_chain(c), mk::ConfigError);
    CHECK_THROWS_AS((void)mkt::require_construct(c), mk::ConfigError);
    try {
        (void)mkt::require_boost(c);
    } catch (const mk::Error& e) {
        CHECK(mk::exit_code(e.category()) == 2);
    }
}

TEST_CASE("custom potentials from the file") {
    const auto c = mkt::parse_config("[potential]\nkind = polynomial\ncoeffs = 1, 0, -2, 0, 1\n"
                                     "search_interval = -2, 2\n");
    const mk::Potential W = mkt::make_potential(c.potential);
    CHECK(W.eval(0.5, 0) == doctest::Approx(std::pow(1 - 0.25, 2)));
    const auto iv = mkt::search_interval(W, c.potential);
    CHECK(iv.first == doctest::Approx(-2.0));
    CHECK(iv.second == doctest::Approx(2.0));
}

TEST_CASE("json echo keeps section order") {
    const auto c = mkt::load_config(MULTIKINK_TEST_DATA "/sine_gordon_pair.ini");
    const auto j = mkt::to_json(c);
    std::vector<std::string> keys;
    for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
    CHECK(keys == std::vector<std::string>{"seed", "potential", "chain", "grid", "construct", "boost", "spectrum",
                                           "verify", "output"});
    CHECK(j.dump() == mkt::to_json(mkt::load_config(MULTIKINK_TEST_DATA "/sine_gordon_pair.ini")).dump());
}

TEST_CASE("kink command output is deterministic") {
    auto c = mkt::load_config(MULTIKINK_TEST_DATA "/phi4_kink.ini");
    const fs::path dir = scratch("kink");
    c.output.directory = dir.string();
    const auto files = mkt::cmd_kink(c);
    CHECK(files.size() >= 3);
    std::vector<std::string> first;
    const std::vector<std::string> names{"energy.json", "tails.json", "profile_0_1.csv"};
    for (const auto& name : names) {
        REQUIRE(fs::exists(dir / name));
        first.push_back(slurp(dir / name));
    }
    (void)mkt::cmd_kink(c);
    for (std::size_t i = 0; i < names.size(); ++i) CHECK(slurp(dir / names[i]) == first[i]);

    const auto doc = nlohmann::json::parse(first[0]);
    CHECK(doc["command"] == "kink");
    CHECK(doc.contains("version"));
    CHECK(doc["config"]["output"]["directory"] == dir.string());
    const double E = doc["result"]["kinks"][0]["energy"];
    CHECK(E == doctest::Approx(4.0 * std::sqrt(2.0) / 3.0).epsilon(1e-8));
    CHECK(std::abs(static_cast<double>(doc["result"]["kinks"][0]["center_value"])) < 1e-10);
    fs::remove_all(dir);
}

TEST_CASE("sine-Gordon energy file") {
    auto c = mkt::load_config(MULTIKINK_TEST_DATA "/sine_gordon_kink.ini");
    const fs::path dir = scratch("sg_kink");
    c.output.directory = dir.string();
    (void)mkt::cmd_kink(c);
    const auto doc = nlohmann::json::parse(slurp(dir / "energy.json"));
    const double E = doc["result"]["kinks"][0]["energy"];
    CHECK(std::abs(E - 8.0) <= 1e-6);
    fs::remove_all(dir);
}

}  // TEST_SUITE
