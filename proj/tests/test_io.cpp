#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>
#include <sstream>

#include "aqc/io/config.hpp"
#include "aqc/io/csv.hpp"
#include "aqc/io/format.hpp"

using namespace aqc::io;

TEST_CASE("config parsing with sections, comments and whitespace") {
    const auto cfg = Config::parse(
        "# leading comment\n"
        "top = 1\n"
        "[sweep]\n"
        "eps_list = 1e-6, 5e-7 , 1e-7\n"
        "dt = 0.1   # trailing comment\n"
        "label = energy\n"
        "\n"
        "[run]\n"
        "seed = 42\n");
    CHECK(cfg.get_int("top", 0) == 1);
    CHECK(cfg.get_double("sweep.dt", 0.0) == 0.1);
    CHECK(cfg.get_string("sweep.label") == "energy");
    CHECK(cfg.get_int("run.seed", 0) == 42);
    CHECK(cfg.get_list("sweep.eps_list") == std::vector<double>{1e-6, 5e-7, 1e-7});
    CHECK(cfg.has("sweep.dt"));
    CHECK(!cfg.has("sweep.missing"));
    CHECK(cfg.get_double("sweep.missing", 7.5) == 7.5);
}

TEST_CASE("config parse errors carry the line number") {
    CHECK_THROWS_AS(Config::parse("[unterminated\n"), std::invalid_argument);
    CHECK_THROWS_AS(Config::parse("key value without equals\n"), std::invalid_argument);
}

TEST_CASE("config hash is canonical") {
    const auto a = Config::parse("[s]\nx = 1\ny = 2\n");
    const auto b = Config::parse("[s]\ny = 2\nx = 1\n");
    CHECK(a.hash() == b.hash());
    CHECK(a.canonical() == "s.x=1\ns.y=2\n");
    auto c = a;
    c.set("s.x", "3");
    CHECK(c.hash() != a.hash());
    CHECK(a.hash().size() == 16);
}

TEST_CASE("doubles round-trip through the shortest form") {
    for (double v : {0.1, 1.0 / 3.0, 1.74e-7, -2.05, 6.02214076e23, 0.0, 2.2250738585072014e-308}) {
        CHECK(std::stod(format_double(v)) == v);
    }
    CHECK(format_double(0.1) == "0.1"); // shortest, not 0.1000000000000000055...
}

TEST_CASE("seed derivation is deterministic and collision-free on a window") {
    CHECK(derive_seed(1, 0) == derive_seed(1, 0));
    std::set<std::uint64_t> seen;
    for (std::uint64_t master : {1ULL, 2ULL, 99999ULL}) {
        for (std::uint64_t k = 0; k < 1000; ++k) seen.insert(derive_seed(master, k));
    }
    CHECK(seen.size() == 3000);
}

TEST_CASE("fnv1a matches published reference values") {
    CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(fnv1a("foobar") == 0x85944171f73967e8ULL);
    CHECK(hex64(0xdeadbeefULL) == "00000000deadbeef");
}

TEST_CASE("csv writer emits the reproducibility header and exact doubles") {
    std::ostringstream out;
    CsvWriter w(out, "abc123", 42, "aqc test", {"eps_max", "total_time", "n"},
                {"dimensionless", "1/J", "count"});
    w.row(1e-6, 174.23, 1742);
    w.comment("one row");
    w.row(0.5e-7, 1.0 / 3.0, 3);
    const std::string text = out.str();
    CHECK(text.find("# config_hash=abc123\n") != std::string::npos);
    CHECK(text.find("# seed=42\n") != std::string::npos);
    CHECK(text.find("# units=dimensionless,1/J,count\n") != std::string::npos);

    std::istringstream in(text);
    const auto table = read_csv(in);
    REQUIRE(table.columns == std::vector<std::string>{"eps_max", "total_time", "n"});
    REQUIRE(table.rows.size() == 2);
    CHECK(table.number(0, "eps_max") == 1e-6);
    CHECK(table.number(1, "total_time") == 1.0 / 3.0); // bit-exact round trip
    CHECK(table.number(1, "n") == 3.0);
    CHECK_THROWS_AS(table.column_index("missing"), std::invalid_argument);
}

TEST_CASE("csv writer rejects mismatched row widths") {
    std::ostringstream out;
    CsvWriter w(out, "h", 0, "v", {"a", "b"});
    CHECK_THROWS_AS(w.row(1.0), std::logic_error);
    CHECK_THROWS_AS(w.row(1.0, 2.0, 3.0), std::logic_error);
}
