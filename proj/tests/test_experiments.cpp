#include <catch2/catch_amalgamated.hpp>

#include <atomic>
#include <cmath>
#include <sstream>
#include <vector>

#include "aqc/experiments.hpp"
#include "aqc/models/lz.hpp"
#include "oracle_helpers.hpp"

using namespace aqc;
using namespace aqc::experiments;

TEST_CASE("logspace endpoints, count and constant ratio") {
    const auto g = logspace(1e-10, 5e-5, 8);
    REQUIRE(g.size() == 8);
    CHECK(g.front() == Catch::Approx(1e-10).epsilon(1e-12));
    CHECK(g.back() == Catch::Approx(5e-5).epsilon(1e-12));
    const double r0 = g[1] / g[0];
    for (std::size_t i = 1; i + 1 < g.size(); ++i) {
        CHECK(g[i + 1] / g[i] == Catch::Approx(r0).epsilon(1e-10));
    }
    CHECK(logspace(2.0, 9.0, 1) == std::vector<double>{2.0});
}

TEST_CASE("parallel_for covers every index exactly once") {
    const std::size_t n = 257;
    std::vector<std::atomic<int>> hits(n);
    parallel_for(n, 4, [&](std::size_t i) { hits[i].fetch_add(1); });
    for (const auto& h : hits) CHECK(h.load() == 1);
}

TEST_CASE("parallel_for result slots match serial execution") {
    auto value = [](std::size_t i) { return std::sin(static_cast<double>(i)) * 1e3; };
    std::vector<double> serial(64), parallel(64);
    parallel_for(64, 1, [&](std::size_t i) { serial[i] = value(i); });
    parallel_for(64, 5, [&](std::size_t i) { parallel[i] = value(i); });
    CHECK(serial == parallel);
}

TEST_CASE("parallel_for propagates worker exceptions") {
    CHECK_THROWS_AS(parallel_for(16, 3,
                                 [](std::size_t i) {
                                     if (i == 7) throw std::runtime_error("boom");
                                 }),
                    std::runtime_error);
}

namespace {

LzScalingConfig tiny_lz_config() {
    LzScalingConfig cfg;
    cfg.dt_grid = {0.1};
    cfg.eps_grid = logspace(1e-7, 1e-5, 3);
    return cfg;
}

} // namespace

TEST_CASE("scaling sweep rows are well-formed and fits are produced") {
    const auto res = run_lz_scaling(tiny_lz_config());
    REQUIRE(res.rows.size() == 6); // 2 measures x 3 eps
    for (const auto& row : res.rows) {
        CHECK(row.error.empty());
        CHECK(row.total_time > 0.0);
        CHECK(row.infidelity > 0.0);
        CHECK(row.infidelity < 1e-2);
        CHECK(row.mean_accepted_eps > 0.0);
        CHECK(row.mean_accepted_eps < row.eps_max);
        CHECK(row.steps > 0);
    }
    REQUIRE(res.fit_energy.has_value());
    REQUIRE(res.fit_qfi.has_value());
    // tighter tolerance -> longer run, smaller final error
    CHECK(res.fit_energy->params[1] < 0.0);
    CHECK(res.fit_qfi->params[1] < 0.0);
}

TEST_CASE("scaling sweep is deterministic across reruns and parallelism") {
    auto cfg = tiny_lz_config();
    const auto a = run_lz_scaling(cfg);
    const auto b = run_lz_scaling(cfg);
    cfg.parallelism = 3;
    const auto c = run_lz_scaling(cfg);
    REQUIRE(a.rows.size() == b.rows.size());
    REQUIRE(a.rows.size() == c.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        CHECK(a.rows[i].total_time == b.rows[i].total_time);
        CHECK(a.rows[i].infidelity == b.rows[i].infidelity);
        CHECK(a.rows[i].total_time == c.rows[i].total_time);
        CHECK(a.rows[i].infidelity == c.rows[i].infidelity);
    }
}

TEST_CASE("no power-law fit is attempted below three points") {
    auto cfg = tiny_lz_config();
    cfg.eps_grid = {1e-6};
    const auto res = run_lz_scaling(cfg);
    REQUIRE(res.rows.size() == 2);
    CHECK_FALSE(res.fit_energy.has_value());
    CHECK_FALSE(res.fit_qfi.has_value());
}

TEST_CASE("scaling CSV output is byte-stable") {
    const auto res = run_lz_scaling(tiny_lz_config());
    std::ostringstream s1, s2;
    write_lz_scaling_csv(res, 0.8, s1, "deadbeef", 42);
    write_lz_scaling_csv(res, 0.8, s2, "deadbeef", 42);
    CHECK(s1.str() == s2.str());
    CHECK(s1.str().find("deadbeef") != std::string::npos);
    CHECK(s1.str().find("qfi") != std::string::npos);
}

TEST_CASE("tolerance calibration lands the run on the target time") {
    const HamiltonianFamily fam = models::lz_family();
    AdaptiveParams base;
    base.dt = 0.1;
    base.delta = 0.8;
    const double target = 40.0;
    const double eps = calibrate_eps_for_total_time(fam, base, target, 0.05);
    base.eps_max = eps;
    const auto traj = run_adiabatic(fam, base);
    CHECK(std::abs(traj.total_time - target) <= 0.05 * target);
}

TEST_CASE("calibration honors a builder that ties other knobs to eps_max") {
    const HamiltonianFamily fam = models::lz_family();
    const double target = 25.0;
    auto make = [](double eps) {
        AdaptiveParams p;
        p.eps_max = eps;
        p.dt = 0.1;
        p.delta = 0.8;
        p.v0 = 1.2 * std::sqrt(eps) / p.dt;
        return p;
    };
    const double eps = calibrate_eps_for_total_time(fam, make, target, 0.05, -12.0, -2.0);
    const auto traj = run_adiabatic(fam, make(eps));
    CHECK(std::abs(traj.total_time - target) <= 0.05 * target);
}

TEST_CASE("paired sweep start velocities follow the per-base convention") {
    ZenoPairConfig cfg;
    cfg.v0c_fast = 2.0;
    cfg.v0_slow = 0.7;
    cfg.v0c_slow = 0.0;
    const auto pf = cfg.base_params(true, 1e-6);
    CHECK(pf.v0 == Catch::Approx(2.0 * std::sqrt(1e-6) / cfg.dt));
    const auto ps = cfg.base_params(false, 1e-6);
    CHECK(ps.v0 == Catch::Approx(0.7));
    CHECK(pf.eps_max == 1e-6);
    CHECK(ps.measure == cfg.measure);
}

TEST_CASE("hard ensemble selection is deterministic and respects the filter") {
    SatScalingConfig cfg;
    cfg.generated_per_n = 40;
    cfg.hard_per_n = 5;
    const auto a = hard_ensemble(6, cfg);
    const auto b = hard_ensemble(6, cfg);
    REQUIRE(a.size() == 5);
    REQUIRE(b.size() == 5);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].seed == b[i].seed);
        const auto r = models::dpll_solve(a[i]);
        CHECK(r.satisfiable);
        if (i + 1 < a.size()) {
            CHECK(r.iterations >= models::dpll_solve(a[i + 1]).iterations);
        }
    }
}

TEST_CASE("small instance-scaling run produces per-size statistics") {
    SatScalingConfig cfg;
    cfg.n_min = 4;
    cfg.n_max = 4;
    cfg.generated_per_n = 20;
    cfg.hard_per_n = 2;
    cfg.eps_max = 1e-4; // loose tolerance keeps the smoke run short
    const auto res = run_sat_scaling(cfg);
    REQUIRE(res.rows.size() == 2);
    CHECK(res.failed_runs == 0);
    REQUIRE(res.stats_per_n.size() == 1);
    CHECK(res.stats_per_n[0].first == 4);
    CHECK(res.stats_per_n[0].second.mean_t > 0.0);
    for (const auto& row : res.rows) {
        CHECK(row.total_time > 0.0);
        CHECK(row.ground_fidelity > 0.5);
        CHECK(row.dpll_iterations > 0);
    }
    // one size is far below the five points needed for a size-dependence fit
    CHECK_FALSE(res.fit_linear.has_value());
    CHECK_FALSE(res.fit_quadratic.has_value());
    CHECK_FALSE(res.fit_exponential.has_value());
}
