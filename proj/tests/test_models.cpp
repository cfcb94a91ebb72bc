#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <set>

#include "aqc/models/lz.hpp"
#include "aqc/models/sat.hpp"
#include "aqc/spectrum.hpp"
#include "oracle_helpers.hpp"

using namespace aqc;
using namespace aqc::models;

TEST_CASE("avoided-crossing family matches its closed forms") {
    HamiltonianFamily fam = lz_family();
    CHECK(lz_gap(0.0) == Catch::Approx(2.0).margin(1e-14));
    CHECK(lz_gap(1.0) == Catch::Approx(2.0 * std::sqrt(2.0)).margin(1e-14));
    for (double s : {0.0, 0.3, 0.7, 1.0}) {
        auto es = Eigen::SelfAdjointEigenSolver<oracle::Mat>(
            oracle::pauli_sum_matrix(1, {{1.0, "X"}, {s, "Z"}}));
        CHECK(ground_state(fam.at(s)).energy == Catch::Approx(es.eigenvalues()[0]).margin(1e-10));
        CHECK(es.eigenvalues()[1] - es.eigenvalues()[0] == Catch::Approx(lz_gap(s)).margin(1e-12));
    }
    CHECK(fam.deriv_norm_bound() == Catch::Approx(1.0).margin(1e-14));
}

TEST_CASE("instance generation is deterministic and well-formed") {
    const auto a = generate_instance(10, 4.4, 7);
    const auto b = generate_instance(10, 4.4, 7);
    CHECK(a == b);
    CHECK(a.n_vars == 10);
    CHECK(a.clauses.size() == 44); // round(4.4 * 10)
    for (const auto& c : a.clauses) {
        std::set<int> vars;
        for (const auto& l : c) {
            CHECK(l.var >= 1);
            CHECK(l.var <= 10);
            vars.insert(l.var);
        }
        CHECK(vars.size() == 3); // three distinct variables per clause
    }
    const auto other = generate_instance(10, 4.4, 8);
    CHECK(!(a == other));
    CHECK_THROWS_AS(generate_instance(2, 4.4, 0), std::invalid_argument);
}

TEST_CASE("clause count rounds from the density") {
    CHECK(generate_instance(5, 4.4, 1).clauses.size() == 22);
    CHECK(generate_instance(7, 4.4, 1).clauses.size() == 31); // round(30.8)
    CHECK(generate_instance(20, 4.4, 1).clauses.size() == 88);
}

TEST_CASE("satisfiability probability falls across the density transition") {
    // at n = 12, alpha = 2 is almost surely satisfiable and alpha = 7 rarely is
    int sat_low = 0, sat_high = 0;
    const int trials = 40;
    for (int k = 0; k < trials; ++k) {
        if (dpll_solve(generate_instance(12, 2.0, 1000 + k)).satisfiable) ++sat_low;
        if (dpll_solve(generate_instance(12, 7.0, 2000 + k)).satisfiable) ++sat_high;
    }
    CHECK(sat_low >= trials - 2);
    CHECK(sat_high <= 5);
}

TEST_CASE("DPLL agrees with brute force on random instances") {
    for (int k = 0; k < 100; ++k) {
        const auto inst = generate_instance(10, 4.4, 5000 + k);
        const auto all = brute_force_satisfying(inst);
        const auto res = dpll_solve(inst);
        CHECK(res.satisfiable == !all.empty());
        if (res.satisfiable) {
            REQUIRE(res.assignment.has_value());
            std::uint64_t idx = 0;
            for (int v = 0; v < inst.n_vars; ++v) {
                if ((*res.assignment)[v]) idx |= std::uint64_t{1} << v;
            }
            CHECK(std::find(all.begin(), all.end(), idx) != all.end());
        }
    }
}

namespace {

// C(m+1, 2) clauses encoding "m+1 pigeons in m holes", unsatisfiable for any
// m; holes are one-hot columns. Only the 3-literal at-least-one rows fit the
// fixed clause arity, so use m = 3 holes, 4 pigeons, with pairwise exclusions
// expanded through auxiliary padding variables instead. Simpler: a direct
// 3-CNF contradiction over few variables.
SatInstance contradiction_instance() {
    // (x1|x2|x3) and every clause flipping one subset sign: all 8 sign
    // patterns over the same 3 variables force a contradiction
    SatInstance inst;
    inst.n_vars = 3;
    for (int mask = 0; mask < 8; ++mask) {
        Clause c;
        for (int k = 0; k < 3; ++k) c[k] = {k + 1, (mask >> k & 1) == 1};
        inst.clauses.push_back(c);
    }
    return inst;
}

} // namespace

TEST_CASE("DPLL refutes a complete sign-pattern contradiction") {
    const auto inst = contradiction_instance();
    CHECK(brute_force_satisfying(inst).empty());
    const auto res = dpll_solve(inst);
    CHECK(!res.satisfiable);
    CHECK(!res.assignment.has_value());
}

TEST_CASE("hard-instance selection orders by branching count") {
    std::vector<SatInstance> pool;
    for (int k = 0; k < 30; ++k) pool.push_back(generate_instance(10, 4.4, 9000 + k));
    const auto hard = select_hard_instances(pool, 5, HardFilter::SatisfiableOnly);
    REQUIRE(hard.size() == 5);
    std::uint64_t prev = std::numeric_limits<std::uint64_t>::max();
    for (const auto& inst : hard) {
        const auto r = dpll_solve(inst);
        CHECK(r.satisfiable);
        CHECK(r.iterations <= prev);
        prev = r.iterations;
    }
    // the hardest selected instance dominates every unselected satisfiable one
    std::uint64_t best_unselected = 0;
    for (const auto& inst : pool) {
        if (std::find(hard.begin(), hard.end(), inst) != hard.end()) continue;
        const auto r = dpll_solve(inst);
        if (r.satisfiable) best_unselected = std::max(best_unselected, r.iterations);
    }
    CHECK(dpll_solve(hard.back()).iterations >= best_unselected);
    CHECK_THROWS_AS(select_hard_instances(pool, pool.size() + 1), std::invalid_argument);
}

TEST_CASE("unique-solution filter keeps only single-model instances") {
    std::vector<SatInstance> pool;
    for (int k = 0; k < 60; ++k) pool.push_back(generate_instance(8, 4.4, 100 + k));
    std::size_t unique_count = 0;
    for (const auto& inst : pool) {
        if (brute_force_satisfying(inst).size() == 1) ++unique_count;
    }
    if (unique_count == 0) return;
    const auto picked = select_hard_instances(pool, unique_count, HardFilter::UniqueSolutionOnly);
    for (const auto& inst : picked) CHECK(brute_force_satisfying(inst).size() == 1);
}

TEST_CASE("DIMACS round trip preserves the instance") {
    const auto inst = generate_instance(9, 4.4, 31);
    const auto back = parse_dimacs(emit_dimacs(inst));
    CHECK(inst == back);
    CHECK(back.alpha == Catch::Approx(static_cast<double>(inst.clauses.size()) / 9));
}

TEST_CASE("DIMACS parser accepts comments and split clauses") {
    const auto inst = parse_dimacs("c a comment\np cnf 4 2\n1 -2 3 0\n-1\n2 4 0\n");
    CHECK(inst.n_vars == 4);
    REQUIRE(inst.clauses.size() == 2);
    CHECK(inst.clauses[0][1].as_dimacs() == -2);
    CHECK(inst.clauses[1][0].as_dimacs() == -1);
}

TEST_CASE("DIMACS parser rejects malformed input") {
    CHECK_THROWS_AS(parse_dimacs(""), DimacsError);
    CHECK_THROWS_AS(parse_dimacs("p cnf 3\n1 2 3 0\n"), DimacsError);
    CHECK_THROWS_AS(parse_dimacs("1 2 3 0\np cnf 3 1\n"), DimacsError);
    CHECK_THROWS_AS(parse_dimacs("p cnf 3 1\n1 2 0\n"), DimacsError);      // not 3-literal
    CHECK_THROWS_AS(parse_dimacs("p cnf 3 1\n1 2 4 0\n"), DimacsError);    // var out of range
    CHECK_THROWS_AS(parse_dimacs("p cnf 3 2\n1 2 3 0\n"), DimacsError);    // count mismatch
    CHECK_THROWS_AS(parse_dimacs("p cnf 3 1\n1 2 3\n"), DimacsError);      // unterminated
    CHECK_THROWS_AS(parse_dimacs("p cnf 3 1\n1 2 x 0\n"), DimacsError);    // junk token
    try {
        parse_dimacs("p cnf 3 1\nc ok\n1 2 0\n");
        FAIL("expected DimacsError");
    } catch (const DimacsError& e) {
        CHECK(e.line == 3);
    }
}

TEST_CASE("clause-penalty diagonal counts violated clauses") {
    const auto inst = generate_instance(6, 4.4, 77);
    const auto ham = sat_hamiltonians(inst);
    const auto& diag = ham.h_p.diagonal();
    REQUIRE(diag.size() == 64);
    for (std::uint64_t a = 0; a < 64; ++a) {
        int violated = 0;
        for (const auto& c : inst.clauses) {
            bool sat = false;
            for (const auto& l : c) sat |= (((a >> (l.var - 1)) & 1) == (l.negated ? 0u : 1u));
            if (!sat) ++violated;
        }
        CHECK(diag[a] == Catch::Approx(static_cast<double>(violated)).margin(1e-10));
    }
}

TEST_CASE("penalty ground energy is zero exactly when satisfiable") {
    int seen_sat = 0, seen_unsat = 0;
    for (int k = 0; k < 12; ++k) {
        const auto inst = generate_instance(8, 4.4, 600 + k);
        const auto ham = sat_hamiltonians(inst);
        const double e0 = ground_state(ham.h_p).energy;
        const bool satisfiable = dpll_solve(inst).satisfiable;
        if (satisfiable) {
            CHECK(e0 == Catch::Approx(0.0).margin(1e-9));
            ++seen_sat;
        } else {
            CHECK(e0 > 0.5); // clause counts are integers
            ++seen_unsat;
        }
    }
    CHECK(seen_sat > 0);
    CHECK(seen_unsat > 0);
}

TEST_CASE("begin Hamiltonian has the uniform superposition as ground state") {
    const auto inst = generate_instance(6, 4.4, 41);
    const auto ham = sat_hamiltonians(inst);
    const StateVector plus = ham.initial_state();
    CHECK(expectation(plus, ham.h_b) == Catch::Approx(0.0).margin(1e-10));
    CHECK(variance(plus, ham.h_b) == Catch::Approx(0.0).margin(1e-10));
    CHECK(ground_state(ham.h_b).energy == Catch::Approx(0.0).margin(1e-8));
}

TEST_CASE("begin-field weighting follows clause membership counts") {
    const auto inst = generate_instance(6, 4.4, 42);
    std::vector<int> degree(6, 0);
    for (const auto& c : inst.clauses) {
        for (const auto& l : c) ++degree[l.var - 1];
    }
    const auto farhi = sat_hamiltonians(inst, BeginField::Farhi);
    const auto uniform = sat_hamiltonians(inst, BeginField::Uniform);

    // <0...0| H_B |0...0> = sum_v d_v / 2 since X flips the state
    StateVector zero = StateVector::basis_state(6, 0);
    double half_degree_sum = 0.0;
    int active = 0;
    for (int v = 0; v < 6; ++v) {
        half_degree_sum += degree[v] / 2.0;
        if (degree[v] > 0) ++active;
    }
    CHECK(expectation(zero, farhi.h_b) == Catch::Approx(half_degree_sum).margin(1e-10));
    CHECK(expectation(zero, uniform.h_b) == Catch::Approx(active / 2.0).margin(1e-10));
}

TEST_CASE("interpolated family has the right endpoints") {
    const auto inst = generate_instance(5, 4.4, 13);
    const auto ham = sat_hamiltonians(inst);
    HamiltonianFamily fam = ham.family();
    StateVector psi = StateVector::random_state(5, 3);
    CHECK(fam.expectation(0.0, psi) == Catch::Approx(expectation(psi, ham.h_b)).margin(1e-10));
    CHECK(fam.expectation(1.0, psi) == Catch::Approx(expectation(psi, ham.h_p)).margin(1e-10));
}

TEST_CASE("problem ground fidelity sums satisfying amplitudes") {
    const auto inst = generate_instance(5, 4.4, 19);
    const auto sol = brute_force_satisfying(inst);
    if (sol.empty()) return;
    const auto ham = sat_hamiltonians(inst);
    StateVector psi = StateVector::uniform_plus(5);
    CHECK(ham.problem_ground_fidelity(psi) ==
          Catch::Approx(static_cast<double>(sol.size()) / 32.0).margin(1e-10));
    StateVector basis = StateVector::basis_state(5, sol.front());
    CHECK(ham.problem_ground_fidelity(basis) == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("clause deduplication is order-preserving") {
    SatInstance inst;
    inst.n_vars = 4;
    Clause a = {{{1, false}, {2, true}, {3, false}}};
    Clause a_perm = {{{3, false}, {1, false}, {2, true}}};
    Clause b = {{{2, false}, {3, false}, {4, false}}};
    inst.clauses = {a, a_perm, b, a};
    const auto out = dedup_clauses(inst);
    REQUIRE(out.clauses.size() == 2);
    CHECK(out.clauses[0] == a);
    CHECK(out.clauses[1] == b);
}
