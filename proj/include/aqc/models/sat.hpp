#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "aqc/hamiltonian_family.hpp"
#include "aqc/observable.hpp"
#include "aqc/state_vector.hpp"

namespace aqc::models {

struct Literal {
    int var = 0; // 1-based
    bool negated = false;

    int as_dimacs() const { return negated ? -var : var; }
    bool operator==(const Literal&) const = default;
};

using Clause = std::array<Literal, 3>;

/// A random 3-SAT instance: n Boolean variables, m = round(alpha*n) clauses
/// of three distinct variables each.
struct SatInstance {
    int n_vars = 0;
    std::vector<Clause> clauses;
    std::uint64_t seed = 0;
    double alpha = 0.0;

    bool operator==(const SatInstance& o) const {
        return n_vars == o.n_vars && clauses == o.clauses;
    }
};

inline bool clause_satisfied(const Clause& c, const std::vector<std::int8_t>& assignment) {
    for (const auto& l : c) {
        const std::int8_t a = assignment[l.var - 1];
        if (a >= 0 && (a == 1) != l.negated) return true;
    }
    return false;
}

/// Uniform random 3-SAT model: per clause, 3 distinct uniform variables with
/// independent uniform negation flags. Duplicate clauses are permitted.
inline SatInstance generate_instance(int n, double alpha, std::uint64_t seed) {
    if (n < 3) throw std::invalid_argument("generate_instance: need n >= 3");
    SatInstance inst;
    inst.n_vars = n;
    inst.seed = seed;
    inst.alpha = alpha;
    const int m = static_cast<int>(std::llround(alpha * n));
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> pick_var(1, n);
    std::uniform_int_distribution<int> pick_sign(0, 1);
    for (int i = 0; i < m; ++i) {
        Clause c;
        for (int k = 0; k < 3; ++k) {
            int v;
            bool dup;
            do {
                v = pick_var(rng);
                dup = false;
                for (int j = 0; j < k; ++j) dup |= (c[j].var == v);
            } while (dup);
            c[k] = {v, pick_sign(rng) == 1};
        }
        inst.clauses.push_back(c);
    }
    return inst;
}

inline SatInstance dedup_clauses(const SatInstance& inst) {
    SatInstance out = inst;
    std::vector<Clause> seen;
    out.clauses.clear();
    auto key = [](Clause c) {
        std::sort(c.begin(), c.end(),
                  [](const Literal& a, const Literal& b) { return a.as_dimacs() < b.as_dimacs(); });
        return c;
    };
    std::vector<Clause> keys;
    for (const auto& c : inst.clauses) {
        Clause k = key(c);
        if (std::find(keys.begin(), keys.end(), k) == keys.end()) {
            keys.push_back(k);
            out.clauses.push_back(c);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// DIMACS CNF
// ---------------------------------------------------------------------------

struct DimacsError : std::runtime_error {
    int line;
    DimacsError(const std::string& what, int line_)
        : std::runtime_error("DIMACS line " + std::to_string(line_) + ": " + what), line(line_) {}
};

/// Standard "p cnf n m" format; clauses are zero-terminated. In strict mode
/// (the default) clauses must have exactly three literals.
inline SatInstance parse_dimacs(const std::string& text, bool strict_3sat = true) {
    SatInstance inst;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    bool have_header = false;
    int declared_clauses = 0;
    std::vector<int> current;

    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == 'c') continue;
        if (line[0] == 'p') {
            if (have_header) throw DimacsError("duplicate header", line_no);
            std::istringstream hs(line);
            std::string p, cnf;
            if (!(hs >> p >> cnf >> inst.n_vars >> declared_clauses) || cnf != "cnf" ||
                inst.n_vars < 1 || declared_clauses < 0) {
                throw DimacsError("malformed header, expected 'p cnf <vars> <clauses>'", line_no);
            }
            have_header = true;
            continue;
        }
        if (!have_header) throw DimacsError("clause before header", line_no);
        std::istringstream cs(line);
        int lit;
        while (cs >> lit) {
            if (lit == 0) {
                if (strict_3sat && current.size() != 3) {
                    throw DimacsError("clause is not 3-literal", line_no);
                }
                if (current.size() != 3) {
                    throw DimacsError("only 3-literal clauses are supported", line_no);
                }
                Clause c;
                for (int k = 0; k < 3; ++k) c[k] = {std::abs(current[k]), current[k] < 0};
                inst.clauses.push_back(c);
                current.clear();
            } else {
                if (std::abs(lit) > inst.n_vars) {
                    throw DimacsError("literal " + std::to_string(lit) + " out of range", line_no);
                }
                current.push_back(lit);
            }
        }
        std::string rest;
        if (cs.clear(), cs >> rest) throw DimacsError("unexpected token '" + rest + "'", line_no);
    }
    if (!have_header) throw DimacsError("missing header", line_no);
    if (!current.empty()) throw DimacsError("unterminated clause at end of input", line_no);
    if (static_cast<int>(inst.clauses.size()) != declared_clauses) {
        throw DimacsError("clause count differs from header", line_no);
    }
    inst.alpha = static_cast<double>(inst.clauses.size()) / inst.n_vars;
    return inst;
}

inline std::string emit_dimacs(const SatInstance& inst) {
    std::string out = "p cnf " + std::to_string(inst.n_vars) + " " +
                      std::to_string(inst.clauses.size()) + "\n";
    for (const auto& c : inst.clauses) {
        out += std::to_string(c[0].as_dimacs()) + " " + std::to_string(c[1].as_dimacs()) + " " +
               std::to_string(c[2].as_dimacs()) + " 0\n";
    }
    return out;
}

// ---------------------------------------------------------------------------
// DPLL
// ---------------------------------------------------------------------------

struct DpllResult {
    bool satisfiable = false;
    std::optional<std::vector<bool>> assignment;
    std::uint64_t iterations = 0; // branching decisions
};

namespace detail {

enum class PropagateOutcome { Conflict, Satisfied, Open };

inline PropagateOutcome propagate(const SatInstance& inst, std::vector<std::int8_t>& assign) {
    bool changed = true;
    while (changed) {
        changed = false;
        // unit propagation
        bool all_satisfied = true;
        for (const auto& c : inst.clauses) {
            if (clause_satisfied(c, assign)) continue;
            all_satisfied = false;
            int unassigned = 0;
            const Literal* unit = nullptr;
            for (const auto& l : c) {
                if (assign[l.var - 1] < 0) {
                    ++unassigned;
                    unit = &l;
                }
            }
            if (unassigned == 0) return PropagateOutcome::Conflict;
            if (unassigned == 1) {
                assign[unit->var - 1] = unit->negated ? 0 : 1;
                changed = true;
            }
        }
        if (all_satisfied) return PropagateOutcome::Satisfied;
        if (changed) continue;
        // pure literal elimination over not-yet-satisfied clauses
        std::vector<std::int8_t> polarity(inst.n_vars, 0); // 1 pos, 2 neg, 3 both
        for (const auto& c : inst.clauses) {
            if (clause_satisfied(c, assign)) continue;
            for (const auto& l : c) {
                if (assign[l.var - 1] < 0) polarity[l.var - 1] |= (l.negated ? 2 : 1);
            }
        }
        for (int v = 0; v < inst.n_vars; ++v) {
            if (assign[v] < 0 && (polarity[v] == 1 || polarity[v] == 2)) {
                assign[v] = (polarity[v] == 1) ? 1 : 0;
                changed = true;
            }
        }
    }
    return PropagateOutcome::Open;
}

inline int pick_branch_variable(const SatInstance& inst, const std::vector<std::int8_t>& assign) {
    std::vector<int> freq(inst.n_vars, 0);
    for (const auto& c : inst.clauses) {
        if (clause_satisfied(c, assign)) continue;
        for (const auto& l : c) {
            if (assign[l.var - 1] < 0) ++freq[l.var - 1];
        }
    }
    int best = -1, best_freq = -1;
    for (int v = 0; v < inst.n_vars; ++v) {
        if (assign[v] < 0 && freq[v] > best_freq) {
            best = v;
            best_freq = freq[v];
        }
    }
    return best;
}

inline bool dpll_recurse(const SatInstance& inst, std::vector<std::int8_t> assign,
                         std::uint64_t& iterations, std::vector<std::int8_t>& model) {
    switch (propagate(inst, assign)) {
        case PropagateOutcome::Conflict: return false;
        case PropagateOutcome::Satisfied: model = assign; return true;
        case PropagateOutcome::Open: break;
    }
    const int v = pick_branch_variable(inst, assign);
    ++iterations;
    for (std::int8_t value : {std::int8_t{1}, std::int8_t{0}}) {
        auto branch = assign;
        branch[v] = value;
        if (dpll_recurse(inst, std::move(branch), iterations, model)) return true;
    }
    return false;
}

} // namespace detail

/// Complete DPLL search with unit propagation and pure-literal elimination.
/// Branches on the most-frequent unassigned variable, true first, so the
/// iteration count is a reproducible hardness proxy.
inline DpllResult dpll_solve(const SatInstance& inst) {
    DpllResult res;
    std::vector<std::int8_t> assign(inst.n_vars, -1), model;
    res.satisfiable = detail::dpll_recurse(inst, assign, res.iterations, model);
    if (res.satisfiable) {
        std::vector<bool> bits(inst.n_vars);
        for (int v = 0; v < inst.n_vars; ++v) bits[v] = model[v] == 1; // unassigned -> false
        res.assignment = std::move(bits);
    }
    return res;
}

/// All satisfying assignments as basis-state indices (bit v-1 = variable v,
/// false = 0). Exhaustive; guarded to n <= 24.
inline std::vector<std::uint64_t> brute_force_satisfying(const SatInstance& inst) {
    if (inst.n_vars > 24) throw std::invalid_argument("brute_force_satisfying: n too large");
    std::vector<std::uint64_t> out;
    const std::uint64_t total = std::uint64_t{1} << inst.n_vars;
    for (std::uint64_t a = 0; a < total; ++a) {
        bool ok = true;
        for (const auto& c : inst.clauses) {
            bool sat = false;
            for (const auto& l : c) sat |= (((a >> (l.var - 1)) & 1) == (l.negated ? 0u : 1u));
            if (!sat) { ok = false; break; }
        }
        if (ok) out.push_back(a);
    }
    return out;
}

enum class HardFilter { None, SatisfiableOnly, UniqueSolutionOnly };

/// Classically hardest instances by DPLL iteration count, ties broken by
/// seed ascending. Optionally restricted to satisfiable instances or to
/// instances with a unique satisfying assignment (brute-force checked).
inline std::vector<SatInstance> select_hard_instances(const std::vector<SatInstance>& instances,
                                                      std::size_t count,
                                                      HardFilter filter = HardFilter::SatisfiableOnly,
                                                      const std::vector<DpllResult>* precomputed =
                                                          nullptr) {
    if (instances.empty()) throw std::invalid_argument("select_hard_instances: empty input");
    struct Entry {
        const SatInstance* inst;
        std::uint64_t iterations;
    };
    std::vector<Entry> pool;
    for (std::size_t i = 0; i < instances.size(); ++i) {
        DpllResult r = precomputed ? (*precomputed)[i] : dpll_solve(instances[i]);
        if (filter != HardFilter::None && !r.satisfiable) continue;
        if (filter == HardFilter::UniqueSolutionOnly &&
            brute_force_satisfying(instances[i]).size() != 1) {
            continue;
        }
        pool.push_back({&instances[i], r.iterations});
    }
    if (count > pool.size()) {
        throw std::invalid_argument("select_hard_instances: fewer eligible instances than count");
    }
    std::stable_sort(pool.begin(), pool.end(), [](const Entry& a, const Entry& b) {
        if (a.iterations != b.iterations) return a.iterations > b.iterations;
        return a.inst->seed < b.inst->seed;
    });
    std::vector<SatInstance> out;
    for (std::size_t i = 0; i < count; ++i) out.push_back(*pool[i].inst);
    return out;
}

// ---------------------------------------------------------------------------
// Hamiltonian compilation
// ---------------------------------------------------------------------------

enum class BeginField { Farhi, Uniform };

/// Annealing pair for one instance: transverse-field begin Hamiltonian and
/// diagonal clause-penalty Hamiltonian, interpolated as (1-s) H_B + s H_P.
struct SatHamiltonianFamily {
    Observable h_b;
    Observable h_p;
    std::vector<int> free_vars; // variables in no clause (d_v = 0)
    int n_qubits = 0;

    HamiltonianFamily family() const { return HamiltonianFamily::interpolation(h_b, h_p); }

    /// |+>^n, the ground state of H_B.
    StateVector initial_state() const { return StateVector::uniform_plus(n_qubits); }

    /// Squared overlap with the ground space of H_P (= satisfying assignments
    /// when the instance is satisfiable). H_P is diagonal, so this is a sum
    /// over minimal-diagonal entries.
    double problem_ground_fidelity(const StateVector& psi) const {
        const auto& d = h_p.diagonal();
        const double e0 = *std::min_element(d.begin(), d.end());
        double f = 0.0;
        for (std::size_t j = 0; j < d.size(); ++j) {
            if (d[j] <= e0 + 1e-9) f += std::norm(psi[j]);
        }
        return f;
    }
};

/// Compile an instance into H_B/H_P. Per clause, H_P gains the diagonal
/// projector onto the clause's single violating assignment, expanded into
/// Z-strings; a positive literal x_v is false on the Z=+1 eigenspace
/// (bit 0 = false), a negated one on Z=-1. H_B weights each (1-X_v)/2 by the
/// number of clauses containing v (Farhi weighting) or uniformly.
inline SatHamiltonianFamily sat_hamiltonians(const SatInstance& inst,
                                             BeginField begin_field = BeginField::Farhi) {
    const int n = inst.n_vars;
    SatHamiltonianFamily out;
    out.n_qubits = n;

    std::vector<std::pair<double, std::string>> p_terms;
    for (const auto& c : inst.clauses) {
        // expand prod_k (1 + sign_k Z_k)/2, sign = +1 for positive literal
        for (int mask = 0; mask < 8; ++mask) {
            double coeff = 1.0 / 8.0;
            std::string pauli(n, 'I');
            for (int k = 0; k < 3; ++k) {
                if (mask & (1 << k)) {
                    pauli[c[k].var - 1] = 'Z';
                    if (c[k].negated) coeff = -coeff;
                }
            }
            p_terms.emplace_back(coeff, pauli);
        }
    }
    out.h_p = Observable(n, std::move(p_terms));

    std::vector<int> degree(n, 0);
    for (const auto& c : inst.clauses) {
        for (const auto& l : c) ++degree[l.var - 1];
    }
    std::vector<std::pair<double, std::string>> b_terms;
    for (int v = 0; v < n; ++v) {
        const double d_v = begin_field == BeginField::Farhi ? degree[v] : 1.0;
        if (degree[v] == 0) out.free_vars.push_back(v + 1);
        if (d_v == 0.0) continue;
        std::string ident(n, 'I'), x(n, 'I');
        x[v] = 'X';
        b_terms.emplace_back(d_v / 2.0, ident);
        b_terms.emplace_back(-d_v / 2.0, x);
    }
    out.h_b = Observable(n, std::move(b_terms));
    return out;
}

} // namespace aqc::models
