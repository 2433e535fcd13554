//
// Copyright 2026 The Covers Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

// Decision procedures used as subroutines and as the verification oracle:
// congruence closure for the free theory, a Fourier-Motzkin engine for
// linear rational arithmetic, Nelson-Oppen combined satisfiability, and a
// bounded brute-force residue oracle for tests.

#ifndef COVERS_SOLVER_HPP
#define COVERS_SOLVER_HPP

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "covers/kernel.hpp"

namespace covers {

// ---------------------------------------------------------------------------
// Linear atoms
// ---------------------------------------------------------------------------

enum class LinRel { le, lt, eq, neq };

// sum(coeffs[t] * t) + constant REL 0. Keys are term ids: variables in the
// purified setting, but opaque applications are tolerated and treated as
// pseudo-variables so unpurified inputs can still be projected.
struct LinAtom {
    std::map<TermId, Rational> coeffs;
    Rational constant = 0;
    LinRel rel = LinRel::le;
};

// Drops zero coefficients and rescales so the lowest-keyed coefficient has
// absolute value 1; equations and disequations are additionally sign-fixed.
LinAtom normalize(LinAtom a);

// Sum of scaled atoms, relation taken from the caller.
LinAtom lin_combine(const LinAtom& a, const Rational& ca, const LinAtom& b,
                    const Rational& cb, LinRel rel);

// Decomposes an arithmetic term into coefficients over variables and opaque
// applications. TheoryError on terms of a non-arithmetic sort.
void lin_of_term(Ctx& ctx, TermId t, const Rational& scale,
                 std::map<TermId, Rational>& coeffs, Rational& constant);

// TheoryError on predicate literals and non-arithmetic equalities.
LinAtom lin_of_literal(Ctx& ctx, const Literal& l);

// Rebuilds a literal, positive coefficients left, negative right.
Literal lit_of_lin(Ctx& ctx, const LinAtom& a);

std::string print_lin(Ctx& ctx, const LinAtom& a);

// ---------------------------------------------------------------------------
// Congruence closure
// ---------------------------------------------------------------------------

// Union-find over term ids with a congruence table and a disequality set.
// Copyable; the residue oracle copies a base graph per entailment probe.
class EGraph {
  public:
    explicit EGraph(Ctx& ctx) : ctx_(&ctx) {}

    void add_term(TermId t);
    void merge(TermId a, TermId b);
    void add_diseq(TermId a, TermId b);

    TermId find(TermId t);
    bool same_class(TermId a, TermId b);
    // true when a disequality separates the classes of a and b
    bool must_differ(TermId a, TermId b);
    bool inconsistent() const { return incons_; }

    std::vector<TermId> registered() const;
    std::vector<TermId> class_members(TermId t);

  private:
    Ctx* ctx_;
    std::map<TermId, TermId> parent_;
    std::map<TermId, std::vector<TermId>> members_;
    std::map<TermId, std::vector<TermId>> watchers_;
    std::map<std::string, TermId> sig_table_;
    std::set<std::pair<TermId, TermId>> diseqs_;
    bool incons_ = false;

    std::string signature(TermId app);
    void union_roots(TermId ra, TermId rb);
};

// ---------------------------------------------------------------------------
// Verdicts
// ---------------------------------------------------------------------------

struct SatVerdict {
    bool sat = false;
    // on unsat: a subset of the input literals that is already unsatisfiable
    std::vector<Literal> core;
    // on sat: shared-variable pairs forced equal in the model found
    std::vector<std::pair<VarId, VarId>> arrangement;
};

// The marker constant standing for "true" and the encoding of a predicate
// atom P(args) as the equation %P(args) = %tt, shared by the equational
// engines.
TermId marker_true(Ctx& ctx);
Literal encode_pred(Ctx& ctx, const Literal& l);

// Whether a literal belongs to the free fragment: an equation, disequation
// or predicate atom with no arithmetic operator or numeral inside.
bool literal_is_euf(const Ctx& ctx, const Literal& l);

// Pure congruence-closure satisfiability. TheoryError on arithmetic
// literals. Predicate atoms are encoded as equations with a fresh marker
// constant.
SatVerdict cc_sat(Ctx& ctx, const Constraint& c);

// Satisfiability of a conjunction of linear atoms over the rationals.
bool lra_sat(Ctx& ctx, const std::vector<LinAtom>& atoms);

// Projects a conjunction of linear atoms onto the complement of `drop`.
// Result is a disjunction of conjunctions, equivalent to the existential
// closure of the input over the dropped variables; disequalities are
// case-split on demand.
QFF fm_eliminate(Ctx& ctx, const std::vector<LinAtom>& atoms,
                 const std::set<VarId>& drop);

// Pairs from `pairs` whose equality is entailed by c. InfeasibleError when
// c itself is unsatisfiable.
std::vector<std::pair<VarId, VarId>> implied_equalities_lra(
    Ctx& ctx, const std::vector<LinAtom>& atoms,
    const std::vector<std::pair<VarId, VarId>>& pairs);

// Combined satisfiability over free symbols plus linear rational
// arithmetic. Purifies internally; equality propagation runs to fixpoint
// (both component theories are convex). With guess_arrangements the
// procedure instead enumerates arrangements of the shared variables, which
// also covers the multi-sorted mode used by the tame pipeline.
SatVerdict nelson_oppen_sat(Ctx& ctx, const Constraint& c,
                            bool guess_arrangements = false);

// hypothesis AND NOT conclusion unsatisfiable, by DNF split.
bool entails(Ctx& ctx, const QFF& hypothesis, const QFF& conclusion);
bool equivalent(Ctx& ctx, const QFF& a, const QFF& b);

// ---------------------------------------------------------------------------
// Bounded residue oracle (test-only)
// ---------------------------------------------------------------------------

// Strongest conjunction of clauses (width at most 2) over parameter terms
// of the given depth that is entailed by phi. The term universe is the
// parameter variables and the numerals of phi closed under the function
// symbols occurring in phi. Raises OracleLimitError when the universe or
// the number of entailment probes would exceed a fixed budget.
QFF bounded_residue_oracle(Ctx& ctx, const Constraint& phi,
                           const std::set<VarId>& evars, int depth);

}  // namespace covers

#endif  // COVERS_SOLVER_HPP
