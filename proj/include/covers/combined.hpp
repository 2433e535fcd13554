// Copyright 2026 The Covers Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or
// implied. See the License for the specific language governing
// permissions and limitations under the License.

#ifndef COVERS_COMBINED_HPP
#define COVERS_COMBINED_HPP

#include <functional>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "covers/kernel.hpp"
#include "covers/solver.hpp"

namespace covers {

// Acyclic explicit definitions. Each term uses only parameters and the
// variables defined by earlier entries.
using ExplDef = std::vector<std::pair<VarId, TermId>>;

// exists z (defs(z, x) and exists e (psi1(x, z, e) and psi2(x, z, e))).
// Both sides carry the same variable roles: params are the original
// parameters, defined are the entries of expl, exists are the variables
// still truly existential.
struct WorkingFormula {
    ExplDef expl;
    Constraint psi1;
    Constraint psi2;
};

// A component theory plugged into the combination loop. The flags gate
// admissibility; the procedures receive pure constraints whose roles
// mark the current existentials (defined variables are folded into the
// parameters before the call).
struct TheoryHandle {
    std::string name;
    bool convex = false;
    bool stably_infinite = false;
    bool equality_interpolating = false;
    std::function<QFF(Ctx&, const Constraint&)> cover;
    std::function<QFF(Ctx&, const Constraint&, VarId)> impl_def;
    std::function<std::optional<TermId>(Ctx&, const Constraint&, VarId)>
        interp_term;
};

TheoryHandle euf_handle();
TheoryHandle lra_handle();
// Integer difference arithmetic. Not convex, so the combination loop
// rejects it; the handle exists only to exercise the rejection path.
TheoryHandle idl_handle();

struct CombineOptions {
    // receives one line per notable event: partitions, implicit
    // definability formulas, explicit definitions, branch results
    std::function<void(const std::string&)> trace;
};

// Moves every existential with a definitional literal e = t (t free of
// existentials) into the explicit definitions, removing the literal from
// its side. Runs to a fixpoint.
WorkingFormula detect_explicit_defs(Ctx& ctx, WorkingFormula w);

// Reverse-order substitution of the definitions into f. The result is
// free of the defined variables; a leftover one raises DanglingDefError.
QFF unravel(Ctx& ctx, const ExplDef& expl, QFF f);

// True when each side refutes the implicit definability of every
// remaining existential.
bool is_terminal(Ctx& ctx, const WorkingFormula& w, const TheoryHandle& h1,
                 const TheoryHandle& h2);

// Adds one cube of the negated implicit definability formulas to each
// side, per the terminal-by-construction case split. Inconsistent
// outputs are dropped.
std::vector<WorkingFormula> step1(Ctx& ctx, const WorkingFormula& w,
                                  const TheoryHandle& h1,
                                  const TheoryHandle& h2);

// Case split on the implicit definability of e on one side: one output
// per cube, each recording an interpolating term for e and moving e to
// the defined variables.
std::vector<WorkingFormula> step2i(Ctx& ctx, const WorkingFormula& w, VarId e,
                                   int side, const TheoryHandle& h1,
                                   const TheoryHandle& h2);

// Exhaustive expansion into terminal working formulas.
std::vector<WorkingFormula> to_terminal(Ctx& ctx, const WorkingFormula& w,
                                        const TheoryHandle& h1,
                                        const TheoryHandle& h2);

// Covers both sides of a terminal formula, conjoins, unravels the
// definitions, and simplifies. The result mentions parameters only.
QFF terminal_cover(Ctx& ctx, const WorkingFormula& w, const TheoryHandle& h1,
                   const TheoryHandle& h2);

// The cover of phi over the combined theory: purification, explicit
// definition detection, partition guessing, the working-formula loop,
// and terminal assembly. Verifies internally that each partition branch
// is entailed by its strengthened input.
QFF combined_cover(Ctx& ctx, const Constraint& phi,
                   const std::set<VarId>& evars, const TheoryHandle& h1,
                   const TheoryHandle& h2, const CombineOptions& opts = {});

}  // namespace covers

#endif  // COVERS_COMBINED_HPP
