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
//
// Covers for tame multi-sorted combinations. The container theory T1
// owns its element sorts outright and reaches the data sorts only as
// codomains of its function symbols; the data theory T2 lives entirely
// on the shared sorts. Under that shape a non-convex data theory is
// fine, only stable infiniteness over the shared sorts is required.

#ifndef COVERS_TAME_HPP
#define COVERS_TAME_HPP

#include <set>
#include <vector>

#include "covers/combined.hpp"
#include "covers/kernel.hpp"

namespace covers {

// The function and predicate symbols one side contributes.
struct Signature {
    std::vector<SymId> funs;
    std::vector<PredId> preds;
};

// Collects the declared symbols of one side from the context.
Signature signature_of(const Ctx& ctx, Side side);

// True iff no symbol of sig1 takes a shared-sort argument. Equality is
// built in and exempt. Symbols listed in sig2 are unrestricted.
bool check_tame(const Ctx& ctx, const Signature& sig1,
                const Signature& sig2);

// A two-part primitive formula
//
//   exists e, eta ( phi(e, x)  and  psi(eta, xi, t(e, x)) )
//
// phi is a conjunction of T1-literals with existentials e and
// parameters x over element sorts. psi is a conjunction of T2-literals
// with existentials eta and parameters xi over shared sorts; its atoms
// may contain T1-terms t(e, x) at shared-sort positions.
struct TameProblem {
    Constraint phi;
    Constraint psi;
};

// Step one of the cover computation: every T1-application inside psi is
// abstracted by a fresh shared-sort variable carrying a definitional
// equality appended to phi. In the result psi mentions T1 only through
// those variables; they are parameters for phi (the T1 cover keeps
// them) and existentials for psi (the T2 cover removes them).
TameProblem tame_flatten(Ctx& ctx, const TameProblem& p);

// The full three-step computation: flatten, T1-cover of the phi part,
// then per DNF disjunct a T2-cover of the psi part strengthened with
// the disjunct's shared-sort residue, with the T1-terms restored in the
// result. Throws UnsupportedCombinationError when a handle lacks stable
// infiniteness or the declared signature is not tame.
QFF tame_cover(Ctx& ctx, const TameProblem& p, const TheoryHandle& h1,
               const TheoryHandle& h2, const CombineOptions& opts = {});

}  // namespace covers

#endif  // COVERS_TAME_HPP
