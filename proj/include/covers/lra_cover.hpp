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

#ifndef COVERS_LRA_COVER_HPP
#define COVERS_LRA_COVER_HPP

#include <optional>
#include <set>
#include <vector>

#include "covers/kernel.hpp"
#include "covers/solver.hpp"

namespace covers {

// Conjunction of linear atoms with a designated set of existentially
// quantified variables. Every other variable is a parameter.
struct LinSystem {
    std::vector<LinAtom> atoms;
    std::set<VarId> evars;
};

// Projects the existential variables out. Linear rational arithmetic
// admits quantifier elimination, so the result is equivalent to the
// existential closure of the system, not merely a cover of it.
QFF lra_cover(Ctx& ctx, const LinSystem& sys);

// A parameter-only linear term t with sys entailing e = t. Available
// exactly when the system conjoined with a primed copy of itself forces
// e equal to its primed copy; returns nothing otherwise. The term is
// read off by Gaussian elimination from the equations of the system
// together with its tight inequalities.
std::optional<TermId> lra_interpolating_term(Ctx& ctx, const LinSystem& sys,
                                             VarId e);

// The weakest parameter formula that, conjoined with two copies of the
// system, forces e equal to its primed copy. Computed by negating the
// projection of the doubled system extended with e != e', then rewritten
// relative to the system's own projection so entailed conjuncts stay
// visible and one-sided bounds tighten to equations.
QFF lra_impl_def(Ctx& ctx, const LinSystem& sys, VarId e,
                 const std::set<VarId>& params);

}  // namespace covers

#endif  // COVERS_LRA_COVER_HPP
