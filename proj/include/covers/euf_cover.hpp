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

#pragma once

#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "covers/kernel.hpp"

namespace covers {

// A literal guarded by equations between terms free of existential
// variables: cond[0] ∧ cond[1] ∧ ... implies lit.
struct CLit {
    Literal lit;
    std::vector<std::pair<TermId, TermId>> cond;
};

std::string print_clit(const Ctx& ctx, const CLit& c);

// Saturation fixpoint. `literals` is the active set, oriented so that the
// left side of each equation is the bigger one and any term containing an
// existential variable exceeds any parameter term. `refutations` lists the
// conditions under which the input is contradictory. `derivation` is a
// line-per-inference log.
struct OrderedLiteralSet {
    std::vector<CLit> literals;
    std::vector<std::vector<std::pair<TermId, TermId>>> refutations;
    std::vector<std::string> derivation;
    bool unsat = false;
};

// Saturates phi under rewriting where the existential variables are
// maximal. Input literals are flattened with fresh defined names first;
// the returned set has the names for parameter terms unfolded again.
OrderedLiteralSet euf_saturate(Ctx& ctx, const Constraint& phi,
                               const std::set<VarId>& evars);

// Strongest consequence of phi, in the free theory, that mentions no
// variable from evars. Unsatisfiable input yields false. TheoryError on
// arithmetic literals.
QFF euf_cover(Ctx& ctx, const Constraint& phi, const std::set<VarId>& evars);

// A term over the parameters of a and b provably equal to e under the
// conjunction of both constraints, or nothing when no such term exists
// among the congruence classes.
std::optional<TermId> euf_interpolating_term(Ctx& ctx, const Constraint& a,
                                             const Constraint& b, VarId e);

}  // namespace covers
