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

// Problem files and the command-line driver. A problem is a list of
// s-expression commands:
//
//   (declare-sort elem)
//   (declare-fun f (elem) num)
//   (declare-var x num :role param)
//   (declare-var e num :role exists)
//   (set-theory euf+lra)
//   (assert (= e (f x)))
//   (compute-cover)
//
// Terms use the same syntax the printer emits: (+ a b c), (* 2 x),
// (f a), numerals like -1 and 1/2. Atoms are (= a b), (distinct a b),
// (<= a b), (< a b), relation applications, and (not atom). The sort num
// and the arithmetic symbols are built in; declared functions belong to
// the free side of the signature, and a declared function with result
// sort Bool is a relation.

#ifndef COVERS_PROBLEM_HPP
#define COVERS_PROBLEM_HPP

#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "covers/kernel.hpp"

namespace covers {

// A parsed problem. The context owns every declared sort, symbol and
// variable; ParseError messages carry "line:col: " prefixes.
struct ProblemFile {
    Ctx ctx;
    std::string theory = "euf+lra";  // euf | lra | euf+lra | idl+euf | tame
    std::vector<Literal> asserts;
    std::set<VarId> params;
    std::set<VarId> exists;
    std::map<std::string, std::string> options;  // from (set-option :k v)
    bool compute = false;                        // saw (compute-cover)
};

ProblemFile parse_problem(const std::string& text);

// Parses one formula in the cover output syntax (and/or/not/true/false
// over literals) against the declarations already in ctx. Inverse of
// print_qf up to connective flattening.
QFF parse_formula(Ctx& ctx, const std::string& text);

// Formats a cover the way a problem file writes terms, so output can be
// parsed back. DNF mode re-expands the formula into a flat disjunction
// of conjunctions first.
std::string format_cover(Ctx& ctx, const QFF& cover, const std::string& mode);

struct RunFlags {
    bool verify = false;  // residue check plus bounded oracle cross-check
    bool trace = false;   // engine transitions on the diagnostic stream
    std::string format = "raw";  // raw | dnf
    int jobs = 1;                // reserved; the driver is sequential
};

// Computes the cover and prints it on `out`; diagnostics, traces and the
// verification verdict go to `err`. Returns the process exit code: 0 on
// success, 2 when the theory combination is unsupported, 1 on any other
// error.
int run(ProblemFile& file, const RunFlags& flags, std::ostream& out,
        std::ostream& err);

}  // namespace covers

#endif  // COVERS_PROBLEM_HPP
