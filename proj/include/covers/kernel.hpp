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

// Sorted signatures, hash-consed terms, literals, quantifier-free formulas,
// substitution, DNF, partition enumeration, and purification. Everything here
// is immutable after construction; the Ctx arena is append-only.

#ifndef COVERS_KERNEL_HPP
#define COVERS_KERNEL_HPP

#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace covers {

using Rational = boost::multiprecision::cpp_rational;

std::string rational_str(const Rational& r);

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SortError : Error { using Error::Error; };
struct TheoryError : Error { using Error::Error; };
struct InfeasibleError : Error { using Error::Error; };
struct OracleLimitError : Error { using Error::Error; };
struct UnsupportedCombinationError : Error { using Error::Error; };
struct DanglingDefError : Error { using Error::Error; };
struct InternalError : Error { using Error::Error; };
struct ParseError : Error { using Error::Error; };

using SortId = std::uint32_t;
using SymId = std::uint32_t;   // function symbols
using PredId = std::uint32_t;  // predicate symbols
using VarId = std::uint32_t;
using TermId = std::uint32_t;

enum class Side { sigma1, sigma2, shared };

struct SortInfo {
    std::string name;
    bool shared = false;  // belongs to both signatures (multi-sorted mode)
};

struct FunInfo {
    std::string name;
    std::vector<SortId> domain;
    SortId range;
    Side side = Side::sigma1;
};

struct PredInfo {
    std::string name;
    std::vector<SortId> domain;
    Side side = Side::sigma1;
};

struct VarInfo {
    std::string name;
    SortId sort;
};

enum class TermKind { var, app, num, add, mul };

struct TermNode {
    TermKind kind;
    SortId sort;
    VarId var = 0;               // kind var
    SymId sym = 0;               // kind app
    Rational num;                // kind num (value), kind mul (coefficient)
    std::vector<TermId> kids;    // app arguments, add summands, mul operand
};

// Arena interning sorts, symbols, variables and terms. The special sort
// "num" (shared, arithmetic) always exists.
class Ctx {
public:
    Ctx();

    SortId add_sort(const std::string& name, bool shared);
    std::optional<SortId> find_sort(const std::string& name) const;
    const SortInfo& sort(SortId s) const { return sorts_.at(s); }
    SortId num_sort() const { return num_; }

    SymId add_fun(const std::string& name, std::vector<SortId> domain,
                  SortId range, Side side);
    std::optional<SymId> find_fun(const std::string& name) const;
    const FunInfo& fun(SymId f) const { return funs_.at(f); }
    std::size_t fun_count() const { return funs_.size(); }

    PredId add_pred(const std::string& name, std::vector<SortId> domain,
                    Side side);
    std::optional<PredId> find_pred(const std::string& name) const;
    const PredInfo& pred(PredId p) const { return preds_.at(p); }
    std::size_t pred_count() const { return preds_.size(); }

    VarId add_var(const std::string& name, SortId sort);
    std::optional<VarId> find_var(const std::string& name) const;
    const VarInfo& var(VarId v) const { return vars_.at(v); }
    std::size_t var_count() const { return vars_.size(); }
    // Fresh variable with an unused name derived from the prefix and counter.
    VarId fresh_var(const std::string& prefix, std::size_t& counter,
                    SortId sort);

    TermId t_var(VarId v);
    TermId t_app(SymId f, std::vector<TermId> args);
    TermId t_num(const Rational& value);
    // Flattens nothing; n-ary sum of the given summands. Empty -> 0,
    // singleton -> the summand itself.
    TermId t_add(std::vector<TermId> summands);
    // coeff * operand; coeff 1 -> operand, coeff 0 -> 0.
    TermId t_mul(const Rational& coeff, TermId operand);

    const TermNode& term(TermId t) const { return terms_.at(t); }
    SortId sort_of(TermId t) const { return terms_.at(t).sort; }
    std::size_t term_count() const { return terms_.size(); }

    std::string print_term(TermId t) const;

    void collect_vars(TermId t, std::set<VarId>& out) const;
    bool has_var_in(TermId t, const std::set<VarId>& vars) const;
    TermId substitute(TermId t, const std::map<VarId, TermId>& map);
    int term_depth(TermId t) const;

private:
    TermId intern(TermNode n);

    std::vector<SortInfo> sorts_;
    std::map<std::string, SortId> sort_names_;
    SortId num_;
    std::vector<FunInfo> funs_;
    std::map<std::string, SymId> fun_names_;
    std::vector<PredInfo> preds_;
    std::map<std::string, PredId> pred_names_;
    // deques so handing out node references stays safe while new terms
    // and variables are interned
    std::deque<VarInfo> vars_;
    std::map<std::string, VarId> var_names_;
    std::deque<TermNode> terms_;
    std::map<std::string, TermId> term_keys_;
};

// Atom relations. Negated le/lt are normalized away at literal construction
// (not (<= a b)) == (< b a), so only eq and predicate literals carry
// polarity.
enum class Rel { eq, le, lt };

struct Atom {
    bool is_pred = false;
    Rel rel = Rel::eq;
    TermId lhs = 0, rhs = 0;     // when !is_pred
    PredId pred = 0;             // when is_pred
    std::vector<TermId> args;
};

struct Literal {
    bool pos = true;
    Atom atom;
};

Literal mk_eq(Ctx& ctx, TermId a, TermId b);
Literal mk_neq(Ctx& ctx, TermId a, TermId b);
Literal mk_le(Ctx& ctx, TermId a, TermId b);
Literal mk_lt(Ctx& ctx, TermId a, TermId b);
Literal mk_pred(Ctx& ctx, PredId p, std::vector<TermId> args, bool pos);
Literal negate(const Literal& l);

std::string print_literal(const Ctx& ctx, const Literal& l);
bool same_literal(const Ctx& ctx, const Literal& a, const Literal& b);
// True when a and b are syntactic complements after normalization.
bool complementary(const Ctx& ctx, const Literal& a, const Literal& b);
void collect_vars(const Ctx& ctx, const Literal& l, std::set<VarId>& out);
Literal substitute(Ctx& ctx, const Literal& l,
                   const std::map<VarId, TermId>& map);

// Variable role bookkeeping. Every free variable of a constraint belongs to
// exactly one of the three sets.
struct Roles {
    std::set<VarId> params;
    std::set<VarId> exists;
    std::set<VarId> defined;

    bool disjoint() const;
    std::set<VarId> all() const;
};

struct Constraint {
    std::vector<Literal> lits;
    Roles roles;
};

void collect_vars(const Ctx& ctx, const Constraint& c, std::set<VarId>& out);
Constraint substitute(Ctx& ctx, const Constraint& c,
                      const std::map<VarId, TermId>& map);
std::string print_constraint(const Ctx& ctx, const Constraint& c);

// Quantifier-free formula tree.
struct QFNode;
using QFF = std::shared_ptr<const QFNode>;

struct QFNode {
    enum Kind { tru, fls, lit, conj, disj, neg } kind;
    Literal l;
    std::vector<QFF> kids;
};

QFF qf_true();
QFF qf_false();
QFF qf_lit(const Literal& l);
// Flattens nested conjunctions, absorbs true/false.
QFF qf_and(std::vector<QFF> kids);
QFF qf_or(std::vector<QFF> kids);
QFF qf_not(QFF f);
QFF qf_lits(const std::vector<Literal>& lits);  // conjunction

std::string print_qf(const Ctx& ctx, const QFF& f);
void collect_vars(const Ctx& ctx, const QFF& f, std::set<VarId>& out);
QFF substitute(Ctx& ctx, const QFF& f, const std::map<VarId, TermId>& map);

// Bottom-up constant folding: trivial (dis)equalities between identical
// or distinct ground terms collapse, duplicate children merge, true and
// false absorb through connectives.
QFF simplify_qf(const Ctx& ctx, const QFF& f);

// DNF with complementary-literal pruning; each cube is duplicate-free.
// Cube count above the cap raises InternalError.
std::vector<std::vector<Literal>> to_dnf(const Ctx& ctx, const QFF& f,
                                         std::size_t cube_cap = 1u << 16);
// Same, wrapped as Constraints with the caller's role context.
std::vector<Constraint> to_dnf_constraints(const Ctx& ctx, const QFF& f,
                                           const Roles& roles);

struct Partition {
    std::vector<std::vector<VarId>> blocks;  // each sorted ascending
    std::vector<VarId> reps;                 // lowest variable per block
};

struct PartitionEntry {
    Partition partition;
    std::map<VarId, VarId> rep_subst;  // var -> its block representative
    std::vector<Literal> diseqs;       // pairwise between distinct reps
};

// One entry per set-partition of evars (Bell-number count), finest first.
std::vector<PartitionEntry> enumerate_partitions(Ctx& ctx,
                                                 const std::set<VarId>& evars);

struct PurifyResult {
    Constraint psi1;  // pure sigma1 literals
    Constraint psi2;  // pure sigma2 literals
    std::vector<std::pair<VarId, TermId>> fresh_defs;
};

// Deterministic fresh names d<k> drawn from this counter, one per cover
// invocation.
struct FreshGen {
    std::string prefix = "d";
    std::size_t counter = 0;
    VarId make(Ctx& ctx, SortId sort) {
        return ctx.fresh_var(prefix, counter, sort);
    }
};

// Separates a mixed constraint into pure parts, abstracting alien subterms
// innermost-first, left-to-right with fresh defined names. Shared-sort
// variable (dis)equalities go to both sides. Fresh variables join the
// existential role.
PurifyResult purify(Ctx& ctx, const Constraint& c, FreshGen& fresh);

}  // namespace covers

#endif  // COVERS_KERNEL_HPP
