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

#include "covers/kernel.hpp"

#include <algorithm>
#include <sstream>

namespace covers {

std::string rational_str(const Rational& r) {
    std::ostringstream os;
    os << numerator(r);
    if (denominator(r) != 1) os << "/" << denominator(r);
    return os.str();
}

Ctx::Ctx() {
    num_ = add_sort("num", true);
}

SortId Ctx::add_sort(const std::string& name, bool shared) {
    if (sort_names_.count(name))
        throw SortError("duplicate sort: " + name);
    SortId id = static_cast<SortId>(sorts_.size());
    sorts_.push_back({name, shared});
    sort_names_[name] = id;
    return id;
}

std::optional<SortId> Ctx::find_sort(const std::string& name) const {
    auto it = sort_names_.find(name);
    if (it == sort_names_.end()) return std::nullopt;
    return it->second;
}

SymId Ctx::add_fun(const std::string& name, std::vector<SortId> domain,
                   SortId range, Side side) {
    if (fun_names_.count(name))
        throw SortError("duplicate function: " + name);
    SymId id = static_cast<SymId>(funs_.size());
    funs_.push_back({name, std::move(domain), range, side});
    fun_names_[name] = id;
    return id;
}

std::optional<SymId> Ctx::find_fun(const std::string& name) const {
    auto it = fun_names_.find(name);
    if (it == fun_names_.end()) return std::nullopt;
    return it->second;
}

PredId Ctx::add_pred(const std::string& name, std::vector<SortId> domain,
                     Side side) {
    if (pred_names_.count(name))
        throw SortError("duplicate predicate: " + name);
    PredId id = static_cast<PredId>(preds_.size());
    preds_.push_back({name, std::move(domain), side});
    pred_names_[name] = id;
    return id;
}

std::optional<PredId> Ctx::find_pred(const std::string& name) const {
    auto it = pred_names_.find(name);
    if (it == pred_names_.end()) return std::nullopt;
    return it->second;
}

VarId Ctx::add_var(const std::string& name, SortId sort) {
    if (var_names_.count(name))
        throw SortError("duplicate variable: " + name);
    VarId id = static_cast<VarId>(vars_.size());
    vars_.push_back({name, sort});
    var_names_[name] = id;
    return id;
}

std::optional<VarId> Ctx::find_var(const std::string& name) const {
    auto it = var_names_.find(name);
    if (it == var_names_.end()) return std::nullopt;
    return it->second;
}

VarId Ctx::fresh_var(const std::string& prefix, std::size_t& counter,
                     SortId sort) {
    for (;;) {
        std::string name = prefix + std::to_string(counter);
        ++counter;
        if (!var_names_.count(name)) return add_var(name, sort);
    }
}

TermId Ctx::intern(TermNode n) {
    std::ostringstream key;
    key << static_cast<int>(n.kind) << '|' << n.sort << '|' << n.var << '|'
        << n.sym << '|' << rational_str(n.num);
    for (TermId k : n.kids) key << '|' << k;
    auto it = term_keys_.find(key.str());
    if (it != term_keys_.end()) return it->second;
    TermId id = static_cast<TermId>(terms_.size());
    terms_.push_back(std::move(n));
    term_keys_[key.str()] = id;
    return id;
}

TermId Ctx::t_var(VarId v) {
    TermNode n;
    n.kind = TermKind::var;
    n.sort = vars_.at(v).sort;
    n.var = v;
    return intern(std::move(n));
}

TermId Ctx::t_app(SymId f, std::vector<TermId> args) {
    const FunInfo& fi = funs_.at(f);
    if (args.size() != fi.domain.size())
        throw SortError("arity mismatch for " + fi.name);
    for (std::size_t i = 0; i < args.size(); ++i)
        if (sort_of(args[i]) != fi.domain[i])
            throw SortError("argument sort mismatch for " + fi.name);
    TermNode n;
    n.kind = TermKind::app;
    n.sort = fi.range;
    n.sym = f;
    n.kids = std::move(args);
    return intern(std::move(n));
}

TermId Ctx::t_num(const Rational& value) {
    TermNode n;
    n.kind = TermKind::num;
    n.sort = num_;
    n.num = value;
    return intern(std::move(n));
}

TermId Ctx::t_add(std::vector<TermId> summands) {
    for (TermId s : summands)
        if (sort_of(s) != num_) throw SortError("sum over non-arithmetic term");
    if (summands.empty()) return t_num(0);
    if (summands.size() == 1) return summands[0];
    TermNode n;
    n.kind = TermKind::add;
    n.sort = num_;
    n.kids = std::move(summands);
    return intern(std::move(n));
}

TermId Ctx::t_mul(const Rational& coeff, TermId operand) {
    if (sort_of(operand) != num_)
        throw SortError("scalar multiple of non-arithmetic term");
    if (coeff == 1) return operand;
    if (coeff == 0) return t_num(0);
    TermNode n;
    n.kind = TermKind::mul;
    n.sort = num_;
    n.num = coeff;
    n.kids = {operand};
    return intern(std::move(n));
}

std::string Ctx::print_term(TermId t) const {
    const TermNode& n = terms_.at(t);
    switch (n.kind) {
        case TermKind::var:
            return vars_.at(n.var).name;
        case TermKind::num:
            return rational_str(n.num);
        case TermKind::app: {
            const FunInfo& fi = funs_.at(n.sym);
            if (n.kids.empty()) return fi.name;
            std::string s = "(" + fi.name;
            for (TermId k : n.kids) s += " " + print_term(k);
            return s + ")";
        }
        case TermKind::add: {
            std::string s = "(+";
            for (TermId k : n.kids) s += " " + print_term(k);
            return s + ")";
        }
        case TermKind::mul:
            return "(* " + rational_str(n.num) + " " + print_term(n.kids[0]) +
                   ")";
    }
    return "?";
}

void Ctx::collect_vars(TermId t, std::set<VarId>& out) const {
    const TermNode& n = terms_.at(t);
    if (n.kind == TermKind::var) out.insert(n.var);
    for (TermId k : n.kids) collect_vars(k, out);
}

bool Ctx::has_var_in(TermId t, const std::set<VarId>& vars) const {
    const TermNode& n = terms_.at(t);
    if (n.kind == TermKind::var) return vars.count(n.var) != 0;
    for (TermId k : n.kids)
        if (has_var_in(k, vars)) return true;
    return false;
}

TermId Ctx::substitute(TermId t, const std::map<VarId, TermId>& map) {
    const TermNode n = terms_.at(t);
    switch (n.kind) {
        case TermKind::var: {
            auto it = map.find(n.var);
            if (it == map.end()) return t;
            if (sort_of(it->second) != n.sort)
                throw SortError("substitution changes sort of " +
                                vars_.at(n.var).name);
            return it->second;
        }
        case TermKind::num:
            return t;
        case TermKind::app: {
            std::vector<TermId> kids;
            kids.reserve(n.kids.size());
            for (TermId k : n.kids) kids.push_back(substitute(k, map));
            return t_app(n.sym, std::move(kids));
        }
        case TermKind::add: {
            std::vector<TermId> kids;
            kids.reserve(n.kids.size());
            for (TermId k : n.kids) kids.push_back(substitute(k, map));
            return t_add(std::move(kids));
        }
        case TermKind::mul:
            return t_mul(n.num, substitute(n.kids[0], map));
    }
    return t;
}

int Ctx::term_depth(TermId t) const {
    const TermNode& n = terms_.at(t);
    int d = 0;
    for (TermId k : n.kids) d = std::max(d, 1 + term_depth(k));
    return d;
}

namespace {

void check_eq_sorts(const Ctx& ctx, TermId a, TermId b) {
    if (ctx.sort_of(a) != ctx.sort_of(b))
        throw SortError("equality between distinct sorts: " +
                        ctx.print_term(a) + " vs " + ctx.print_term(b));
}

void check_arith(const Ctx& ctx, TermId a, TermId b) {
    if (ctx.sort_of(a) != ctx.num_sort() || ctx.sort_of(b) != ctx.num_sort())
        throw SortError("order atom over non-arithmetic terms");
}

}  // namespace

Literal mk_eq(Ctx& ctx, TermId a, TermId b) {
    check_eq_sorts(ctx, a, b);
    Literal l;
    l.pos = true;
    l.atom.rel = Rel::eq;
    l.atom.lhs = a;
    l.atom.rhs = b;
    return l;
}

Literal mk_neq(Ctx& ctx, TermId a, TermId b) {
    Literal l = mk_eq(ctx, a, b);
    l.pos = false;
    return l;
}

Literal mk_le(Ctx& ctx, TermId a, TermId b) {
    check_arith(ctx, a, b);
    Literal l;
    l.pos = true;
    l.atom.rel = Rel::le;
    l.atom.lhs = a;
    l.atom.rhs = b;
    return l;
}

Literal mk_lt(Ctx& ctx, TermId a, TermId b) {
    Literal l = mk_le(ctx, a, b);
    l.atom.rel = Rel::lt;
    return l;
}

Literal mk_pred(Ctx& ctx, PredId p, std::vector<TermId> args, bool pos) {
    const PredInfo& pi = ctx.pred(p);
    if (args.size() != pi.domain.size())
        throw SortError("arity mismatch for " + pi.name);
    for (std::size_t i = 0; i < args.size(); ++i)
        if (ctx.sort_of(args[i]) != pi.domain[i])
            throw SortError("argument sort mismatch for " + pi.name);
    Literal l;
    l.pos = pos;
    l.atom.is_pred = true;
    l.atom.pred = p;
    l.atom.args = std::move(args);
    return l;
}

Literal negate(const Literal& l) {
    Literal r = l;
    if (l.atom.is_pred || l.atom.rel == Rel::eq) {
        r.pos = !l.pos;
        return r;
    }
    // not (a <= b) == b < a ; not (a < b) == b <= a
    r.pos = true;
    r.atom.rel = l.atom.rel == Rel::le ? Rel::lt : Rel::le;
    r.atom.lhs = l.atom.rhs;
    r.atom.rhs = l.atom.lhs;
    return r;
}

std::string print_literal(const Ctx& ctx, const Literal& l) {
    std::string body;
    if (l.atom.is_pred) {
        const PredInfo& pi = ctx.pred(l.atom.pred);
        if (l.atom.args.empty()) {
            body = pi.name;
        } else {
            body = "(" + pi.name;
            for (TermId a : l.atom.args) body += " " + ctx.print_term(a);
            body += ")";
        }
        return l.pos ? body : "(not " + body + ")";
    }
    const char* op = l.atom.rel == Rel::eq ? "=" :
                     l.atom.rel == Rel::le ? "<=" : "<";
    if (!l.pos) op = "distinct";  // only eq can be negative
    return std::string("(") + op + " " + ctx.print_term(l.atom.lhs) + " " +
           ctx.print_term(l.atom.rhs) + ")";
}

bool same_literal(const Ctx&, const Literal& a, const Literal& b) {
    if (a.pos != b.pos || a.atom.is_pred != b.atom.is_pred) return false;
    if (a.atom.is_pred)
        return a.atom.pred == b.atom.pred && a.atom.args == b.atom.args;
    return a.atom.rel == b.atom.rel && a.atom.lhs == b.atom.lhs &&
           a.atom.rhs == b.atom.rhs;
}

bool complementary(const Ctx& ctx, const Literal& a, const Literal& b) {
    return same_literal(ctx, negate(a), b);
}

void collect_vars(const Ctx& ctx, const Literal& l, std::set<VarId>& out) {
    if (l.atom.is_pred) {
        for (TermId a : l.atom.args) ctx.collect_vars(a, out);
    } else {
        ctx.collect_vars(l.atom.lhs, out);
        ctx.collect_vars(l.atom.rhs, out);
    }
}

Literal substitute(Ctx& ctx, const Literal& l,
                   const std::map<VarId, TermId>& map) {
    Literal r = l;
    if (l.atom.is_pred) {
        for (TermId& a : r.atom.args) a = ctx.substitute(a, map);
    } else {
        r.atom.lhs = ctx.substitute(l.atom.lhs, map);
        r.atom.rhs = ctx.substitute(l.atom.rhs, map);
    }
    return r;
}

bool Roles::disjoint() const {
    for (VarId v : params)
        if (exists.count(v) || defined.count(v)) return false;
    for (VarId v : exists)
        if (defined.count(v)) return false;
    return true;
}

std::set<VarId> Roles::all() const {
    std::set<VarId> s = params;
    s.insert(exists.begin(), exists.end());
    s.insert(defined.begin(), defined.end());
    return s;
}

void collect_vars(const Ctx& ctx, const Constraint& c, std::set<VarId>& out) {
    for (const Literal& l : c.lits) collect_vars(ctx, l, out);
}

Constraint substitute(Ctx& ctx, const Constraint& c,
                      const std::map<VarId, TermId>& map) {
    Constraint r = c;
    for (Literal& l : r.lits) l = substitute(ctx, l, map);
    return r;
}

std::string print_constraint(const Ctx& ctx, const Constraint& c) {
    if (c.lits.empty()) return "true";
    if (c.lits.size() == 1) return print_literal(ctx, c.lits[0]);
    std::string s = "(and";
    for (const Literal& l : c.lits) s += " " + print_literal(ctx, l);
    return s + ")";
}

QFF qf_true() {
    auto n = std::make_shared<QFNode>();
    n->kind = QFNode::tru;
    return n;
}

QFF qf_false() {
    auto n = std::make_shared<QFNode>();
    n->kind = QFNode::fls;
    return n;
}

QFF qf_lit(const Literal& l) {
    auto n = std::make_shared<QFNode>();
    n->kind = QFNode::lit;
    n->l = l;
    return n;
}

QFF qf_and(std::vector<QFF> kids) {
    std::vector<QFF> flat;
    for (QFF& k : kids) {
        if (k->kind == QFNode::tru) continue;
        if (k->kind == QFNode::fls) return qf_false();
        if (k->kind == QFNode::conj) {
            flat.insert(flat.end(), k->kids.begin(), k->kids.end());
        } else {
            flat.push_back(std::move(k));
        }
    }
    if (flat.empty()) return qf_true();
    if (flat.size() == 1) return flat[0];
    auto n = std::make_shared<QFNode>();
    n->kind = QFNode::conj;
    n->kids = std::move(flat);
    return n;
}

QFF qf_or(std::vector<QFF> kids) {
    std::vector<QFF> flat;
    for (QFF& k : kids) {
        if (k->kind == QFNode::fls) continue;
        if (k->kind == QFNode::tru) return qf_true();
        if (k->kind == QFNode::disj) {
            flat.insert(flat.end(), k->kids.begin(), k->kids.end());
        } else {
            flat.push_back(std::move(k));
        }
    }
    if (flat.empty()) return qf_false();
    if (flat.size() == 1) return flat[0];
    auto n = std::make_shared<QFNode>();
    n->kind = QFNode::disj;
    n->kids = std::move(flat);
    return n;
}

QFF qf_not(QFF f) {
    if (f->kind == QFNode::tru) return qf_false();
    if (f->kind == QFNode::fls) return qf_true();
    if (f->kind == QFNode::lit) return qf_lit(negate(f->l));
    if (f->kind == QFNode::neg) return f->kids[0];
    auto n = std::make_shared<QFNode>();
    n->kind = QFNode::neg;
    n->kids = {std::move(f)};
    return n;
}

QFF qf_lits(const std::vector<Literal>& lits) {
    std::vector<QFF> kids;
    kids.reserve(lits.size());
    for (const Literal& l : lits) kids.push_back(qf_lit(l));
    return qf_and(std::move(kids));
}

std::string print_qf(const Ctx& ctx, const QFF& f) {
    switch (f->kind) {
        case QFNode::tru: return "true";
        case QFNode::fls: return "false";
        case QFNode::lit: return print_literal(ctx, f->l);
        case QFNode::neg: return "(not " + print_qf(ctx, f->kids[0]) + ")";
        case QFNode::conj:
        case QFNode::disj: {
            std::string s = f->kind == QFNode::conj ? "(and" : "(or";
            for (const QFF& k : f->kids) s += " " + print_qf(ctx, k);
            return s + ")";
        }
    }
    return "?";
}

void collect_vars(const Ctx& ctx, const QFF& f, std::set<VarId>& out) {
    if (f->kind == QFNode::lit) collect_vars(ctx, f->l, out);
    for (const QFF& k : f->kids) collect_vars(ctx, k, out);
}

QFF substitute(Ctx& ctx, const QFF& f, const std::map<VarId, TermId>& map) {
    switch (f->kind) {
        case QFNode::tru:
        case QFNode::fls:
            return f;
        case QFNode::lit:
            return qf_lit(substitute(ctx, f->l, map));
        case QFNode::neg:
            return qf_not(substitute(ctx, f->kids[0], map));
        case QFNode::conj:
        case QFNode::disj: {
            std::vector<QFF> kids;
            kids.reserve(f->kids.size());
            for (const QFF& k : f->kids)
                kids.push_back(substitute(ctx, k, map));
            return f->kind == QFNode::conj ? qf_and(std::move(kids))
                                           : qf_or(std::move(kids));
        }
    }
    return f;
}

QFF simplify_qf(const Ctx& ctx, const QFF& f) {
    switch (f->kind) {
        case QFNode::tru:
        case QFNode::fls:
            return f;
        case QFNode::lit: {
            const Literal& l = f->l;
            if (l.atom.is_pred) return f;
            if (l.atom.lhs == l.atom.rhs) {
                if (l.atom.rel == Rel::lt) return qf_false();
                if (l.atom.rel == Rel::le) return qf_true();
                return l.pos ? qf_true() : qf_false();
            }
            const TermNode& a = ctx.term(l.atom.lhs);
            const TermNode& b = ctx.term(l.atom.rhs);
            if (a.kind == TermKind::num && b.kind == TermKind::num &&
                l.atom.rel == Rel::eq)
                return l.pos ? qf_false() : qf_true();
            return f;
        }
        case QFNode::conj: {
            std::vector<QFF> kids;
            std::set<std::string> seen;
            for (const QFF& k : f->kids) {
                QFF s = simplify_qf(ctx, k);
                if (s->kind == QFNode::tru) continue;
                if (s->kind == QFNode::fls) return qf_false();
                if (seen.insert(print_qf(ctx, s)).second)
                    kids.push_back(std::move(s));
            }
            return qf_and(std::move(kids));
        }
        case QFNode::disj: {
            std::vector<QFF> kids;
            std::set<std::string> seen;
            for (const QFF& k : f->kids) {
                QFF s = simplify_qf(ctx, k);
                if (s->kind == QFNode::fls) continue;
                if (s->kind == QFNode::tru) return qf_true();
                if (seen.insert(print_qf(ctx, s)).second)
                    kids.push_back(std::move(s));
            }
            return qf_or(std::move(kids));
        }
        case QFNode::neg: {
            QFF s = simplify_qf(ctx, f->kids[0]);
            if (s->kind == QFNode::tru) return qf_false();
            if (s->kind == QFNode::fls) return qf_true();
            return qf_not(std::move(s));
        }
    }
    throw InternalError("unhandled formula node");
}

namespace {

// Negation-normal form: negations pushed to literals.
QFF nnf(const QFF& f, bool neg) {
    switch (f->kind) {
        case QFNode::tru: return neg ? qf_false() : qf_true();
        case QFNode::fls: return neg ? qf_true() : qf_false();
        case QFNode::lit: return neg ? qf_lit(negate(f->l)) : f;
        case QFNode::neg: return nnf(f->kids[0], !neg);
        case QFNode::conj:
        case QFNode::disj: {
            bool is_and = (f->kind == QFNode::conj) != neg;
            std::vector<QFF> kids;
            kids.reserve(f->kids.size());
            for (const QFF& k : f->kids) kids.push_back(nnf(k, neg));
            return is_and ? qf_and(std::move(kids)) : qf_or(std::move(kids));
        }
    }
    return f;
}

using Cube = std::vector<Literal>;

// nullopt: cube contains complementary literals, drop it.
std::optional<Cube> cube_add(const Ctx& ctx, const Cube& cube,
                             const Literal& l) {
    for (const Literal& c : cube) {
        if (same_literal(ctx, c, l)) return cube;
        if (complementary(ctx, c, l)) return std::nullopt;
    }
    Cube r = cube;
    r.push_back(l);
    return r;
}

void dnf_rec(const Ctx& ctx, const QFF& f, const Cube& prefix,
             std::vector<Cube>& out, std::size_t cap) {
    if (out.size() > cap) throw InternalError("DNF cube cap exceeded");
    switch (f->kind) {
        case QFNode::tru:
            out.push_back(prefix);
            return;
        case QFNode::fls:
            return;
        case QFNode::lit: {
            auto c = cube_add(ctx, prefix, f->l);
            if (c) out.push_back(*c);
            return;
        }
        case QFNode::disj:
            for (const QFF& k : f->kids) dnf_rec(ctx, k, prefix, out, cap);
            return;
        case QFNode::conj: {
            // distribute left to right
            std::vector<Cube> cur = {prefix};
            for (const QFF& k : f->kids) {
                std::vector<Cube> next;
                for (const Cube& c : cur) dnf_rec(ctx, k, c, next, cap);
                cur = std::move(next);
                if (cur.empty()) return;
                if (cur.size() > cap)
                    throw InternalError("DNF cube cap exceeded");
            }
            out.insert(out.end(), cur.begin(), cur.end());
            return;
        }
        case QFNode::neg:
            throw InternalError("negation survived NNF");
    }
}

}  // namespace

std::vector<std::vector<Literal>> to_dnf(const Ctx& ctx, const QFF& f,
                                         std::size_t cube_cap) {
    std::vector<Cube> out;
    dnf_rec(ctx, nnf(f, false), {}, out, cube_cap);
    // drop duplicate cubes (same literal set)
    std::vector<Cube> uniq;
    std::set<std::string> seen;
    for (const Cube& c : out) {
        std::vector<std::string> parts;
        parts.reserve(c.size());
        for (const Literal& l : c) parts.push_back(print_literal(ctx, l));
        std::sort(parts.begin(), parts.end());
        std::string key;
        for (const std::string& p : parts) key += p + ";";
        if (seen.insert(key).second) uniq.push_back(c);
    }
    return uniq;
}

std::vector<Constraint> to_dnf_constraints(const Ctx& ctx, const QFF& f,
                                           const Roles& roles) {
    std::vector<Constraint> out;
    for (auto& cube : to_dnf(ctx, f)) {
        Constraint c;
        c.lits = std::move(cube);
        c.roles = roles;
        out.push_back(std::move(c));
    }
    return out;
}

std::vector<PartitionEntry> enumerate_partitions(
    Ctx& ctx, const std::set<VarId>& evars) {
    std::vector<VarId> vars(evars.begin(), evars.end());
    std::size_t n = vars.size();
    std::vector<std::vector<int>> strings;
    std::vector<int> cur(n, 0);
    // restricted growth strings, lexicographic
    auto rec = [&](auto&& self, std::size_t i, int mx) -> void {
        if (i == n) {
            strings.push_back(cur);
            return;
        }
        for (int b = 0; b <= mx + 1; ++b) {
            cur[i] = b;
            self(self, i + 1, std::max(mx, b));
        }
    };
    if (n == 0) {
        strings.push_back({});
    } else {
        rec(rec, 0, -1);
    }
    // finest partition (all blocks distinct) first
    std::reverse(strings.begin(), strings.end());

    std::vector<PartitionEntry> out;
    out.reserve(strings.size());
    for (const auto& s : strings) {
        PartitionEntry e;
        int nblocks = n == 0 ? 0 : 1 + *std::max_element(s.begin(), s.end());
        e.partition.blocks.assign(nblocks, {});
        for (std::size_t i = 0; i < n; ++i)
            e.partition.blocks[s[i]].push_back(vars[i]);
        for (auto& b : e.partition.blocks) {
            e.partition.reps.push_back(b.front());
            for (std::size_t i = 1; i < b.size(); ++i)
                e.rep_subst[b[i]] = b.front();
        }
        for (std::size_t i = 0; i < e.partition.reps.size(); ++i)
            for (std::size_t j = i + 1; j < e.partition.reps.size(); ++j) {
                VarId a = e.partition.reps[i], b = e.partition.reps[j];
                if (ctx.var(a).sort != ctx.var(b).sort) continue;
                e.diseqs.push_back(mk_neq(ctx, ctx.t_var(a), ctx.t_var(b)));
            }
        out.push_back(std::move(e));
    }
    return out;
}

namespace {

struct Purifier {
    Ctx& ctx;
    FreshGen& fresh;
    std::vector<Literal> psi1, psi2;
    std::vector<std::pair<VarId, TermId>> defs;
    std::map<TermId, VarId> names;

    VarId name_for(TermId t, bool def_goes_to_psi1) {
        auto it = names.find(t);
        if (it != names.end()) return it->second;
        VarId d = fresh.make(ctx, ctx.sort_of(t));
        names[t] = d;
        defs.emplace_back(d, t);
        Literal def = mk_eq(ctx, ctx.t_var(d), t);
        (def_goes_to_psi1 ? psi1 : psi2).push_back(def);
        return d;
    }

    // Rebuilds t as a pure term for the requested side, abstracting alien
    // subterms innermost-first.
    TermId pur(TermId t, Side side) {
        const TermNode& n = ctx.term(t);
        switch (n.kind) {
            case TermKind::var:
                return t;
            case TermKind::num:
            case TermKind::add:
            case TermKind::mul: {
                if (side == Side::sigma2) {
                    if (n.kind == TermKind::num) return t;
                    std::vector<TermId> kids;
                    for (TermId k : n.kids) kids.push_back(pur(k, Side::sigma2));
                    return n.kind == TermKind::add
                               ? ctx.t_add(std::move(kids))
                               : ctx.t_mul(n.num, kids[0]);
                }
                TermId pure2 = pur(t, Side::sigma2);
                return ctx.t_var(name_for(pure2, /*def_goes_to_psi1=*/false));
            }
            case TermKind::app: {
                if (side == Side::sigma1) {
                    std::vector<TermId> kids;
                    for (TermId k : n.kids) kids.push_back(pur(k, Side::sigma1));
                    return ctx.t_app(n.sym, std::move(kids));
                }
                TermId pure1 = pur(t, Side::sigma1);
                return ctx.t_var(name_for(pure1, /*def_goes_to_psi1=*/true));
            }
        }
        return t;
    }

    void literal(const Literal& l) {
        if (l.atom.is_pred) {
            Literal r = l;
            for (TermId& a : r.atom.args) a = pur(a, Side::sigma1);
            psi1.push_back(r);
            return;
        }
        if (l.atom.rel != Rel::eq) {
            Literal r = l;
            r.atom.lhs = pur(l.atom.lhs, Side::sigma2);
            r.atom.rhs = pur(l.atom.rhs, Side::sigma2);
            psi2.push_back(r);
            return;
        }
        const TermNode& a = ctx.term(l.atom.lhs);
        const TermNode& b = ctx.term(l.atom.rhs);
        bool arith_top = a.kind == TermKind::num || a.kind == TermKind::add ||
                         a.kind == TermKind::mul || b.kind == TermKind::num ||
                         b.kind == TermKind::add || b.kind == TermKind::mul;
        if (arith_top) {
            Literal r = l;
            r.atom.lhs = pur(l.atom.lhs, Side::sigma2);
            r.atom.rhs = pur(l.atom.rhs, Side::sigma2);
            psi2.push_back(r);
            return;
        }
        bool app_top = a.kind == TermKind::app || b.kind == TermKind::app;
        if (app_top) {
            Literal r = l;
            r.atom.lhs = pur(l.atom.lhs, Side::sigma1);
            r.atom.rhs = pur(l.atom.rhs, Side::sigma1);
            psi1.push_back(r);
            return;
        }
        // variable (dis)equality: shared sort goes to both sides
        if (ctx.sort(ctx.sort_of(l.atom.lhs)).shared) {
            psi1.push_back(l);
            psi2.push_back(l);
        } else {
            psi1.push_back(l);
        }
    }
};

}  // namespace

PurifyResult purify(Ctx& ctx, const Constraint& c, FreshGen& fresh) {
    Purifier p{ctx, fresh, {}, {}, {}, {}};
    for (const Literal& l : c.lits) p.literal(l);
    PurifyResult r;
    r.psi1.lits = std::move(p.psi1);
    r.psi2.lits = std::move(p.psi2);
    r.psi1.roles = c.roles;
    r.psi2.roles = c.roles;
    for (auto& [d, t] : p.defs) {
        r.psi1.roles.exists.insert(d);
        r.psi2.roles.exists.insert(d);
    }
    r.fresh_defs = std::move(p.defs);
    return r;
}

}  // namespace covers
