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

#include "covers/tame.hpp"

#include <map>
#include <string>
#include <utility>

namespace covers {

namespace {

// Replaces every maximal container term by an abstraction variable,
// creating fresh ones on demand. A container term is an application of a
// sigma1 symbol, or a bare container existential of shared sort when a
// set of those is supplied.
struct Abstractor {
    Ctx& ctx;
    FreshGen fresh;
    const std::set<VarId>* container_vars = nullptr;
    std::map<TermId, VarId> names;
    std::vector<std::pair<VarId, TermId>> defs;

    bool container(TermId t) const {
        const TermNode& n = ctx.term(t);
        if (n.kind == TermKind::app)
            return ctx.fun(n.sym).side == Side::sigma1;
        if (n.kind == TermKind::var && container_vars)
            return container_vars->count(n.var) &&
                   ctx.sort(n.sort).shared;
        return false;
    }

    TermId term(TermId t) {
        if (container(t)) {
            auto it = names.find(t);
            if (it != names.end()) return ctx.t_var(it->second);
            VarId v = fresh.make(ctx, ctx.sort_of(t));
            names.emplace(t, v);
            defs.emplace_back(v, t);
            return ctx.t_var(v);
        }
        TermNode n = ctx.term(t);
        switch (n.kind) {
            case TermKind::var:
            case TermKind::num:
            case TermKind::app:
                return t;
            case TermKind::add: {
                std::vector<TermId> kids;
                for (TermId k : n.kids) kids.push_back(term(k));
                return ctx.t_add(std::move(kids));
            }
            case TermKind::mul:
                return ctx.t_mul(n.num, term(n.kids[0]));
        }
        return t;
    }

    Literal literal(const Literal& l) {
        Literal r = l;
        if (r.atom.is_pred) {
            for (TermId& a : r.atom.args) a = term(a);
            return r;
        }
        r.atom.lhs = term(r.atom.lhs);
        r.atom.rhs = term(r.atom.rhs);
        return r;
    }
};

}  // namespace

Signature signature_of(const Ctx& ctx, Side side) {
    Signature s;
    for (SymId f = 0; f < ctx.fun_count(); ++f)
        if (ctx.fun(f).side == side) s.funs.push_back(f);
    for (PredId p = 0; p < ctx.pred_count(); ++p)
        if (ctx.pred(p).side == side) s.preds.push_back(p);
    return s;
}

bool check_tame(const Ctx& ctx, const Signature& sig1,
                const Signature& sig2) {
    (void)sig2;
    for (SymId f : sig1.funs)
        for (SortId s : ctx.fun(f).domain)
            if (ctx.sort(s).shared) return false;
    for (PredId p : sig1.preds)
        for (SortId s : ctx.pred(p).domain)
            if (ctx.sort(s).shared) return false;
    return true;
}

TameProblem tame_flatten(Ctx& ctx, const TameProblem& p) {
    TameProblem q = p;
    Abstractor ab{ctx, FreshGen{"eta", 0}, &p.phi.roles.exists, {}, {}};
    for (Literal& l : q.psi.lits) l = ab.literal(l);
    for (const auto& [v, t] : ab.defs) {
        q.phi.lits.push_back(mk_eq(ctx, ctx.t_var(v), t));
        q.phi.roles.params.insert(v);
        q.psi.roles.exists.insert(v);
    }
    return q;
}

QFF tame_cover(Ctx& ctx, const TameProblem& p, const TheoryHandle& h1,
               const TheoryHandle& h2, const CombineOptions& opts) {
    for (const TheoryHandle* h : {&h1, &h2})
        if (!h->stably_infinite)
            throw UnsupportedCombinationError(
                "theory '" + h->name +
                "' lacks stable infiniteness over the shared sorts; the "
                "combination admits primitive formulas without covers");
    if (!check_tame(ctx, signature_of(ctx, Side::sigma1),
                    signature_of(ctx, Side::sigma2)))
        throw UnsupportedCombinationError(
            "signature is not tame: a container symbol takes a "
            "shared-sort argument");

    auto say = [&](const std::string& s) {
        if (opts.trace) opts.trace(s);
    };

    TameProblem q = tame_flatten(ctx, p);
    const std::set<VarId>& evars = q.phi.roles.exists;
    const std::set<VarId>& hvars = q.psi.roles.exists;

    QFF cov1 = h1.cover(ctx, q.phi);
    say("container cover: " + print_qf(ctx, cov1));

    std::vector<QFF> outs;
    std::set<std::string> seen;
    std::set<VarId> xis;
    std::size_t xi_counter = 0;
    for (const auto& cube : to_dnf(ctx, cov1)) {
        std::vector<Literal> first;
        std::vector<Literal> second;
        for (const Literal& l : cube) {
            bool shared = !l.atom.is_pred &&
                          ctx.sort(ctx.sort_of(l.atom.lhs)).shared;
            (shared ? second : first).push_back(l);
        }

        // name the container terms the shared-sort residue mentions
        Abstractor ab{ctx, FreshGen{"xi", xi_counter}, nullptr, {}, {}};
        std::vector<Literal> bridge;
        for (const Literal& l : second) bridge.push_back(ab.literal(l));
        xi_counter = ab.fresh.counter;

        // the residue of a container cover can only relate shared-sort
        // variables; anything else means the signature lied about
        // tameness
        for (const Literal& l : bridge) {
            bool plain = !l.atom.is_pred && l.atom.rel == Rel::eq &&
                         ctx.term(l.atom.lhs).kind == TermKind::var &&
                         ctx.term(l.atom.rhs).kind == TermKind::var;
            if (!plain)
                throw InternalError(
                    "container cover residue is not a variable "
                    "(dis)equality: " + print_literal(ctx, l));
        }

        Constraint c2;
        c2.lits = bridge;
        c2.lits.insert(c2.lits.end(), q.psi.lits.begin(), q.psi.lits.end());
        c2.roles.exists = hvars;
        std::set<VarId> vs;
        collect_vars(ctx, c2, vs);
        for (VarId v : vs)
            if (!hvars.count(v)) c2.roles.params.insert(v);

        QFF psi1 = h2.cover(ctx, c2);
        say("data cover: " + print_qf(ctx, psi1));

        std::map<VarId, TermId> back;
        for (const auto& [t, v] : ab.names) {
            back[v] = t;
            xis.insert(v);
        }
        QFF part = simplify_qf(
            ctx, qf_and({qf_lits(first), substitute(ctx, psi1, back)}));
        if (part->kind == QFNode::fls) continue;
        if (seen.insert(print_qf(ctx, part)).second)
            outs.push_back(std::move(part));
    }

    QFF res = qf_or(std::move(outs));
    std::set<VarId> vs;
    collect_vars(ctx, res, vs);
    for (VarId v : vs)
        if (evars.count(v) || hvars.count(v) || xis.count(v))
            throw InternalError("cover output leaked variable " +
                                ctx.var(v).name);
    say("cover: " + print_qf(ctx, res));
    return res;
}

}  // namespace covers
