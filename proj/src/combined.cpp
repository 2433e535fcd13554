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

#include "covers/combined.hpp"

#include <algorithm>
#include <map>
#include <utility>

#include "covers/euf_cover.hpp"
#include "covers/lra_cover.hpp"

namespace covers {

namespace {

// Theory procedures see a two-level role split: everything not truly
// existential counts as a parameter.
Constraint flatten_roles(const Constraint& c) {
    Constraint r = c;
    for (VarId v : r.roles.defined) r.roles.params.insert(v);
    r.roles.defined.clear();
    return r;
}

// Conjoins psi with a copy of itself whose existentials are renamed to
// fresh primed variables.
Constraint doubled_constraint(Ctx& ctx, const Constraint& psi,
                              std::map<VarId, TermId>& ren) {
    std::size_t counter = 0;
    Constraint dbl = psi;
    for (VarId v : psi.roles.exists) {
        VarId p =
            ctx.fresh_var(ctx.var(v).name + "~", counter, ctx.var(v).sort);
        ren[v] = ctx.t_var(p);
        dbl.roles.exists.insert(p);
    }
    for (const Literal& l : psi.lits)
        dbl.lits.push_back(substitute(ctx, l, ren));
    return dbl;
}

// Implicit definability of e in psi through the side's own cover
// procedure: negate the cover of the doubled system extended with
// e != e'. The negation is stated relative to psi, so conjuncts psi
// entails stay positive and a fully entailed cube collapses the whole
// formula to false.
QFF cover_impl_def(Ctx& ctx, const Constraint& psi, VarId e,
                   const std::function<QFF(Ctx&, const Constraint&)>& cover) {
    std::map<VarId, TermId> ren;
    Constraint dbl = doubled_constraint(ctx, psi, ren);
    dbl.lits.push_back(mk_neq(ctx, ctx.t_var(e), ren.at(e)));
    QFF phi = cover(ctx, dbl);
    if (phi->kind == QFNode::fls) return qf_true();

    QFF rho = qf_lits(psi.lits);
    std::vector<QFF> parts;
    std::set<std::string> seen;
    auto add = [&](const QFF& p) {
        if (seen.insert(print_qf(ctx, p)).second) parts.push_back(p);
    };
    for (const auto& cube : to_dnf(ctx, phi)) {
        std::vector<QFF> keep;
        std::set<std::string> kseen;
        for (const Literal& l : cube) {
            if (entails(ctx, rho, qf_lit(l))) {
                add(qf_lit(l));
                continue;
            }
            QFF nl = qf_lit(negate(l));
            if (kseen.insert(print_qf(ctx, nl)).second) keep.push_back(nl);
        }
        if (keep.empty()) return qf_false();
        std::sort(keep.begin(), keep.end(), [&](const QFF& a, const QFF& b) {
            return print_qf(ctx, a) < print_qf(ctx, b);
        });
        add(qf_or(std::move(keep)));
    }
    std::sort(parts.begin(), parts.end(), [&](const QFF& a, const QFF& b) {
        return print_qf(ctx, a) < print_qf(ctx, b);
    });
    return qf_and(std::move(parts));
}

LinSystem lin_system_of(Ctx& ctx, const Constraint& c) {
    LinSystem s;
    for (const Literal& l : c.lits) s.atoms.push_back(lin_of_literal(ctx, l));
    s.evars = c.roles.exists;
    return s;
}

// Shared driver state for one cover computation: the two handles, the
// trace sink, and a cache of implicit definability formulas keyed by
// side, variable, and the side's literal multiset.
struct Run {
    Ctx& ctx;
    const TheoryHandle& h1;
    const TheoryHandle& h2;
    std::function<void(const std::string&)> trace;
    std::map<std::string, QFF> impl_cache;
    int expansions = 0;

    void say(const std::string& s) {
        if (trace) trace(s);
    }

    const TheoryHandle& handle(int side) const { return side == 1 ? h1 : h2; }

    static const Constraint& side_of(const WorkingFormula& w, int side) {
        return side == 1 ? w.psi1 : w.psi2;
    }

    QFF impl_def(const WorkingFormula& w, int side, VarId e) {
        const Constraint& psi = side_of(w, side);
        std::string key = std::to_string(side) + "|" + ctx.var(e).name + "|" +
                          print_constraint(ctx, psi);
        auto it = impl_cache.find(key);
        if (it != impl_cache.end()) return it->second;
        QFF a = handle(side).impl_def(ctx, flatten_roles(psi), e);
        say("ImplDef_{psi" + std::to_string(side) + "," + ctx.var(e).name +
            "} = " + print_qf(ctx, a));
        impl_cache.emplace(std::move(key), a);
        return a;
    }

    bool consistent(const WorkingFormula& w) {
        Constraint all = w.psi1;
        all.lits.insert(all.lits.end(), w.psi2.lits.begin(),
                        w.psi2.lits.end());
        return nelson_oppen_sat(ctx, all).sat;
    }

    bool terminal(const WorkingFormula& w) {
        for (VarId e : w.psi1.roles.exists)
            for (int side : {1, 2}) {
                QFF a = impl_def(w, side, e);
                if (a->kind == QFNode::fls) continue;
                if (!entails(ctx, qf_lits(side_of(w, side).lits), qf_not(a)))
                    return false;
            }
        return true;
    }

    static void append_new(Ctx& ctx2, Constraint& tgt,
                           const std::vector<Literal>& lits) {
        for (const Literal& l : lits) {
            bool dup = false;
            for (const Literal& k : tgt.lits)
                if (same_literal(ctx2, k, l)) {
                    dup = true;
                    break;
                }
            if (!dup) tgt.lits.push_back(l);
        }
    }

    static void move_to_defined(WorkingFormula& w, VarId e) {
        for (Constraint* s : {&w.psi1, &w.psi2}) {
            s->roles.exists.erase(e);
            s->roles.defined.insert(e);
        }
    }

    std::vector<WorkingFormula> do_step2i(const WorkingFormula& w, VarId e,
                                          int side) {
        QFF alpha = impl_def(w, side, e);
        if (alpha->kind == QFNode::fls) return {};
        std::vector<WorkingFormula> out;
        for (const auto& cube : to_dnf(ctx, alpha)) {
            WorkingFormula w2 = w;
            Constraint& tgt = side == 1 ? w2.psi1 : w2.psi2;
            append_new(ctx, tgt, cube);
            if (!consistent(w2)) continue;
            auto t = handle(side).interp_term(ctx, flatten_roles(tgt), e);
            if (!t)
                throw InternalError(
                    "missing interpolating term for implicitly defined " +
                    ctx.var(e).name);
            say("Step2." + std::to_string(side) + " " + ctx.var(e).name +
                ": assume " + print_qf(ctx, qf_lits(cube)));
            say("define " + ctx.var(e).name + " := " + ctx.print_term(*t));
            w2.expl.emplace_back(e, *t);
            move_to_defined(w2, e);
            out.push_back(std::move(w2));
        }
        return out;
    }

    std::vector<WorkingFormula> do_step1(const WorkingFormula& w) {
        std::vector<QFF> n1, n2;
        for (VarId e : w.psi1.roles.exists) {
            n1.push_back(qf_not(impl_def(w, 1, e)));
            n2.push_back(qf_not(impl_def(w, 2, e)));
        }
        auto cubes1 = to_dnf(ctx, qf_and(std::move(n1)));
        auto cubes2 = to_dnf(ctx, qf_and(std::move(n2)));
        std::vector<WorkingFormula> out;
        for (const auto& d1 : cubes1)
            for (const auto& d2 : cubes2) {
                WorkingFormula w2 = w;
                append_new(ctx, w2.psi1, d1);
                append_new(ctx, w2.psi2, d2);
                if (!consistent(w2)) continue;
                say("Step1: assume " + print_qf(ctx, qf_lits(d1)) + " and " +
                    print_qf(ctx, qf_lits(d2)));
                out.push_back(std::move(w2));
            }
        return out;
    }

    std::vector<WorkingFormula> expand(const WorkingFormula& win) {
        if (++expansions > 4096)
            throw InternalError("working formula budget exceeded");
        WorkingFormula w = detect_explicit_defs(ctx, win);
        if (!consistent(w)) return {};

        // An implicit definability formula equal to true signals an
        // entailed explicit definition. Recording it is the only useful
        // move; case splits on the other side only produce tautological
        // or inconsistent branches.
        for (VarId e : w.psi1.roles.exists)
            for (int side : {1, 2}) {
                if (impl_def(w, side, e)->kind != QFNode::tru) continue;
                std::vector<WorkingFormula> out;
                for (const WorkingFormula& w2 : do_step2i(w, e, side))
                    for (WorkingFormula& t : expand(w2))
                        out.push_back(std::move(t));
                return out;
            }

        if (terminal(w)) {
            say("Terminal: " + print_qf(ctx, full_formula(w)));
            return {w};
        }

        std::vector<WorkingFormula> out;
        for (const WorkingFormula& w1 : do_step1(w)) {
            WorkingFormula t = detect_explicit_defs(ctx, w1);
            if (consistent(t)) out.push_back(std::move(t));
        }
        for (VarId e : w.psi1.roles.exists)
            for (int side : {1, 2})
                for (const WorkingFormula& w2 : do_step2i(w, e, side))
                    for (WorkingFormula& t : expand(w2))
                        out.push_back(std::move(t));
        return out;
    }

    QFF full_formula(const WorkingFormula& w) {
        std::vector<Literal> lits = w.psi1.lits;
        lits.insert(lits.end(), w.psi2.lits.begin(), w.psi2.lits.end());
        for (const auto& [v, t] : w.expl)
            lits.push_back(mk_eq(ctx, ctx.t_var(v), t));
        return qf_lits(lits);
    }

    // Exhaustive expansion with equivalent duplicates removed. Recording
    // a variable through different but interchangeable terms yields the
    // same formula, so only one copy is kept.
    std::vector<WorkingFormula> terminals_of(const WorkingFormula& w) {
        std::vector<WorkingFormula> out;
        std::vector<QFF> forms;
        for (WorkingFormula& t : expand(w)) {
            QFF f = full_formula(t);
            bool dup = false;
            for (const QFF& g : forms)
                if (equivalent(ctx, f, g)) {
                    dup = true;
                    break;
                }
            if (dup) continue;
            forms.push_back(std::move(f));
            out.push_back(std::move(t));
        }
        return out;
    }

    QFF cover_of(const WorkingFormula& w) {
        if (!terminal(w))
            throw InternalError(
                "cover requested for a non-terminal working formula");
        QFF th1 = h1.cover(ctx, flatten_roles(w.psi1));
        QFF th2 = h2.cover(ctx, flatten_roles(w.psi2));
        QFF g = simplify_qf(ctx, unravel(ctx, w.expl, qf_and({th1, th2})));
        std::set<VarId> vs;
        collect_vars(ctx, g, vs);
        for (VarId v : vs)
            if (!w.psi1.roles.params.count(v))
                throw InternalError("cover output leaked variable " +
                                    ctx.var(v).name);
        return g;
    }
};

}  // namespace

TheoryHandle euf_handle() {
    TheoryHandle h;
    h.name = "euf";
    h.convex = h.stably_infinite = h.equality_interpolating = true;
    h.cover = [](Ctx& ctx, const Constraint& c) {
        return euf_cover(ctx, c, c.roles.exists);
    };
    h.impl_def = [](Ctx& ctx, const Constraint& c, VarId e) {
        return cover_impl_def(ctx, c, e, [](Ctx& cx, const Constraint& d) {
            return euf_cover(cx, d, d.roles.exists);
        });
    };
    h.interp_term = [](Ctx& ctx, const Constraint& c, VarId e) {
        std::map<VarId, TermId> ren;
        Constraint dbl = doubled_constraint(ctx, c, ren);
        Constraint copy = c;
        copy.lits.assign(dbl.lits.begin() + static_cast<long>(c.lits.size()),
                         dbl.lits.end());
        return euf_interpolating_term(ctx, c, copy, e);
    };
    return h;
}

TheoryHandle lra_handle() {
    TheoryHandle h;
    h.name = "lra";
    h.convex = h.stably_infinite = h.equality_interpolating = true;
    h.cover = [](Ctx& ctx, const Constraint& c) {
        return lra_cover(ctx, lin_system_of(ctx, c));
    };
    h.impl_def = [](Ctx& ctx, const Constraint& c, VarId e) {
        LinSystem sys = lin_system_of(ctx, c);
        std::set<VarId> params;
        collect_vars(ctx, c, params);
        for (VarId v : sys.evars) params.erase(v);
        return lra_impl_def(ctx, sys, e, params);
    };
    h.interp_term = [](Ctx& ctx, const Constraint& c, VarId e) {
        return lra_interpolating_term(ctx, lin_system_of(ctx, c), e);
    };
    return h;
}

TheoryHandle idl_handle() {
    TheoryHandle h;
    h.name = "idl";
    h.convex = false;
    h.stably_infinite = true;
    h.equality_interpolating = true;
    auto reject = []() -> QFF {
        throw InternalError(
            "integer difference procedures are not implemented; the "
            "combination loop rejects this handle first");
    };
    h.cover = [reject](Ctx&, const Constraint&) { return reject(); };
    h.impl_def = [reject](Ctx&, const Constraint&, VarId) { return reject(); };
    h.interp_term = [](Ctx&, const Constraint&,
                       VarId) -> std::optional<TermId> {
        throw InternalError(
            "integer difference procedures are not implemented; the "
            "combination loop rejects this handle first");
    };
    return h;
}

WorkingFormula detect_explicit_defs(Ctx& ctx, WorkingFormula w) {
    for (;;) {
        bool moved = false;
        for (Constraint* side : {&w.psi1, &w.psi2}) {
            const std::set<VarId>& ex = w.psi1.roles.exists;
            for (std::size_t i = 0; i < side->lits.size(); ++i) {
                const Literal& l = side->lits[i];
                if (!l.pos || l.atom.is_pred || l.atom.rel != Rel::eq)
                    continue;
                VarId v{};
                TermId t{};
                bool found = false;
                for (auto [a, b] :
                     {std::pair(l.atom.lhs, l.atom.rhs),
                      std::pair(l.atom.rhs, l.atom.lhs)}) {
                    const TermNode& n = ctx.term(a);
                    if (n.kind != TermKind::var) continue;
                    if (!ex.count(n.var)) continue;
                    if (ctx.has_var_in(b, ex)) continue;
                    v = n.var;
                    t = b;
                    found = true;
                    break;
                }
                if (!found) continue;
                w.expl.emplace_back(v, t);
                side->lits.erase(side->lits.begin() + static_cast<long>(i));
                for (Constraint* s : {&w.psi1, &w.psi2}) {
                    s->roles.exists.erase(v);
                    s->roles.defined.insert(v);
                }
                moved = true;
                break;
            }
            if (moved) break;
        }
        if (!moved) return w;
    }
}

QFF unravel(Ctx& ctx, const ExplDef& expl, QFF f) {
    for (auto it = expl.rbegin(); it != expl.rend(); ++it)
        f = substitute(ctx, f, {{it->first, it->second}});
    std::set<VarId> left;
    collect_vars(ctx, f, left);
    for (const auto& [v, t] : expl) {
        (void)t;
        if (left.count(v))
            throw DanglingDefError("definition for " + ctx.var(v).name +
                                   " left unresolved");
    }
    return f;
}

bool is_terminal(Ctx& ctx, const WorkingFormula& w, const TheoryHandle& h1,
                 const TheoryHandle& h2) {
    Run run{ctx, h1, h2, nullptr, {}, 0};
    return run.terminal(w);
}

std::vector<WorkingFormula> step1(Ctx& ctx, const WorkingFormula& w,
                                  const TheoryHandle& h1,
                                  const TheoryHandle& h2) {
    Run run{ctx, h1, h2, nullptr, {}, 0};
    return run.do_step1(w);
}

std::vector<WorkingFormula> step2i(Ctx& ctx, const WorkingFormula& w, VarId e,
                                   int side, const TheoryHandle& h1,
                                   const TheoryHandle& h2) {
    Run run{ctx, h1, h2, nullptr, {}, 0};
    return run.do_step2i(w, e, side);
}

std::vector<WorkingFormula> to_terminal(Ctx& ctx, const WorkingFormula& w,
                                        const TheoryHandle& h1,
                                        const TheoryHandle& h2) {
    Run run{ctx, h1, h2, nullptr, {}, 0};
    return run.terminals_of(w);
}

QFF terminal_cover(Ctx& ctx, const WorkingFormula& w, const TheoryHandle& h1,
                   const TheoryHandle& h2) {
    Run run{ctx, h1, h2, nullptr, {}, 0};
    return run.cover_of(w);
}

QFF combined_cover(Ctx& ctx, const Constraint& phi,
                   const std::set<VarId>& evars, const TheoryHandle& h1,
                   const TheoryHandle& h2, const CombineOptions& opts) {
    for (const TheoryHandle* h : {&h1, &h2}) {
        std::string lack = !h->convex                  ? "convexity"
                           : !h->stably_infinite       ? "stable infiniteness"
                           : !h->equality_interpolating
                               ? "the equality interpolating property"
                               : "";
        if (!lack.empty())
            throw UnsupportedCombinationError(
                "theory '" + h->name + "' lacks " + lack +
                "; the combination admits primitive formulas without covers");
    }

    Constraint input = phi;
    input.roles.exists = evars;
    input.roles.params.clear();
    input.roles.defined.clear();
    std::set<VarId> all;
    collect_vars(ctx, phi, all);
    for (VarId v : all)
        if (!evars.count(v)) input.roles.params.insert(v);
    if (evars.empty()) return qf_lits(input.lits);

    Run run{ctx, h1, h2, opts.trace, {}, 0};
    FreshGen fresh;
    PurifyResult pr = purify(ctx, input, fresh);
    WorkingFormula base{{}, pr.psi1, pr.psi2};
    base = detect_explicit_defs(ctx, base);
    for (const auto& [v, t] : base.expl)
        run.say("define " + ctx.var(v).name + " := " + ctx.print_term(t));

    auto parts = enumerate_partitions(ctx, base.psi1.roles.exists);
    run.say("partition count: " + std::to_string(parts.size()));

    std::vector<QFF> disjuncts;
    for (const PartitionEntry& pe : parts) {
        std::string desc;
        for (const auto& blk : pe.partition.blocks) {
            desc += "{";
            for (VarId v : blk) desc += " " + ctx.var(v).name;
            desc += " }";
        }
        run.say("partition " + desc);

        WorkingFormula w = base;
        std::map<VarId, TermId> sub;
        for (const auto& [v, r] : pe.rep_subst)
            if (v != r) sub[v] = ctx.t_var(r);
        if (!sub.empty()) {
            w.psi1 = substitute(ctx, w.psi1, sub);
            w.psi2 = substitute(ctx, w.psi2, sub);
        }
        std::set<VarId> reps(pe.partition.reps.begin(),
                             pe.partition.reps.end());
        for (Constraint* s : {&w.psi1, &w.psi2}) s->roles.exists = reps;
        for (const Literal& l : pe.diseqs) {
            w.psi1.lits.push_back(l);
            w.psi2.lits.push_back(l);
        }
        if (!run.consistent(w)) {
            run.say("partition inconsistent, dropped");
            continue;
        }

        auto terminals = run.terminals_of(w);
        run.say("terminal formulas: " + std::to_string(terminals.size()));
        std::vector<QFF> branch;
        for (const WorkingFormula& t : terminals)
            branch.push_back(run.cover_of(t));

        if (!entails(ctx, run.full_formula(w), qf_or(branch)))
            throw InternalError(
                "branch covers are not entailed by the strengthened input");
        for (QFF& d : branch) disjuncts.push_back(std::move(d));
    }

    // absorb disjuncts that entail a kept one
    std::vector<QFF> kept;
    for (const QFF& d : disjuncts) {
        bool absorbed = false;
        for (const QFF& k : kept)
            if (entails(ctx, d, k)) {
                absorbed = true;
                break;
            }
        if (absorbed) continue;
        std::vector<QFF> next;
        for (QFF& k : kept)
            if (!entails(ctx, k, d)) next.push_back(std::move(k));
        next.push_back(d);
        kept = std::move(next);
    }
    QFF res = qf_or(std::move(kept));
    run.say("cover: " + print_qf(ctx, res));
    return res;
}

}  // namespace covers
