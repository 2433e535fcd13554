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

#include "covers/euf_cover.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <utility>

#include "covers/solver.hpp"

namespace covers {

std::string print_clit(const Ctx& ctx, const CLit& c) {
    if (c.cond.empty()) return print_literal(ctx, c.lit);
    std::string s = "[";
    for (std::size_t i = 0; i < c.cond.size(); ++i) {
        if (i) s += ", ";
        s += ctx.print_term(c.cond[i].first) + " = " +
             ctx.print_term(c.cond[i].second);
    }
    return s + "] " + print_literal(ctx, c.lit);
}

namespace {

using Cond = std::vector<std::pair<TermId, TermId>>;

// Ground saturation under a lexicographic path order whose precedence puts
// existential variables on top, then function symbols, then parameters.
// Maximal sides containing an existential variable rewrite downward, so a
// cyclic equation like e = g(g(e)) orients toward e and terminates.
// Equations between terms that differ only below an existential position
// are merged under an equational condition on the differing parameter
// parts.
struct Saturation {
    Ctx& ctx;
    std::set<VarId> evars;
    std::deque<CLit> passive;
    std::vector<CLit> active;
    std::set<std::string> seen;
    std::vector<Cond> refutations;
    std::vector<std::string> log;
    bool unsat = false;
    int derived = 0;

    Saturation(Ctx& c, const std::set<VarId>& ev) : ctx(c), evars(ev) {}

    bool efree(TermId t) const { return !ctx.has_var_in(t, evars); }

    bool efree_lit(const Literal& l) const {
        return efree(l.atom.lhs) && efree(l.atom.rhs);
    }

    // precedence key: existential variables above function symbols above
    // parameters and numerals; the truth marker sits at the bottom so that
    // encoded atoms always keep it on the small side
    std::pair<int, std::string> head(TermId t) const {
        const TermNode& n = ctx.term(t);
        switch (n.kind) {
            case TermKind::app: {
                const std::string& name = ctx.fun(n.sym).name;
                if (name == "%tt") return {0, name};
                return {2, name};
            }
            case TermKind::num:
                return {1, "#" + ctx.print_term(t)};
            case TermKind::var: {
                const std::string& name = ctx.var(n.var).name;
                if (evars.count(n.var)) return {3, name};
                return {1, name};
            }
            default:
                throw TheoryError("arithmetic term in free saturation");
        }
    }

    bool gt(TermId s, TermId t) const {
        if (s == t) return false;
        const TermNode& ns = ctx.term(s);
        if (ns.kind == TermKind::app)
            for (TermId k : ns.kids)
                if (k == t || gt(k, t)) return true;
        auto ps = head(s), pt = head(t);
        const TermNode& nt = ctx.term(t);
        if (pt < ps) {
            for (TermId k : nt.kids)
                if (!gt(s, k)) return false;
            return true;
        }
        if (ps == pt && ns.kind == TermKind::app) {
            for (std::size_t i = 0; i < ns.kids.size(); ++i) {
                if (ns.kids[i] == nt.kids[i]) continue;
                if (!gt(ns.kids[i], nt.kids[i])) return false;
                for (std::size_t j = i + 1; j < nt.kids.size(); ++j)
                    if (!gt(s, nt.kids[j])) return false;
                return true;
            }
        }
        return false;
    }

    bool is_marker(TermId t) const {
        const TermNode& n = ctx.term(t);
        return n.kind == TermKind::app && ctx.fun(n.sym).name[0] == '%';
    }

    // equational condition under which a equals b, factored through the
    // positions that contain existential variables; nothing when the sides
    // can never be forced equal this way. Same-head applications decompose
    // argumentwise so that only the mismatching positions end up in the
    // condition; mismatches that still contain existential variables block
    // the inference, and so do encoded atoms, whose biconditional is not a
    // literal.
    std::optional<Cond> decompose(TermId a, TermId b) const {
        if (a == b) return Cond{};
        const TermNode& na = ctx.term(a);
        const TermNode& nb = ctx.term(b);
        if (na.kind == TermKind::app && nb.kind == TermKind::app &&
            na.sym == nb.sym) {
            Cond out;
            for (std::size_t i = 0; i < na.kids.size(); ++i) {
                auto sub = decompose(na.kids[i], nb.kids[i]);
                if (!sub) return std::nullopt;
                out.insert(out.end(), sub->begin(), sub->end());
            }
            return out;
        }
        if (efree(a) && efree(b) && !is_marker(a) && !is_marker(b)) {
            if (ctx.sort_of(a) != ctx.sort_of(b)) return std::nullopt;
            return Cond{{a, b}};
        }
        return std::nullopt;
    }

    // canonical form; nothing when the clause is trivially true
    std::optional<CLit> norm(CLit c) const {
        Cond cond;
        for (auto [a, b] : c.cond) {
            if (a == b) continue;
            const TermNode& na = ctx.term(a);
            const TermNode& nb = ctx.term(b);
            if (na.kind == TermKind::num && nb.kind == TermKind::num)
                return std::nullopt;  // condition can never hold
            if (b < a) std::swap(a, b);
            cond.emplace_back(a, b);
        }
        std::sort(cond.begin(), cond.end());
        cond.erase(std::unique(cond.begin(), cond.end()), cond.end());
        Literal l = c.lit;
        if (l.pos && l.atom.lhs == l.atom.rhs) return std::nullopt;
        if (gt(l.atom.rhs, l.atom.lhs)) std::swap(l.atom.lhs, l.atom.rhs);
        if (l.pos)
            for (const auto& [a, b] : cond)
                if ((a == l.atom.lhs && b == l.atom.rhs) ||
                    (a == l.atom.rhs && b == l.atom.lhs))
                    return std::nullopt;  // condition contains the literal
        return CLit{l, std::move(cond)};
    }

    void push(CLit c, const std::string& rule) {
        auto n = norm(std::move(c));
        if (!n) return;
        if (++derived > 10000)
            throw InternalError("saturation watchdog exceeded");
        log.push_back(rule + ": " + print_clit(ctx, *n));
        passive.push_back(std::move(*n));
    }

    bool subsumes(const CLit& a, const CLit& b) const {
        return same_literal(ctx, a.lit, b.lit) &&
               std::includes(b.cond.begin(), b.cond.end(), a.cond.begin(),
                             a.cond.end());
    }

    void refute(Cond cond) {
        if (cond.empty()) {
            unsat = true;
            log.push_back("refute: false");
            return;
        }
        for (const Cond& r : refutations)
            if (std::includes(cond.begin(), cond.end(), r.begin(), r.end()))
                return;
        std::erase_if(refutations, [&](const Cond& r) {
            return std::includes(r.begin(), r.end(), cond.begin(),
                                 cond.end());
        });
        std::string s = "refute: under";
        for (const auto& [x, y] : cond)
            s += " " + ctx.print_term(x) + "=" + ctx.print_term(y);
        log.push_back(std::move(s));
        refutations.push_back(std::move(cond));
    }

    bool contains(TermId hay, TermId needle) const {
        if (hay == needle) return true;
        for (TermId k : ctx.term(hay).kids)
            if (contains(k, needle)) return true;
        return false;
    }

    bool mentions(const CLit& c, TermId t) const {
        if (contains(c.lit.atom.lhs, t) || contains(c.lit.atom.rhs, t))
            return true;
        for (const auto& [a, b] : c.cond)
            if (contains(a, t) || contains(b, t)) return true;
        return false;
    }

    // normal form under the unconditional oriented equations; every rewrite
    // strictly decreases the term, so the loop bottoms out
    TermId nf(TermId t) const {
        for (;;) {
            const TermNode& n = ctx.term(t);
            TermId t2 = t;
            if (n.kind == TermKind::app) {
                std::vector<TermId> kids = n.kids;
                bool changed = false;
                for (TermId& k : kids) {
                    TermId k2 = nf(k);
                    changed = changed || k2 != k;
                    k = k2;
                }
                if (changed) t2 = ctx.t_app(n.sym, std::move(kids));
            }
            TermId t3 = t2;
            for (const CLit& a : active)
                if (a.cond.empty() && a.lit.pos && a.lit.atom.lhs == t3) {
                    t3 = a.lit.atom.rhs;
                    break;
                }
            if (t3 == t) return t;
            t = t3;
        }
    }

    CLit simplify(CLit c) const {
        c.lit.atom.lhs = nf(c.lit.atom.lhs);
        c.lit.atom.rhs = nf(c.lit.atom.rhs);
        for (auto& [x, y] : c.cond) {
            x = nf(x);
            y = nf(y);
        }
        return c;
    }

    TermId replace(TermId t, TermId l, TermId r) const {
        if (t == l) return r;
        const TermNode& n = ctx.term(t);
        if (n.kind != TermKind::app) return t;
        std::vector<TermId> kids = n.kids;
        bool changed = false;
        for (TermId& k : kids) {
            TermId k2 = replace(k, l, r);
            changed = changed || k2 != k;
            k = k2;
        }
        return changed ? ctx.t_app(n.sym, std::move(kids)) : t;
    }

    void superpose(const CLit& from, const CLit& into) {
        if (!from.lit.pos) return;
        if (efree_lit(from.lit) && efree_lit(into.lit) &&
            from.cond.empty() && into.cond.empty())
            return;  // consequences already follow from the free fragment
        TermId l = from.lit.atom.lhs, r = from.lit.atom.rhs;
        TermId s = into.lit.atom.lhs;
        auto conclude = [&](TermId s2, const Cond& m, const char* tag) {
            CLit out;
            out.lit = into.lit;
            out.lit.atom.lhs = s2;
            out.cond = from.cond;
            out.cond.insert(out.cond.end(), into.cond.begin(),
                            into.cond.end());
            out.cond.insert(out.cond.end(), m.begin(), m.end());
            push(std::move(out), tag);
        };
        if (auto m = decompose(l, s)) {
            if (gt(s, r)) conclude(r, *m, "sup");
        }
        // below the root only exact occurrences are rewritten; conditional
        // overlaps at inner positions blow the derived set up without
        // adding residue consequences
        const TermNode& ns = ctx.term(s);
        if (ns.kind == TermKind::app) {
            std::vector<TermId> kids = ns.kids;
            bool changed = false;
            for (TermId& k : kids) {
                TermId k2 = replace(k, l, r);
                changed = changed || k2 != k;
                k = k2;
            }
            if (changed)
                conclude(ctx.t_app(ns.sym, std::move(kids)), Cond{}, "sup");
        }
    }

    void resolve(const CLit& g) {
        if (g.lit.pos) return;
        if (efree_lit(g.lit)) return;  // would only restate the clause
        if (auto m = decompose(g.lit.atom.lhs, g.lit.atom.rhs)) {
            CLit probe{g.lit, g.cond};
            probe.cond.insert(probe.cond.end(), m->begin(), m->end());
            if (auto n = norm(std::move(probe))) refute(n->cond);
        }
    }

    void run() {
        while (!passive.empty() && !unsat) {
            CLit g = passive.front();
            passive.pop_front();
            g = simplify(std::move(g));
            auto n = norm(std::move(g));
            if (!n) continue;
            g = std::move(*n);
            if (!seen.insert(print_clit(ctx, g)).second) continue;
            bool redundant = false;
            for (const Cond& r : refutations)
                if (std::includes(g.cond.begin(), g.cond.end(), r.begin(),
                                  r.end()))
                    redundant = true;
            for (const CLit& a : active)
                if (subsumes(a, g)) redundant = true;
            if (redundant) continue;
            if (!g.lit.pos && g.lit.atom.lhs == g.lit.atom.rhs) {
                refute(g.cond);
                continue;
            }
            resolve(g);
            if (unsat) break;
            std::erase_if(active,
                          [&](const CLit& a) { return subsumes(g, a); });
            if (g.cond.empty() && g.lit.pos) {
                // the new equation rewrites affected clauses from scratch
                TermId l = g.lit.atom.lhs;
                std::vector<CLit> moved;
                std::erase_if(active, [&](const CLit& a) {
                    if (!mentions(a, l)) return false;
                    moved.push_back(a);
                    return true;
                });
                for (CLit& a : moved) passive.push_back(std::move(a));
            }
            active.push_back(g);
            std::vector<CLit> snapshot = active;
            for (const CLit& a : snapshot) {
                superpose(g, a);
                if (!(same_literal(ctx, a.lit, g.lit) && a.cond == g.cond))
                    superpose(a, g);
            }
        }
    }

};

// A literal produced by the engine, mapped back to the surface syntax with
// predicate markers decoded.
Literal surface_literal(Ctx& ctx, Literal l) {
    const TermNode& lhs = ctx.term(l.atom.lhs);
    if (lhs.kind == TermKind::app) {
        const std::string& fname = ctx.fun(lhs.sym).name;
        if (fname.size() > 1 && fname[0] == '%' && fname != "%tt") {
            if (l.atom.rhs != marker_true(ctx))
                throw InternalError("predicate marker leak");
            auto p = ctx.find_pred(fname.substr(1));
            if (!p) throw InternalError("predicate marker leak");
            return mk_pred(ctx, *p, lhs.kids, l.pos);
        }
    }
    return l;
}

}  // namespace

OrderedLiteralSet euf_saturate(Ctx& ctx, const Constraint& phi,
                               const std::set<VarId>& evars) {
    Saturation sat(ctx, evars);
    for (const Literal& raw : phi.lits) {
        if (!literal_is_euf(ctx, raw))
            throw TheoryError("free saturation requires equational input");
        Literal l = raw.atom.is_pred ? encode_pred(ctx, raw) : raw;
        sat.push({l, {}}, "input");
    }
    sat.run();

    OrderedLiteralSet out;
    out.unsat = sat.unsat;
    for (const CLit& a : sat.active)
        out.literals.push_back({surface_literal(ctx, a.lit), a.cond});
    out.refutations = sat.refutations;
    std::sort(out.literals.begin(), out.literals.end(),
              [&](const CLit& a, const CLit& b) {
                  return print_clit(ctx, a) < print_clit(ctx, b);
              });
    out.derivation = sat.log;
    return out;
}

QFF euf_cover(Ctx& ctx, const Constraint& phi, const std::set<VarId>& evars) {
    Constraint gate;
    gate.lits = phi.lits;
    if (!cc_sat(ctx, gate).sat) return qf_false();

    Saturation sat(ctx, evars);
    for (const Literal& raw : phi.lits) {
        Literal l = raw.atom.is_pred ? encode_pred(ctx, raw) : raw;
        sat.push({l, {}}, "input");
    }
    sat.run();
    if (sat.unsat) return qf_false();

    // clauses over the parameters: refutation conditions negated, and each
    // existential-free literal under its negated condition
    std::vector<std::vector<Literal>> clauses;
    for (const Cond& r : sat.refutations) {
        std::vector<Literal> cl;
        for (auto [x, y] : r) cl.push_back(mk_neq(ctx, x, y));
        clauses.push_back(std::move(cl));
    }
    std::vector<Literal> units;
    std::vector<std::vector<Literal>> conditional;
    for (const CLit& a : sat.active) {
        if (!sat.efree_lit(a.lit)) continue;
        if (a.cond.empty()) {
            units.push_back(a.lit);
            continue;
        }
        std::vector<Literal> cl;
        for (auto [x, y] : a.cond) cl.push_back(mk_neq(ctx, x, y));
        cl.push_back(a.lit);
        conditional.push_back(std::move(cl));
    }

    // a conditional clause the units already force carries no information
    auto forced = [&](const std::vector<Literal>& cl) {
        EGraph g(ctx);
        for (const Literal& u : units) {
            if (u.pos)
                g.merge(u.atom.lhs, u.atom.rhs);
            else
                g.add_diseq(u.atom.lhs, u.atom.rhs);
        }
        for (const Literal& l : cl) {
            Literal n = negate(l);
            if (n.pos)
                g.merge(n.atom.lhs, n.atom.rhs);
            else
                g.add_diseq(n.atom.lhs, n.atom.rhs);
        }
        return g.inconsistent();
    };
    for (auto& cl : conditional)
        if (!forced(cl)) clauses.push_back(std::move(cl));
    for (const Literal& u : units) clauses.push_back({u});

    // drop tautologies and duplicates, subsumed clauses, decode predicates
    std::vector<QFF> parts;
    std::set<std::string> seen_clause;
    std::vector<std::set<std::string>> kept_sets;
    std::vector<std::vector<Literal>> kept;
    for (auto& cl : clauses) {
        std::sort(cl.begin(), cl.end(),
                  [&](const Literal& a, const Literal& b) {
                      return print_literal(ctx, a) < print_literal(ctx, b);
                  });
        cl.erase(std::unique(cl.begin(), cl.end(),
                             [&](const Literal& a, const Literal& b) {
                                 return same_literal(ctx, a, b);
                             }),
                 cl.end());
        bool taut = false;
        for (std::size_t i = 0; i < cl.size() && !taut; ++i)
            for (std::size_t j = i + 1; j < cl.size() && !taut; ++j)
                if (complementary(ctx, cl[i], cl[j])) taut = true;
        if (taut) continue;
        std::set<std::string> key;
        for (const Literal& l : cl) key.insert(print_literal(ctx, l));
        bool subsumed = false;
        for (const auto& k : kept_sets)
            if (std::includes(key.begin(), key.end(), k.begin(), k.end()))
                subsumed = true;
        if (subsumed) continue;
        std::string flat;
        for (const auto& s : key) flat += s + "\x01";
        if (!seen_clause.insert(flat).second) continue;
        kept_sets.push_back(std::move(key));
        kept.push_back(std::move(cl));
    }
    for (auto& cl : kept) {
        std::vector<QFF> lits;
        for (Literal& l : cl) lits.push_back(qf_lit(surface_literal(ctx, l)));
        parts.push_back(qf_or(std::move(lits)));
    }
    std::sort(parts.begin(), parts.end(), [&](const QFF& a, const QFF& b) {
        return print_qf(ctx, a) < print_qf(ctx, b);
    });
    return qf_and(std::move(parts));
}

std::optional<TermId> euf_interpolating_term(Ctx& ctx, const Constraint& a,
                                             const Constraint& b, VarId e) {
    std::set<VarId> allowed = a.roles.params;
    allowed.insert(b.roles.params.begin(), b.roles.params.end());

    EGraph g(ctx);
    auto feed = [&](const Constraint& c) {
        for (const Literal& raw : c.lits) {
            if (!literal_is_euf(ctx, raw))
                throw TheoryError(
                    "free saturation requires equational input");
            Literal l = raw.atom.is_pred ? encode_pred(ctx, raw) : raw;
            if (l.pos)
                g.merge(l.atom.lhs, l.atom.rhs);
            else
                g.add_diseq(l.atom.lhs, l.atom.rhs);
        }
    };
    feed(a);
    feed(b);
    TermId et = ctx.t_var(e);
    g.add_term(et);

    // parameter-representable classes: a parameter or numeral directly, or
    // an application whose argument classes are representable
    std::map<TermId, TermId> witness;
    bool changed = true;
    while (changed) {
        changed = false;
        for (TermId t : g.registered()) {
            TermId root = g.find(t);
            if (witness.count(root)) continue;
            const TermNode& n = ctx.term(t);
            if (n.kind == TermKind::var && allowed.count(n.var)) {
                witness[root] = t;
                changed = true;
            } else if (n.kind == TermKind::num) {
                witness[root] = t;
                changed = true;
            } else if (n.kind == TermKind::app) {
                std::vector<TermId> args;
                bool ok = true;
                for (TermId k : n.kids) {
                    auto it = witness.find(g.find(k));
                    if (it == witness.end()) {
                        ok = false;
                        break;
                    }
                    args.push_back(it->second);
                }
                if (ok) {
                    witness[root] = ctx.t_app(n.sym, std::move(args));
                    changed = true;
                }
            }
        }
    }
    auto it = witness.find(g.find(et));
    if (it == witness.end()) return std::nullopt;
    return it->second;
}

}  // namespace covers
