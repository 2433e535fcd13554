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

#include "covers/solver.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

namespace covers {

// ---------------------------------------------------------------------------
// Linear atoms
// ---------------------------------------------------------------------------

LinAtom normalize(LinAtom a) {
    for (auto it = a.coeffs.begin(); it != a.coeffs.end();) {
        if (it->second == 0)
            it = a.coeffs.erase(it);
        else
            ++it;
    }
    if (a.coeffs.empty()) return a;
    Rational lead = a.coeffs.begin()->second;
    Rational scale = lead < 0 ? -lead : lead;
    if (scale != 1) {
        for (auto& [t, c] : a.coeffs) c /= scale;
        a.constant /= scale;
    }
    if ((a.rel == LinRel::eq || a.rel == LinRel::neq) &&
        a.coeffs.begin()->second < 0) {
        for (auto& [t, c] : a.coeffs) c = -c;
        a.constant = -a.constant;
    }
    return a;
}

LinAtom lin_combine(const LinAtom& a, const Rational& ca, const LinAtom& b,
                    const Rational& cb, LinRel rel) {
    LinAtom r;
    r.rel = rel;
    r.coeffs = a.coeffs;
    for (auto& [t, c] : r.coeffs) c *= ca;
    for (const auto& [t, c] : b.coeffs) r.coeffs[t] += cb * c;
    r.constant = ca * a.constant + cb * b.constant;
    return normalize(std::move(r));
}

void lin_of_term(Ctx& ctx, TermId t, const Rational& scale,
                 std::map<TermId, Rational>& coeffs, Rational& constant) {
    if (ctx.sort_of(t) != ctx.num_sort())
        throw TheoryError("arithmetic view of non-arithmetic term: " +
                          ctx.print_term(t));
    const TermNode& n = ctx.term(t);
    switch (n.kind) {
        case TermKind::num:
            constant += scale * n.num;
            return;
        case TermKind::add:
            for (TermId k : n.kids) lin_of_term(ctx, k, scale, coeffs, constant);
            return;
        case TermKind::mul:
            lin_of_term(ctx, n.kids[0], scale * n.num, coeffs, constant);
            return;
        case TermKind::var:
        case TermKind::app:
            coeffs[t] += scale;
            return;
    }
}

LinAtom lin_of_literal(Ctx& ctx, const Literal& l) {
    if (l.atom.is_pred)
        throw TheoryError("predicate literal has no arithmetic view");
    LinAtom a;
    if (l.atom.rel == Rel::eq) {
        a.rel = l.pos ? LinRel::eq : LinRel::neq;
    } else {
        if (!l.pos) throw InternalError("unnormalized order literal");
        a.rel = l.atom.rel == Rel::le ? LinRel::le : LinRel::lt;
    }
    lin_of_term(ctx, l.atom.lhs, 1, a.coeffs, a.constant);
    lin_of_term(ctx, l.atom.rhs, -1, a.coeffs, a.constant);
    return normalize(std::move(a));
}

Literal lit_of_lin(Ctx& ctx, const LinAtom& a) {
    std::vector<TermId> lhs, rhs;
    for (const auto& [t, c] : a.coeffs) {
        if (c > 0)
            lhs.push_back(ctx.t_mul(c, t));
        else
            rhs.push_back(ctx.t_mul(-c, t));
    }
    if (a.constant > 0) lhs.push_back(ctx.t_num(a.constant));
    if (a.constant < 0) rhs.push_back(ctx.t_num(-a.constant));
    TermId l = ctx.t_add(std::move(lhs));
    TermId r = ctx.t_add(std::move(rhs));
    switch (a.rel) {
        case LinRel::le: return mk_le(ctx, l, r);
        case LinRel::lt: return mk_lt(ctx, l, r);
        case LinRel::eq: return mk_eq(ctx, l, r);
        case LinRel::neq: return mk_neq(ctx, l, r);
    }
    throw InternalError("bad relation");
}

std::string print_lin(Ctx& ctx, const LinAtom& a) {
    return print_literal(ctx, lit_of_lin(ctx, a));
}

// ---------------------------------------------------------------------------
// Congruence closure
// ---------------------------------------------------------------------------

std::string EGraph::signature(TermId app) {
    const TermNode& n = ctx_->term(app);
    std::ostringstream os;
    switch (n.kind) {
        case TermKind::app: os << "a" << n.sym; break;
        case TermKind::add: os << "+"; break;
        case TermKind::mul: os << "*" << rational_str(n.num); break;
        default: throw InternalError("leaf has no congruence signature");
    }
    for (TermId k : n.kids) os << "|" << find(k);
    return os.str();
}

void EGraph::add_term(TermId t) {
    if (parent_.count(t)) return;
    const TermNode& n = ctx_->term(t);
    for (TermId k : n.kids) add_term(k);
    parent_[t] = t;
    members_[t] = {t};
    if (!n.kids.empty()) {
        for (TermId k : n.kids) watchers_[find(k)].push_back(t);
        std::string sig = signature(t);
        auto it = sig_table_.find(sig);
        if (it != sig_table_.end()) {
            merge(t, it->second);
        } else {
            sig_table_[sig] = t;
        }
    }
}

TermId EGraph::find(TermId t) {
    add_term(t);
    return parent_.at(t);
}

bool EGraph::same_class(TermId a, TermId b) { return find(a) == find(b); }

bool EGraph::must_differ(TermId a, TermId b) {
    TermId ra = find(a), rb = find(b);
    if (ra == rb) return false;
    for (const auto& [p, q] : diseqs_) {
        TermId rp = find(p), rq = find(q);
        if ((rp == ra && rq == rb) || (rp == rb && rq == ra)) return true;
    }
    return false;
}

void EGraph::union_roots(TermId ra, TermId rb) {
    if (ra == rb) return;
    TermId win = ra, lose = rb;
    if (members_[win].size() < members_[lose].size() ||
        (members_[win].size() == members_[lose].size() && lose < win))
        std::swap(win, lose);
    for (TermId m : members_[lose]) parent_[m] = win;
    auto& wm = members_[win];
    auto& lm = members_[lose];
    wm.insert(wm.end(), lm.begin(), lm.end());
    members_.erase(lose);
    auto lw = watchers_.find(lose);
    if (lw != watchers_.end()) {
        auto& ww = watchers_[win];
        ww.insert(ww.end(), lw->second.begin(), lw->second.end());
        watchers_.erase(lw);
    }
}

void EGraph::merge(TermId a, TermId b) {
    add_term(a);
    add_term(b);
    std::deque<std::pair<TermId, TermId>> pending = {{a, b}};
    while (!pending.empty()) {
        auto [x, y] = pending.front();
        pending.pop_front();
        TermId rx = find(x), ry = find(y);
        if (rx == ry) continue;
        // keep the watcher list of the losing root for re-canonicalization
        TermId win = rx, lose = ry;
        if (members_[win].size() < members_[lose].size() ||
            (members_[win].size() == members_[lose].size() && lose < win))
            std::swap(win, lose);
        std::vector<TermId> to_rescan = watchers_[lose];
        union_roots(win, lose);
        for (TermId w : to_rescan) {
            std::string sig = signature(w);
            auto it = sig_table_.find(sig);
            if (it != sig_table_.end()) {
                if (find(it->second) != find(w))
                    pending.emplace_back(w, it->second);
            } else {
                sig_table_[sig] = w;
            }
        }
        for (const auto& [p, q] : diseqs_)
            if (find(p) == find(q)) incons_ = true;
    }
}

void EGraph::add_diseq(TermId a, TermId b) {
    add_term(a);
    add_term(b);
    if (same_class(a, b)) incons_ = true;
    TermId p = std::min(a, b), q = std::max(a, b);
    diseqs_.insert({p, q});
}

std::vector<TermId> EGraph::registered() const {
    std::vector<TermId> out;
    out.reserve(parent_.size());
    for (const auto& [t, r] : parent_) out.push_back(t);
    return out;
}

std::vector<TermId> EGraph::class_members(TermId t) {
    return members_.at(find(t));
}

// ---------------------------------------------------------------------------
// Predicate encoding
// ---------------------------------------------------------------------------

TermId marker_true(Ctx& ctx) {
    SymId f;
    if (auto found = ctx.find_fun("%tt")) {
        f = *found;
    } else {
        SortId prop;
        if (auto s = ctx.find_sort("%prop"))
            prop = *s;
        else
            prop = ctx.add_sort("%prop", false);
        f = ctx.add_fun("%tt", {}, prop, Side::sigma1);
    }
    return ctx.t_app(f, {});
}

// P(args) is modelled as the equation %P(args) = %tt
Literal encode_pred(Ctx& ctx, const Literal& l) {
    const PredInfo& pi = ctx.pred(l.atom.pred);
    TermId tt = marker_true(ctx);
    SymId f;
    if (auto found = ctx.find_fun("%" + pi.name)) {
        f = *found;
    } else {
        f = ctx.add_fun("%" + pi.name, pi.domain, ctx.sort_of(tt),
                        Side::sigma1);
    }
    TermId app = ctx.t_app(f, l.atom.args);
    return l.pos ? mk_eq(ctx, app, tt) : mk_neq(ctx, app, tt);
}

bool term_has_arith(const Ctx& ctx, TermId t) {
    const TermNode& n = ctx.term(t);
    if (n.kind == TermKind::num || n.kind == TermKind::add ||
        n.kind == TermKind::mul)
        return true;
    for (TermId k : n.kids)
        if (term_has_arith(ctx, k)) return true;
    return false;
}

bool literal_is_euf(const Ctx& ctx, const Literal& l) {
    if (l.atom.is_pred) {
        for (TermId a : l.atom.args)
            if (term_has_arith(ctx, a)) return false;
        return true;
    }
    if (l.atom.rel != Rel::eq) return false;
    return !term_has_arith(ctx, l.atom.lhs) && !term_has_arith(ctx, l.atom.rhs);
}

SatVerdict cc_sat(Ctx& ctx, const Constraint& c) {
    for (const Literal& l : c.lits)
        if (!literal_is_euf(ctx, l))
            throw TheoryError("non-equational literal in congruence check: " +
                              print_literal(ctx, l));

    auto runs_unsat = [&](const std::vector<Literal>& lits) {
        EGraph g(ctx);
        for (const Literal& raw : lits) {
            Literal l = raw.atom.is_pred ? encode_pred(ctx, raw) : raw;
            if (l.pos)
                g.merge(l.atom.lhs, l.atom.rhs);
            else
                g.add_diseq(l.atom.lhs, l.atom.rhs);
            if (g.inconsistent()) return true;
        }
        return false;
    };

    SatVerdict v;
    if (!runs_unsat(c.lits)) {
        v.sat = true;
        EGraph g(ctx);
        std::set<VarId> vars;
        for (const Literal& raw : c.lits) {
            Literal l = raw.atom.is_pred ? encode_pred(ctx, raw) : raw;
            collect_vars(ctx, raw, vars);
            if (l.pos)
                g.merge(l.atom.lhs, l.atom.rhs);
            else
                g.add_diseq(l.atom.lhs, l.atom.rhs);
        }
        std::vector<VarId> vs(vars.begin(), vars.end());
        for (std::size_t i = 0; i < vs.size(); ++i)
            for (std::size_t j = i + 1; j < vs.size(); ++j) {
                if (ctx.var(vs[i]).sort != ctx.var(vs[j]).sort) continue;
                if (g.same_class(ctx.t_var(vs[i]), ctx.t_var(vs[j])))
                    v.arrangement.emplace_back(vs[i], vs[j]);
            }
        return v;
    }
    v.sat = false;
    std::vector<Literal> core = c.lits;
    for (std::size_t i = 0; i < core.size();) {
        std::vector<Literal> trial = core;
        trial.erase(trial.begin() + static_cast<long>(i));
        if (runs_unsat(trial))
            core = std::move(trial);
        else
            ++i;
    }
    v.core = std::move(core);
    return v;
}

// ---------------------------------------------------------------------------
// Fourier-Motzkin
// ---------------------------------------------------------------------------

namespace {

using Branch = std::vector<LinAtom>;

struct DirInfo {
    std::map<TermId, Rational> dir;  // lead coefficient +1
    std::optional<std::pair<Rational, bool>> lb, ub;  // value, strict
    std::optional<Rational> eq;
    std::set<Rational> neqs;
};

std::string dir_key(const std::map<TermId, Rational>& dir) {
    std::ostringstream os;
    for (const auto& [t, c] : dir) os << t << ":" << rational_str(c) << ",";
    return os.str();
}

// groups atoms by direction, tightens bounds, detects infeasibility
std::optional<Branch> normalize_branch(Branch b) {
    std::map<std::string, DirInfo> groups;
    for (LinAtom& raw : b) {
        LinAtom a = normalize(std::move(raw));
        if (a.coeffs.empty()) {
            bool ok = a.rel == LinRel::le   ? a.constant <= 0
                      : a.rel == LinRel::lt  ? a.constant < 0
                      : a.rel == LinRel::eq  ? a.constant == 0
                                             : a.constant != 0;
            if (!ok) return std::nullopt;
            continue;
        }
        bool flip = a.coeffs.begin()->second < 0;
        std::map<TermId, Rational> dir = a.coeffs;
        if (flip)
            for (auto& [t, c] : dir) c = -c;
        Rational bound = flip ? a.constant : -a.constant;
        DirInfo& g = groups[dir_key(dir)];
        if (g.dir.empty()) g.dir = dir;
        switch (a.rel) {
            case LinRel::le:
            case LinRel::lt: {
                bool strict = a.rel == LinRel::lt;
                if (!flip) {
                    if (!g.ub || bound < g.ub->first ||
                        (bound == g.ub->first && strict))
                        g.ub = {bound, strict};
                } else {
                    if (!g.lb || bound > g.lb->first ||
                        (bound == g.lb->first && strict))
                        g.lb = {bound, strict};
                }
                break;
            }
            case LinRel::eq:
                if (g.eq && *g.eq != bound) return std::nullopt;
                g.eq = bound;
                break;
            case LinRel::neq:
                g.neqs.insert(bound);
                break;
        }
    }

    Branch out;
    for (auto& [key, g] : groups) {
        auto emit = [&](const Rational& value, LinRel rel) {
            LinAtom a;
            a.coeffs = g.dir;
            a.constant = -value;
            a.rel = rel;
            out.push_back(normalize(std::move(a)));
        };
        if (g.eq) {
            Rational e = *g.eq;
            if (g.lb && (g.lb->first > e || (g.lb->first == e && g.lb->second)))
                return std::nullopt;
            if (g.ub && (g.ub->first < e || (g.ub->first == e && g.ub->second)))
                return std::nullopt;
            if (g.neqs.count(e)) return std::nullopt;
            emit(e, LinRel::eq);
            continue;
        }
        // a bound that cannot be attained because of a disequality is strict
        if (g.ub && !g.ub->second && g.neqs.count(g.ub->first)) {
            g.ub->second = true;
            g.neqs.erase(g.ub->first);
        }
        if (g.lb && !g.lb->second && g.neqs.count(g.lb->first)) {
            g.lb->second = true;
            g.neqs.erase(g.lb->first);
        }
        if (g.lb && g.ub) {
            if (g.lb->first > g.ub->first) return std::nullopt;
            if (g.lb->first == g.ub->first) {
                if (g.lb->second || g.ub->second) return std::nullopt;
                if (g.neqs.count(g.lb->first)) return std::nullopt;
                emit(g.lb->first, LinRel::eq);
                continue;
            }
        }
        if (g.lb) {
            LinAtom a;
            for (const auto& [t, c] : g.dir) a.coeffs[t] = -c;
            a.constant = g.lb->first;
            a.rel = g.lb->second ? LinRel::lt : LinRel::le;
            out.push_back(normalize(std::move(a)));
        }
        if (g.ub) emit(g.ub->first, g.ub->second ? LinRel::lt : LinRel::le);
        for (const Rational& e : g.neqs) {
            if (g.lb && (e < g.lb->first || (e == g.lb->first && g.lb->second)))
                continue;
            if (g.ub && (e > g.ub->first || (e == g.ub->first && g.ub->second)))
                continue;
            emit(e, LinRel::neq);
        }
    }
    return out;
}

// removes `key` from the branch; may split on a disequality
std::vector<Branch> eliminate_key(const Branch& b, TermId key) {
    // prefer an equation: exact substitution
    for (std::size_t i = 0; i < b.size(); ++i) {
        const LinAtom& eq = b[i];
        if (eq.rel != LinRel::eq) continue;
        auto it = eq.coeffs.find(key);
        if (it == eq.coeffs.end()) continue;
        Rational c = it->second;
        Branch r;
        for (std::size_t j = 0; j < b.size(); ++j) {
            if (j == i) continue;
            auto jt = b[j].coeffs.find(key);
            if (jt == b[j].coeffs.end()) {
                r.push_back(b[j]);
            } else {
                r.push_back(
                    lin_combine(b[j], 1, eq, -jt->second / c, b[j].rel));
            }
        }
        return {r};
    }
    // split a disequality through the key
    for (std::size_t i = 0; i < b.size(); ++i) {
        const LinAtom& ne = b[i];
        if (ne.rel != LinRel::neq || !ne.coeffs.count(key)) continue;
        Branch lo = b, hi = b;
        lo[i].rel = LinRel::lt;
        hi[i].rel = LinRel::lt;
        for (auto& [t, c] : hi[i].coeffs) c = -c;
        hi[i].constant = -hi[i].constant;
        return {lo, hi};
    }
    // plain Fourier-Motzkin combination
    Branch uppers, lowers, rest;
    for (const LinAtom& a : b) {
        auto it = a.coeffs.find(key);
        if (it == a.coeffs.end()) {
            rest.push_back(a);
        } else if (it->second > 0) {
            uppers.push_back(a);
        } else {
            lowers.push_back(a);
        }
    }
    Branch r = rest;
    for (const LinAtom& u : uppers)
        for (const LinAtom& l : lowers) {
            Rational cu = u.coeffs.at(key), cl = l.coeffs.at(key);
            LinRel rel = (u.rel == LinRel::lt || l.rel == LinRel::lt)
                             ? LinRel::lt
                             : LinRel::le;
            r.push_back(lin_combine(u, -cl, l, cu, rel));
        }
    return {r};
}

// DNF of the projection: each surviving branch is a feasible conjunction
// free of the given keys
std::vector<Branch> fm_core(const std::vector<LinAtom>& atoms,
                            const std::set<TermId>& keys) {
    std::deque<Branch> work = {atoms};
    std::vector<Branch> done;
    std::size_t steps = 0;
    while (!work.empty()) {
        if (++steps > (1u << 16))
            throw InternalError("projection case split limit exceeded");
        Branch b = std::move(work.front());
        work.pop_front();
        auto norm = normalize_branch(std::move(b));
        if (!norm) continue;
        std::optional<TermId> key;
        for (const LinAtom& a : *norm) {
            for (const auto& [t, c] : a.coeffs)
                if (keys.count(t) && (!key || t < *key)) key = t;
        }
        if (!key) {
            done.push_back(std::move(*norm));
            continue;
        }
        for (Branch& nb : eliminate_key(*norm, *key))
            work.push_back(std::move(nb));
    }
    return done;
}

std::string branch_key(Ctx& ctx, const Branch& b) {
    std::vector<std::string> parts;
    parts.reserve(b.size());
    for (const LinAtom& a : b) parts.push_back(print_lin(ctx, a));
    std::sort(parts.begin(), parts.end());
    std::string key;
    for (const std::string& p : parts) key += p + ";";
    return key;
}

std::vector<Branch> dedup_branches(Ctx& ctx, std::vector<Branch> bs) {
    std::map<std::string, Branch> by_key;
    std::map<std::string, std::set<std::string>> atom_sets;
    for (Branch& b : bs) {
        std::string k = branch_key(ctx, b);
        if (by_key.count(k)) continue;
        std::set<std::string> atoms;
        for (const LinAtom& a : b) atoms.insert(print_lin(ctx, a));
        by_key.emplace(k, std::move(b));
        atom_sets.emplace(k, std::move(atoms));
    }
    // drop branches strictly stronger than a kept one (supersets)
    std::vector<Branch> out;
    for (auto& [k, b] : by_key) {
        bool subsumed = false;
        for (auto& [k2, s2] : atom_sets) {
            if (k2 == k) continue;
            if (std::includes(atom_sets[k].begin(), atom_sets[k].end(),
                              s2.begin(), s2.end())) {
                subsumed = true;
                break;
            }
        }
        if (!subsumed) out.push_back(std::move(b));
    }
    return out;
}

QFF branches_to_qf(Ctx& ctx, const std::vector<Branch>& bs) {
    std::vector<QFF> disjuncts;
    for (const Branch& b : bs) {
        std::vector<QFF> lits;
        lits.reserve(b.size());
        for (const LinAtom& a : b) lits.push_back(qf_lit(lit_of_lin(ctx, a)));
        disjuncts.push_back(qf_and(std::move(lits)));
    }
    return qf_or(std::move(disjuncts));
}

std::set<TermId> all_keys(const std::vector<LinAtom>& atoms) {
    std::set<TermId> keys;
    for (const LinAtom& a : atoms)
        for (const auto& [t, c] : a.coeffs) keys.insert(t);
    return keys;
}

}  // namespace

bool lra_sat(Ctx& ctx, const std::vector<LinAtom>& atoms) {
    (void)ctx;
    return !fm_core(atoms, all_keys(atoms)).empty();
}

QFF fm_eliminate(Ctx& ctx, const std::vector<LinAtom>& atoms,
                 const std::set<VarId>& drop) {
    std::set<TermId> keys;
    for (VarId v : drop) keys.insert(ctx.t_var(v));
    for (const LinAtom& a : atoms)
        for (const auto& [t, c] : a.coeffs)
            if (ctx.term(t).kind == TermKind::app && ctx.has_var_in(t, drop))
                throw TheoryError(
                    "cannot project through an uninterpreted application: " +
                    ctx.print_term(t));
    auto branches = dedup_branches(ctx, fm_core(atoms, keys));
    std::sort(branches.begin(), branches.end(),
              [&](const Branch& a, const Branch& b) {
                  return branch_key(ctx, a) < branch_key(ctx, b);
              });
    return branches_to_qf(ctx, branches);
}

std::vector<std::pair<VarId, VarId>> implied_equalities_lra(
    Ctx& ctx, const std::vector<LinAtom>& atoms,
    const std::vector<std::pair<VarId, VarId>>& pairs) {
    if (!lra_sat(ctx, atoms))
        throw InfeasibleError("implied-equality query over unsatisfiable system");
    std::vector<std::pair<VarId, VarId>> out;
    for (const auto& [v, w] : pairs) {
        LinAtom less;
        less.rel = LinRel::lt;
        less.coeffs[ctx.t_var(v)] = 1;
        less.coeffs[ctx.t_var(w)] += -1;
        std::vector<LinAtom> probe = atoms;
        probe.push_back(normalize(less));
        if (lra_sat(ctx, probe)) continue;
        for (auto& [t, c] : less.coeffs) c = -c;
        probe.back() = normalize(less);
        if (lra_sat(ctx, probe)) continue;
        out.emplace_back(v, w);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Nelson-Oppen
// ---------------------------------------------------------------------------

namespace {

struct SplitSides {
    std::vector<Literal> euf;
    std::vector<LinAtom> arith;
    std::vector<VarId> shared;
};

SplitSides split_sides(Ctx& ctx, const std::vector<Literal>& lits) {
    Constraint c;
    c.lits = lits;
    FreshGen fresh{"%p", 0};
    PurifyResult p = purify(ctx, c, fresh);
    SplitSides s;
    s.euf = p.psi1.lits;
    for (const Literal& l : p.psi2.lits)
        s.arith.push_back(lin_of_literal(ctx, l));
    std::set<VarId> v1, v2;
    for (const Literal& l : p.psi1.lits) collect_vars(ctx, l, v1);
    for (const Literal& l : p.psi2.lits) collect_vars(ctx, l, v2);
    for (VarId v : v1)
        if (v2.count(v) && ctx.sort(ctx.var(v).sort).shared)
            s.shared.push_back(v);
    return s;
}

// convex equality-propagation loop; returns equal shared pairs on sat
std::optional<std::vector<std::pair<VarId, VarId>>> no_convex_run(
    Ctx& ctx, const std::vector<Literal>& lits) {
    SplitSides s = split_sides(ctx, lits);
    std::set<std::pair<VarId, VarId>> known;
    std::vector<std::pair<VarId, VarId>> shared_pairs;
    for (std::size_t i = 0; i < s.shared.size(); ++i)
        for (std::size_t j = i + 1; j < s.shared.size(); ++j)
            shared_pairs.emplace_back(s.shared[i], s.shared[j]);

    for (;;) {
        Constraint euf;
        euf.lits = s.euf;
        SatVerdict v1 = s.euf.empty() ? SatVerdict{true, {}, {}}
                                      : cc_sat(ctx, euf);
        if (!v1.sat) return std::nullopt;
        if (!lra_sat(ctx, s.arith)) return std::nullopt;

        std::vector<std::pair<VarId, VarId>> fresh_eqs;
        for (const auto& [v, w] : v1.arrangement) {
            std::pair<VarId, VarId> key{std::min(v, w), std::max(v, w)};
            bool is_shared =
                std::count(s.shared.begin(), s.shared.end(), v) &&
                std::count(s.shared.begin(), s.shared.end(), w);
            if (is_shared && !known.count(key)) fresh_eqs.push_back(key);
        }
        if (!s.arith.empty() && !shared_pairs.empty()) {
            std::vector<std::pair<VarId, VarId>> ask;
            for (const auto& p : shared_pairs)
                if (!known.count(p)) ask.push_back(p);
            for (const auto& p : implied_equalities_lra(ctx, s.arith, ask))
                fresh_eqs.push_back(p);
        }
        std::sort(fresh_eqs.begin(), fresh_eqs.end());
        fresh_eqs.erase(std::unique(fresh_eqs.begin(), fresh_eqs.end()),
                        fresh_eqs.end());
        std::vector<std::pair<VarId, VarId>> added;
        for (const auto& p : fresh_eqs)
            if (known.insert(p).second) added.push_back(p);
        if (added.empty())
            return std::vector<std::pair<VarId, VarId>>(known.begin(),
                                                        known.end());
        for (const auto& [v, w] : added) {
            Literal eq = mk_eq(ctx, ctx.t_var(v), ctx.t_var(w));
            s.euf.push_back(eq);
            s.arith.push_back(lin_of_literal(ctx, eq));
        }
    }
}

// arrangement-guessing mode: complete for any disjoint combination of
// stably infinite components, including the multi-sorted tame setting
std::optional<std::vector<std::pair<VarId, VarId>>> no_guess_run(
    Ctx& ctx, const std::vector<Literal>& lits) {
    SplitSides s = split_sides(ctx, lits);
    std::set<VarId> shared(s.shared.begin(), s.shared.end());
    for (const PartitionEntry& e : enumerate_partitions(ctx, shared)) {
        std::vector<Literal> arrangement;
        for (const auto& [v, rep] : e.rep_subst) {
            if (ctx.var(v).sort != ctx.var(rep).sort) goto next_partition;
            arrangement.push_back(mk_eq(ctx, ctx.t_var(v), ctx.t_var(rep)));
        }
        for (const Literal& d : e.diseqs) arrangement.push_back(d);
        {
            std::vector<Literal> euf = s.euf;
            std::vector<LinAtom> arith = s.arith;
            for (const Literal& l : arrangement) {
                euf.push_back(l);
                // order-sort arrangement literals have no arithmetic view
                if (ctx.sort_of(l.atom.lhs) == ctx.num_sort())
                    arith.push_back(lin_of_literal(ctx, l));
            }
            Constraint c;
            c.lits = euf;
            if (!cc_sat(ctx, c).sat) continue;
            if (!lra_sat(ctx, arith)) continue;
            std::vector<std::pair<VarId, VarId>> eqs;
            for (const auto& [v, rep] : e.rep_subst)
                eqs.emplace_back(std::min(v, rep), std::max(v, rep));
            return eqs;
        }
    next_partition:;
    }
    return std::nullopt;
}

}  // namespace

SatVerdict nelson_oppen_sat(Ctx& ctx, const Constraint& c,
                            bool guess_arrangements) {
    auto run = [&](const std::vector<Literal>& lits) {
        return guess_arrangements ? no_guess_run(ctx, lits)
                                  : no_convex_run(ctx, lits);
    };
    SatVerdict v;
    auto r = run(c.lits);
    if (r) {
        v.sat = true;
        std::set<VarId> original;
        collect_vars(ctx, c, original);
        for (const auto& [a, b] : *r)
            if (original.count(a) && original.count(b))
                v.arrangement.emplace_back(a, b);
        return v;
    }
    v.sat = false;
    std::vector<Literal> core = c.lits;
    for (std::size_t i = 0; i < core.size();) {
        std::vector<Literal> trial = core;
        trial.erase(trial.begin() + static_cast<long>(i));
        if (!run(trial))
            core = std::move(trial);
        else
            ++i;
    }
    v.core = std::move(core);
    return v;
}

namespace {

// Depth-first cube enumeration of `pending` (each entry carries a negation
// flag). Returns true when every cube is unsatisfiable, stopping at the
// first satisfiable one instead of materializing the whole DNF.
bool cubes_unsat(Ctx& ctx, std::vector<std::pair<QFF, bool>> pending,
                 std::vector<Literal> cube, std::size_t& budget) {
    while (!pending.empty()) {
        auto [f, neg] = pending.back();
        pending.pop_back();
        switch (f->kind) {
            case QFNode::tru:
                if (neg) return true;
                continue;
            case QFNode::fls:
                if (!neg) return true;
                continue;
            case QFNode::neg:
                pending.emplace_back(f->kids[0], !neg);
                continue;
            case QFNode::conj:
            case QFNode::disj: {
                bool conjunctive = (f->kind == QFNode::conj) != neg;
                if (conjunctive) {
                    for (const QFF& k : f->kids) pending.emplace_back(k, neg);
                    continue;
                }
                for (const QFF& k : f->kids) {
                    auto sub = pending;
                    sub.emplace_back(k, neg);
                    if (!cubes_unsat(ctx, sub, cube, budget)) return false;
                }
                return true;
            }
            case QFNode::lit: {
                Literal l = neg ? negate(f->l) : f->l;
                bool closed = false, dup = false;
                for (const Literal& m : cube) {
                    if (same_literal(ctx, m, l)) dup = true;
                    if (complementary(ctx, m, l)) closed = true;
                }
                if (closed) return true;
                if (!dup) cube.push_back(l);
                continue;
            }
        }
    }
    if (budget == 0) throw InternalError("entailment cube budget exceeded");
    --budget;
    Constraint c;
    c.lits = std::move(cube);
    return !nelson_oppen_sat(ctx, c).sat;
}

}  // namespace

bool entails(Ctx& ctx, const QFF& hypothesis, const QFF& conclusion) {
    // hypothesis last so its literals enter the cube before the
    // conclusion's negation branches
    std::size_t budget = std::size_t{1} << 16;
    return cubes_unsat(
        ctx, {{conclusion, true}, {hypothesis, false}}, {}, budget);
}

bool equivalent(Ctx& ctx, const QFF& a, const QFF& b) {
    return entails(ctx, a, b) && entails(ctx, b, a);
}

// ---------------------------------------------------------------------------
// Bounded residue oracle
// ---------------------------------------------------------------------------

namespace {

void collect_numerals(const Ctx& ctx, TermId t, std::set<TermId>& out) {
    const TermNode& n = ctx.term(t);
    if (n.kind == TermKind::num) out.insert(t);
    for (TermId k : n.kids) collect_numerals(ctx, k, out);
}

void collect_syms(const Ctx& ctx, TermId t, std::set<SymId>& out) {
    const TermNode& n = ctx.term(t);
    if (n.kind == TermKind::app) out.insert(n.sym);
    for (TermId k : n.kids) collect_syms(ctx, k, out);
}

struct OracleProbe {
    Ctx& ctx;
    const Constraint& phi;
    bool pure_euf;
    EGraph base;

    OracleProbe(Ctx& c, const Constraint& p, bool pure)
        : ctx(c), phi(p), pure_euf(pure), base(c) {
        if (pure_euf) {
            for (const Literal& raw : phi.lits) {
                Literal l = raw.atom.is_pred ? encode_pred(ctx, raw) : raw;
                if (l.pos)
                    base.merge(l.atom.lhs, l.atom.rhs);
                else
                    base.add_diseq(l.atom.lhs, l.atom.rhs);
            }
        }
    }

    // does phi entail the clause (disjunction of lits)?
    bool entailed(const std::vector<Literal>& clause) {
        if (pure_euf) {
            EGraph g = base;
            for (const Literal& raw : clause) {
                Literal l = raw.atom.is_pred ? encode_pred(ctx, raw) : raw;
                if (l.pos)
                    g.add_diseq(l.atom.lhs, l.atom.rhs);
                else
                    g.merge(l.atom.lhs, l.atom.rhs);
            }
            return g.inconsistent();
        }
        Constraint c;
        c.lits = phi.lits;
        for (const Literal& l : clause) c.lits.push_back(negate(l));
        return !nelson_oppen_sat(ctx, c).sat;
    }
};

}  // namespace

QFF bounded_residue_oracle(Ctx& ctx, const Constraint& phi,
                           const std::set<VarId>& evars, int depth) {
    bool pure_euf = true;
    for (const Literal& l : phi.lits)
        if (!literal_is_euf(ctx, l)) pure_euf = false;

    std::set<VarId> occurring;
    collect_vars(ctx, phi, occurring);
    std::set<SymId> syms;
    std::set<TermId> numerals;
    std::set<PredId> preds;
    for (const Literal& l : phi.lits) {
        if (l.atom.is_pred) {
            preds.insert(l.atom.pred);
            for (TermId a : l.atom.args) {
                collect_syms(ctx, a, syms);
                collect_numerals(ctx, a, numerals);
            }
        } else {
            collect_syms(ctx, l.atom.lhs, syms);
            collect_syms(ctx, l.atom.rhs, syms);
            collect_numerals(ctx, l.atom.lhs, numerals);
            collect_numerals(ctx, l.atom.rhs, numerals);
        }
    }

    // parameter-term universe: parameters and numerals closed under the
    // function symbols that occur in phi
    std::vector<TermId> universe;
    for (VarId v : occurring)
        if (!evars.count(v)) universe.push_back(ctx.t_var(v));
    if (!pure_euf)
        for (TermId n : numerals) universe.push_back(n);
    std::set<TermId> in_universe(universe.begin(), universe.end());
    const std::size_t term_cap = pure_euf ? 40 : 10;
    for (int d = 0; d < depth; ++d) {
        std::size_t level_end = universe.size();
        std::vector<TermId> added;
        for (SymId f : syms) {
            const FunInfo& fi = ctx.fun(f);
            // enumerate argument tuples over the current universe
            std::vector<std::vector<TermId>> tuples = {{}};
            for (SortId want : fi.domain) {
                std::vector<std::vector<TermId>> next;
                for (const auto& tup : tuples)
                    for (std::size_t i = 0; i < level_end; ++i) {
                        if (ctx.sort_of(universe[i]) != want) continue;
                        auto t2 = tup;
                        t2.push_back(universe[i]);
                        next.push_back(std::move(t2));
                    }
                tuples = std::move(next);
            }
            for (const auto& tup : tuples) {
                TermId t = ctx.t_app(f, tup);
                if (in_universe.insert(t).second) added.push_back(t);
            }
        }
        std::sort(added.begin(), added.end());
        universe.insert(universe.end(), added.begin(), added.end());
        if (universe.size() > term_cap)
            throw OracleLimitError("residue oracle universe too large");
    }

    // candidate literals
    std::vector<Literal> candidates;
    for (std::size_t i = 0; i < universe.size(); ++i)
        for (std::size_t j = i + 1; j < universe.size(); ++j) {
            TermId a = universe[i], b = universe[j];
            if (ctx.sort_of(a) != ctx.sort_of(b)) continue;
            candidates.push_back(mk_eq(ctx, a, b));
            candidates.push_back(mk_neq(ctx, a, b));
            if (!pure_euf && ctx.sort_of(a) == ctx.num_sort()) {
                candidates.push_back(mk_le(ctx, a, b));
                candidates.push_back(mk_le(ctx, b, a));
                candidates.push_back(mk_lt(ctx, a, b));
                candidates.push_back(mk_lt(ctx, b, a));
            }
        }
    for (PredId p : preds) {
        const PredInfo& pi = ctx.pred(p);
        std::vector<std::vector<TermId>> tuples = {{}};
        for (SortId want : pi.domain) {
            std::vector<std::vector<TermId>> next;
            for (const auto& tup : tuples)
                for (TermId u : universe) {
                    if (ctx.sort_of(u) != want) continue;
                    auto t2 = tup;
                    t2.push_back(u);
                    next.push_back(std::move(t2));
                }
            tuples = std::move(next);
        }
        for (const auto& tup : tuples) {
            candidates.push_back(mk_pred(ctx, p, tup, true));
            candidates.push_back(mk_pred(ctx, p, tup, false));
        }
    }

    const std::size_t probe_cap = pure_euf ? 60000 : 3000;
    std::size_t probes =
        candidates.size() + candidates.size() * candidates.size() / 2;
    if (probes > probe_cap)
        throw OracleLimitError("residue oracle probe budget exceeded");

    OracleProbe probe(ctx, phi, pure_euf);
    if (pure_euf && probe.base.inconsistent()) return qf_false();
    if (!pure_euf) {
        Constraint whole;
        whole.lits = phi.lits;
        if (!nelson_oppen_sat(ctx, whole).sat) return qf_false();
    }

    // a clause true in the theory alone carries no information about phi;
    // congruence makes some pair clauses valid even in the free theory
    auto is_valid = [&](const std::vector<Literal>& clause) {
        if (pure_euf) {
            EGraph g(ctx);
            for (const Literal& raw : clause) {
                Literal l = raw.atom.is_pred ? encode_pred(ctx, raw) : raw;
                if (l.pos)
                    g.add_diseq(l.atom.lhs, l.atom.rhs);
                else
                    g.merge(l.atom.lhs, l.atom.rhs);
            }
            return g.inconsistent();
        }
        Constraint c;
        for (const Literal& l : clause) c.lits.push_back(negate(l));
        return !nelson_oppen_sat(ctx, c).sat;
    };

    // entailed units
    std::vector<Literal> units;
    std::vector<Literal> open;
    for (const Literal& l : candidates) {
        if (is_valid({l})) continue;
        if (probe.entailed({l}))
            units.push_back(l);
        else
            open.push_back(l);
    }

    // entailed two-literal clauses among the remaining candidates; clauses
    // the units and earlier clauses already force are dropped, otherwise
    // congruence consequences of each other pile up and the output balloons
    std::vector<std::vector<Literal>> pair_clauses;
    auto apply_lit = [&](EGraph& g, Literal l) {
        if (l.atom.is_pred) l = encode_pred(ctx, l);
        if (l.pos)
            g.merge(l.atom.lhs, l.atom.rhs);
        else
            g.add_diseq(l.atom.lhs, l.atom.rhs);
    };
    auto redundant = [&](const std::vector<Literal>& clause) {
        if (pure_euf) {
            EGraph g(ctx);
            for (const Literal& u : units) apply_lit(g, u);
            for (const Literal& l : clause) apply_lit(g, negate(l));
            auto rec = [&](auto&& self, const EGraph& at,
                           std::size_t idx) -> bool {
                if (at.inconsistent()) return true;
                if (idx == pair_clauses.size()) return false;
                for (const Literal& l : pair_clauses[idx]) {
                    EGraph g2 = at;
                    apply_lit(g2, l);
                    if (!self(self, g2, idx + 1)) return false;
                }
                return true;
            };
            return rec(rec, g, 0);
        }
        std::vector<QFF> have;
        for (const Literal& u : units) have.push_back(qf_lit(u));
        for (const auto& pc : pair_clauses)
            have.push_back(qf_or({qf_lit(pc[0]), qf_lit(pc[1])}));
        return entails(ctx, qf_and(have),
                       qf_or({qf_lit(clause[0]), qf_lit(clause[1])}));
    };
    for (std::size_t i = 0; i < open.size(); ++i)
        for (std::size_t j = i + 1; j < open.size(); ++j) {
            if (complementary(ctx, open[i], open[j])) continue;
            if (probe.entailed({open[i], open[j]}) &&
                !is_valid({open[i], open[j]}) &&
                !redundant({open[i], open[j]})) {
                Literal a = open[i], b = open[j];
                if (print_literal(ctx, b) < print_literal(ctx, a))
                    std::swap(a, b);
                pair_clauses.push_back({a, b});
                if (pair_clauses.size() > 16)
                    throw OracleLimitError(
                        "residue oracle clause set too large");
            }
        }

    std::sort(units.begin(), units.end(),
              [&](const Literal& a, const Literal& b) {
                  return print_literal(ctx, a) < print_literal(ctx, b);
              });
    std::sort(pair_clauses.begin(), pair_clauses.end(),
              [&](const auto& a, const auto& b) {
                  return print_literal(ctx, a[0]) + print_literal(ctx, a[1]) <
                         print_literal(ctx, b[0]) + print_literal(ctx, b[1]);
              });

    std::vector<QFF> clauses;
    for (const Literal& l : units) clauses.push_back(qf_lit(l));
    for (const auto& pc : pair_clauses)
        clauses.push_back(qf_or({qf_lit(pc[0]), qf_lit(pc[1])}));
    return qf_and(std::move(clauses));
}

}  // namespace covers
