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

#include "covers/lra_cover.hpp"

#include <algorithm>
#include <map>
#include <string>
#include <utility>

namespace covers {

namespace {

Rational coeff_of(const LinAtom& a, TermId key) {
    auto it = a.coeffs.find(key);
    return it == a.coeffs.end() ? Rational(0) : it->second;
}

LinAtom rename_keys(Ctx& ctx, const LinAtom& a,
                    const std::map<VarId, TermId>& map) {
    LinAtom out;
    out.rel = a.rel;
    out.constant = a.constant;
    for (const auto& [t, c] : a.coeffs) out.coeffs[ctx.substitute(t, map)] += c;
    return out;
}

// The system conjoined with a copy of itself whose existential variables
// are renamed to fresh ones.
struct Doubled {
    std::vector<LinAtom> atoms;
    std::map<VarId, VarId> primed;
};

Doubled double_system(Ctx& ctx, const LinSystem& sys) {
    Doubled d;
    d.atoms = sys.atoms;
    std::map<VarId, TermId> map;
    std::size_t counter = 0;
    for (VarId v : sys.evars) {
        VarId p = ctx.fresh_var(ctx.var(v).name + "~", counter, ctx.var(v).sort);
        d.primed[v] = p;
        map[v] = ctx.t_var(p);
    }
    for (const LinAtom& a : sys.atoms)
        d.atoms.push_back(rename_keys(ctx, a, map));
    return d;
}

void dnf_cubes(const QFF& f, std::vector<std::vector<Literal>>& out) {
    switch (f->kind) {
        case QFNode::fls:
            return;
        case QFNode::tru:
            out.push_back({});
            return;
        case QFNode::lit:
            out.push_back({f->l});
            return;
        case QFNode::disj:
            for (const QFF& k : f->kids) dnf_cubes(k, out);
            return;
        case QFNode::conj: {
            std::vector<Literal> cube;
            for (const QFF& k : f->kids) {
                if (k->kind != QFNode::lit)
                    throw InternalError("projection output not in clausal shape");
                cube.push_back(k->l);
            }
            out.push_back(std::move(cube));
            return;
        }
        case QFNode::neg:
            break;
    }
    throw InternalError("projection output not in clausal shape");
}

}  // namespace

QFF lra_cover(Ctx& ctx, const LinSystem& sys) {
    QFF out = fm_eliminate(ctx, sys.atoms, sys.evars);
    std::set<VarId> left;
    collect_vars(ctx, out, left);
    for (VarId v : sys.evars)
        if (left.count(v))
            throw InternalError("existential variable survived elimination");
    return out;
}

std::optional<TermId> lra_interpolating_term(Ctx& ctx, const LinSystem& sys,
                                             VarId e) {
    if (!sys.evars.count(e)) return ctx.t_var(e);

    Doubled d = double_system(ctx, sys);
    std::vector<std::pair<VarId, VarId>> probe{{e, d.primed.at(e)}};
    try {
        if (implied_equalities_lra(ctx, d.atoms, probe).empty())
            return std::nullopt;
    } catch (const InfeasibleError&) {
        // An unsatisfiable system entails every equality, so the Gaussian
        // pass below is free to look for a defining row anyway.
    }

    // Equations available for solving: the eq atoms plus every inequality
    // the system forces to hold with equality. The probe asks whether the
    // strict version is still satisfiable, which covers tight pairs
    // a <= b, b <= a as well as longer cycles of bounds.
    std::vector<LinAtom> eqs;
    for (const LinAtom& a : sys.atoms)
        if (a.rel == LinRel::eq) eqs.push_back(normalize(a));
    for (const LinAtom& a : sys.atoms) {
        if (a.rel != LinRel::le) continue;
        LinAtom strict = a;
        strict.rel = LinRel::lt;
        std::vector<LinAtom> q = sys.atoms;
        q.push_back(std::move(strict));
        if (lra_sat(ctx, q)) continue;
        LinAtom eq = a;
        eq.rel = LinRel::eq;
        eqs.push_back(normalize(eq));
    }

    // Gaussian elimination over the other existentials, lowest index
    // first. The pivot row is retired so the remaining rows end up free
    // of the pivot variable.
    for (VarId v : sys.evars) {
        if (v == e) continue;
        TermId key = ctx.t_var(v);
        std::size_t pivot = eqs.size();
        for (std::size_t i = 0; i < eqs.size(); ++i)
            if (coeff_of(eqs[i], key) != 0) {
                pivot = i;
                break;
            }
        if (pivot == eqs.size()) continue;
        LinAtom p = eqs[pivot];
        eqs.erase(eqs.begin() + static_cast<std::ptrdiff_t>(pivot));
        Rational cp = coeff_of(p, key);
        for (LinAtom& a : eqs) {
            Rational ca = coeff_of(a, key);
            if (ca == 0) continue;
            a = normalize(lin_combine(a, Rational(1), p, -ca / cp, LinRel::eq));
        }
    }

    TermId ekey = ctx.t_var(e);
    for (const LinAtom& a : eqs) {
        Rational ce = coeff_of(a, ekey);
        if (ce == 0) continue;
        bool clean = true;
        for (const auto& [t, c] : a.coeffs) {
            (void)c;
            if (t != ekey && ctx.has_var_in(t, sys.evars)) {
                clean = false;
                break;
            }
        }
        if (!clean) continue;
        std::vector<TermId> parts;
        for (const auto& [t, c] : a.coeffs) {
            if (t == ekey) continue;
            parts.push_back(ctx.t_mul(-c / ce, t));
        }
        if (a.constant != 0) parts.push_back(ctx.t_num(-a.constant / ce));
        return ctx.t_add(std::move(parts));
    }
    return std::nullopt;
}

QFF lra_impl_def(Ctx& ctx, const LinSystem& sys, VarId e,
                 const std::set<VarId>& params) {
    Doubled d = double_system(ctx, sys);
    LinAtom diff;
    diff.rel = LinRel::neq;
    diff.coeffs[ctx.t_var(e)] = 1;
    diff.coeffs[ctx.t_var(d.primed.at(e))] = -1;
    d.atoms.push_back(std::move(diff));

    std::set<VarId> drop;
    for (const LinAtom& a : d.atoms)
        for (const auto& [t, c] : a.coeffs) {
            (void)c;
            std::set<VarId> vs;
            ctx.collect_vars(t, vs);
            for (VarId v : vs)
                if (!params.count(v)) drop.insert(v);
        }

    QFF phi = fm_eliminate(ctx, d.atoms, drop);
    if (phi->kind == QFNode::fls) return qf_true();

    // The negation is stated relative to the system's own projection:
    // conjuncts the projection entails are kept as they are, the others
    // are negated, and a negated strict bound whose weak form is entailed
    // tightens to an equation.
    QFF rho = fm_eliminate(ctx, sys.atoms, drop);

    std::vector<std::vector<Literal>> cubes;
    dnf_cubes(phi, cubes);

    std::vector<QFF> parts;
    std::set<std::string> seen;
    auto add_part = [&](const QFF& p) {
        if (seen.insert(print_qf(ctx, p)).second) parts.push_back(p);
    };

    for (const std::vector<Literal>& cube : cubes) {
        std::vector<QFF> keep;
        std::set<std::string> keep_seen;
        for (const Literal& l : cube) {
            if (entails(ctx, rho, qf_lit(l))) {
                add_part(qf_lit(l));
                continue;
            }
            LinAtom la = lin_of_literal(ctx, negate(l));
            if (la.rel == LinRel::le) {
                LinAtom rev;
                rev.rel = LinRel::le;
                rev.constant = -la.constant;
                for (const auto& [t, c] : la.coeffs) rev.coeffs[t] = -c;
                if (entails(ctx, rho, qf_lit(lit_of_lin(ctx, normalize(rev)))))
                    la.rel = LinRel::eq;
            }
            QFF nl = qf_lit(lit_of_lin(ctx, normalize(la)));
            if (keep_seen.insert(print_qf(ctx, nl)).second)
                keep.push_back(nl);
        }
        if (keep.empty()) return qf_false();
        std::sort(keep.begin(), keep.end(), [&](const QFF& a, const QFF& b) {
            return print_qf(ctx, a) < print_qf(ctx, b);
        });
        add_part(qf_or(std::move(keep)));
    }

    std::sort(parts.begin(), parts.end(), [&](const QFF& a, const QFF& b) {
        return print_qf(ctx, a) < print_qf(ctx, b);
    });
    return qf_and(std::move(parts));
}

}  // namespace covers
