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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>
#include <vector>

#include "covers/euf_cover.hpp"
#include "covers/kernel.hpp"
#include "covers/solver.hpp"
#include "oracles.hpp"

using namespace covers;
using covers::testing::random_euf_constraint;

namespace {

struct EufFixture {
    Ctx ctx;
    SortId u;
    VarId x, y, z, e1, e2;
    SymId f, g, h;

    EufFixture() {
        u = ctx.add_sort("u", false);
        x = ctx.add_var("x", u);
        y = ctx.add_var("y", u);
        z = ctx.add_var("z", u);
        e1 = ctx.add_var("e1", u);
        e2 = ctx.add_var("e2", u);
        f = ctx.add_fun("f", {u}, u, Side::sigma1);
        g = ctx.add_fun("g", {u}, u, Side::sigma1);
        h = ctx.add_fun("h", {u, u}, u, Side::sigma1);
    }
    TermId V(VarId v) { return ctx.t_var(v); }

    Constraint make(std::vector<Literal> lits, std::set<VarId> evars) {
        Constraint c;
        c.lits = std::move(lits);
        c.roles.exists = std::move(evars);
        std::set<VarId> occ;
        collect_vars(ctx, c, occ);
        for (VarId v : occ)
            if (!c.roles.exists.count(v)) c.roles.params.insert(v);
        return c;
    }
};

int max_term_depth(const Ctx& ctx, const QFF& fm) {
    int best = 0;
    auto lit_terms = [&](const Literal& l, auto&& push) {
        if (l.atom.is_pred)
            for (TermId t : l.atom.args) push(t);
        else {
            push(l.atom.lhs);
            push(l.atom.rhs);
        }
    };
    auto walk = [&](auto&& self, const QFF& n) -> void {
        if (n->kind == QFNode::lit)
            lit_terms(n->l, [&](TermId t) {
                best = std::max(best, ctx.term_depth(t));
            });
        for (const QFF& k : n->kids) self(self, k);
    };
    walk(walk, fm);
    return best;
}

}  // namespace

TEST_CASE("saturated three-literal set yields the empty cover") {
    EufFixture fx;
    auto& ctx = fx.ctx;
    Constraint phi = fx.make(
        {mk_eq(ctx, ctx.t_app(fx.f, {fx.V(fx.e1)}), fx.V(fx.e1)),
         mk_eq(ctx, ctx.t_app(fx.f, {fx.V(fx.e2)}), fx.V(fx.x)),
         mk_neq(ctx, fx.V(fx.e1), fx.V(fx.e2))},
        {fx.e1, fx.e2});
    QFF cov = euf_cover(ctx, phi, {fx.e1, fx.e2});
    CHECK(print_qf(ctx, cov) == "true");

    OrderedLiteralSet sat = euf_saturate(ctx, phi, {fx.e1, fx.e2});
    CHECK(sat.literals.size() == 3);
    CHECK(sat.refutations.empty());
    CHECK_FALSE(sat.unsat);
}

TEST_CASE("explicit definition rewrites through") {
    EufFixture fx;
    auto& ctx = fx.ctx;
    Constraint phi = fx.make(
        {mk_eq(ctx, fx.V(fx.e1), fx.V(fx.x)),
         mk_eq(ctx, ctx.t_app(fx.f, {fx.V(fx.e1)}), fx.V(fx.y))},
        {fx.e1});
    QFF cov = euf_cover(ctx, phi, {fx.e1});
    CHECK(print_qf(ctx, cov) == "(= (f x) y)");
}

TEST_CASE("unconstrained images leave nothing") {
    EufFixture fx;
    auto& ctx = fx.ctx;
    Constraint phi = fx.make(
        {mk_eq(ctx, ctx.t_app(fx.f, {fx.V(fx.e1)}), fx.V(fx.x)),
         mk_eq(ctx, ctx.t_app(fx.g, {fx.V(fx.e1)}), fx.V(fx.y)),
         mk_neq(ctx, fx.V(fx.e1), fx.V(fx.x))},
        {fx.e1});
    QFF cov = euf_cover(ctx, phi, {fx.e1});
    CHECK(print_qf(ctx, cov) == "true");
    QFF oracle = bounded_residue_oracle(ctx, phi, {fx.e1}, 2);
    CHECK(equivalent(ctx, cov, oracle));
}

TEST_CASE("saturation derives rewritten facts") {
    EufFixture fx;
    auto& ctx = fx.ctx;
    {
        Constraint phi = fx.make(
            {mk_eq(ctx, ctx.t_app(fx.f, {fx.V(fx.e1)}), fx.V(fx.x)),
             mk_eq(ctx, fx.V(fx.e1), fx.V(fx.y))},
            {fx.e1});
        OrderedLiteralSet sat = euf_saturate(ctx, phi, {fx.e1});
        Literal want = mk_eq(ctx, ctx.t_app(fx.f, {fx.V(fx.y)}), fx.V(fx.x));
        bool found = false;
        for (const CLit& c : sat.literals)
            if (c.cond.empty() && same_literal(ctx, c.lit, want))
                found = true;
        CHECK(found);
    }
    {
        Constraint phi = fx.make(
            {mk_eq(ctx, ctx.t_app(fx.f, {fx.V(fx.e1)}), fx.V(fx.x)),
             mk_eq(ctx, ctx.t_app(fx.f, {fx.V(fx.e1)}), fx.V(fx.y))},
            {fx.e1});
        OrderedLiteralSet sat = euf_saturate(ctx, phi, {fx.e1});
        Literal want = mk_eq(ctx, fx.V(fx.x), fx.V(fx.y));
        Literal tnaw = mk_eq(ctx, fx.V(fx.y), fx.V(fx.x));
        bool found = false;
        for (const CLit& c : sat.literals)
            if (c.cond.empty() && (same_literal(ctx, c.lit, want) ||
                                   same_literal(ctx, c.lit, tnaw)))
                found = true;
        CHECK(found);
    }
}

TEST_CASE("shared argument forces a conditional clause") {
    EufFixture fx;
    auto& ctx = fx.ctx;
    VarId s1 = ctx.add_var("s1", fx.u);
    VarId s2 = ctx.add_var("s2", fx.u);
    VarId s3 = ctx.add_var("s3", fx.u);
    VarId s4 = ctx.add_var("s4", fx.u);
    auto V = [&](VarId v) { return ctx.t_var(v); };
    Constraint phi = fx.make(
        {mk_eq(ctx, ctx.t_app(fx.h, {V(fx.e1), V(s2)}), V(s1)),
         mk_eq(ctx, ctx.t_app(fx.h, {V(fx.e1), V(s4)}), V(s3))},
        {fx.e1});
    QFF cov = euf_cover(ctx, phi, {fx.e1});
    QFF want = qf_or({qf_lit(mk_neq(ctx, V(s2), V(s4))),
                      qf_lit(mk_eq(ctx, V(s1), V(s3)))});
    CHECK(equivalent(ctx, cov, want));
    CHECK_FALSE(entails(ctx, qf_true(), cov));
}

TEST_CASE("contradictory input covers to false") {
    EufFixture fx;
    auto& ctx = fx.ctx;
    Constraint phi = fx.make({mk_eq(ctx, fx.V(fx.x), fx.V(fx.y)),
                              mk_neq(ctx, fx.V(fx.x), fx.V(fx.y))},
                             {fx.e1});
    CHECK(print_qf(ctx, euf_cover(ctx, phi, {fx.e1})) == "false");
}

TEST_CASE("zero existentials reproduce the input") {
    EufFixture fx;
    auto& ctx = fx.ctx;
    std::mt19937 rng(41);
    for (int round = 0; round < 25; ++round) {
        Constraint phi = random_euf_constraint(
            ctx, rng, {fx.x, fx.y, fx.z}, {}, {fx.f, fx.g}, {fx.h}, 2, 5);
        QFF cov = euf_cover(ctx, phi, {});
        CAPTURE(round);
        REQUIRE(equivalent(ctx, cov, qf_lits(phi.lits)));
    }
}

TEST_CASE("covers are entailed and free of existentials") {
    EufFixture fx;
    auto& ctx = fx.ctx;
    std::mt19937 rng(43);
    std::set<VarId> evars = {fx.e1, fx.e2};
    for (int round = 0; round < 1000; ++round) {
        Constraint phi = random_euf_constraint(ctx, rng, {fx.x, fx.y, fx.z},
                                               {fx.e1, fx.e2},
                                               {fx.f, fx.g}, {fx.h}, 2, 6);
        QFF cov = euf_cover(ctx, phi, evars);
        std::set<VarId> occ;
        collect_vars(ctx, cov, occ);
        CAPTURE(round);
        REQUIRE((occ.count(fx.e1) == 0 && occ.count(fx.e2) == 0));
        REQUIRE(entails(ctx, qf_lits(phi.lits), cov));
    }
}

TEST_CASE("covers match the bounded residue oracle") {
    EufFixture fx;
    auto& ctx = fx.ctx;
    std::mt19937 rng(47);
    std::set<VarId> evars = {fx.e1, fx.e2};
    int tested = 0;
    for (int round = 0; round < 400 && tested < 80; ++round) {
        // alternate between unary-rich and binary instances small enough
        // for the oracle's bounded universe
        Constraint phi =
            round % 2 == 0
                ? random_euf_constraint(ctx, rng, {fx.x, fx.y, fx.z},
                                        {fx.e1, fx.e2}, {fx.f, fx.g}, {},
                                        2, 6)
                : random_euf_constraint(ctx, rng, {fx.x}, {fx.e1, fx.e2},
                                        {fx.f}, {fx.h}, 2, 5);
        QFF cov = euf_cover(ctx, phi, evars);
        if (max_term_depth(ctx, cov) > 2) continue;
        QFF oracle;
        try {
            oracle = bounded_residue_oracle(ctx, phi, evars, 2);
        } catch (const OracleLimitError&) {
            continue;
        }
        ++tested;
        CAPTURE(round);
        REQUIRE(equivalent(ctx, cov, oracle));
    }
    CHECK(tested >= 60);
}

TEST_CASE("predicates ride through saturation") {
    EufFixture fx;
    auto& ctx = fx.ctx;
    PredId P = ctx.add_pred("P", {fx.u}, Side::sigma1);
    {
        Constraint phi = fx.make(
            {mk_pred(ctx, P, {fx.V(fx.e1)}, true),
             mk_eq(ctx, fx.V(fx.e1), fx.V(fx.x))},
            {fx.e1});
        QFF cov = euf_cover(ctx, phi, {fx.e1});
        CHECK(equivalent(ctx, cov,
                         qf_lit(mk_pred(ctx, P, {fx.V(fx.x)}, true))));
    }
    {
        Constraint phi = fx.make(
            {mk_pred(ctx, P, {fx.V(fx.e1)}, true),
             mk_pred(ctx, P, {fx.V(fx.y)}, false),
             mk_eq(ctx, fx.V(fx.e1), fx.V(fx.x))},
            {fx.e1});
        QFF cov = euf_cover(ctx, phi, {fx.e1});
        QFF want = qf_and({qf_lit(mk_pred(ctx, P, {fx.V(fx.x)}, true)),
                           qf_lit(mk_pred(ctx, P, {fx.V(fx.y)}, false))});
        CHECK(equivalent(ctx, cov, want));
    }
}

TEST_CASE("interpolating terms come from congruence classes") {
    EufFixture fx;
    auto& ctx = fx.ctx;
    Constraint empty;
    {
        // explicit equation present
        Constraint a = fx.make(
            {mk_eq(ctx, ctx.t_app(fx.f, {fx.V(fx.e1)}), fx.V(fx.e1)),
             mk_eq(ctx, fx.V(fx.e1),
                   ctx.t_app(fx.f, {fx.V(fx.x)}))},
            {fx.e1});
        auto t = euf_interpolating_term(ctx, a, empty, fx.e1);
        REQUIRE(t.has_value());
        CHECK(ctx.print_term(*t) == "(f x)");
    }
    {
        // rewrite chain: f(e)=x, g(f(e))=e gives e = g(x)
        Constraint a = fx.make(
            {mk_eq(ctx, ctx.t_app(fx.f, {fx.V(fx.e1)}), fx.V(fx.x)),
             mk_eq(ctx,
                   ctx.t_app(fx.g, {ctx.t_app(fx.f, {fx.V(fx.e1)})}),
                   fx.V(fx.e1))},
            {fx.e1});
        auto t = euf_interpolating_term(ctx, a, empty, fx.e1);
        REQUIRE(t.has_value());
        CHECK(ctx.print_term(*t) == "(g x)");
        CHECK(entails(ctx, qf_lits(a.lits),
                      qf_lit(mk_eq(ctx, fx.V(fx.e1), *t))));
    }
    {
        // no parameter term reaches e1's class
        Constraint a = fx.make(
            {mk_eq(ctx, ctx.t_app(fx.f, {fx.V(fx.e1)}), fx.V(fx.e1)),
             mk_eq(ctx, ctx.t_app(fx.f, {fx.V(fx.e2)}), fx.V(fx.x)),
             mk_neq(ctx, fx.V(fx.e1), fx.V(fx.e2))},
            {fx.e1, fx.e2});
        CHECK_FALSE(euf_interpolating_term(ctx, a, empty, fx.e1)
                        .has_value());
    }
}
