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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <string>
#include <vector>

#include "covers/combined.hpp"

using namespace covers;

namespace {

// The running example: a unary free function over the rationals pinched
// between two shifted copies of itself.
//
//   exists e1..e4 ( e1 = f(x1) and e2 = f(x2) and f(e3) = e3 and
//                   f(e4) = x1 and x1+e1 <= e3 and e3 <= x2+e2 and
//                   e4 = x2+e3 )
struct MixedFixture {
    Ctx ctx;
    SymId f;
    VarId x1, e1, x2, e2, e3, e4;
    TermId tx1, te1, tx2, te2, te3, te4;
    Constraint phi;
    std::set<VarId> evars;

    MixedFixture() {
        SortId num = ctx.num_sort();
        f = ctx.add_fun("f", {num}, num, Side::sigma1);
        x1 = ctx.add_var("x1", num);
        e1 = ctx.add_var("e1", num);
        x2 = ctx.add_var("x2", num);
        e2 = ctx.add_var("e2", num);
        e3 = ctx.add_var("e3", num);
        e4 = ctx.add_var("e4", num);
        tx1 = ctx.t_var(x1);
        te1 = ctx.t_var(e1);
        tx2 = ctx.t_var(x2);
        te2 = ctx.t_var(e2);
        te3 = ctx.t_var(e3);
        te4 = ctx.t_var(e4);
        phi.lits = {
            mk_eq(ctx, te1, fa(tx1)),
            mk_eq(ctx, te2, fa(tx2)),
            mk_eq(ctx, fa(te3), te3),
            mk_eq(ctx, fa(te4), tx1),
            mk_le(ctx, ctx.t_add({tx1, te1}), te3),
            mk_le(ctx, te3, ctx.t_add({tx2, te2})),
            mk_eq(ctx, te4, ctx.t_add({tx2, te3})),
        };
        evars = {e1, e2, e3, e4};
        phi.roles.params = {x1, x2};
        phi.roles.exists = evars;
    }

    TermId fa(TermId t) { return ctx.t_app(f, {t}); }

    // The expected cover, written out by hand. Three cases: the copies
    // pinch with equality, the gap stays open, or the shifts coincide.
    QFF expected() {
        TermId fx1 = fa(tx1);
        TermId fx2 = fa(tx2);
        TermId s1 = ctx.t_add({tx1, fx1});
        TermId s2 = ctx.t_add({tx2, fx2});
        TermId zero = ctx.t_num(Rational(0));
        QFF pinched = qf_lits({
            mk_neq(ctx, tx2, zero),
            mk_eq(ctx, s1, s2),
            mk_eq(ctx, fa(ctx.t_add({ctx.t_mul(Rational(2), tx2), fx2})),
                  tx1),
            mk_eq(ctx, fa(s1), s1),
        });
        QFF open_gap = qf_lits({
            mk_lt(ctx, s1, s2),
            mk_neq(ctx, tx2, zero),
        });
        QFF merged = qf_lits({
            mk_eq(ctx, tx2, zero),
            mk_eq(ctx, fx1, tx1),
            mk_le(ctx, tx1, zero),
            mk_le(ctx, tx1, fa(zero)),
        });
        return qf_or({pinched, open_gap, merged});
    }
};

bool contains_line(const std::vector<std::string>& lines,
                   const std::string& needle) {
    for (const std::string& l : lines)
        if (l.find(needle) != std::string::npos) return true;
    return false;
}

}  // namespace

TEST_CASE("running example cover matches the hand computation") {
    MixedFixture fx;
    Ctx& ctx = fx.ctx;
    std::vector<std::string> lines;
    CombineOptions opts;
    opts.trace = [&](const std::string& s) { lines.push_back(s); };

    QFF cov =
        combined_cover(ctx, fx.phi, fx.evars, euf_handle(), lra_handle(), opts);

    std::set<VarId> vs;
    collect_vars(ctx, cov, vs);
    for (VarId v : fx.evars) CHECK_FALSE(vs.count(v));
    CHECK(equivalent(ctx, cov, fx.expected()));

    // the arithmetic side pins e3 and e4 between the bounds
    CHECK(contains_line(
        lines,
        "ImplDef_{psi2,e3} = (and (= (+ x1 e1) (+ x2 e2)) (distinct x2 0))"));
    CHECK(contains_line(
        lines,
        "ImplDef_{psi2,e4} = (and (= (+ x1 e1) (+ x2 e2)) (distinct x2 0))"));
    CHECK(contains_line(lines, "define e3 := (+ x1 e1)"));
    CHECK(contains_line(lines, "define e4 := (+ x1 e1 x2)"));

    // the free function side determines nothing while e3 and e4 differ
    CHECK(contains_line(lines, "ImplDef_{psi1,e3} = false"));
    CHECK(contains_line(lines, "ImplDef_{psi1,e4} = false"));

    // two variable arrangements, two terminal formulas for the split one
    // and a single terminal formula for the merged one
    CHECK(contains_line(lines, "partition count: 2"));
    CHECK(contains_line(lines, "terminal formulas: 2"));
    CHECK(contains_line(lines, "terminal formulas: 1"));
}

TEST_CASE("running example cover is reproducible") {
    MixedFixture fx;
    QFF a = combined_cover(fx.ctx, fx.phi, fx.evars, euf_handle(),
                           lra_handle());
    QFF b = combined_cover(fx.ctx, fx.phi, fx.evars, euf_handle(),
                           lra_handle());
    CHECK(print_qf(fx.ctx, a) == print_qf(fx.ctx, b));
}

TEST_CASE("explicit definitions are detected and removed") {
    MixedFixture fx;
    Ctx& ctx = fx.ctx;
    WorkingFormula w;
    w.psi1.lits = {mk_eq(ctx, fx.te1, fx.fa(fx.tx1)),
                   mk_eq(ctx, fx.fa(fx.te3), fx.te3)};
    w.psi2.lits = {mk_eq(ctx, ctx.t_add({fx.tx1, fx.tx2}), fx.te2)};
    for (Constraint* s : {&w.psi1, &w.psi2}) {
        s->roles.params = {fx.x1, fx.x2};
        s->roles.exists = {fx.e1, fx.e2, fx.e3};
    }

    WorkingFormula d = detect_explicit_defs(ctx, w);
    REQUIRE(d.expl.size() == 2);
    CHECK(d.expl[0].first == fx.e1);
    CHECK(ctx.print_term(d.expl[0].second) == "(f x1)");
    CHECK(d.expl[1].first == fx.e2);
    CHECK(ctx.print_term(d.expl[1].second) == "(+ x1 x2)");
    REQUIRE(d.psi1.lits.size() == 1);
    CHECK(d.psi2.lits.empty());
    CHECK(d.psi1.roles.exists == std::set<VarId>{fx.e3});
    CHECK(d.psi1.roles.defined == std::set<VarId>({fx.e1, fx.e2}));
    CHECK(d.psi2.roles.defined == std::set<VarId>({fx.e1, fx.e2}));
}

TEST_CASE("definitions through other existentials stay put") {
    MixedFixture fx;
    Ctx& ctx = fx.ctx;
    WorkingFormula w;
    // e3 = x2 + e3 loops through itself, e4 = x2 + e3 waits on e3
    w.psi2.lits = {mk_eq(ctx, fx.te3, ctx.t_add({fx.tx2, fx.te3})),
                   mk_eq(ctx, fx.te4, ctx.t_add({fx.tx2, fx.te3}))};
    for (Constraint* s : {&w.psi1, &w.psi2}) {
        s->roles.params = {fx.x2};
        s->roles.exists = {fx.e3, fx.e4};
    }
    WorkingFormula d = detect_explicit_defs(ctx, w);
    CHECK(d.expl.empty());
    CHECK(d.psi2.lits.size() == 2);
}

TEST_CASE("unravel substitutes definitions back to front") {
    MixedFixture fx;
    Ctx& ctx = fx.ctx;
    ExplDef expl = {{fx.e1, fx.fa(fx.tx1)},
                    {fx.e3, ctx.t_add({fx.tx1, fx.te1})}};
    QFF g = unravel(ctx, expl, qf_lit(mk_le(ctx, fx.te3, fx.tx2)));
    QFF want = qf_lit(
        mk_le(ctx, ctx.t_add({fx.tx1, fx.fa(fx.tx1)}), fx.tx2));
    CHECK(print_qf(ctx, g) == print_qf(ctx, want));

    CHECK(print_qf(ctx, unravel(ctx, {}, want)) == print_qf(ctx, want));
}

TEST_CASE("unravel rejects definitions that resist substitution") {
    MixedFixture fx;
    Ctx& ctx = fx.ctx;
    // e1 is defined before e3 but mentions it, so eliminating e1 first
    // reintroduces e3 after e3 was already substituted away
    ExplDef expl = {{fx.e1, fx.fa(fx.te3)}, {fx.e3, fx.tx1}};
    QFF body = qf_lit(mk_le(ctx, fx.te1, fx.tx2));
    CHECK_THROWS_AS(unravel(ctx, expl, body), DanglingDefError);
}

TEST_CASE("no existential variables yields the formula itself") {
    MixedFixture fx;
    Ctx& ctx = fx.ctx;
    Constraint c;
    c.lits = {mk_le(ctx, fx.tx1, fx.tx2),
              mk_eq(ctx, fx.fa(fx.tx1), fx.tx2)};
    QFF cov = combined_cover(ctx, c, {}, euf_handle(), lra_handle());
    CHECK(equivalent(ctx, cov, qf_lits(c.lits)));
}

TEST_CASE("combination requires the convexity package") {
    MixedFixture fx;
    Ctx& ctx = fx.ctx;
    Constraint c;
    c.lits = {mk_le(ctx, fx.tx1, fx.te3)};
    CHECK_THROWS_AS(
        combined_cover(ctx, c, {fx.e3}, euf_handle(), idl_handle()),
        UnsupportedCombinationError);
    CHECK_THROWS_AS(
        combined_cover(ctx, c, {fx.e3}, idl_handle(), lra_handle()),
        UnsupportedCombinationError);
}

TEST_CASE("undetermined variables leave the working formula terminal") {
    MixedFixture fx;
    Ctx& ctx = fx.ctx;
    WorkingFormula w;
    w.psi1.lits = {mk_eq(ctx, fx.fa(fx.te3), fx.te3)};
    w.psi2.lits = {mk_le(ctx, fx.tx1, fx.te3)};
    for (Constraint* s : {&w.psi1, &w.psi2}) {
        s->roles.params = {fx.x1, fx.x2};
        s->roles.exists = {fx.e3};
    }
    TheoryHandle h1 = euf_handle(), h2 = lra_handle();
    CHECK(is_terminal(ctx, w, h1, h2));

    auto s1 = step1(ctx, w, h1, h2);
    REQUIRE(s1.size() == 1);
    CHECK(s1[0].psi1.lits.size() == w.psi1.lits.size());
    CHECK(s1[0].psi2.lits.size() == w.psi2.lits.size());

    CHECK(step2i(ctx, w, fx.e3, 1, h1, h2).empty());
    CHECK(step2i(ctx, w, fx.e3, 2, h1, h2).empty());

    auto ts = to_terminal(ctx, w, h1, h2);
    REQUIRE(ts.size() == 1);
    QFF cov = terminal_cover(ctx, ts[0], h1, h2);
    CHECK(equivalent(ctx, cov, qf_true()));
}

TEST_CASE("a pinched variable is recorded with its defining term") {
    MixedFixture fx;
    Ctx& ctx = fx.ctx;
    WorkingFormula w;
    w.psi1.lits = {mk_eq(ctx, fx.fa(fx.te3), fx.te3)};
    w.psi2.lits = {mk_le(ctx, fx.tx1, fx.te3), mk_le(ctx, fx.te3, fx.tx1)};
    for (Constraint* s : {&w.psi1, &w.psi2}) {
        s->roles.params = {fx.x1};
        s->roles.exists = {fx.e3};
    }
    TheoryHandle h1 = euf_handle(), h2 = lra_handle();
    CHECK_FALSE(is_terminal(ctx, w, h1, h2));

    auto out = step2i(ctx, w, fx.e3, 2, h1, h2);
    REQUIRE(out.size() == 1);
    REQUIRE(out[0].expl.size() == 1);
    CHECK(out[0].expl[0].first == fx.e3);
    CHECK(ctx.print_term(out[0].expl[0].second) == "x1");
    CHECK(out[0].psi1.roles.defined.count(fx.e3));
    CHECK(out[0].psi2.roles.defined.count(fx.e3));
    CHECK(out[0].psi2.roles.exists.empty());
}

TEST_CASE("an entailed definition shortcuts the expansion") {
    MixedFixture fx;
    Ctx& ctx = fx.ctx;
    WorkingFormula w;
    w.psi1.lits = {mk_eq(ctx, fx.fa(fx.te3), fx.te3),
                   mk_eq(ctx, fx.fa(fx.te3), fx.tx1)};
    w.psi2.lits = {mk_le(ctx, fx.tx2, fx.te3)};
    for (Constraint* s : {&w.psi1, &w.psi2}) {
        s->roles.params = {fx.x1, fx.x2};
        s->roles.exists = {fx.e3};
    }
    TheoryHandle h1 = euf_handle(), h2 = lra_handle();
    auto ts = to_terminal(ctx, w, h1, h2);
    REQUIRE(ts.size() == 1);
    REQUIRE(ts[0].expl.size() == 1);
    CHECK(ts[0].expl[0].first == fx.e3);
    CHECK(ctx.print_term(ts[0].expl[0].second) == "x1");

    QFF cov = terminal_cover(ctx, ts[0], h1, h2);
    QFF want = qf_lits({mk_eq(ctx, fx.fa(fx.tx1), fx.tx1),
                        mk_le(ctx, fx.tx2, fx.tx1)});
    CHECK(equivalent(ctx, cov, want));
}

TEST_CASE("covers strengthen with the input") {
    MixedFixture fx;
    Ctx& ctx = fx.ctx;
    Constraint weak;
    weak.lits = {mk_eq(ctx, fx.te1, fx.fa(fx.tx1)),
                 mk_le(ctx, ctx.t_add({fx.tx1, fx.te1}), fx.te2),
                 mk_le(ctx, fx.te2, fx.tx2)};
    Constraint strong = weak;
    strong.lits.push_back(mk_le(ctx, fx.tx2, fx.tx1));

    TheoryHandle h1 = euf_handle(), h2 = lra_handle();
    QFF cw = combined_cover(ctx, weak, {fx.e1, fx.e2}, h1, h2);
    QFF cs = combined_cover(ctx, strong, {fx.e1, fx.e2}, h1, h2);
    CHECK(entails(ctx, cs, cw));
    CHECK(entails(ctx, qf_lits(weak.lits), cw));
    QFF want = qf_lit(
        mk_le(ctx, ctx.t_add({fx.tx1, fx.fa(fx.tx1)}), fx.tx2));
    CHECK(equivalent(ctx, cw, want));
}

TEST_CASE("random mixed formulas produce entailed parameter covers") {
    std::mt19937 rng(71);
    TheoryHandle h1 = euf_handle(), h2 = lra_handle();
    int nontrivial = 0;
    for (int round = 0; round < 25; ++round) {
        Ctx ctx;
        SortId num = ctx.num_sort();
        SymId f = ctx.add_fun("f", {num}, num, Side::sigma1);
        VarId x = ctx.add_var("x", num);
        VarId y = ctx.add_var("y", num);
        VarId e1 = ctx.add_var("e1", num);
        VarId e2 = ctx.add_var("e2", num);
        std::vector<TermId> base = {ctx.t_var(x), ctx.t_var(y),
                                    ctx.t_var(e1), ctx.t_var(e2)};
        auto pick_term = [&]() {
            TermId t = base[rng() % base.size()];
            switch (rng() % 6) {
                case 0: return ctx.t_app(f, {t});
                case 1:
                case 2: return ctx.t_add({t, base[rng() % base.size()]});
                case 3: return ctx.t_num(Rational(int(rng() % 5) - 2));
                default: return t;
            }
        };
        Constraint c;
        std::size_t n = 2 + rng() % 2;
        for (std::size_t i = 0; i < n; ++i) {
            TermId a = pick_term();
            TermId b = pick_term();
            switch (rng() % 4) {
                case 0: c.lits.push_back(mk_eq(ctx, a, b)); break;
                case 1: c.lits.push_back(mk_neq(ctx, a, b)); break;
                case 2: c.lits.push_back(mk_le(ctx, a, b)); break;
                default: c.lits.push_back(mk_lt(ctx, a, b)); break;
            }
        }
        QFF cov;
        try {
            cov = combined_cover(ctx, c, {e1, e2}, h1, h2);
        } catch (const InfeasibleError&) {
            continue;
        }
        std::set<VarId> vs;
        collect_vars(ctx, cov, vs);
        CHECK_FALSE(vs.count(e1));
        CHECK_FALSE(vs.count(e2));
        CHECK(entails(ctx, qf_lits(c.lits), cov));
        if (cov->kind != QFNode::fls && cov->kind != QFNode::tru)
            ++nontrivial;
    }
    CHECK(nontrivial >= 1);
}
