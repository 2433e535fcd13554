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

#include "covers/problem.hpp"

#include <cctype>
#include <cstdlib>
#include <ostream>
#include <utility>

#include "covers/combined.hpp"
#include "covers/solver.hpp"
#include "covers/tame.hpp"

namespace covers {

namespace {

std::string at(int line, int col, const std::string& msg) {
    return std::to_string(line) + ":" + std::to_string(col) + ": " + msg;
}

struct Sexp {
    bool is_list = false;
    std::string atom;
    std::vector<Sexp> kids;
    int line = 0, col = 0;
};

struct Reader {
    const std::string& text;
    std::size_t pos = 0;
    int line = 1, col = 1;

    void bump() {
        if (text[pos] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
        ++pos;
    }

    void skip_space() {
        while (pos < text.size()) {
            char c = text[pos];
            if (c == ';') {
                while (pos < text.size() && text[pos] != '\n') bump();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                bump();
            } else {
                return;
            }
        }
    }

    bool done() {
        skip_space();
        return pos >= text.size();
    }

    Sexp read() {
        skip_space();
        if (pos >= text.size())
            throw ParseError(at(line, col, "unexpected end of input"));
        Sexp s;
        s.line = line;
        s.col = col;
        char c = text[pos];
        if (c == ')') throw ParseError(at(line, col, "unmatched ')'"));
        if (c == '(') {
            bump();
            s.is_list = true;
            for (;;) {
                skip_space();
                if (pos >= text.size())
                    throw ParseError(
                        at(s.line, s.col, "unterminated '(' here"));
                if (text[pos] == ')') {
                    bump();
                    return s;
                }
                s.kids.push_back(read());
            }
        }
        while (pos < text.size()) {
            c = text[pos];
            if (c == '(' || c == ')' || c == ';' ||
                std::isspace(static_cast<unsigned char>(c)))
                break;
            s.atom += c;
            bump();
        }
        return s;
    }
};

// optional sign, digits, optional /digits with a nonzero denominator
bool looks_numeric(const std::string& s) {
    std::size_t i = (s.size() > 1 && s[0] == '-') ? 1 : 0;
    std::size_t digits = 0;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
        ++i;
        ++digits;
    }
    if (digits == 0) return false;
    if (i == s.size()) return true;
    if (s[i] != '/') return false;
    std::size_t denom = ++i;
    bool nonzero = false;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
        if (s[i] != '0') nonzero = true;
        ++i;
    }
    return i == s.size() && i > denom && nonzero;
}

struct Terms {
    Ctx& ctx;

    [[noreturn]] void fail(const Sexp& s, const std::string& msg) {
        throw ParseError(at(s.line, s.col, msg));
    }

    const Sexp& arg(const Sexp& cmd, std::size_t i) {
        if (i >= cmd.kids.size())
            fail(cmd, "too few arguments to " + cmd.kids[0].atom);
        return cmd.kids[i];
    }

    std::string name_of(const Sexp& s) {
        if (s.is_list) fail(s, "expected a name");
        return s.atom;
    }

    SortId sort_of(const Sexp& s) {
        std::string n = name_of(s);
        auto id = ctx.find_sort(n);
        if (!id) fail(s, "unknown sort '" + n + "'");
        return *id;
    }

    TermId term(const Sexp& s) {
        try {
            return term_rec(s);
        } catch (const SortError& e) {
            fail(s, e.what());
        }
    }

    TermId term_rec(const Sexp& s) {
        if (!s.is_list) {
            if (looks_numeric(s.atom)) return ctx.t_num(Rational(s.atom));
            if (auto v = ctx.find_var(s.atom)) return ctx.t_var(*v);
            if (auto f = ctx.find_fun(s.atom)) return ctx.t_app(*f, {});
            fail(s, "undeclared variable or symbol '" + s.atom + "'");
        }
        if (s.kids.empty()) fail(s, "empty term");
        const std::string& head = name_of(s.kids[0]);
        std::vector<TermId> args;
        for (std::size_t i = 1; i < s.kids.size(); ++i)
            args.push_back(term_rec(s.kids[i]));
        if (head == "+") return ctx.t_add(std::move(args));
        if (head == "-") {
            if (args.empty()) fail(s, "'-' needs an argument");
            std::vector<TermId> sum = {args[0]};
            if (args.size() == 1) sum = {ctx.t_mul(Rational(-1), args[0])};
            for (std::size_t i = 1; i < args.size(); ++i)
                sum.push_back(ctx.t_mul(Rational(-1), args[i]));
            return ctx.t_add(std::move(sum));
        }
        if (head == "*") {
            if (args.size() != 2) fail(s, "'*' takes a coefficient and a term");
            const TermNode& a = ctx.term(args[0]);
            const TermNode& b = ctx.term(args[1]);
            if (a.kind == TermKind::num) return ctx.t_mul(a.num, args[1]);
            if (b.kind == TermKind::num) return ctx.t_mul(b.num, args[0]);
            fail(s, "'*' needs a numeric coefficient");
        }
        auto f = ctx.find_fun(head);
        if (!f) fail(s.kids[0], "undeclared function '" + head + "'");
        return ctx.t_app(*f, std::move(args));
    }

    Literal literal(const Sexp& s) {
        try {
            return literal_rec(s);
        } catch (const SortError& e) {
            fail(s, e.what());
        }
    }

    Literal literal_rec(const Sexp& s) {
        if (!s.is_list) {
            if (auto p = ctx.find_pred(s.atom)) return mk_pred(ctx, *p, {}, true);
            fail(s, "expected a literal, got '" + s.atom + "'");
        }
        if (s.kids.empty()) fail(s, "empty literal");
        const std::string& head = name_of(s.kids[0]);
        if (head == "not") {
            if (s.kids.size() != 2) fail(s, "'not' takes one literal");
            return negate(literal_rec(s.kids[1]));
        }
        if (head == "=" || head == "distinct" || head == "<=" || head == "<") {
            if (s.kids.size() != 3)
                fail(s, "'" + head + "' takes two terms");
            TermId a = term_rec(s.kids[1]);
            TermId b = term_rec(s.kids[2]);
            if (head == "=") return mk_eq(ctx, a, b);
            if (head == "distinct") return mk_neq(ctx, a, b);
            if (head == "<=") return mk_le(ctx, a, b);
            return mk_lt(ctx, a, b);
        }
        if (auto p = ctx.find_pred(head)) {
            std::vector<TermId> args;
            for (std::size_t i = 1; i < s.kids.size(); ++i)
                args.push_back(term_rec(s.kids[i]));
            return mk_pred(ctx, *p, std::move(args), true);
        }
        fail(s.kids[0], "unknown relation '" + head + "'");
    }

    QFF formula_rec(const Sexp& s) {
        if (!s.is_list) {
            if (s.atom == "true") return qf_true();
            if (s.atom == "false") return qf_false();
            return qf_lit(literal_rec(s));
        }
        if (s.kids.empty()) fail(s, "empty formula");
        const std::string& head = name_of(s.kids[0]);
        if (head == "and" || head == "or") {
            std::vector<QFF> kids;
            for (std::size_t i = 1; i < s.kids.size(); ++i)
                kids.push_back(formula_rec(s.kids[i]));
            return head == "and" ? qf_and(std::move(kids))
                                 : qf_or(std::move(kids));
        }
        if (head == "not" && s.kids.size() == 2 && s.kids[1].is_list &&
            !s.kids[1].kids.empty() && !s.kids[1].kids[0].is_list) {
            const std::string& inner = s.kids[1].kids[0].atom;
            if (inner == "and" || inner == "or" || inner == "not")
                return qf_not(formula_rec(s.kids[1]));
        }
        return qf_lit(literal_rec(s));
    }
};

struct Builder : Terms {
    ProblemFile& pf;

    void command(const Sexp& s) {
        if (!s.is_list || s.kids.empty() || s.kids[0].is_list)
            fail(s, "expected a command");
        const std::string& head = s.kids[0].atom;
        if (head == "declare-sort") {
            std::string n = name_of(arg(s, 1));
            if (ctx.find_sort(n)) fail(arg(s, 1), "duplicate sort '" + n + "'");
            ctx.add_sort(n, false);
        } else if (head == "declare-fun") {
            std::string n = name_of(arg(s, 1));
            if (ctx.find_fun(n) || ctx.find_pred(n))
                fail(arg(s, 1), "duplicate symbol '" + n + "'");
            const Sexp& dom = arg(s, 2);
            if (!dom.is_list) fail(dom, "expected a sort list");
            std::vector<SortId> domain;
            for (const Sexp& d : dom.kids) domain.push_back(sort_of(d));
            const Sexp& rng = arg(s, 3);
            if (name_of(rng) == "Bool")
                ctx.add_pred(n, std::move(domain), Side::sigma1);
            else
                ctx.add_fun(n, std::move(domain), sort_of(rng), Side::sigma1);
        } else if (head == "declare-var") {
            std::string n = name_of(arg(s, 1));
            if (ctx.find_var(n)) fail(arg(s, 1), "duplicate variable '" + n + "'");
            SortId sid = sort_of(arg(s, 2));
            if (name_of(arg(s, 3)) != ":role")
                fail(arg(s, 3), "expected ':role param' or ':role exists'");
            std::string role = name_of(arg(s, 4));
            VarId v = ctx.add_var(n, sid);
            if (role == "param")
                pf.params.insert(v);
            else if (role == "exists")
                pf.exists.insert(v);
            else
                fail(arg(s, 4), "unknown role '" + role + "'");
        } else if (head == "set-theory") {
            std::string t = name_of(arg(s, 1));
            if (t != "euf" && t != "lra" && t != "euf+lra" &&
                t != "idl+euf" && t != "tame")
                fail(arg(s, 1), "unknown theory '" + t + "'");
            pf.theory = t;
        } else if (head == "set-option") {
            std::string k = name_of(arg(s, 1));
            if (k.empty() || k[0] != ':')
                fail(arg(s, 1), "option names start with ':'");
            pf.options[k.substr(1)] = name_of(arg(s, 2));
        } else if (head == "assert") {
            pf.asserts.push_back(literal(arg(s, 1)));
        } else if (head == "compute-cover") {
            pf.compute = true;
        } else {
            fail(s.kids[0], "unknown command '" + head + "'");
        }
    }
};

Constraint whole_constraint(const ProblemFile& pf) {
    Constraint c;
    c.lits = pf.asserts;
    c.roles.params = pf.params;
    c.roles.exists = pf.exists;
    return c;
}

// Splits the asserts of a tame problem: relation literals and literals
// whose root sort belongs to the container theory form the container
// part, everything rooted in a shared sort is data. Existentials and
// parameters follow their sorts.
TameProblem split_tame(const Ctx& ctx, const ProblemFile& pf) {
    TameProblem p;
    for (const Literal& l : pf.asserts) {
        bool data = !l.atom.is_pred &&
                    ctx.sort(ctx.sort_of(l.atom.lhs)).shared;
        (data ? p.psi : p.phi).lits.push_back(l);
    }
    for (VarId v : pf.exists)
        (ctx.sort(ctx.var(v).sort).shared ? p.psi : p.phi)
            .roles.exists.insert(v);
    for (VarId v : pf.params)
        (ctx.sort(ctx.var(v).sort).shared ? p.psi : p.phi)
            .roles.params.insert(v);
    return p;
}

bool env_trace() {
    const char* v = std::getenv("COVER_LOG");
    return v && *v && std::string(v) != "0";
}

}  // namespace

ProblemFile parse_problem(const std::string& text) {
    ProblemFile pf;
    Builder b{{pf.ctx}, pf};
    Reader r{text};
    while (!r.done()) b.command(r.read());
    return pf;
}

QFF parse_formula(Ctx& ctx, const std::string& text) {
    Terms t{ctx};
    Reader r{text};
    Sexp s = r.read();
    if (!r.done())
        throw ParseError(at(r.line, r.col, "trailing input after the formula"));
    try {
        return t.formula_rec(s);
    } catch (const SortError& e) {
        throw ParseError(at(s.line, s.col, e.what()));
    }
}

std::string format_cover(Ctx& ctx, const QFF& cover, const std::string& mode) {
    if (mode != "dnf") return print_qf(ctx, cover);
    std::vector<QFF> cubes;
    for (const auto& cube : to_dnf(ctx, cover)) cubes.push_back(qf_lits(cube));
    return print_qf(ctx, qf_or(std::move(cubes)));
}

int run(ProblemFile& file, const RunFlags& flags, std::ostream& out,
        std::ostream& err) {
    if (flags.format != "raw" && flags.format != "dnf") {
        err << "error: unknown format '" << flags.format << "'\n";
        return 1;
    }
    if (flags.jobs < 1) {
        err << "error: --jobs must be at least 1\n";
        return 1;
    }
    if (!file.compute) {
        err << "error: no (compute-cover) command in the problem\n";
        return 1;
    }

    Ctx& ctx = file.ctx;
    CombineOptions opts;
    if (flags.trace || env_trace())
        opts.trace = [&err](const std::string& s) { err << s << "\n"; };

    try {
        QFF cov;
        Constraint checked;  // what the verification entails against
        if (file.theory == "tame") {
            TameProblem p = split_tame(ctx, file);
            cov = tame_cover(ctx, p, euf_handle(), lra_handle(), opts);
            TameProblem q = tame_flatten(ctx, p);
            checked.lits = q.phi.lits;
            checked.lits.insert(checked.lits.end(), q.psi.lits.begin(),
                                q.psi.lits.end());
            checked.roles.params = file.params;
            for (VarId v : q.phi.roles.params)
                if (!file.exists.count(v)) checked.roles.params.insert(v);
            checked.roles.exists = file.exists;
            for (VarId v : q.psi.roles.exists) checked.roles.exists.insert(v);
            for (VarId v : checked.roles.exists)
                checked.roles.params.erase(v);
        } else {
            checked = whole_constraint(file);
            if (file.theory == "euf")
                cov = euf_handle().cover(ctx, checked);
            else if (file.theory == "lra")
                cov = lra_handle().cover(ctx, checked);
            else if (file.theory == "idl+euf")
                cov = combined_cover(ctx, checked, file.exists, euf_handle(),
                                     idl_handle(), opts);
            else
                cov = combined_cover(ctx, checked, file.exists, euf_handle(),
                                     lra_handle(), opts);
        }

        out << format_cover(ctx, cov, flags.format) << "\n";

        if (flags.verify) {
            if (!entails(ctx, qf_lits(checked.lits), cov)) {
                err << "verification failed: the input does not entail the "
                       "cover\n";
                return 1;
            }
            try {
                int depth = file.theory == "euf" ? 2 : 1;
                QFF ref = bounded_residue_oracle(ctx, checked,
                                                 checked.roles.exists, depth);
                if (!entails(ctx, cov, ref)) {
                    err << "verification failed: the cover misses an "
                           "entailed residue\n";
                    return 1;
                }
            } catch (const OracleLimitError&) {
                // instance too large to enumerate; the entailment check
                // above already ran
            }
            err << "verified: residue-check passed\n";
        }
        return 0;
    } catch (const UnsupportedCombinationError& e) {
        err << "unsupported combination: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace covers
