#include <doctest.h>

#include <random>
#include <thread>

#include <nlohmann/json.hpp>

#include "regprob/analysis.hpp"
#include "regprob/balance.hpp"
#include "regprob/equations.hpp"
#include "regprob/errors.hpp"
#include "regprob/product.hpp"
#include "regprob/solver.hpp"
#include "support/generators.hpp"

using namespace regprob;

namespace {

PolySystem quadratic(const Rational& p, const Rational& c) {
    PolySystem sys;
    sys.variables = {"x"};
    Polynomial poly;
    poly.constant = c;
    poly.monomials.push_back(Monomial{p, {{0, 2}}});
    sys.polys.push_back(poly);
    sys.is_pps = (p + c) <= Rational(1);
    return sys;
}

PolySystem linear_half_quarter() {
    // x = 1/2 x + 1/4, LFP 1/2
    PolySystem sys;
    sys.variables = {"x"};
    Polynomial poly;
    poly.constant = Rational(1, 4);
    poly.monomials.push_back(Monomial{Rational(1, 2), {{0, 1}}});
    sys.polys.push_back(poly);
    sys.is_pps = true;
    return sys;
}

}  // namespace

TEST_CASE("newton_step closed forms") {
    PolySystem crit = quadratic(Rational(1, 2), Rational(1, 2));
    CHECK(newton_step(crit, {Rational()}) == RatVector{Rational(1, 2)});
    CHECK(newton_step(crit, {Rational(1, 2)}) == RatVector{Rational(3, 4)});
    PolySystem sub = quadratic(Rational(2, 3), Rational(1, 3));
    CHECK(newton_step(sub, {Rational(1, 3)}) == RatVector{Rational(7, 15)});
}

TEST_CASE("newton_step throws on a singular Jacobian") {
    // x = x has I - B identically zero
    PolySystem sys;
    sys.variables = {"x"};
    Polynomial poly;
    poly.monomials.push_back(Monomial{Rational(1), {{0, 1}}});
    sys.polys.push_back(poly);
    sys.is_pps = true;
    CHECK_THROWS_AS(newton_step(sys, {Rational()}), SingularJacobianError);
}

TEST_CASE("rounded_newton reaches the quadratic LFP") {
    PolySystem sys = quadratic(Rational(2, 3), Rational(1, 3));
    NewtonConfig cfg;
    cfg.h = 20;
    cfg.mode = SolveMode::CertifiedNoncritical;
    SolveTrace t = rounded_newton(sys, cfg);
    Rational lfp(1, 2);  // quadratic formula: roots 1/2 and 1
    CHECK((t.final_iterate().values[0] - lfp).abs() <= pow2(-20));
    // cross-check against the value-iteration oracle
    RatVector kleene = kleene_oracle_rounded(sys, 4000, 64);
    CHECK((t.final_iterate().values[0] - kleene[0]).abs() <= pow2(-18));
    // iterate entries are nonnegative multiples of 2^-(h+2)
    for (const auto& it : t.iterates)
        for (const auto& v : it.values) {
            CHECK(!v.is_negative());
            CHECK((v * pow2(22)).is_integer());
        }
    CHECK(t.iterates.size() <= cfg.h + 2);
}

TEST_CASE("rounded_newton on a linear system lands in two steps") {
    NewtonConfig cfg;
    cfg.h = 10;
    cfg.mode = SolveMode::CertifiedNoncritical;
    SolveTrace t = rounded_newton(linear_half_quarter(), cfg);
    CHECK((t.final_iterate().values[0] - Rational(1, 2)).abs() <= pow2(-10));
    // Newton is exact on linear systems: the first step lands on the fixed
    // point (which is itself a dyadic), so the trace stops early.
    CHECK(t.iterates.size() <= 3);
    CHECK(t.final_iterate().values[0] == Rational(1, 2));
}

TEST_CASE("rounded_newton adaptive mode doubles h until agreement") {
    PolySystem sys = quadratic(Rational(2, 3), Rational(1, 3));
    NewtonConfig cfg;
    cfg.h = 4;
    cfg.mode = SolveMode::Adaptive;
    CHECK_THROWS_AS(rounded_newton(sys, cfg), Error);  // missing target_eps
    cfg.target_eps = pow2(-16);
    SolveTrace t = rounded_newton(sys, cfg);
    CHECK(!t.certified_error.has_value());
    CHECK(t.h >= 8);  // at least one doubling happened
    CHECK((t.final_iterate().values[0] - Rational(1, 2)).abs() <= pow2(-16));
}

TEST_CASE("first rounded iterate of the 2/3-quadratic at h = 10") {
    PolySystem sys = quadratic(Rational(2, 3), Rational(1, 3));
    NewtonConfig cfg;
    cfg.h = 10;
    cfg.max_iters = 1;
    cfg.mode = SolveMode::CertifiedNoncritical;
    SolveTrace t = rounded_newton(sys, cfg);
    // N(0) = 1/3; rounded down to 12 bits: floor(4096/3)/4096 = 1365/4096
    CHECK(t.final_iterate().values[0] == Rational(1365, 4096));
}

TEST_CASE("required_h formulas") {
    CHECK(required_h_noncritical(60, 3, pow2(-10)) == 855);
    CHECK(required_h_noncritical(12, 1, Rational(1)) == 171);
    // halving eps bumps h by exactly 1 once the ceiling boundary is crossed
    unsigned long base = required_h_noncritical(12, 1, pow2(-7));
    CHECK(required_h_noncritical(12, 1, pow2(-8)) == base + 1);

    CHECK(required_h_critical(12, 3, pow2(-4), 1) == 1227);
    // c = 0 reduces to ceil(log d + 4 (log(1/eps) + 14|G|+3))
    CHECK(required_h_critical(12, 1, pow2(-4), 0) == 4 * (4 + 171));
    // doubling 2^c roughly doubles the dominant term
    unsigned long c1 = required_h_critical(12, 1, pow2(-4), 1);
    unsigned long c2 = required_h_critical(12, 1, pow2(-4), 2);
    CHECK(c2 > 2 * c1 - (4 + 171) * 3);
    CHECK(c2 < 2 * c1);
}

TEST_CASE("kleene iterates of the critical quadratic") {
    PolySystem sys = quadratic(Rational(1, 2), Rational(1, 2));
    CHECK(kleene_oracle(sys, 0) == RatVector{Rational()});
    CHECK(kleene_oracle(sys, 1) == RatVector{Rational(1, 2)});
    CHECK(kleene_oracle(sys, 2) == RatVector{Rational(5, 8)});
    CHECK(kleene_oracle(sys, 3) == RatVector{Rational(89, 128)});
    // strictly increasing toward 1
    RatVector prev{Rational()};
    for (unsigned k = 1; k <= 8; ++k) {
        RatVector next = kleene_oracle(sys, k);
        CHECK(next[0] > prev[0]);
        CHECK(next[0] < Rational(1));
        prev = next;
    }
}

TEST_CASE("rounded kleene stays below the LFP and converges") {
    PolySystem sys = quadratic(Rational(2, 3), Rational(1, 3));
    RatVector x = kleene_oracle_rounded(sys, 50, 256);
    CHECK(x[0] <= Rational(1, 2));
    CHECK((Rational(1, 2) - x[0]) <= pow2(-10));
    // monotone nondecreasing in iters
    RatVector a = kleene_oracle_rounded(sys, 5, 256);
    RatVector b = kleene_oracle_rounded(sys, 9, 256);
    CHECK(a[0] <= b[0]);
}

TEST_CASE("exact Newton iterates are monotone and below the LFP box") {
    std::mt19937_64 rng(83);
    for (int trial = 0; trial < 10; ++trial) {
        Wcfg g = regprob::testing::random_proper_scfg(rng, 3, true);
        PolySystem sys = build_system(to_snf(g));
        RatVector z(sys.size());
        RatVector prev = z;
        for (int k = 0; k < 6; ++k) {
            z = newton_step(sys, z);
            for (std::size_t i = 0; i < sys.size(); ++i) {
                CHECK(z[i] >= prev[i]);
                CHECK(z[i] <= Rational(1));
            }
            prev = z;
        }
    }
    // against an exactly known LFP: x = 2x^2/3 + 1/3 has q* = 1/2
    PolySystem sys = quadratic(Rational(2, 3), Rational(1, 3));
    RatVector z(1);
    for (int k = 0; k < 8; ++k) {
        z = newton_step(sys, z);
        CHECK(z[0] <= Rational(1, 2));
    }
}

TEST_CASE("sample_strings degenerate cases") {
    Wcfg g = parse_grammar("nonterminals: S\nterminals: a\nstart: S\nrules:\nS -> a [1]\n");
    SnfWcfg snf = to_snf(g);
    Dfa accept_a = build_pattern_dfa(PatternKind::Exact, {"a"}, {"a"});
    CHECK(sample_strings(snf, "S", accept_a, 500, 50, 1) == Rational(1));
    Dfa none = accept_a;
    none.accepting.assign(none.accepting.size(), false);
    CHECK(sample_strings(snf, "S", none, 500, 50, 1) == Rational());
}

TEST_CASE("sample_strings approximates the bad_family infix probability") {
    SnfWcfg snf = to_snf(bad_family(1));
    Dfa d = build_pattern_dfa(PatternKind::Infix, {"a", "a"}, {"a", "b", "c"});
    Rational estimate = sample_strings(snf, "A_0", d, 100000, 100000, 12345);
    CHECK((estimate - Rational(1, 2)).abs() < Rational(1, 100));
}

TEST_CASE("compute_regular_probability on closed forms") {
    SUBCASE("prefix-a of S -> aS | b") {
        Wcfg g = parse_grammar(
            "nonterminals: S\nterminals: a b\nstart: S\nrules:\n"
            "S -> a S [1/2]\nS -> b [1/2]\n");
        Dfa d = build_pattern_dfa(PatternKind::Prefix, {"a"}, g.terminals);
        auto r = compute_regular_probability(g, d, "S", pow2(-20), PipelineMode::Adaptive);
        CHECK((r.value - Rational(1, 2)).abs() <= pow2(-20));
        CHECK(r.lo <= Rational(1, 2));
        CHECK(r.hi >= Rational(1, 2));
        CHECK((r.hi - r.lo) <= pow2(-20) * Rational(2));
        CHECK(!r.certified);
    }
    SUBCASE("zero-termination grammar short-circuits to exactly 0") {
        Wcfg g = parse_grammar(
            "nonterminals: S\nterminals: a\nstart: S\nrules:\nS -> S S [1]\n");
        Dfa d = build_pattern_dfa(PatternKind::All, {}, g.terminals);
        auto r = compute_regular_probability(g, d, "S", pow2(-10), PipelineMode::Adaptive);
        CHECK(r.value == Rational());
        CHECK(r.hi == Rational());
        CHECK(r.exact_zero);
    }
    SUBCASE("WCFG weights are rejected") {
        Wcfg g = parse_grammar(
            "nonterminals: S\nterminals: a\nstart: S\nrules:\nS -> a [2]\n");
        Dfa d = build_pattern_dfa(PatternKind::All, {}, g.terminals);
        CHECK_THROWS_AS(compute_regular_probability(g, d, "S", pow2(-10), PipelineMode::Adaptive),
                        NotScfgError);
        CHECK_THROWS_AS(compute_regular_probability(bad_family(0), d, "A_0", Rational(2),
                                                    PipelineMode::Adaptive),
                        Error);
    }
}

TEST_CASE("epsilon rules run through the whole pipeline") {
    // S -> eps [1/2] | aS [1/2]: terminates surely; prefix-a mass is 1/2
    Wcfg g = parse_grammar(
        "nonterminals: S\nterminals: a\nstart: S\nrules:\n"
        "S -> eps [1/2]\nS -> a S [1/2]\n");
    Dfa d = build_pattern_dfa(PatternKind::Prefix, {"a"}, g.terminals);
    auto r = compute_regular_probability(g, d, "S", pow2(-20), PipelineMode::Adaptive);
    CHECK((r.value - Rational(1, 2)).abs() <= pow2(-20));
    // and the exact-string case: P(s = a) = 1/4
    Dfa exact = build_pattern_dfa(PatternKind::Exact, {"a"}, g.terminals);
    auto re = compute_regular_probability(g, exact, "S", pow2(-20), PipelineMode::Adaptive);
    CHECK((re.value - Rational(1, 4)).abs() <= pow2(-20));
}

TEST_CASE("bad_family(0) infix-aa probability is 1/2") {
    Wcfg g = bad_family(0);
    Dfa d = build_pattern_dfa(PatternKind::Infix, {"a", "a"}, {"a", "b", "c"});
    auto r = compute_regular_probability(g, d, "A_0", pow2(-20), PipelineMode::Adaptive);
    CHECK((r.value - Rational(1, 2)).abs() <= pow2(-20));
}

TEST_CASE("empty accepting set gives exactly zero") {
    Wcfg g = parse_grammar(
        "nonterminals: S\nterminals: a\nstart: S\nrules:\nS -> a [1]\n");
    Dfa d = build_pattern_dfa(PatternKind::All, {}, g.terminals);
    d.accepting[0] = false;
    auto r = compute_regular_probability(g, d, "S", pow2(-10), PipelineMode::Adaptive);
    CHECK(r.value == Rational());
    CHECK(r.hi == Rational());
}

TEST_CASE("irrational termination probability is bracketed") {
    // x = x^2/2 + 1/3: LFP 1 - sqrt(1/3), irrational. Independent oracle:
    // exact-rational bisection on the fixed-point residual.
    Wcfg g = parse_grammar(
        "nonterminals: S\nterminals: a\nstart: S\nrules:\n"
        "S -> S S [1/2]\nS -> a [1/3]\n");
    auto residual = [](const Rational& x) {
        return Rational(1, 2) * x * x + Rational(1, 3) - x;
    };
    Rational lo_b(0), hi_b(1, 1);
    // the LFP is the smaller root; residual is positive below it
    for (int i = 0; i < 64; ++i) {
        Rational mid = (lo_b + hi_b) / Rational(2);
        if (residual(mid) > Rational())
            lo_b = mid;
        else
            hi_b = mid;
    }
    Dfa d = build_pattern_dfa(PatternKind::All, {}, g.terminals);
    auto r = compute_regular_probability(g, d, "S", pow2(-24), PipelineMode::Adaptive);
    CHECK(r.lo <= hi_b);
    CHECK(r.hi >= lo_b);
    CHECK((r.value - lo_b).abs() <= pow2(-23));
}

TEST_CASE("certified pipeline on the termination quadratic") {
    // S -> SS [2/3] | a [1/3]: termination probability 1/2, noncritical
    Wcfg g = parse_grammar(
        "nonterminals: S\nterminals: a\nstart: S\nrules:\n"
        "S -> S S [2/3]\nS -> a [1/3]\n");
    Dfa d = build_pattern_dfa(PatternKind::All, {}, g.terminals);
    auto r = compute_regular_probability(g, d, "S", pow2(-20), PipelineMode::Certified);
    CHECK(r.certified);
    CHECK(r.mode == SolveMode::CertifiedNoncritical);
    CHECK((r.value - Rational(1, 2)).abs() <= pow2(-20));
    CHECK(r.h == required_h_noncritical(encoding_size(to_snf(g)), 1, pow2(-20)));
}

TEST_CASE("certified pipeline tweaks critical grammars") {
    // S -> SS [1/2] | a [1/2]: critical, termination probability 1
    Wcfg g = parse_grammar(
        "nonterminals: S\nterminals: a\nstart: S\nrules:\n"
        "S -> S S [1/2]\nS -> a [1/2]\n");
    Dfa d = build_pattern_dfa(PatternKind::All, {}, g.terminals);
    auto r = compute_regular_probability(g, d, "S", pow2(-8), PipelineMode::Certified);
    CHECK(r.certified);
    CHECK(r.mode == SolveMode::CertifiedTweaked);
    CHECK((r.value - Rational(1)).abs() <= pow2(-8));
}

TEST_CASE("adaptive pipeline agrees with the sampling oracle on random instances") {
    std::mt19937_64 rng(211);
    int done = 0;
    while (done < 5) {
        Wcfg g = regprob::testing::random_proper_scfg(rng, 3, true);
        SnfWcfg snf = to_snf(g);
        // keep to instances that terminate fast, so truncation bias is tiny
        AnalysisReport report = analyze_grammar(snf);
        if (report.one_vars.size() != snf.g.nonterminals.size() ||
            !report.critical_sccs.empty())
            continue;
        ++done;
        Dfa d = regprob::testing::random_complete_dfa(rng, 3, g.terminals);
        auto r = compute_regular_probability(g, d, g.start, pow2(-20), PipelineMode::Adaptive);
        Rational estimate = sample_strings(snf, g.start, d, 40000, 4000, 999 + done);
        CHECK((estimate - r.value).abs() < Rational(1, 40));
    }
}

TEST_CASE("multiple accepting states sum to the full mass") {
    Wcfg g = parse_grammar(
        "nonterminals: S\nterminals: a b\nstart: S\nrules:\n"
        "S -> a [1/2]\nS -> b [1/2]\n");
    // 3-state DFA that separates strings ending in a from those ending in b;
    // accepting both catches everything S generates
    Dfa d;
    d.states = {"s", "enda", "endb"};
    d.alphabet = {"a", "b"};
    d.start = 0;
    d.accepting = {false, true, true};
    d.delta = {{1, 2}, {1, 2}, {1, 2}};
    auto r = compute_regular_probability(g, d, "S", pow2(-20), PipelineMode::Adaptive);
    CHECK((r.value - Rational(1)).abs() <= pow2(-20));
    auto c = compute_regular_probability(g, d, "S", pow2(-20), PipelineMode::Certified);
    CHECK((c.value - Rational(1)).abs() <= pow2(-20));
}

TEST_CASE("collapse commutation of exact Newton on a fixed pair") {
    Wcfg g = parse_grammar(
        "nonterminals: S\nterminals: a b\nstart: S\nrules:\n"
        "S -> S S [1/3]\nS -> a [1/3]\nS -> b [1/3]\n");
    SnfWcfg snf = to_snf(g);
    Dfa d = build_pattern_dfa(PatternKind::Infix, {"a", "a"}, g.terminals);
    ProductWcfg p = intersect(snf, d);
    PolySystem base = build_system(snf);
    PolySystem prod = build_system(p.inner);
    RatVector x(base.size()), y(prod.size());
    for (int k = 0; k <= 8; ++k) {
        TripleVector ty;
        ty.d = p.d;
        ty.n = p.n;
        ty.values = y;
        CHECK(is_balanced_vector(ty));
        CHECK(collapse_vector(ty, true) == x);
        if (k == 8) break;
        x = newton_step(base, x);
        y = newton_step(prod, y);
    }
}

namespace {

// Exhaustive derivation enumeration for acyclic grammars: exact probability
// mass of DFA-accepted yields, fully independent of the solver pipeline.
void enumerate_accepted(const Wcfg& g, const Dfa& d, std::vector<std::string>& form,
                        std::size_t state, const Rational& weight, Rational& total) {
    std::size_t i = 0;
    std::size_t s = state;
    while (i < form.size() && g.is_terminal(form[i])) {
        s = d.step(s, d.symbol_index(form[i]));
        ++i;
    }
    if (i == form.size()) {
        if (d.accepting[s]) total += weight;
        return;
    }
    std::string leftmost = form[i];
    for (std::size_t ri : g.rules_of(leftmost)) {
        std::vector<std::string> next(form.begin(), form.begin() + i);
        next.insert(next.end(), g.rules[ri].body.begin(), g.rules[ri].body.end());
        next.insert(next.end(), form.begin() + i + 1, form.end());
        enumerate_accepted(g, d, next, state, weight * g.rules[ri].weight, total);
    }
}

Wcfg random_acyclic_scfg(std::mt19937_64& rng) {
    Wcfg g;
    g.nonterminals = {"N0", "N1", "N2"};
    g.terminals = {"a", "b"};
    g.start = "N0";
    for (std::size_t i = 0; i < 3; ++i) {
        std::size_t nrules = 1 + rng() % 2;
        std::vector<long> raw(nrules);
        long total = 0;
        for (auto& r : raw) {
            r = 1 + static_cast<long>(rng() % 5);
            total += r;
        }
        long denom = total + static_cast<long>(rng() % 3);  // sometimes substochastic
        for (std::size_t j = 0; j < nrules; ++j) {
            std::vector<std::string> body;
            std::size_t len = rng() % 3;  // 0..2
            for (std::size_t sidx = 0; sidx < len; ++sidx) {
                if (i == 2 || rng() % 2 == 0)
                    body.push_back(g.terminals[rng() % 2]);
                else
                    body.push_back(g.nonterminals[i + 1 + rng() % (2 - i)]);
            }
            g.rules.push_back(Rule{g.nonterminals[i], body, Rational(raw[j], denom)});
        }
    }
    return g;
}

}  // namespace

TEST_CASE("pipeline intervals contain the exact mass of acyclic grammars") {
    std::mt19937_64 rng(227);
    for (int trial = 0; trial < 15; ++trial) {
        Wcfg g = random_acyclic_scfg(rng);
        Dfa d = regprob::testing::random_complete_dfa(rng, 3, g.terminals);
        Rational exact;
        std::vector<std::string> form{g.start};
        enumerate_accepted(g, d, form, d.start, Rational(1), exact);

        auto r = compute_regular_probability(g, d, "N0", pow2(-24), PipelineMode::Adaptive);
        CHECK(r.lo <= exact);
        CHECK(exact <= r.hi);
        CHECK((r.value - exact).abs() <= pow2(-24));

        auto c = compute_regular_probability(g, d, "N0", pow2(-24), PipelineMode::Certified);
        CHECK(c.lo <= exact);
        CHECK(exact <= c.hi);
        CHECK((c.value - exact).abs() <= pow2(-24));
    }
}

TEST_CASE("the one-state universal product mirrors the base system") {
    std::mt19937_64 rng(229);
    for (int trial = 0; trial < 10; ++trial) {
        Wcfg g = regprob::testing::random_proper_scfg(rng, 3, true);
        SnfWcfg snf = to_snf(g);
        Dfa all = build_pattern_dfa(PatternKind::All, {}, g.terminals);
        ProductWcfg p = intersect(snf, all);
        PolySystem base = build_system(snf);
        PolySystem prod = build_system(p.inner);
        REQUIRE(prod.size() == base.size());
        for (std::size_t i = 0; i < base.size(); ++i) {
            CHECK(prod.polys[i].constant == base.polys[i].constant);
            CHECK(prod.polys[i].monomials == base.polys[i].monomials);
        }
    }
}

TEST_CASE("concurrent calls on shared immutable inputs are identical") {
    Wcfg g = bad_family(1);
    Dfa d = build_pattern_dfa(PatternKind::Infix, {"a", "a"}, {"a", "b", "c"});
    auto reference = compute_regular_probability(g, d, "A_0", pow2(-16), PipelineMode::Adaptive);
    std::vector<std::thread> threads;
    std::vector<Rational> results(4);
    for (int t = 0; t < 4; ++t)
        threads.emplace_back([&, t] {
            results[t] =
                compute_regular_probability(g, d, "A_0", pow2(-16), PipelineMode::Adaptive)
                    .value;
        });
    for (auto& th : threads) th.join();
    for (const auto& r : results) CHECK(r == reference.value);
}

TEST_CASE("solve trace serializes to JSON") {
    PolySystem sys = quadratic(Rational(2, 3), Rational(1, 3));
    NewtonConfig cfg;
    cfg.h = 8;
    cfg.mode = SolveMode::CertifiedNoncritical;
    cfg.target_eps = pow2(-8);
    SolveTrace t = rounded_newton(sys, cfg);
    auto j = to_json(t);
    CHECK(j["h"] == 8);
    CHECK(j["certified"] == true);
    CHECK(j["mode"] == "certified-noncritical");
    CHECK(j["iterates"].size() == t.iterates.size());
}
