#include <doctest.h>

#include <random>

#include "regprob/equations.hpp"
#include "regprob/errors.hpp"
#include "regprob/product.hpp"
#include "regprob/solver.hpp"
#include "support/generators.hpp"

using namespace regprob;

namespace {

Dfa infix_aa() { return build_pattern_dfa(PatternKind::Infix, {"a", "a"}, {"a", "b", "c"}); }

}  // namespace

TEST_CASE("product has d^2 n nonterminals") {
    Wcfg g = parse_grammar(
        "nonterminals: A B\nterminals: a\nstart: A\nrules:\nA -> B [1/2]\nB -> a [1]\n");
    SnfWcfg snf = to_snf(g);  // stays 2 nonterminals
    REQUIRE(snf.g.nonterminals.size() == 2);
    ProductWcfg p = intersect(snf, infix_aa());
    CHECK(p.inner.g.nonterminals.size() == 2 * 9);
    validate_snf(p.inner, false);
}

TEST_CASE("schema T instantiates only the delta-consistent triple") {
    Wcfg g = parse_grammar("nonterminals: A\nterminals: a\nstart: A\nrules:\nA -> a [1]\n");
    ProductWcfg p = intersect(to_snf(g), infix_aa());
    // Delta(q0, a) = q1: rule (q0 A q1) -> a present, (q0 A q2) -> a absent
    bool found_q0_q1 = false, found_q0_q2 = false;
    for (const auto& r : p.inner.g.rules) {
        if (r.left == "q0.A.q1") found_q0_q1 = true;
        if (r.left == "q0.A.q2") found_q0_q2 = true;
    }
    CHECK(found_q0_q1);
    CHECK(!found_q0_q2);
    // d rules per terminal rule
    CHECK(p.inner.g.rules.size() == 3);
}

TEST_CASE("schema counts: L gives d^2, Q gives d^3, eps gives d") {
    Wcfg g = parse_grammar(
        "nonterminals: A B C\nterminals: a\nstart: A\nrules:\n"
        "A -> B C [1]\nB -> a [1]\nC -> eps [1]\n");
    Dfa d2;  // 2-state automaton
    d2.states = {"s0", "s1"};
    d2.alphabet = {"a"};
    d2.start = 0;
    d2.accepting = {false, true};
    d2.delta = {{1}, {1}};
    ProductWcfg p = intersect(to_snf(g), d2);
    std::size_t q_rules = 0, t_rules = 0, eps_rules = 0;
    for (const auto& r : p.inner.g.rules) {
        if (r.body.size() == 2) ++q_rules;
        else if (r.body.empty()) ++eps_rules;
        else ++t_rules;
    }
    CHECK(q_rules == 8);  // d^3
    CHECK(t_rules == 2);  // d
    CHECK(eps_rules == 2);

    Wcfg unit = parse_grammar(
        "nonterminals: A B\nterminals: a\nstart: A\nrules:\nA -> B [1/3]\nB -> a [1]\n");
    ProductWcfg pu = intersect(to_snf(unit), d2);
    std::size_t l_rules = 0;
    for (const auto& r : pu.inner.g.rules)
        if (r.body.size() == 1 && r.weight == Rational(1, 3)) ++l_rules;
    CHECK(l_rules == 4);  // d^2
}

TEST_CASE("alphabet mismatch is an error") {
    Wcfg g = parse_grammar("nonterminals: A\nterminals: z\nstart: A\nrules:\nA -> z [1]\n");
    CHECK_THROWS_AS(intersect(to_snf(g), infix_aa()), AlphabetMismatchError);
}

TEST_CASE("regular_probability_of sums accepting triples from the start state") {
    Wcfg g = parse_grammar("nonterminals: A\nterminals: a\nstart: A\nrules:\nA -> a [1]\n");
    Dfa d = infix_aa();
    ProductWcfg p = intersect(to_snf(g), d);
    RatVector sol(p.inner.g.nonterminals.size());
    sol[p.triple_index(0, 0, 2)] = Rational(1, 4);
    CHECK(regular_probability_of(sol, "A", d, p) == Rational(1, 4));
    CHECK_THROWS_AS(regular_probability_of(sol, "nope", d, p), UnknownNonterminalError);

    // empty accepting set
    Dfa no_accept = d;
    no_accept.accepting = {false, false, false};
    CHECK(regular_probability_of(sol, "A", no_accept, p) == Rational());
}

TEST_CASE("row sums of product Kleene iterates collapse to base Kleene iterates") {
    std::mt19937_64 rng(59);
    for (int trial = 0; trial < 10; ++trial) {
        Wcfg g = regprob::testing::random_proper_scfg(rng, 2, true);
        SnfWcfg snf = to_snf(g);
        Dfa d = regprob::testing::random_complete_dfa(rng, 3, g.terminals);
        ProductWcfg p = intersect(snf, d);
        PolySystem base = build_system(snf);
        PolySystem prod = build_system(p.inner);
        RatVector x(base.size()), y(prod.size());
        for (unsigned k = 0; k <= 6; ++k) {
            for (std::size_t a = 0; a < p.n; ++a)
                for (std::size_t s = 0; s < p.d; ++s) {
                    Rational sum;
                    for (std::size_t t = 0; t < p.d; ++t) sum += y[p.triple_index(s, a, t)];
                    CHECK(sum == x[a]);
                }
            x = evaluate(base, x);
            y = evaluate(prod, y);
        }
    }
}
