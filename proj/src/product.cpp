#include "regprob/product.hpp"

#include <algorithm>
#include <set>

#include "regprob/errors.hpp"

namespace regprob {

ProductWcfg intersect(const SnfWcfg& g, const Dfa& dfa) {
    validate_snf(g, false);
    {
        std::set<std::string> alpha(dfa.alphabet.begin(), dfa.alphabet.end());
        for (const auto& t : g.g.terminals)
            if (!alpha.count(t))
                throw AlphabetMismatchError("grammar terminal not in DFA alphabet: " + t);
    }
    ProductWcfg p;
    p.d = dfa.states.size();
    p.n = g.g.nonterminals.size();
    p.states = dfa.states;
    p.source_nonterminals = g.g.nonterminals;

    p.inner.g.terminals = g.g.terminals;
    p.inner.g.nonterminals.reserve(p.d * p.d * p.n);
    for (std::size_t s = 0; s < p.d; ++s)
        for (std::size_t a = 0; a < p.n; ++a)
            for (std::size_t t = 0; t < p.d; ++t) {
                std::string name = p.triple_name(s, a, t);
                p.inner.g.nonterminals.push_back(name);
                p.inner.kinds[name] = g.kind_of(g.g.nonterminals[a]);
            }
    // Start is not meaningful for the product as a whole; extraction picks
    // (s0, A, t) rows. Use (s0, source start, s0) so the grammar validates.
    p.inner.g.start =
        p.triple_name(dfa.start, g.g.nonterminal_index(g.g.start), dfa.start);

    for (const auto& r : g.g.rules) {
        std::size_t A = g.g.nonterminal_index(r.left);
        switch (g.kind_of(r.left)) {
            case SnfKind::L: {
                std::size_t B = g.g.nonterminal_index(r.body[0]);
                for (std::size_t s = 0; s < p.d; ++s)
                    for (std::size_t t = 0; t < p.d; ++t)
                        p.inner.g.rules.push_back(
                            Rule{p.triple_name(s, A, t), {p.triple_name(s, B, t)}, r.weight});
                break;
            }
            case SnfKind::Q: {
                std::size_t B = g.g.nonterminal_index(r.body[0]);
                std::size_t C = g.g.nonterminal_index(r.body[1]);
                for (std::size_t s = 0; s < p.d; ++s)
                    for (std::size_t t = 0; t < p.d; ++t)
                        for (std::size_t u = 0; u < p.d; ++u)
                            p.inner.g.rules.push_back(
                                Rule{p.triple_name(s, A, u),
                                     {p.triple_name(s, B, t), p.triple_name(t, C, u)},
                                     r.weight});
                break;
            }
            case SnfKind::T: {
                if (r.body.empty()) {
                    for (std::size_t s = 0; s < p.d; ++s)
                        p.inner.g.rules.push_back(Rule{p.triple_name(s, A, s), {}, r.weight});
                } else {
                    std::size_t sym = dfa.symbol_index(r.body[0]);
                    for (std::size_t s = 0; s < p.d; ++s) {
                        std::size_t t = dfa.step(s, sym);
                        p.inner.g.rules.push_back(
                            Rule{p.triple_name(s, A, t), {r.body[0]}, r.weight});
                    }
                }
                break;
            }
        }
    }
    validate_snf(p.inner, false);
    return p;
}

Rational regular_probability_of(const RatVector& solution, const std::string& nonterminal,
                                const Dfa& d, const ProductWcfg& prod) {
    auto it = std::find(prod.source_nonterminals.begin(), prod.source_nonterminals.end(),
                        nonterminal);
    if (it == prod.source_nonterminals.end())
        throw UnknownNonterminalError("unknown nonterminal: " + nonterminal);
    std::size_t a = static_cast<std::size_t>(it - prod.source_nonterminals.begin());
    if (solution.size() != prod.d * prod.d * prod.n)
        throw DimensionMismatchError("solution vector does not match the product index");
    Rational sum;
    for (std::size_t t = 0; t < prod.d; ++t)
        if (d.accepting[t]) sum += solution[prod.triple_index(d.start, a, t)];
    return sum;
}

}  // namespace regprob
