#ifndef REGPROB_PRODUCT_HPP
#define REGPROB_PRODUCT_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "regprob/automata.hpp"
#include "regprob/grammar.hpp"
#include "regprob/rational.hpp"

namespace regprob {

/// The weighted intersection G (x) D over triple nonterminals (s, A, t),
/// indexed lexicographically: triple (s, A, t) sits at (s*n + A)*d + t.
/// This order is also the canonical variable order of the product system.
struct ProductWcfg {
    SnfWcfg inner;  // relaxed SNF: product Q/T nonterminals carry one rule per state choice
    std::size_t d = 0;  // |Q|
    std::size_t n = 0;  // |V| of the source grammar
    std::vector<std::string> states;
    std::vector<std::string> source_nonterminals;

    std::size_t triple_index(std::size_t s, std::size_t a, std::size_t t) const {
        return (s * n + a) * d + t;
    }
    std::string triple_name(std::size_t s, std::size_t a, std::size_t t) const {
        return states[s] + "." + source_nonterminals[a] + "." + states[t];
    }
};

/// Builds the product per the L/Q/T schemata:
///   L: (sAt) ->p (sBt)                for all s,t
///   Q: (sAu) ->1 (sBt)(tCu)           for all s,t,u
///   T: (sAt) ->1 a  when delta(s,a)=t; (sAs) ->1 eps for eps-rules
/// Grammar terminals must be a subset of the DFA alphabet.
ProductWcfg intersect(const SnfWcfg& g, const Dfa& d);

/// q_A^{G,D} = sum over accepting t of solution[(s0, A, t)], where solution
/// is indexed by the product's canonical triple order.
Rational regular_probability_of(const RatVector& solution, const std::string& nonterminal,
                                const Dfa& d, const ProductWcfg& prod);

}  // namespace regprob

#endif
