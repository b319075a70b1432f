#ifndef REGPROB_GRAMMAR_HPP
#define REGPROB_GRAMMAR_HPP

#include <cstddef>
#include <string>
#include <unordered_map>
#include <vector>

#include "regprob/rational.hpp"

namespace regprob {

struct Rule {
    std::string left;
    std::vector<std::string> body;  // empty means epsilon
    Rational weight;
};

/// Weighted context-free grammar. Rule weights are strictly positive exact
/// rationals; every symbol in every rule body is declared.
struct Wcfg {
    std::vector<std::string> nonterminals;
    std::vector<std::string> terminals;
    std::vector<Rule> rules;
    std::string start;

    bool is_nonterminal(const std::string& name) const;
    bool is_terminal(const std::string& name) const;
    std::size_t nonterminal_index(const std::string& name) const;

    /// Rule indices with the given left-hand side, in declaration order.
    std::vector<std::size_t> rules_of(const std::string& nt) const;

    void validate() const;
};

enum class GrammarClass { Wcfg, Scfg, ProperScfg };

/// Simple normal form kind of a nonterminal:
///   L - only unit rules A -> B (arbitrary positive weights)
///   Q - binary rules A -> BC, weight 1
///   T - terminal rules A -> a or A -> eps, weight 1
enum class SnfKind { L, Q, T };

struct SnfOrigin {
    std::size_t rule_index;  // rule of the source grammar this symbol binarizes
    std::size_t position;    // position within that rule's body
};

struct SnfWcfg {
    Wcfg g;
    std::unordered_map<std::string, SnfKind> kinds;
    std::unordered_map<std::string, SnfOrigin> origin;  // fresh nonterminals only

    SnfKind kind_of(const std::string& nt) const;
};

/// Parses the line-oriented grammar text format ('#' comments):
///   nonterminals: <name>+
///   terminals: <name>+
///   start: <name>
///   rules:
///   <NT> -> <sym>* [<rational>]
/// An empty body is written "eps"; the weight bracket may be omitted
/// (weight 1), which rule skeletons rely on.
Wcfg parse_grammar(const std::string& text);

std::string to_text(const Wcfg& g);

GrammarClass classify(const Wcfg& g);

/// Converts to SNF. Bodies of length >= 2 are right-binarized with fresh
/// kind-Q nonterminals; terminals inside long bodies get fresh kind-T
/// wrappers; mixed rule sets become kind-L dispatches carrying the original
/// weights on the first step. String weights are preserved for every
/// original nonterminal.
SnfWcfg to_snf(const Wcfg& g);

/// Checks the SNF shape invariants. Strict mode additionally requires kinds
/// Q and T to have exactly one rule, as to_snf produces; products of a
/// grammar with an automaton satisfy only the relaxed shape.
void validate_snf(const SnfWcfg& g, bool strict);

/// |G| = sum over nonterminals A of max(3, sum over rules of A of
/// (bitlen(num) + bitlen(den) + 2*|body|)).
std::size_t encoding_size(const SnfWcfg& g);

/// The grammar family with rules A_i -> A_iA_i [1/2], A_i -> A_{i+1} [1/2]
/// for i < n; A_n -> caB_nac [1]; B_i -> B_{i-1}B_{i-1} [1]; B_0 -> eps [1/2],
/// B_0 -> b [1/2]; start A_0. Termination probability is 1 everywhere but the
/// probability of generating an "aa" infix starting at A_i is 2^-2^i.
Wcfg bad_family(unsigned n);

}  // namespace regprob

#endif
