#ifndef REGPROB_AUTOMATA_HPP
#define REGPROB_AUTOMATA_HPP

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace regprob {

/// Complete deterministic finite automaton: delta is total on Q x Sigma.
struct Dfa {
    std::vector<std::string> states;
    std::vector<std::string> alphabet;
    std::vector<std::vector<std::size_t>> delta;  // [state][symbol] -> state
    std::size_t start = 0;
    std::vector<bool> accepting;

    std::size_t state_index(const std::string& name) const;
    std::size_t symbol_index(const std::string& name) const;
    std::size_t step(std::size_t s, std::size_t sym) const { return delta[s][sym]; }
    std::size_t accepting_count() const;
};

/// Parses the DFA text format:
///   states: <name>+ / alphabet: <name>+ / start: <name> / accept: <name>*
///   delta: then rows "<state> <symbol> <state>"
/// A partial transition table is an error unless `complete` is set, in which
/// case a fresh rejecting sink absorbs the missing transitions.
Dfa parse_dfa(const std::string& text, bool complete = false);

std::string to_text(const Dfa& d);

enum class PatternKind { Exact, Prefix, Infix, All };

/// Exact -> accepts {w}; Prefix -> w Sigma*; Infix -> Sigma* w Sigma*
/// (string-matching automaton, |w|+1 states, absorbing accept); All -> Sigma*.
Dfa build_pattern_dfa(PatternKind kind, const std::vector<std::string>& w,
                      const std::vector<std::string>& alphabet);

/// Runs the extended transition function from the start state.
std::pair<std::size_t, bool> run(const Dfa& d, const std::vector<std::string>& word);

}  // namespace regprob

#endif
