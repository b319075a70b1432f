#include "regprob/automata.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "regprob/errors.hpp"

namespace regprob {

std::size_t Dfa::state_index(const std::string& name) const {
    auto it = std::find(states.begin(), states.end(), name);
    if (it == states.end()) throw UnknownSymbolError("unknown state: " + name);
    return static_cast<std::size_t>(it - states.begin());
}

std::size_t Dfa::symbol_index(const std::string& name) const {
    auto it = std::find(alphabet.begin(), alphabet.end(), name);
    if (it == alphabet.end()) throw UnknownSymbolError("unknown symbol: " + name);
    return static_cast<std::size_t>(it - alphabet.begin());
}

std::size_t Dfa::accepting_count() const {
    std::size_t c = 0;
    for (bool b : accepting)
        if (b) ++c;
    return c;
}

namespace {

std::vector<std::string> tokenize(const std::string& line) {
    std::istringstream in(line);
    std::vector<std::string> toks;
    std::string t;
    while (in >> t) toks.push_back(t);
    return toks;
}

}  // namespace

Dfa parse_dfa(const std::string& text, bool complete) {
    Dfa d;
    std::vector<std::string> accept_names;
    std::string start_name;
    bool in_delta = false;
    bool have_states = false, have_alpha = false, have_start = false, have_accept = false;
    // (state, symbol) -> target collected before sizes are final
    std::vector<std::vector<long>> table;

    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        auto toks = tokenize(raw);
        if (toks.empty()) continue;
        if (!in_delta) {
            const std::string& head = toks[0];
            if (head == "states:") {
                have_states = true;
                for (std::size_t i = 1; i < toks.size(); ++i) d.states.push_back(toks[i]);
                if (d.states.empty()) throw ParseError(line_no, "empty state list");
            } else if (head == "alphabet:") {
                have_alpha = true;
                for (std::size_t i = 1; i < toks.size(); ++i) d.alphabet.push_back(toks[i]);
            } else if (head == "start:") {
                have_start = true;
                if (toks.size() != 2) throw ParseError(line_no, "start: expects one name");
                start_name = toks[1];
            } else if (head == "accept:") {
                have_accept = true;
                for (std::size_t i = 1; i < toks.size(); ++i) accept_names.push_back(toks[i]);
            } else if (head == "delta:") {
                if (!have_states || !have_alpha || !have_start || !have_accept)
                    throw ParseError(line_no, "delta: before the header sections");
                table.assign(d.states.size(), std::vector<long>(d.alphabet.size(), -1));
                in_delta = true;
            } else {
                throw ParseError(line_no, "unexpected line: " + head);
            }
            continue;
        }
        if (toks.size() != 3) throw ParseError(line_no, "delta row needs '<state> <symbol> <state>'");
        std::size_t s, a, t;
        try {
            s = d.state_index(toks[0]);
            a = d.symbol_index(toks[1]);
            t = d.state_index(toks[2]);
        } catch (const UnknownSymbolError& e) {
            throw ParseError(line_no, e.what());
        }
        if (table[s][a] >= 0) throw DuplicateTransitionError(line_no, "duplicate transition row");
        table[s][a] = static_cast<long>(t);
    }
    if (!in_delta) throw ParseError(line_no, "missing delta section");

    d.start = d.state_index(start_name);
    d.accepting.assign(d.states.size(), false);
    for (const auto& name : accept_names) d.accepting[d.state_index(name)] = true;

    bool partial = false;
    for (const auto& row : table)
        for (long t : row)
            if (t < 0) partial = true;
    if (partial) {
        if (!complete) throw PartialDeltaError("transition table is partial (pass --complete)");
        std::string sink = "_sink";
        while (std::find(d.states.begin(), d.states.end(), sink) != d.states.end()) sink += "'";
        d.states.push_back(sink);
        d.accepting.push_back(false);
        std::size_t sink_id = d.states.size() - 1;
        for (auto& row : table)
            for (long& t : row)
                if (t < 0) t = static_cast<long>(sink_id);
        table.push_back(std::vector<long>(d.alphabet.size(), static_cast<long>(sink_id)));
    }
    d.delta.assign(d.states.size(), std::vector<std::size_t>(d.alphabet.size()));
    for (std::size_t s = 0; s < d.states.size(); ++s)
        for (std::size_t a = 0; a < d.alphabet.size(); ++a)
            d.delta[s][a] = static_cast<std::size_t>(table[s][a]);
    return d;
}

std::string to_text(const Dfa& d) {
    std::ostringstream out;
    out << "states:";
    for (const auto& s : d.states) out << " " << s;
    out << "\nalphabet:";
    for (const auto& a : d.alphabet) out << " " << a;
    out << "\nstart: " << d.states[d.start] << "\naccept:";
    for (std::size_t s = 0; s < d.states.size(); ++s)
        if (d.accepting[s]) out << " " << d.states[s];
    out << "\ndelta:\n";
    for (std::size_t s = 0; s < d.states.size(); ++s)
        for (std::size_t a = 0; a < d.alphabet.size(); ++a)
            out << d.states[s] << " " << d.alphabet[a] << " " << d.states[d.delta[s][a]] << "\n";
    return out.str();
}

Dfa build_pattern_dfa(PatternKind kind, const std::vector<std::string>& w,
                      const std::vector<std::string>& alphabet) {
    Dfa d;
    d.alphabet = alphabet;
    std::vector<std::size_t> word;
    word.reserve(w.size());
    {
        std::set<std::string> alpha(alphabet.begin(), alphabet.end());
        for (const auto& s : w) {
            if (!alpha.count(s)) throw UnknownSymbolError("pattern symbol not in alphabet: " + s);
            word.push_back(static_cast<std::size_t>(
                std::find(alphabet.begin(), alphabet.end(), s) - alphabet.begin()));
        }
    }
    const std::size_t m = word.size();
    const std::size_t k = alphabet.size();

    auto chain_states = [&](std::size_t count) {
        for (std::size_t i = 0; i < count; ++i) d.states.push_back("q" + std::to_string(i));
    };

    switch (kind) {
        case PatternKind::All: {
            chain_states(1);
            d.delta.assign(1, std::vector<std::size_t>(k, 0));
            d.accepting = {true};
            d.start = 0;
            return d;
        }
        case PatternKind::Infix: {
            // String-matching automaton: state = length of the longest prefix
            // of w that is a suffix of the input; accept state absorbing.
            chain_states(m + 1);
            d.delta.assign(m + 1, std::vector<std::size_t>(k, 0));
            // failure function: fail[i] = longest proper border of w[0..i]
            std::vector<std::size_t> fail(m, 0);
            for (std::size_t i = 1; i < m; ++i) {
                std::size_t j = fail[i - 1];
                while (j > 0 && word[i] != word[j]) j = fail[j - 1];
                fail[i] = (word[i] == word[j]) ? j + 1 : 0;
            }
            for (std::size_t i = 0; i <= m; ++i) {
                for (std::size_t a = 0; a < k; ++a) {
                    if (i == m)
                        d.delta[i][a] = m;
                    else if (word[i] == a)
                        d.delta[i][a] = i + 1;
                    else
                        d.delta[i][a] = (i == 0) ? 0 : d.delta[fail[i - 1]][a];
                }
            }
            d.accepting.assign(m + 1, false);
            d.accepting[m] = true;
            d.start = 0;
            return d;
        }
        case PatternKind::Prefix: {
            if (m == 0) return build_pattern_dfa(PatternKind::All, {}, alphabet);
            chain_states(m + 1);
            d.states.push_back("dead");
            std::size_t dead = m + 1;
            d.delta.assign(m + 2, std::vector<std::size_t>(k, dead));
            for (std::size_t i = 0; i < m; ++i) d.delta[i][word[i]] = i + 1;
            for (std::size_t a = 0; a < k; ++a) d.delta[m][a] = m;  // accept absorbs
            d.accepting.assign(m + 2, false);
            d.accepting[m] = true;
            d.start = 0;
            return d;
        }
        case PatternKind::Exact: {
            chain_states(m + 1);
            d.states.push_back("dead");
            std::size_t dead = m + 1;
            d.delta.assign(m + 2, std::vector<std::size_t>(k, dead));
            for (std::size_t i = 0; i < m; ++i) d.delta[i][word[i]] = i + 1;
            d.accepting.assign(m + 2, false);
            d.accepting[m] = true;
            d.start = 0;
            return d;
        }
    }
    throw Error("unreachable pattern kind");
}

std::pair<std::size_t, bool> run(const Dfa& d, const std::vector<std::string>& word) {
    std::size_t s = d.start;
    for (const auto& sym : word) s = d.step(s, d.symbol_index(sym));
    return {s, d.accepting[s]};
}

}  // namespace regprob
