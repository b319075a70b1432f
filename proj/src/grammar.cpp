#include "regprob/grammar.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "regprob/errors.hpp"

namespace regprob {

bool Wcfg::is_nonterminal(const std::string& name) const {
    return std::find(nonterminals.begin(), nonterminals.end(), name) != nonterminals.end();
}

bool Wcfg::is_terminal(const std::string& name) const {
    return std::find(terminals.begin(), terminals.end(), name) != terminals.end();
}

std::size_t Wcfg::nonterminal_index(const std::string& name) const {
    auto it = std::find(nonterminals.begin(), nonterminals.end(), name);
    if (it == nonterminals.end()) throw UnknownNonterminalError("unknown nonterminal: " + name);
    return static_cast<std::size_t>(it - nonterminals.begin());
}

std::vector<std::size_t> Wcfg::rules_of(const std::string& nt) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < rules.size(); ++i)
        if (rules[i].left == nt) out.push_back(i);
    return out;
}

void Wcfg::validate() const {
    if (!is_nonterminal(start)) throw Error("start symbol is not a declared nonterminal");
    for (const auto& nt : nonterminals)
        if (is_terminal(nt)) throw Error("symbol declared both nonterminal and terminal: " + nt);
    for (const auto& r : rules) {
        if (!is_nonterminal(r.left)) throw Error("rule left side is not a nonterminal: " + r.left);
        if (!(r.weight > Rational())) throw Error("nonpositive rule weight for " + r.left);
        for (const auto& s : r.body)
            if (!is_nonterminal(s) && !is_terminal(s))
                throw Error("undeclared symbol in rule body: " + s);
    }
}

SnfKind SnfWcfg::kind_of(const std::string& nt) const {
    auto it = kinds.find(nt);
    if (it == kinds.end()) throw UnknownNonterminalError("no SNF kind for: " + nt);
    return it->second;
}

namespace {

std::vector<std::string> tokenize(const std::string& line) {
    std::istringstream in(line);
    std::vector<std::string> toks;
    std::string t;
    while (in >> t) toks.push_back(t);
    return toks;
}

void check_name(const std::string& name, int line) {
    if (name == "eps") throw ParseError(line, "'eps' is reserved for the empty body");
    if (name == "->") throw ParseError(line, "'->' cannot be a symbol name");
    if (name.find_first_of("[]#") != std::string::npos)
        throw ParseError(line, "symbol name contains a reserved character: " + name);
}

}  // namespace

Wcfg parse_grammar(const std::string& text) {
    Wcfg g;
    std::set<std::string> declared;
    bool in_rules = false;
    bool have_nts = false, have_ts = false, have_start = false;

    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        auto toks = tokenize(raw);
        if (toks.empty()) continue;

        if (!in_rules) {
            const std::string& head = toks[0];
            if (head == "nonterminals:") {
                if (have_nts) throw ParseError(line_no, "duplicate nonterminals section");
                have_nts = true;
                for (std::size_t i = 1; i < toks.size(); ++i) {
                    check_name(toks[i], line_no);
                    if (!declared.insert(toks[i]).second)
                        throw ParseError(line_no, "duplicate symbol: " + toks[i]);
                    g.nonterminals.push_back(toks[i]);
                }
                if (g.nonterminals.empty()) throw ParseError(line_no, "empty nonterminal list");
            } else if (head == "terminals:") {
                if (have_ts) throw ParseError(line_no, "duplicate terminals section");
                have_ts = true;
                for (std::size_t i = 1; i < toks.size(); ++i) {
                    check_name(toks[i], line_no);
                    if (!declared.insert(toks[i]).second)
                        throw ParseError(line_no, "duplicate symbol: " + toks[i]);
                    g.terminals.push_back(toks[i]);
                }
            } else if (head == "start:") {
                if (have_start) throw ParseError(line_no, "duplicate start section");
                have_start = true;
                if (toks.size() != 2) throw ParseError(line_no, "start: expects one name");
                g.start = toks[1];
            } else if (head == "rules:") {
                if (toks.size() != 1) throw ParseError(line_no, "rules: takes no names");
                if (!have_nts || !have_ts || !have_start)
                    throw ParseError(line_no, "rules: before the header sections");
                in_rules = true;
            } else {
                throw ParseError(line_no, "unexpected line: " + head);
            }
            continue;
        }

        // Rule line: <NT> -> <sym>* [<rational>]
        if (toks.size() < 2 || toks[1] != "->")
            throw ParseError(line_no, "expected '<NT> -> ...'");
        Rule r;
        r.left = toks[0];
        if (!g.is_nonterminal(r.left))
            throw UndeclaredSymbolError(line_no, "undeclared nonterminal: " + r.left);
        std::size_t end = toks.size();
        r.weight = Rational(1);
        if (end > 2 && toks[end - 1].front() == '[') {
            const std::string& w = toks[end - 1];
            if (w.back() != ']') throw ParseError(line_no, "malformed weight: " + w);
            auto parsed = Rational::parse(std::string_view(w).substr(1, w.size() - 2));
            if (!parsed) throw ParseError(line_no, "malformed weight: " + w);
            if (!(*parsed > Rational()))
                throw NonpositiveWeightError(line_no, "rule weight must be positive");
            r.weight = *parsed;
            --end;
        }
        if (end == 3 && toks[2] == "eps") {
            // empty body
        } else {
            if (end == 2) throw ParseError(line_no, "empty rule body must be written 'eps'");
            for (std::size_t i = 2; i < end; ++i) {
                if (toks[i] == "eps")
                    throw ParseError(line_no, "'eps' must stand alone as a rule body");
                if (!g.is_nonterminal(toks[i]) && !g.is_terminal(toks[i]))
                    throw UndeclaredSymbolError(line_no, "undeclared symbol: " + toks[i]);
                r.body.push_back(toks[i]);
            }
        }
        g.rules.push_back(std::move(r));
    }
    if (!have_nts) throw ParseError(line_no, "missing nonterminals section");
    if (!have_ts) throw ParseError(line_no, "missing terminals section");
    if (!have_start) throw ParseError(line_no, "missing start section");
    if (!in_rules) throw ParseError(line_no, "missing rules section");
    if (!g.is_nonterminal(g.start)) throw ParseError(line_no, "start symbol not declared");
    g.validate();
    return g;
}

std::string to_text(const Wcfg& g) {
    std::ostringstream out;
    out << "nonterminals:";
    for (const auto& n : g.nonterminals) out << " " << n;
    out << "\nterminals:";
    for (const auto& t : g.terminals) out << " " << t;
    out << "\nstart: " << g.start << "\nrules:\n";
    for (const auto& r : g.rules) {
        out << r.left << " ->";
        if (r.body.empty())
            out << " eps";
        else
            for (const auto& s : r.body) out << " " << s;
        out << " [" << r.weight.to_string() << "]\n";
    }
    return out.str();
}

GrammarClass classify(const Wcfg& g) {
    bool proper = true;
    for (const auto& nt : g.nonterminals) {
        Rational sum;
        for (const auto& r : g.rules)
            if (r.left == nt) sum += r.weight;
        if (sum > Rational(1)) return GrammarClass::Wcfg;
        if (sum != Rational(1)) proper = false;
    }
    return proper ? GrammarClass::ProperScfg : GrammarClass::Scfg;
}

namespace {

struct SnfBuilder {
    const Wcfg& src;
    SnfWcfg out;
    std::set<std::string> used_names;
    std::unordered_map<std::string, std::string> terminal_wrapper;

    explicit SnfBuilder(const Wcfg& g) : src(g) {
        out.g.nonterminals = g.nonterminals;
        out.g.terminals = g.terminals;
        out.g.start = g.start;
        used_names.insert(g.nonterminals.begin(), g.nonterminals.end());
        used_names.insert(g.terminals.begin(), g.terminals.end());
    }

    std::string fresh(std::string base, std::size_t rule_index, std::size_t position) {
        std::string name = base;
        while (used_names.count(name)) name += "'";
        used_names.insert(name);
        out.g.nonterminals.push_back(name);
        out.origin[name] = SnfOrigin{rule_index, position};
        return name;
    }

    std::string wrap_terminal(const std::string& a, std::size_t rule_index, std::size_t position) {
        auto it = terminal_wrapper.find(a);
        if (it != terminal_wrapper.end()) return it->second;
        std::string name = fresh("t." + a, rule_index, position);
        out.kinds[name] = SnfKind::T;
        out.g.rules.push_back(Rule{name, {a}, Rational(1)});
        terminal_wrapper[a] = name;
        return name;
    }

    // Emits the kind-Q binarization chain for head -> body, |body| >= 2.
    void binarize(const std::string& head, const std::vector<std::string>& body,
                  std::size_t rule_index) {
        std::vector<std::string> syms;
        syms.reserve(body.size());
        for (std::size_t i = 0; i < body.size(); ++i)
            syms.push_back(src.is_terminal(body[i]) ? wrap_terminal(body[i], rule_index, i)
                                                    : body[i]);
        std::string left = head;
        for (std::size_t k = 0; k + 2 < syms.size(); ++k) {
            std::string cont = fresh(head + "." + std::to_string(k + 1), rule_index, k + 1);
            out.kinds[left] = SnfKind::Q;
            out.g.rules.push_back(Rule{left, {syms[k], cont}, Rational(1)});
            left = cont;
        }
        out.kinds[left] = SnfKind::Q;
        out.g.rules.push_back(Rule{left, {syms[syms.size() - 2], syms.back()}, Rational(1)});
    }

    void convert() {
        for (const auto& A : src.nonterminals) {
            auto idx = src.rules_of(A);
            bool all_unit = true;
            for (auto i : idx)
                if (src.rules[i].body.size() != 1 || !src.is_nonterminal(src.rules[i].body[0]))
                    all_unit = false;

            if (idx.empty() || all_unit) {
                out.kinds[A] = SnfKind::L;
                for (auto i : idx) out.g.rules.push_back(src.rules[i]);
                continue;
            }
            if (idx.size() == 1 && src.rules[idx[0]].weight == Rational(1)) {
                const Rule& r = src.rules[idx[0]];
                if (r.body.empty() || (r.body.size() == 1 && src.is_terminal(r.body[0]))) {
                    out.kinds[A] = SnfKind::T;
                    out.g.rules.push_back(r);
                } else {
                    binarize(A, r.body, idx[0]);
                }
                continue;
            }
            // Mixed shapes: dispatch through fresh per-rule nonterminals. The
            // whole weight rides on the dispatch step.
            out.kinds[A] = SnfKind::L;
            for (std::size_t j = 0; j < idx.size(); ++j) {
                const Rule& r = src.rules[idx[j]];
                if (r.body.size() == 1 && src.is_nonterminal(r.body[0])) {
                    out.g.rules.push_back(r);
                    continue;
                }
                std::string target = fresh(A + "." + std::to_string(j), idx[j], 0);
                out.g.rules.push_back(Rule{A, {target}, r.weight});
                if (r.body.empty() || (r.body.size() == 1 && src.is_terminal(r.body[0]))) {
                    out.kinds[target] = SnfKind::T;
                    out.g.rules.push_back(Rule{target, r.body, Rational(1)});
                } else {
                    binarize(target, r.body, idx[j]);
                }
            }
        }
    }
};

}  // namespace

SnfWcfg to_snf(const Wcfg& g) {
    g.validate();
    SnfBuilder b(g);
    b.convert();
    validate_snf(b.out, true);
    return std::move(b.out);
}

void validate_snf(const SnfWcfg& g, bool strict) {
    g.g.validate();
    for (const auto& nt : g.g.nonterminals) {
        SnfKind k = g.kind_of(nt);
        auto idx = g.g.rules_of(nt);
        switch (k) {
            case SnfKind::L:
                for (auto i : idx) {
                    const Rule& r = g.g.rules[i];
                    if (r.body.size() != 1 || !g.g.is_nonterminal(r.body[0]))
                        throw Error("kind-L nonterminal " + nt + " has a non-unit rule");
                }
                break;
            case SnfKind::Q:
                if (strict && idx.size() != 1)
                    throw Error("kind-Q nonterminal " + nt + " must have exactly one rule");
                for (auto i : idx) {
                    const Rule& r = g.g.rules[i];
                    if (r.body.size() != 2 || !g.g.is_nonterminal(r.body[0]) ||
                        !g.g.is_nonterminal(r.body[1]) || r.weight != Rational(1))
                        throw Error("kind-Q nonterminal " + nt + " has a non-binary rule");
                }
                break;
            case SnfKind::T:
                if (strict && idx.size() != 1)
                    throw Error("kind-T nonterminal " + nt + " must have exactly one rule");
                for (auto i : idx) {
                    const Rule& r = g.g.rules[i];
                    bool terminal_body =
                        r.body.empty() || (r.body.size() == 1 && g.g.is_terminal(r.body[0]));
                    if (!terminal_body || r.weight != Rational(1))
                        throw Error("kind-T nonterminal " + nt + " has a non-terminal rule");
                }
                break;
        }
    }
}

std::size_t encoding_size(const SnfWcfg& g) {
    std::size_t total = 0;
    for (const auto& nt : g.g.nonterminals) {
        std::size_t clause = 0;
        for (auto i : g.g.rules_of(nt)) {
            const Rule& r = g.g.rules[i];
            clause += bit_length(r.weight.num()) + bit_length(r.weight.den()) + 2 * r.body.size();
        }
        total += std::max<std::size_t>(3, clause);
    }
    return total;
}

Wcfg bad_family(unsigned n) {
    Wcfg g;
    for (unsigned i = 0; i <= n; ++i) g.nonterminals.push_back("A_" + std::to_string(i));
    for (unsigned i = 0; i <= n; ++i) g.nonterminals.push_back("B_" + std::to_string(i));
    g.terminals = {"a", "b", "c"};
    g.start = "A_0";
    Rational half(1, 2);
    for (unsigned i = 0; i < n; ++i) {
        std::string ai = "A_" + std::to_string(i);
        std::string next = "A_" + std::to_string(i + 1);
        g.rules.push_back(Rule{ai, {ai, ai}, half});
        g.rules.push_back(Rule{ai, {next}, half});
    }
    std::string an = "A_" + std::to_string(n);
    std::string bn = "B_" + std::to_string(n);
    g.rules.push_back(Rule{an, {"c", "a", bn, "a", "c"}, Rational(1)});
    for (unsigned i = n; i >= 1; --i) {
        std::string bi = "B_" + std::to_string(i);
        std::string prev = "B_" + std::to_string(i - 1);
        g.rules.push_back(Rule{bi, {prev, prev}, Rational(1)});
    }
    g.rules.push_back(Rule{"B_0", {}, half});
    g.rules.push_back(Rule{"B_0", {"b"}, half});
    return g;
}

}  // namespace regprob
