#include "regprob/estimation.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

#include "regprob/analysis.hpp"
#include "regprob/equations.hpp"
#include "regprob/errors.hpp"

namespace regprob {

DerivationCorpus parse_corpus(const std::string& json_text) {
    nlohmann::json j = nlohmann::json::parse(json_text);
    DerivationCorpus corpus;
    corpus.skeleton = parse_grammar(j.at("skeleton").get<std::string>());
    for (const auto& e : j.at("entries")) {
        CorpusEntry entry;
        for (const auto& r : e.at("rules")) entry.rules.push_back(r.get<std::size_t>());
        auto w = Rational::parse(e.at("weight").get<std::string>());
        if (!w) throw Error("corpus entry with malformed weight");
        entry.weight = *w;
        corpus.entries.push_back(std::move(entry));
    }
    return corpus;
}

nlohmann::json to_json(const DerivationCorpus& corpus) {
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& e : corpus.entries)
        entries.push_back({{"rules", e.rules}, {"weight", e.weight.to_string()}});
    return {{"skeleton", to_text(corpus.skeleton)}, {"entries", entries}};
}

std::vector<std::size_t> derivation_counts(const Wcfg& skeleton,
                                           const std::vector<std::size_t>& rules) {
    std::vector<std::size_t> counts(skeleton.rules.size(), 0);
    // Sentential form as a stack, top = leftmost symbol.
    std::vector<std::string> stack{skeleton.start};
    for (std::size_t ri : rules) {
        if (ri >= skeleton.rules.size())
            throw InvalidDerivationError("rule index out of range");
        // discard leading terminals; the leftmost nonterminal must match
        while (!stack.empty() && skeleton.is_terminal(stack.back())) stack.pop_back();
        if (stack.empty())
            throw InvalidDerivationError("derivation continues after completion");
        const Rule& r = skeleton.rules[ri];
        if (stack.back() != r.left)
            throw InvalidDerivationError("rule " + std::to_string(ri) +
                                         " does not apply to leftmost nonterminal " +
                                         stack.back());
        stack.pop_back();
        for (std::size_t i = r.body.size(); i-- > 0;) stack.push_back(r.body[i]);
        ++counts[ri];
    }
    for (const auto& sym : stack)
        if (skeleton.is_nonterminal(sym))
            throw InvalidDerivationError("derivation is not complete");
    return counts;
}

Wcfg estimate(const DerivationCorpus& corpus) {
    const Wcfg& skel = corpus.skeleton;
    skel.validate();
    if (corpus.entries.empty()) throw Error("estimate: empty corpus");
    Rational total;
    for (const auto& e : corpus.entries) {
        if (!(e.weight > Rational())) throw Error("estimate: entry weight must be positive");
        total += e.weight;
    }
    if (total != Rational(1)) throw Error("estimate: entry weights must sum to exactly 1");

    RatVector rule_mass(skel.rules.size());  // sum_pi P(pi) C(r, pi)
    for (const auto& e : corpus.entries) {
        auto counts = derivation_counts(skel, e.rules);
        for (std::size_t r = 0; r < counts.size(); ++r)
            if (counts[r])
                rule_mass[r] += e.weight * Rational(static_cast<long>(counts[r]));
    }
    for (std::size_t r = 0; r < rule_mass.size(); ++r)
        if (rule_mass[r].is_zero())
            throw UnusedRuleError("skeleton rule " + std::to_string(r) +
                                  " occurs in no corpus entry");
    RatVector nt_mass(skel.nonterminals.size());  // sum_pi P(pi) C(A, pi)
    for (std::size_t r = 0; r < skel.rules.size(); ++r)
        nt_mass[skel.nonterminal_index(skel.rules[r].left)] += rule_mass[r];
    for (std::size_t a = 0; a < nt_mass.size(); ++a) {
        if (skel.rules_of(skel.nonterminals[a]).empty())
            throw UnusedNonterminalError("skeleton nonterminal " + skel.nonterminals[a] +
                                         " has no rules");
        if (nt_mass[a].is_zero())
            throw ZeroDenominatorError("nonterminal " + skel.nonterminals[a] +
                                       " occurs in no corpus entry");
    }

    Wcfg out = skel;
    for (std::size_t r = 0; r < out.rules.size(); ++r)
        out.rules[r].weight =
            rule_mass[r] / nt_mass[skel.nonterminal_index(skel.rules[r].left)];
    if (classify(out) != GrammarClass::ProperScfg)
        throw Error("estimate: output is not proper");  // cannot happen
    return out;
}

EstimationVerdict verify_estimated(const Wcfg& g) {
    if (classify(g) != GrammarClass::ProperScfg)
        throw NotProperError("verify_estimated: grammar is not a proper SCFG");
    SnfWcfg snf = to_snf(g);
    PolySystem base = build_system(snf);
    ReducedSystem reduced = remove_zeros(base);
    EstimationVerdict v;
    if (!reduced.removed.empty()) {
        // zero variables exist, so not every variable is 1
        v.consistent = false;
        v.noncritical = critical_sccs(reduced.system).empty();
        return v;
    }
    v.consistent = one_variables(reduced.system).size() == reduced.system.size();
    v.noncritical = critical_sccs(reduced.system).empty();
    return v;
}

}  // namespace regprob
