#ifndef REGPROB_ESTIMATION_HPP
#define REGPROB_ESTIMATION_HPP

#include <cstddef>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "regprob/grammar.hpp"
#include "regprob/rational.hpp"

namespace regprob {

struct CorpusEntry {
    std::vector<std::size_t> rules;  // rule indices, a complete leftmost derivation from start
    Rational weight;
};

/// A weighted corpus of complete derivations over a grammar skeleton (the
/// skeleton's own weights are placeholders). Weights sum to 1 exactly and
/// every skeleton rule and nonterminal occurs in some entry.
struct DerivationCorpus {
    Wcfg skeleton;
    std::vector<CorpusEntry> entries;
};

/// JSON format: {"skeleton": "<grammar text>",
///               "entries": [{"rules": [0, 2, 1], "weight": "1/2"}, ...]}
DerivationCorpus parse_corpus(const std::string& json_text);
nlohmann::json to_json(const DerivationCorpus& corpus);

/// Validates that the entry is a complete leftmost derivation from the
/// skeleton start and returns per-rule use counts C(r, pi).
std::vector<std::size_t> derivation_counts(const Wcfg& skeleton,
                                           const std::vector<std::size_t>& rules);

/// Supervised estimation:
///   p(A -> gamma) = sum_pi P(pi) C(A -> gamma, pi) / sum_pi P(pi) C(A, pi).
/// The output is a proper SCFG over the skeleton's rules.
Wcfg estimate(const DerivationCorpus& corpus);

struct EstimationVerdict {
    bool consistent = false;   // one_variables covers every SNF variable
    bool noncritical = false;  // critical_sccs empty
};

/// Requires a proper SCFG.
EstimationVerdict verify_estimated(const Wcfg& g);

}  // namespace regprob

#endif
