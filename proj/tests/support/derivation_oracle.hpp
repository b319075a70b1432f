#ifndef REGPROB_TESTS_DERIVATION_ORACLE_HPP
#define REGPROB_TESTS_DERIVATION_ORACLE_HPP

#include <string>
#include <vector>

#include "regprob/grammar.hpp"
#include "regprob/rational.hpp"

namespace regprob::testing {

struct StringWeight {
    Rational weight;
    bool truncated = false;  // the step cap bound some derivation; the sum is then a lower bound
};

/// Independent oracle: exact sum of weights of all complete leftmost
/// derivations of w from A, enumerated directly over sentential forms with
/// a step cap. Works on any Wcfg; never touches the polynomial-system or
/// SNF machinery.
StringWeight string_weight(const Wcfg& g, const std::string& start,
                           const std::vector<std::string>& w, unsigned step_cap);

/// All strings over the grammar's terminals with length <= max_len.
std::vector<std::vector<std::string>> all_strings(const std::vector<std::string>& alphabet,
                                                  unsigned max_len);

}  // namespace regprob::testing

#endif
