#ifndef REGPROB_BALANCE_HPP
#define REGPROB_BALANCE_HPP

#include <cstddef>

#include "regprob/rational.hpp"

namespace regprob {

/// Vector over triples (s, A, t), flattened as (s*n + A)*d + t — the same
/// canonical order the product construction uses.
struct TripleVector {
    std::size_t d = 0;
    std::size_t n = 0;
    RatVector values;

    std::size_t index(std::size_t s, std::size_t a, std::size_t t) const {
        return (s * n + a) * d + t;
    }
    const Rational& at(std::size_t s, std::size_t a, std::size_t t) const {
        return values[index(s, a, t)];
    }
    Rational& at(std::size_t s, std::size_t a, std::size_t t) {
        return values[index(s, a, t)];
    }
};

struct TripleMatrix {
    std::size_t d = 0;
    std::size_t n = 0;
    RatMatrix values;

    std::size_t index(std::size_t s, std::size_t a, std::size_t t) const {
        return (s * n + a) * d + t;
    }
};

/// Balanced: for every nonterminal A, the sum over t of y[(s,A,t)] does not
/// depend on the state s. Checked with exact rational equality.
bool is_balanced_vector(const TripleVector& y);

/// Checks both matrix balance conditions exactly:
///   sum_t M[(sBt),(uCv)] independent of v, and
///   sum_{t,u} M[(sBt),(uCv)] independent of (s,v).
bool is_balanced_matrix(const TripleMatrix& m);

/// Strict mode returns the common row sum (throws NotBalanced on unbalanced
/// input); lenient mode returns min over s of the row sums.
RatVector collapse_vector(const TripleVector& y, bool strict);

/// Collapse of a balanced matrix: entry (B,C) = sum_{t,u} M[(sBt),(uCv)],
/// well-defined independent of (s,v); asserted, not assumed.
RatMatrix collapse_matrix(const TripleMatrix& m);

/// Largest |row-sum difference| over all (A, s, s') pairs; zero iff balanced.
Rational balance_defect(const TripleVector& y);

}  // namespace regprob

#endif
