#include "regprob/balance.hpp"

#include "regprob/errors.hpp"

namespace regprob {

namespace {

Rational row_sum(const TripleVector& y, std::size_t s, std::size_t a) {
    Rational sum;
    for (std::size_t t = 0; t < y.d; ++t) sum += y.at(s, a, t);
    return sum;
}

}  // namespace

bool is_balanced_vector(const TripleVector& y) {
    for (std::size_t a = 0; a < y.n; ++a) {
        Rational ref = row_sum(y, 0, a);
        for (std::size_t s = 1; s < y.d; ++s)
            if (row_sum(y, s, a) != ref) return false;
    }
    return true;
}

bool is_balanced_matrix(const TripleMatrix& m) {
    const std::size_t d = m.d, n = m.n;
    // sum_t M[(sBt),(uCv)] must not depend on v
    for (std::size_t b = 0; b < n; ++b)
        for (std::size_t c = 0; c < n; ++c)
            for (std::size_t s = 0; s < d; ++s)
                for (std::size_t u = 0; u < d; ++u) {
                    Rational ref;
                    for (std::size_t v = 0; v < d; ++v) {
                        Rational sum;
                        for (std::size_t t = 0; t < d; ++t)
                            sum += m.values.at(m.index(s, b, t), m.index(u, c, v));
                        if (v == 0)
                            ref = sum;
                        else if (sum != ref)
                            return false;
                    }
                }
    // sum_{t,u} M[(sBt),(uCv)] must not depend on (s, v)
    for (std::size_t b = 0; b < n; ++b)
        for (std::size_t c = 0; c < n; ++c) {
            Rational ref;
            bool first = true;
            for (std::size_t s = 0; s < d; ++s)
                for (std::size_t v = 0; v < d; ++v) {
                    Rational sum;
                    for (std::size_t t = 0; t < d; ++t)
                        for (std::size_t u = 0; u < d; ++u)
                            sum += m.values.at(m.index(s, b, t), m.index(u, c, v));
                    if (first) {
                        ref = sum;
                        first = false;
                    } else if (sum != ref) {
                        return false;
                    }
                }
        }
    return true;
}

RatVector collapse_vector(const TripleVector& y, bool strict) {
    if (strict && !is_balanced_vector(y))
        throw NotBalancedError("collapse_vector: vector is not balanced");
    RatVector out(y.n);
    for (std::size_t a = 0; a < y.n; ++a) {
        Rational best = row_sum(y, 0, a);
        if (!strict) {
            for (std::size_t s = 1; s < y.d; ++s) {
                Rational v = row_sum(y, s, a);
                if (v < best) best = v;
            }
        }
        out[a] = best;
    }
    return out;
}

RatMatrix collapse_matrix(const TripleMatrix& m) {
    if (!is_balanced_matrix(m)) throw NotBalancedError("collapse_matrix: matrix is not balanced");
    RatMatrix out(m.n, m.n);
    for (std::size_t b = 0; b < m.n; ++b)
        for (std::size_t c = 0; c < m.n; ++c) {
            Rational sum;
            for (std::size_t t = 0; t < m.d; ++t)
                for (std::size_t u = 0; u < m.d; ++u)
                    sum += m.values.at(m.index(0, b, t), m.index(u, c, 0));
            out.at(b, c) = sum;
        }
    return out;
}

Rational balance_defect(const TripleVector& y) {
    Rational worst;
    for (std::size_t a = 0; a < y.n; ++a)
        for (std::size_t s = 0; s < y.d; ++s)
            for (std::size_t s2 = s + 1; s2 < y.d; ++s2) {
                Rational diff = (row_sum(y, s, a) - row_sum(y, s2, a)).abs();
                if (diff > worst) worst = diff;
            }
    return worst;
}

}  // namespace regprob
