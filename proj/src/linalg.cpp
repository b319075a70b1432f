#include "regprob/linalg.hpp"

#include <cstddef>
#include <utility>
#include <vector>

namespace regprob {

namespace {

// Forward elimination to row echelon form over the augmented matrix, picking
// in each column the pivot with the shortest numerator/denominator among the
// nonzero candidates (keeps intermediate rationals small).
struct Elimination {
    RatMatrix m;  // n x (n + extra)
    std::size_t n;
    bool singular = false;
};

std::size_t entry_size(const Rational& r) {
    return bit_length(r.num()) + bit_length(r.den());
}

Elimination eliminate(RatMatrix aug, std::size_t n) {
    Elimination e{std::move(aug), n};
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = n;
        std::size_t pivot_size = 0;
        for (std::size_t r = col; r < n; ++r) {
            const Rational& cand = e.m.at(r, col);
            if (cand.is_zero()) continue;
            std::size_t s = entry_size(cand);
            if (pivot == n || s < pivot_size) {
                pivot = r;
                pivot_size = s;
            }
        }
        if (pivot == n) {
            e.singular = true;
            return e;
        }
        if (pivot != col)
            for (std::size_t j = 0; j < e.m.cols; ++j)
                std::swap(e.m.at(col, j), e.m.at(pivot, j));
        const Rational pv = e.m.at(col, col);
        for (std::size_t r = col + 1; r < n; ++r) {
            if (e.m.at(r, col).is_zero()) continue;
            Rational f = e.m.at(r, col) / pv;
            e.m.at(r, col) = Rational();
            for (std::size_t j = col + 1; j < e.m.cols; ++j)
                e.m.at(r, j) -= f * e.m.at(col, j);
        }
    }
    return e;
}

}  // namespace

RatVector solve_linear(const RatMatrix& A, const RatVector& b) {
    if (A.rows != A.cols) throw DimensionMismatchError("solve_linear: matrix not square");
    if (A.rows != b.size()) throw DimensionMismatchError("solve_linear: rhs size mismatch");
    const std::size_t n = A.rows;
    RatMatrix aug(n, n + 1);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) aug.at(i, j) = A.at(i, j);
        aug.at(i, n) = b[i];
    }
    Elimination e = eliminate(std::move(aug), n);
    if (e.singular) throw SingularMatrixError("solve_linear: singular matrix");
    RatVector x(n);
    for (std::size_t ii = n; ii-- > 0;) {
        Rational s = e.m.at(ii, n);
        for (std::size_t j = ii + 1; j < n; ++j) s -= e.m.at(ii, j) * x[j];
        x[ii] = s / e.m.at(ii, ii);
    }
    return x;
}

std::optional<RatMatrix> inverse_if_nonneg(const RatMatrix& M) {
    if (M.rows != M.cols) throw DimensionMismatchError("inverse_if_nonneg: matrix not square");
    const std::size_t n = M.rows;
    for (const auto& x : M.a)
        if (x.is_negative()) throw Error("inverse_if_nonneg: matrix has negative entries");
    // Augment (I - M) with the identity and run Gauss-Jordan.
    RatMatrix aug(n, 2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j)
            aug.at(i, j) = (i == j ? Rational(1) : Rational()) - M.at(i, j);
        aug.at(i, n + i) = Rational(1);
    }
    Elimination e = eliminate(std::move(aug), n);
    if (e.singular) return std::nullopt;
    for (std::size_t ii = n; ii-- > 0;) {
        const Rational pv = e.m.at(ii, ii);
        for (std::size_t j = ii; j < 2 * n; ++j) e.m.at(ii, j) /= pv;
        for (std::size_t r = 0; r < ii; ++r) {
            if (e.m.at(r, ii).is_zero()) continue;
            Rational f = e.m.at(r, ii);
            for (std::size_t j = ii; j < 2 * n; ++j) e.m.at(r, j) -= f * e.m.at(ii, j);
        }
    }
    RatMatrix inv(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            inv.at(i, j) = e.m.at(i, n + j);
            if (inv.at(i, j).is_negative()) return std::nullopt;
        }
    return inv;
}

bool nonneg_solution_exists(const RatMatrix& A, const RatVector& b) {
    if (A.rows != b.size()) throw DimensionMismatchError("nonneg_solution_exists: rhs size mismatch");
    const std::size_t m = A.rows;
    const std::size_t n = A.cols;
    // Phase-1 simplex: minimize the sum of artificial variables for
    // {A u = b, u >= 0}, rows flipped so the rhs is nonnegative.
    // Tableau columns: n structural + m artificial + rhs.
    RatMatrix t(m + 1, n + m + 1);
    for (std::size_t i = 0; i < m; ++i) {
        bool flip = b[i].is_negative();
        for (std::size_t j = 0; j < n; ++j) t.at(i, j) = flip ? -A.at(i, j) : A.at(i, j);
        t.at(i, n + i) = Rational(1);
        t.at(i, n + m) = flip ? -b[i] : b[i];
    }
    // Objective row: sum of artificial rows, negated (minimize sum of artificials).
    for (std::size_t j = 0; j <= n + m; ++j) {
        if (j >= n && j < n + m) continue;  // artificial columns start at cost 0 in the reduced row
        Rational s;
        for (std::size_t i = 0; i < m; ++i) s += t.at(i, j);
        t.at(m, j) = s;
    }
    std::vector<std::size_t> basis(m);
    for (std::size_t i = 0; i < m; ++i) basis[i] = n + i;

    for (;;) {
        // Bland's rule: entering variable = lowest index with positive reduced value.
        std::size_t enter = n + m;
        for (std::size_t j = 0; j < n + m; ++j) {
            if (t.at(m, j) > Rational()) {
                enter = j;
                break;
            }
        }
        if (enter == n + m) break;  // optimal
        // Ratio test, ties broken by lowest basis index (Bland).
        std::size_t leave = m;
        Rational best_ratio;
        for (std::size_t i = 0; i < m; ++i) {
            if (!(t.at(i, enter) > Rational())) continue;
            Rational ratio = t.at(i, n + m) / t.at(i, enter);
            if (leave == m || ratio < best_ratio ||
                (ratio == best_ratio && basis[i] < basis[leave])) {
                leave = i;
                best_ratio = ratio;
            }
        }
        if (leave == m) throw Error("phase-1 simplex: unbounded objective");  // cannot happen
        const Rational pv = t.at(leave, enter);
        for (std::size_t j = 0; j <= n + m; ++j) t.at(leave, j) /= pv;
        for (std::size_t i = 0; i <= m; ++i) {
            if (i == leave || t.at(i, enter).is_zero()) continue;
            Rational f = t.at(i, enter);
            for (std::size_t j = 0; j <= n + m; ++j) t.at(i, j) -= f * t.at(leave, j);
        }
        basis[leave] = enter;
    }
    return t.at(m, n + m).is_zero();
}

}  // namespace regprob
