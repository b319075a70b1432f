#ifndef REGPROB_LINALG_HPP
#define REGPROB_LINALG_HPP

#include <optional>

#include "regprob/rational.hpp"

namespace regprob {

/// Exact Gaussian elimination with partial pivoting.
/// Throws SingularMatrixError when no unique solution exists.
RatVector solve_linear(const RatMatrix& A, const RatVector& b);

/// For a nonnegative square M, computes (I - M)^-1 exactly and returns it
/// only when it exists and is entrywise nonnegative, which certifies
/// rho(M) < 1.  Returns nullopt otherwise (SingularOrNegative).
std::optional<RatMatrix> inverse_if_nonneg(const RatMatrix& M);

/// Decides, exactly, whether A*u = b has a solution u >= 0
/// (phase-1 simplex with Bland's rule).
bool nonneg_solution_exists(const RatMatrix& A, const RatVector& b);

}  // namespace regprob

#endif
